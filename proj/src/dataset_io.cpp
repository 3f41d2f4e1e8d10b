#include "kreg/data_mixture.hpp"

#include "kreg/errors.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <vector>

namespace kreg {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

double parse_number(std::string_view field, std::size_t line) {
    field = trim(field);
    if (!field.empty() && field.front() == '+') field.remove_prefix(1);
    double value = 0.0;
    const auto* end = field.data() + field.size();
    const auto [ptr, ec] = std::from_chars(field.data(), end, value);
    if (field.empty() || ec != std::errc() || ptr != end) {
        throw ParseError(line, "non-numeric field '" + std::string(field) + "'");
    }
    if (!std::isfinite(value)) throw ParseError(line, "non-finite value");
    return value;
}

std::vector<std::string_view> split(std::string_view line, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        const auto pos = line.find(sep, start);
        out.push_back(line.substr(start, pos == std::string_view::npos ? pos : pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

std::vector<std::string_view> split_whitespace(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
        const std::size_t start = i;
        while (i < line.size() && !(line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
        if (i > start) out.push_back(line.substr(start, i - start));
    }
    return out;
}

bool skippable(std::string_view line) {
    const auto t = trim(line);
    return t.empty() || t.front() == '#';
}

Dataset build(const std::vector<std::vector<double>>& rows, const std::vector<int>& labels) {
    Dataset data;
    const auto n = static_cast<Eigen::Index>(rows.size());
    const auto d = static_cast<Eigen::Index>(rows.front().size());
    data.X.resize(n, d);
    data.y.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index k = 0; k < d; ++k) data.X(i, k) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)];
        data.y(i) = labels[static_cast<std::size_t>(i)];
    }
    return data;
}

std::string shortest(double value) {
    char buffer[64];
    const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof buffer, value);
    return std::string(buffer, ptr);
}

}  // namespace

Dataset parse_dataset(const std::string& text, DatasetFormat format) {
    std::istringstream in(text);
    std::string line;
    std::size_t line_number = 0;
    std::vector<std::vector<double>> rows;
    std::vector<int> labels;
    std::size_t columns = 0;  // total fields per row including the label

    while (std::getline(in, line)) {
        ++line_number;
        if (skippable(line)) continue;

        if (format == DatasetFormat::NativeCsv) {
            const auto fields = split(line, ',');
            if (columns == 0) {
                if (fields.size() < 2 || trim(fields.back()) != "y") {
                    throw ParseError(line_number, "expected header x1,...,xd,y");
                }
                for (std::size_t k = 0; k + 1 < fields.size(); ++k) {
                    if (trim(fields[k]) != "x" + std::to_string(k + 1)) {
                        throw ParseError(line_number, "expected header column x" + std::to_string(k + 1));
                    }
                }
                columns = fields.size();
                continue;
            }
            if (fields.size() != columns) {
                throw ParseError(line_number, "expected " + std::to_string(columns) + " fields, found " +
                                                  std::to_string(fields.size()));
            }
            std::vector<double> row;
            for (std::size_t k = 0; k + 1 < columns; ++k) row.push_back(parse_number(fields[k], line_number));
            const double label = parse_number(fields.back(), line_number);
            if (label != 1.0 && label != -1.0) throw ParseError(line_number, "label must be -1 or +1");
            rows.push_back(std::move(row));
            labels.push_back(label > 0.0 ? 1 : -1);
        } else {
            const auto fields = split_whitespace(line);
            if (columns == 0) {
                if (fields.size() < 2) throw ParseError(line_number, "expected coordinates followed by a 0/1 label");
                columns = fields.size();
            }
            if (fields.size() != columns) {
                throw ParseError(line_number, "expected " + std::to_string(columns) + " fields, found " +
                                                  std::to_string(fields.size()));
            }
            std::vector<double> row;
            for (std::size_t k = 0; k + 1 < columns; ++k) row.push_back(parse_number(fields[k], line_number));
            const double label = parse_number(fields.back(), line_number);
            if (label != 0.0 && label != 1.0) throw ParseError(line_number, "label must be 0 or 1");
            rows.push_back(std::move(row));
            labels.push_back(label == 1.0 ? 1 : -1);
        }
    }
    if (rows.empty()) throw ParseError(line_number, "no data rows");
    return build(rows, labels);
}

Dataset load_dataset(const std::filesystem::path& path, DatasetFormat format) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open dataset '" + path.string() + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    Dataset data = parse_dataset(buffer.str(), format);
    data.provenance = LoadedFrom{path};
    return data;
}

std::string format_dataset(const Dataset& dataset) {
    std::string out;
    for (Eigen::Index k = 0; k < dataset.X.cols(); ++k) out += "x" + std::to_string(k + 1) + ",";
    out += "y\n";
    for (Eigen::Index i = 0; i < dataset.X.rows(); ++i) {
        for (Eigen::Index k = 0; k < dataset.X.cols(); ++k) out += shortest(dataset.X(i, k)) + ",";
        out += std::to_string(dataset.y(i)) + "\n";
    }
    return out;
}

void save_dataset(const Dataset& dataset, const std::filesystem::path& path) {
    if (dataset.X.rows() != dataset.y.size()) throw InputError("save_dataset: inputs and labels differ in length");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write dataset '" + path.string() + "'");
    out << format_dataset(dataset);
    if (!out) throw InputError("failed writing dataset '" + path.string() + "'");
}

}  // namespace kreg
