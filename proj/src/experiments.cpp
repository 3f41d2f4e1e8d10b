#include "kreg/experiments.hpp"

#include "kreg/errors.hpp"
#include "kreg/model_io.hpp"
#include "kreg/parallel.hpp"
#include "kreg/rng.hpp"

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

namespace kreg {

namespace {

// Seed streams derived from the single experiment seed.
constexpr std::uint64_t kStreamModel = 0;
constexpr std::uint64_t kStreamTrain = 1;
constexpr std::uint64_t kStreamTest = 2;
constexpr std::uint64_t kStreamBayes = 3;
constexpr std::uint64_t kStreamGauss = 4;

constexpr int kPanelColumns = 16;

std::string number(double value) {
    char buffer[64];
    const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof buffer, value);
    return std::string(buffer, ptr);
}

double parse_double(const std::string& key, const std::string& text) {
    double value = 0.0;
    const auto* begin = text.data();
    const auto* end = begin + text.size();
    if (!text.empty() && text.front() == '+') ++begin;
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (text.empty() || ec != std::errc() || ptr != end) throw InputError(key + ": expected a number, got '" + text + "'");
    return value;
}

long parse_long(const std::string& key, const std::string& text) {
    long value = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (text.empty() || ec != std::errc() || ptr != text.data() + text.size()) {
        throw InputError(key + ": expected an integer, got '" + text + "'");
    }
    return value;
}

std::vector<std::string> split_list(const std::string& text, char sep) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(text);
    while (std::getline(in, item, sep)) {
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::string gamma_label(double gamma) { return "gamma=" + number(gamma); }

struct Inputs {
    Dataset train;
    std::optional<Dataset> test;
    std::optional<MixtureModel> model;
};

Dataset materialize(const DataSource& source, const ExperimentConfig& config,
                    const std::optional<MixtureModel>& model, std::uint64_t stream) {
    switch (source.kind) {
        case DataSource::Kind::Generate: return sample_dataset(*model, source.count, derive_seed(config.seed, stream));
        case DataSource::Kind::Gauss1d: {
            Dataset data;
            data.X = sample_standard_normal_1d(source.count, derive_seed(config.seed, kStreamGauss + stream));
            data.y = Labels::Ones(source.count);
            data.provenance = GeneratedFrom{config.seed};
            return data;
        }
        case DataSource::Kind::File: return load_dataset(source.path, source.format);
    }
    throw InputError("unknown data source");
}

Inputs resolve_inputs(const ExperimentConfig& config) {
    Inputs inputs;
    const bool generates = config.train.kind == DataSource::Kind::Generate ||
                           (config.test && config.test->kind == DataSource::Kind::Generate);
    if (generates) inputs.model = sample_mixture_model(derive_seed(config.seed, kStreamModel));
    inputs.train = materialize(config.train, config, inputs.model, kStreamTrain);
    if (config.test) inputs.test = materialize(*config.test, config, inputs.model, kStreamTest);
    return inputs;
}

void require_labeled(const DataSource& source, const std::string& role) {
    if (source.kind == DataSource::Kind::Gauss1d) {
        throw InputError(role + " data must be labeled; gauss1d sources carry no labels");
    }
}

std::vector<std::pair<std::string, std::string>> metadata_for(const ExperimentConfig& config) {
    auto meta = config.echo();
    meta.insert(meta.begin(), {"version", kVersion});
    std::string regenerate = "kreg " + config.command;
    for (const auto& [key, value] : config.echo()) {
        if (key == "command") continue;
        regenerate += " --" + key + " " + value;
    }
    meta.emplace_back("regenerate", regenerate);
    return meta;
}

PathSpec path_spec(const ExperimentConfig& config, double gamma) {
    return PathSpec{config.loss, KernelSpec::radial(gamma), config.tolerance, config.max_iterations};
}

std::string with_context(double gamma, const char* what) {
    return "gamma=" + number(gamma) + ": " + what;
}

// Runs body(g) for every gamma concurrently, adding gamma context to errors.
template <typename Body>
void for_each_gamma(const std::vector<double>& gammas, Body&& body) {
    parallel_for(gammas.size(), [&](std::size_t g) {
        try {
            body(g);
        } catch (const ConvergenceError& e) {
            throw ConvergenceError(with_context(gammas[g], e.what()), e.last_objective(), e.residual());
        } catch (const InputError& e) {
            throw InputError(with_context(gammas[g], e.what()));
        } catch (const NumericError& e) {
            throw NumericError(with_context(gammas[g], e.what()));
        }
    });
}

}  // namespace

std::string DataSource::text() const {
    switch (kind) {
        case Kind::Generate: return "gen:" + std::to_string(count);
        case Kind::Gauss1d: return "gauss1d:" + std::to_string(count);
        case Kind::File: return (format == DatasetFormat::EslMixture ? "esl:" : "csv:") + path.string();
    }
    return {};
}

DataSource parse_data_source(const std::string& text) {
    DataSource source;
    auto positive_count = [&](const std::string& digits) {
        const long n = parse_long("data source", digits);
        if (n < 1) throw InputError("data source count must be positive");
        return static_cast<int>(n);
    };
    if (text.rfind("gen:", 0) == 0) {
        source.kind = DataSource::Kind::Generate;
        source.count = positive_count(text.substr(4));
    } else if (text.rfind("gauss1d:", 0) == 0) {
        source.kind = DataSource::Kind::Gauss1d;
        source.count = positive_count(text.substr(8));
    } else if (text.rfind("esl:", 0) == 0) {
        source.kind = DataSource::Kind::File;
        source.format = DatasetFormat::EslMixture;
        source.path = text.substr(4);
    } else if (text.rfind("csv:", 0) == 0) {
        source.kind = DataSource::Kind::File;
        source.format = DatasetFormat::NativeCsv;
        source.path = text.substr(4);
    } else {
        if (text.empty()) throw InputError("empty data source");
        source.kind = DataSource::Kind::File;
        source.path = text;
        source.format = source.path.extension() == ".csv" ? DatasetFormat::NativeCsv : DatasetFormat::EslMixture;
    }
    return source;
}

std::vector<double> LambdaGridSpec::values() const { return log_lambda_grid(max, min, count); }

std::string LambdaGridSpec::text() const { return number(min) + ":" + number(max) + ":" + std::to_string(count); }

LambdaGridSpec parse_lambda_grid(const std::string& text) {
    const auto parts = split_list(text, ':');
    if (parts.size() != 3) throw InputError("lambda-grid: expected MIN:MAX:COUNT, got '" + text + "'");
    LambdaGridSpec grid;
    grid.min = parse_double("lambda-grid", parts[0]);
    grid.max = parse_double("lambda-grid", parts[1]);
    grid.count = static_cast<int>(parse_long("lambda-grid", parts[2]));
    (void)grid.values();  // validates
    return grid;
}

void ExperimentConfig::validate() const {
    if (gammas.empty()) throw InputError("at least one gamma is required");
    for (double g : gammas) {
        if (!(g > 0.0 && std::isfinite(g))) throw InputError("gammas must be positive");
    }
    (void)lambda_grid.values();
    if (!(rank_threshold > 0.0)) throw InputError("rank-threshold must be positive");
    if (!(deviance_scale > 0.0 && std::isfinite(deviance_scale))) throw InputError("deviance-scale must be positive");
    if (!(lambda > 0.0)) throw InputError("lambda must be positive");
    if (!(tolerance > 0.0)) throw InputError("tolerance must be positive");
    if (max_iterations < 1) throw InputError("max-iterations must be at least 1");
    if (bayes_draws < 1000) throw InputError("bayes-draws must be at least 1000");
    for (const auto& f : formats) {
        if (f != "csv" && f != "json" && f != "svg") throw InputError("unknown format '" + f + "'");
    }
}

std::vector<std::pair<std::string, std::string>> ExperimentConfig::echo() const {
    std::string gamma_text;
    for (std::size_t g = 0; g < gammas.size(); ++g) gamma_text += (g ? "," : "") + number(gammas[g]);
    std::vector<std::pair<std::string, std::string>> out{
        {"command", command},
        {"seed", std::to_string(seed)},
        {"gammas", gamma_text},
        {"lambda-grid", lambda_grid.text()},
        {"loss", to_string(loss)},
        {"train", train.text()},
    };
    if (test) out.emplace_back("test", test->text());
    out.emplace_back("rank-threshold", number(rank_threshold));
    out.emplace_back("deviance-scale", number(deviance_scale));
    out.emplace_back("lambda", number(lambda));
    out.emplace_back("tolerance", number(tolerance));
    out.emplace_back("max-iterations", std::to_string(max_iterations));
    out.emplace_back("bayes-draws", std::to_string(bayes_draws));
    return out;
}

ExperimentConfig default_config(const std::string& command) {
    ExperimentConfig config;
    config.command = command;
    if (command == "table1") {
        config.gammas = {5.0, 1.0, 0.5, 0.1};
        // the narrowest kernel needs lambda well below 1e-4 to separate every training point
        config.lambda_grid.min = 1e-8;
    } else if (command == "spectra") {
        config.train = parse_data_source("gen:100");
    } else if (command == "eigpanel") {
        config.gammas = {1.0};
        config.train = parse_data_source("gauss1d:50");
    } else if (command == "errcurves") {
        config.test = parse_data_source("gen:1000");
    } else if (command == "losscmp") {
    } else if (command == "fit") {
        config.gammas = {1.0};
    } else if (command == "gen-data") {
        config.test = parse_data_source("gen:1000");
    } else {
        throw InputError("unknown command '" + command + "'");
    }
    return config;
}

void apply_setting(ExperimentConfig& config, const std::string& raw_key, const std::string& raw_value) {
    const std::string key = trim(raw_key);
    const std::string value = trim(raw_value);
    if (key == "seed") {
        const long seed = parse_long(key, value);
        if (seed < 0) throw InputError("seed must be non-negative");
        config.seed = static_cast<std::uint64_t>(seed);
    } else if (key == "gamma" || key == "gammas") {
        config.gammas.clear();
        for (const auto& item : split_list(value, ',')) config.gammas.push_back(parse_double(key, trim(item)));
        if (config.gammas.empty()) throw InputError("gammas: empty list");
    } else if (key == "lambda-grid") {
        config.lambda_grid = parse_lambda_grid(value);
    } else if (key == "loss") {
        config.loss = parse_loss(value);
    } else if (key == "train") {
        config.train = parse_data_source(value);
    } else if (key == "test") {
        if (value == "none") config.test.reset();
        else config.test = parse_data_source(value);
    } else if (key == "rank-threshold") {
        config.rank_threshold = parse_double(key, value);
    } else if (key == "out") {
        config.output_dir = value;
    } else if (key == "format") {
        config.formats.clear();
        for (const auto& item : split_list(value, ',')) config.formats.insert(trim(item));
    } else if (key == "deviance-scale") {
        config.deviance_scale = parse_double(key, value);
    } else if (key == "lambda") {
        config.lambda = parse_double(key, value);
    } else if (key == "tolerance") {
        config.tolerance = parse_double(key, value);
    } else if (key == "max-iterations") {
        config.max_iterations = static_cast<int>(parse_long(key, value));
    } else if (key == "bayes-draws") {
        config.bayes_draws = parse_long(key, value);
    } else if (key == "command" || key == "version" || key == "regenerate" || key == "n_train" ||
               key == "n_test" || key == "bayes_error" || key == "bayes_standard_error" ||
               key == "svg_clipped_values") {
        // informational metadata; ignored on input
    } else {
        throw InputError("unknown setting '" + key + "'");
    }
}

void apply_config_text(ExperimentConfig& config, const std::string& text) {
    std::istringstream in(text);
    std::string line;
    std::size_t line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        if (trim(line).empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ParseError(line_number, "expected key=value");
        try {
            apply_setting(config, line.substr(0, eq), line.substr(eq + 1));
        } catch (const ParseError&) {
            throw;
        } catch (const InputError& e) {
            throw ParseError(line_number, e.what());
        }
    }
}

void SeriesFile::add_column(std::string column_name, std::vector<double> values) {
    if (!columns.empty() && values.size() != columns.front().size()) {
        throw InputError("series '" + name + "': column '" + column_name + "' has a different length");
    }
    column_names.push_back(std::move(column_name));
    columns.push_back(std::move(values));
}

std::size_t SeriesFile::rows() const { return columns.empty() ? 0 : columns.front().size(); }

const std::vector<double>& SeriesFile::column(const std::string& column_name) const {
    for (std::size_t c = 0; c < column_names.size(); ++c) {
        if (column_names[c] == column_name) return columns[c];
    }
    throw InputError("series '" + name + "' has no column '" + column_name + "'");
}

std::string to_csv(const SeriesFile& file) {
    std::string out;
    for (const auto& [key, value] : file.metadata) out += "# " + key + "=" + value + "\n";
    for (std::size_t c = 0; c < file.column_names.size(); ++c) out += (c ? "," : "") + file.column_names[c];
    out += "\n";
    for (std::size_t r = 0; r < file.rows(); ++r) {
        for (std::size_t c = 0; c < file.columns.size(); ++c) out += (c ? "," : "") + number(file.columns[c][r]);
        out += "\n";
    }
    return out;
}

std::string to_json(const SeriesFile& file) {
    nlohmann::ordered_json doc;
    nlohmann::ordered_json meta = nlohmann::ordered_json::object();
    for (const auto& [key, value] : file.metadata) meta[key] = value;
    doc["name"] = file.name;
    doc["metadata"] = meta;
    nlohmann::ordered_json columns = nlohmann::ordered_json::object();
    for (std::size_t c = 0; c < file.column_names.size(); ++c) columns[file.column_names[c]] = file.columns[c];
    doc["columns"] = columns;
    return doc.dump(2) + "\n";
}

std::vector<std::filesystem::path> write_outputs(const ExperimentOutput& output, const ExperimentConfig& config) {
    std::error_code ec;
    std::filesystem::create_directories(config.output_dir, ec);
    if (ec) throw InputError("cannot create output directory '" + config.output_dir.string() + "'");
    std::vector<std::filesystem::path> written;
    auto write = [&](const std::string& filename, const std::string& content) {
        const auto path = config.output_dir / filename;
        std::ofstream out(path, std::ios::binary);
        if (!out) throw InputError("cannot write '" + path.string() + "'");
        out << content;
        if (!out) throw InputError("failed writing '" + path.string() + "'");
        written.push_back(path);
    };
    for (const auto& file : output.files) {
        if (config.formats.count("csv")) write(file.name + ".csv", to_csv(file));
        if (config.formats.count("json")) write(file.name + ".json", to_json(file));
    }
    if (config.formats.count("svg")) {
        for (const auto& plot : output.plots) write(plot.name + ".svg", plot.document.text);
    }
    for (const auto& [name, content] : output.extra_files) write(name, content);
    return written;
}

double argmin_position(const std::vector<double>& values) {
    if (values.empty()) throw InputError("argmin_position: empty sequence");
    const double best = *std::min_element(values.begin(), values.end());
    double sum = 0.0;
    long count = 0;
    for (std::size_t k = 0; k < values.size(); ++k) {
        if (values[k] == best) {
            sum += static_cast<double>(k);
            ++count;
        }
    }
    return sum / static_cast<double>(count);
}

ExperimentOutput table1(const ExperimentConfig& config) {
    config.validate();
    require_labeled(config.train, "training");
    const Inputs inputs = resolve_inputs(config);
    const auto grid = config.lambda_grid.values();
    const std::size_t count = config.gammas.size();
    std::vector<double> ranks(count), min_errors(count), last_errors(count), lambda_at_min(count);

    for_each_gamma(config.gammas, [&](std::size_t g) {
        const KernelSpec kernel = KernelSpec::radial(config.gammas[g]);
        const EigenDecomposition eig = eigendecompose(gram_matrix(kernel, inputs.train.X));
        ranks[g] = static_cast<double>(effective_rank(eig, config.rank_threshold));
        const PathResult path = lambda_path(path_spec(config, config.gammas[g]), inputs.train.X, inputs.train.y, grid);
        long best = std::numeric_limits<long>::max();
        for (const auto& record : path.records) {
            if (record.training_mistakes < best) {
                best = record.training_mistakes;
                lambda_at_min[g] = record.lambda;
            }
        }
        min_errors[g] = static_cast<double>(best);
        last_errors[g] = static_cast<double>(path.records.back().training_mistakes);
    });

    SeriesFile file;
    file.name = "table1";
    file.metadata = metadata_for(config);
    file.metadata.emplace_back("n_train", std::to_string(inputs.train.size()));
    file.add_column("gamma", config.gammas);
    file.add_column("effective_rank", ranks);
    file.add_column("min_training_errors", min_errors);
    file.add_column("training_errors_at_smallest_lambda", last_errors);
    file.add_column("lambda_at_min", lambda_at_min);
    return ExperimentOutput{{std::move(file)}, {}, {}};
}

ExperimentOutput spectra(const ExperimentConfig& config) {
    config.validate();
    const Inputs inputs = resolve_inputs(config);
    const std::size_t count = config.gammas.size();
    std::vector<Eigen::VectorXd> spectrum(count);
    for_each_gamma(config.gammas, [&](std::size_t g) {
        spectrum[g] = eigendecompose(gram_matrix(KernelSpec::radial(config.gammas[g]), inputs.train.X)).eigenvalues;
    });

    SeriesFile file;
    file.name = "spectra";
    file.metadata = metadata_for(config);
    file.metadata.emplace_back("n_train", std::to_string(inputs.train.size()));
    const auto n = static_cast<std::size_t>(inputs.train.size());
    std::vector<double> index(n);
    std::iota(index.begin(), index.end(), 1.0);
    file.add_column("index", index);
    std::vector<PlotSeries> series;
    for (std::size_t g = 0; g < count; ++g) {
        std::vector<double> values(spectrum[g].data(), spectrum[g].data() + spectrum[g].size());
        file.add_column("eigenvalue_" + gamma_label(config.gammas[g]), values);
        series.push_back(PlotSeries{gamma_label(config.gammas[g]), index, values});
    }

    ExperimentOutput output;
    if (config.formats.count("svg")) {
        PlotSpec spec;
        spec.title = "Eigenvalues of the data kernel matrix";
        spec.x_label = "index";
        spec.y_label = "eigenvalue";
        spec.log_y = true;
        SvgDocument doc = render_svg(series, spec);
        file.metadata.emplace_back("svg_clipped_values", std::to_string(doc.clipped_values));
        output.plots.push_back({"spectra", std::move(doc)});
    }
    output.files.push_back(std::move(file));
    return output;
}

ExperimentOutput eigpanel(const ExperimentConfig& config) {
    config.validate();
    const Inputs inputs = resolve_inputs(config);
    if (inputs.train.dimension() != 1) throw InputError("eigpanel requires one-dimensional inputs");
    if (config.gammas.size() != 1) throw InputError("eigpanel takes exactly one gamma");
    const EigenDecomposition eig = eigendecompose(gram_matrix(KernelSpec::radial(config.gammas.front()), inputs.train.X));
    const FeatureMatrix H = feature_matrix(eig);

    const Eigen::Index n = inputs.train.size();
    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](Eigen::Index a, Eigen::Index b) { return inputs.train.X(a, 0) < inputs.train.X(b, 0); });
    std::vector<double> x;
    for (auto i : order) x.push_back(inputs.train.X(i, 0));

    const int shown = static_cast<int>(std::min<Eigen::Index>(kPanelColumns, n));
    SeriesFile vectors;
    vectors.name = "eigpanel_eigenvectors";
    SeriesFile features;
    features.name = "eigpanel_features";
    vectors.metadata = features.metadata = metadata_for(config);
    vectors.add_column("x", x);
    features.add_column("x", x);
    std::vector<PlotSeries> vector_series;
    std::vector<PlotSeries> feature_series;
    for (int j = 0; j < shown; ++j) {
        std::vector<double> u;
        std::vector<double> h;
        for (auto i : order) {
            u.push_back(eig.eigenvectors(i, j));
            h.push_back(H.columns(i, j));
        }
        vectors.add_column("u" + std::to_string(j + 1), u);
        features.add_column("h" + std::to_string(j + 1), h);
        vector_series.push_back({"u" + std::to_string(j + 1), x, u});
        feature_series.push_back({"h" + std::to_string(j + 1), x, h});
    }

    ExperimentOutput output;
    if (config.formats.count("svg")) {
        PlotSpec spec;
        spec.x_label = "x";
        spec.title = "Eigenvectors of K";
        spec.y_label = "u_j(x)";
        output.plots.push_back({"eigpanel_eigenvectors", render_svg(vector_series, spec)});
        spec.title = "Features (eigenvectors scaled by sqrt eigenvalues)";
        spec.y_label = "h_j(x)";
        output.plots.push_back({"eigpanel_features", render_svg(feature_series, spec)});
    }
    output.files.push_back(std::move(vectors));
    output.files.push_back(std::move(features));
    return output;
}

ExperimentOutput errcurves(const ExperimentConfig& config) {
    config.validate();
    require_labeled(config.train, "training");
    if (!config.test) throw InputError("errcurves requires a test source");
    require_labeled(*config.test, "test");
    const Inputs inputs = resolve_inputs(config);
    const auto grid = config.lambda_grid.values();
    const std::size_t count = config.gammas.size();
    std::vector<PathResult> paths(count);
    for_each_gamma(config.gammas, [&](std::size_t g) {
        paths[g] = lambda_path(path_spec(config, config.gammas[g]), inputs.train.X, inputs.train.y, grid,
                               TestSet{inputs.test->X, inputs.test->y});
    });

    std::optional<BayesErrorEstimate> bayes;
    if (inputs.model) bayes = bayes_error(*inputs.model, config.bayes_draws, derive_seed(config.seed, kStreamBayes));

    SeriesFile curves;
    curves.name = "errcurves";
    curves.metadata = metadata_for(config);
    curves.metadata.emplace_back("n_train", std::to_string(inputs.train.size()));
    curves.metadata.emplace_back("n_test", std::to_string(inputs.test->size()));
    if (bayes) {
        curves.metadata.emplace_back("bayes_error", number(bayes->error));
        curves.metadata.emplace_back("bayes_standard_error", number(bayes->standard_error));
    }
    std::vector<double> gamma_col, lambda_col, log_lambda_col, train_col, test_col;
    SeriesFile summary;
    summary.name = "errcurves_summary";
    summary.metadata = curves.metadata;
    std::vector<double> s_gamma, s_lambda, s_position, s_fraction, s_error;
    std::vector<PlotSeries> series;
    for (std::size_t g = 0; g < count; ++g) {
        PlotSeries s{gamma_label(config.gammas[g]), {}, {}};
        std::vector<double> test_errors;
        for (const auto& record : paths[g].records) {
            gamma_col.push_back(config.gammas[g]);
            lambda_col.push_back(record.lambda);
            log_lambda_col.push_back(std::log10(record.lambda));
            train_col.push_back(record.training_error);
            test_col.push_back(*record.test_error);
            test_errors.push_back(*record.test_error);
            s.x.push_back(std::log10(record.lambda));
            s.y.push_back(*record.test_error);
        }
        const double position = argmin_position(test_errors);
        s_gamma.push_back(config.gammas[g]);
        s_position.push_back(position);
        s_fraction.push_back(grid.size() > 1 ? position / static_cast<double>(grid.size() - 1) : 0.0);
        s_lambda.push_back(grid[static_cast<std::size_t>(std::lround(std::floor(position)))]);
        s_error.push_back(*std::min_element(test_errors.begin(), test_errors.end()));
        series.push_back(std::move(s));
    }
    curves.add_column("gamma", gamma_col);
    curves.add_column("lambda", lambda_col);
    curves.add_column("log10_lambda", log_lambda_col);
    curves.add_column("training_error", train_col);
    curves.add_column("test_error", test_col);
    summary.add_column("gamma", s_gamma);
    summary.add_column("argmin_index", s_position);
    summary.add_column("argmin_fraction", s_fraction);
    summary.add_column("argmin_lambda", s_lambda);
    summary.add_column("min_test_error", s_error);

    ExperimentOutput output;
    if (config.formats.count("svg")) {
        PlotSpec spec;
        spec.title = "Test error along the regularization path";
        spec.x_label = "log10 lambda (heavy regularization on the left)";
        spec.y_label = "test error";
        spec.reverse_x = true;
        if (bayes) {
            spec.reference_y = bayes->error;
            spec.reference_label = "Bayes error";
        }
        output.plots.push_back({"errcurves", render_svg(series, spec)});
    }
    output.files.push_back(std::move(curves));
    output.files.push_back(std::move(summary));
    return output;
}

ExperimentOutput losscmp(const ExperimentConfig& config) {
    config.validate();
    constexpr int kPoints = 601;
    std::vector<double> margin(kPoints), hinge(kPoints), deviance(kPoints);
    for (int k = 0; k < kPoints; ++k) {
        const double yf = -3.0 + k / 100.0;
        margin[static_cast<std::size_t>(k)] = yf;
        hinge[static_cast<std::size_t>(k)] = loss_value(Loss::Hinge, 1, yf);
        deviance[static_cast<std::size_t>(k)] = config.deviance_scale * loss_value(Loss::BinomialDeviance, 1, yf);
    }
    SeriesFile file;
    file.name = "losscmp";
    file.metadata = metadata_for(config);
    file.add_column("yf", margin);
    file.add_column("hinge", hinge);
    file.add_column("deviance", deviance);

    ExperimentOutput output;
    if (config.formats.count("svg")) {
        PlotSpec spec;
        spec.title = "Hinge loss and binomial deviance";
        spec.x_label = "yf";
        spec.y_label = "loss";
        output.plots.push_back({"losscmp", render_svg({{"hinge", margin, hinge}, {"binomial deviance", margin, deviance}}, spec)});
    }
    output.files.push_back(std::move(file));
    return output;
}

ExperimentOutput fit_command(const ExperimentConfig& config) {
    config.validate();
    require_labeled(config.train, "training");
    if (config.test) require_labeled(*config.test, "test");
    if (config.gammas.size() != 1) throw InputError("fit takes exactly one gamma");
    const Inputs inputs = resolve_inputs(config);
    const FitSpec spec{config.loss, KernelSpec::radial(config.gammas.front()), config.lambda, config.tolerance,
                       config.max_iterations};
    const Model model = fit(spec, inputs.train.X, inputs.train.y);

    SeriesFile summary;
    summary.name = "fit_summary";
    summary.metadata = metadata_for(config);
    summary.add_column("gamma", {config.gammas.front()});
    summary.add_column("lambda", {config.lambda});
    summary.add_column("objective", {model.objective_value});
    summary.add_column("intercept", {model.intercept});
    summary.add_column("training_error", {error_rate(classify(model, inputs.train.X), inputs.train.y)});
    if (inputs.test) summary.add_column("test_error", {error_rate(classify(model, inputs.test->X), inputs.test->y)});
    summary.add_column("iterations", {static_cast<double>(model.solver_report.iterations)});
    summary.add_column("converged", {model.solver_report.converged ? 1.0 : 0.0});
    if (model.solver_report.kkt_residual) summary.add_column("kkt_residual", {*model.solver_report.kkt_residual});

    ExperimentOutput output;
    output.files.push_back(std::move(summary));
    output.extra_files.emplace_back("model.json", model_to_json(model));
    return output;
}

ExperimentOutput gen_data(const ExperimentConfig& config) {
    config.validate();
    const Inputs inputs = resolve_inputs(config);
    std::string header;
    for (const auto& [key, value] : metadata_for(config)) header += "# " + key + "=" + value + "\n";
    ExperimentOutput output;
    output.extra_files.emplace_back("train.csv", header + format_dataset(inputs.train));
    if (inputs.test) output.extra_files.emplace_back("test.csv", header + format_dataset(*inputs.test));
    if (inputs.model) {
        SeriesFile means;
        means.name = "mixture_means";
        means.metadata = metadata_for(config);
        std::vector<double> label, x1, x2;
        for (int sign : {1, -1}) {
            const Eigen::MatrixXd& m = sign > 0 ? inputs.model->means_pos : inputs.model->means_neg;
            for (Eigen::Index k = 0; k < m.rows(); ++k) {
                label.push_back(sign);
                x1.push_back(m(k, 0));
                x2.push_back(m(k, 1));
            }
        }
        means.add_column("y", label);
        means.add_column("x1", x1);
        means.add_column("x2", x2);
        output.files.push_back(std::move(means));
    }
    return output;
}

ExperimentOutput run_command(const ExperimentConfig& config) {
    const std::string& c = config.command;
    if (c == "table1") return table1(config);
    if (c == "spectra") return spectra(config);
    if (c == "eigpanel") return eigpanel(config);
    if (c == "errcurves") return errcurves(config);
    if (c == "losscmp") return losscmp(config);
    if (c == "fit") return fit_command(config);
    if (c == "gen-data") return gen_data(config);
    throw InputError("unknown command '" + c + "'");
}

}  // namespace kreg
