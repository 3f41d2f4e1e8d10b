#include "kreg/svg.hpp"

#include "kreg/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace kreg {

namespace {

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                    "#9467bd", "#8c564b", "#e377c2", "#17becf"};

std::string fixed(double value, int digits = 2) {
    char buffer[64];
    std::snprintf(buffer, sizeof buffer, "%.*f", digits, value);
    std::string s(buffer);
    if (s == "-0.00" || s == "-0.0" || s == "-0") s.erase(0, 1);
    return s;
}

std::string tick_label(double value) {
    char buffer[64];
    std::snprintf(buffer, sizeof buffer, "%.3g", value);
    return buffer;
}

std::string escape(const std::string& text) {
    std::string out;
    for (char c : text) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

struct Range {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();

    void include(double v) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    void pad() {
        if (hi - lo < 1e-12) {
            lo -= 0.5;
            hi += 0.5;
        }
    }
};

}  // namespace

SvgDocument render_svg(const std::vector<PlotSeries>& series, const PlotSpec& spec) {
    if (series.empty()) throw RenderError("render_svg: no series");
    SvgDocument doc;

    std::vector<std::vector<double>> ys;
    Range xr;
    Range yr;
    for (const auto& s : series) {
        if (s.x.empty()) throw RenderError("render_svg: series '" + s.label + "' is empty");
        if (s.x.size() != s.y.size()) throw RenderError("render_svg: series '" + s.label + "' has mismatched lengths");
        std::vector<double> plotted;
        plotted.reserve(s.y.size());
        for (std::size_t k = 0; k < s.y.size(); ++k) {
            double v = s.y[k];
            if (spec.log_y) {
                if (std::isfinite(v) && v <= kLogFloor) {
                    v = kLogFloor;
                    ++doc.clipped_values;
                }
                v = std::log10(v);
            }
            if (!std::isfinite(v) || !std::isfinite(s.x[k])) {
                throw RenderError("render_svg: non-finite value in series '" + s.label + "'");
            }
            xr.include(s.x[k]);
            yr.include(v);
            plotted.push_back(v);
        }
        ys.push_back(std::move(plotted));
    }
    if (spec.reference_y) {
        const double r = spec.log_y ? std::log10(std::max(*spec.reference_y, kLogFloor)) : *spec.reference_y;
        if (!std::isfinite(r)) throw RenderError("render_svg: non-finite reference line");
        yr.include(r);
    }
    xr.pad();
    yr.pad();

    const double left = 70.0;
    const double right = spec.width - 170.0;
    const double top = 40.0;
    const double bottom = spec.height - 55.0;
    auto px = [&](double x) {
        const double u = (x - xr.lo) / (xr.hi - xr.lo);
        return spec.reverse_x ? right - u * (right - left) : left + u * (right - left);
    };
    auto py = [&](double y) { return bottom - (y - yr.lo) / (yr.hi - yr.lo) * (bottom - top); };

    std::string& out = doc.text;
    out += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(spec.width) + "\" height=\"" +
           std::to_string(spec.height) + "\" viewBox=\"0 0 " + std::to_string(spec.width) + " " +
           std::to_string(spec.height) + "\">\n";
    out += "<metadata>log_y=" + std::string(spec.log_y ? "true" : "false") +
           " clip_floor=1e-16 clipped_values=" + std::to_string(doc.clipped_values) + "</metadata>\n";
    out += "<rect x=\"0\" y=\"0\" width=\"" + std::to_string(spec.width) + "\" height=\"" +
           std::to_string(spec.height) + "\" fill=\"white\"/>\n";
    out += "<text x=\"" + fixed((left + right) / 2) + "\" y=\"22\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"15\">" +
           escape(spec.title) + "</text>\n";
    out += "<rect x=\"" + fixed(left) + "\" y=\"" + fixed(top) + "\" width=\"" + fixed(right - left) + "\" height=\"" +
           fixed(bottom - top) + "\" fill=\"none\" stroke=\"black\"/>\n";

    constexpr int kTicks = 5;
    for (int t = 0; t <= kTicks; ++t) {
        const double xv = xr.lo + (xr.hi - xr.lo) * t / kTicks;
        const double yv = yr.lo + (yr.hi - yr.lo) * t / kTicks;
        const double x = px(xv);
        const double y = py(yv);
        out += "<line x1=\"" + fixed(x) + "\" y1=\"" + fixed(bottom) + "\" x2=\"" + fixed(x) + "\" y2=\"" +
               fixed(bottom + 5) + "\" stroke=\"black\"/>\n";
        out += "<text x=\"" + fixed(x) + "\" y=\"" + fixed(bottom + 18) +
               "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" + tick_label(xv) + "</text>\n";
        out += "<line x1=\"" + fixed(left - 5) + "\" y1=\"" + fixed(y) + "\" x2=\"" + fixed(left) + "\" y2=\"" +
               fixed(y) + "\" stroke=\"black\"/>\n";
        out += "<text x=\"" + fixed(left - 8) + "\" y=\"" + fixed(y + 4) +
               "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" + tick_label(yv) + "</text>\n";
    }
    out += "<text x=\"" + fixed((left + right) / 2) + "\" y=\"" + fixed(spec.height - 12.0) +
           "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">" + escape(spec.x_label) + "</text>\n";
    out += "<text x=\"16\" y=\"" + fixed((top + bottom) / 2) + "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" transform=\"rotate(-90 16 " +
           fixed((top + bottom) / 2) + ")\">" + escape(spec.log_y ? "log10 " + spec.y_label : spec.y_label) + "</text>\n";

    if (spec.reference_y) {
        const double r = spec.log_y ? std::log10(std::max(*spec.reference_y, kLogFloor)) : *spec.reference_y;
        out += "<line x1=\"" + fixed(left) + "\" y1=\"" + fixed(py(r)) + "\" x2=\"" + fixed(right) + "\" y2=\"" +
               fixed(py(r)) + "\" stroke=\"gray\" stroke-dasharray=\"6,4\"/>\n";
    }

    for (std::size_t s = 0; s < series.size(); ++s) {
        const char* color = kPalette[s % std::size(kPalette)];
        out += "<polyline fill=\"none\" stroke=\"" + std::string(color) + "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t k = 0; k < series[s].x.size(); ++k) {
            if (k > 0) out += ' ';
            out += fixed(px(series[s].x[k])) + "," + fixed(py(ys[s][k]));
        }
        out += "\"/>\n";
        const double ly = top + 12.0 + 18.0 * static_cast<double>(s);
        out += "<line x1=\"" + fixed(right + 12) + "\" y1=\"" + fixed(ly) + "\" x2=\"" + fixed(right + 36) + "\" y2=\"" +
               fixed(ly) + "\" stroke=\"" + color + "\" stroke-width=\"2\"/>\n";
        out += "<text x=\"" + fixed(right + 42) + "\" y=\"" + fixed(ly + 4) +
               "\" font-family=\"sans-serif\" font-size=\"11\">" + escape(series[s].label) + "</text>\n";
    }
    if (spec.reference_y && !spec.reference_label.empty()) {
        const double ly = top + 12.0 + 18.0 * static_cast<double>(series.size());
        out += "<line x1=\"" + fixed(right + 12) + "\" y1=\"" + fixed(ly) + "\" x2=\"" + fixed(right + 36) + "\" y2=\"" +
               fixed(ly) + "\" stroke=\"gray\" stroke-dasharray=\"6,4\"/>\n";
        out += "<text x=\"" + fixed(right + 42) + "\" y=\"" + fixed(ly + 4) +
               "\" font-family=\"sans-serif\" font-size=\"11\">" + escape(spec.reference_label) + "</text>\n";
    }
    out += "</svg>\n";
    return doc;
}

}  // namespace kreg
