#pragma once

#include <optional>
#include <string>
#include <vector>

namespace kreg {

/// Values at or below this are clipped before taking log10 on a log-scale axis.
inline constexpr double kLogFloor = 1e-16;

struct PlotSeries {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
};

struct PlotSpec {
    std::string title;
    std::string x_label;
    std::string y_label;
    bool log_y = false;
    /// Draw the x axis with values decreasing left to right.
    bool reverse_x = false;
    std::optional<double> reference_y;
    std::string reference_label;
    int width = 720;
    int height = 460;
};

struct SvgDocument {
    std::string text;
    long clipped_values = 0;
};

/// Standalone SVG: frame, ticks, one polyline per series, legend, optional dashed
/// horizontal reference line. Output depends only on the inputs. Throws RenderError
/// on an empty series list, an empty series, mismatched lengths, or non-finite
/// values after log clipping.
[[nodiscard]] SvgDocument render_svg(const std::vector<PlotSeries>& series, const PlotSpec& spec);

}  // namespace kreg
