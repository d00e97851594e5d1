#pragma once

#include <string>
#include <utility>
#include <vector>

namespace xol::cli {

// Six significant digits, as used for every monetary CSV value.
std::string fmt6(double v);

// Writes `content` to `path` via a temporary file and rename.
void write_atomic(const std::string& path, const std::string& content);

std::string iso_utc_now();

struct SvgSeries {
    std::string label;
    std::vector<std::pair<double, double>> points;
    // Optional confidence band, one (lo, hi) per point.
    std::vector<std::pair<double, double>> band;
};

// Minimal static line chart with axes, ticks and a legend.
std::string render_svg(const std::string& title, const std::string& x_label, const std::string& y_label,
                       const std::vector<SvgSeries>& series, bool equality_line = false);

} // namespace xol::cli
