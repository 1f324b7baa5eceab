#pragma once

#include <string>
#include <vector>

namespace wallmem {

struct PlotSeries {
    std::string label;
    std::vector<double> xs;
    std::vector<double> ys;
    bool line = true;
    bool markers = false;
};

struct PlotSpec {
    std::string title;
    std::string x_label;
    std::string y_label;
    bool log_x = true;
    bool log_y = false;
    std::vector<PlotSeries> series;
};

/// Self-contained SVG line plot. Points that cannot be placed (non-finite, or
/// non-positive on a log axis) are dropped and break the line.
std::string render_svg(const PlotSpec& spec);

}  // namespace wallmem
