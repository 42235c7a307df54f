#pragma once

#include <string>
#include <vector>

namespace qsc::plot {

struct Series {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
};

struct PlotSpec {
    std::string title;
    std::string x_label;
    std::string y_label;
    std::vector<Series> series;
    bool has_reference = false;
    double reference_y = 0;  // horizontal reference line
    std::string reference_label;
};

// Self-contained SVG line chart. Byte output is deterministic for identical
// input (fixed canvas, %.6g formatting). An empty spec still yields a valid
// chart with axes only.
std::string render_svg(const PlotSpec& spec);

void emit_plot(const PlotSpec& spec, const std::string& path);

}  // namespace qsc::plot
