#include "qsc/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace qsc::plot {

namespace {
constexpr double kWidth = 720, kHeight = 440;
constexpr double kLeft = 70, kRight = 20, kTop = 40, kBottom = 50;

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#8c564b"};
}  // namespace

std::string render_svg(const PlotSpec& spec) {
    double xmin = HUGE_VAL, xmax = -HUGE_VAL, ymin = HUGE_VAL, ymax = -HUGE_VAL;
    for (const auto& s : spec.series) {
        for (double v : s.x) {
            xmin = std::min(xmin, v);
            xmax = std::max(xmax, v);
        }
        for (double v : s.y) {
            ymin = std::min(ymin, v);
            ymax = std::max(ymax, v);
        }
    }
    if (spec.has_reference) {
        ymin = std::min(ymin, spec.reference_y);
        ymax = std::max(ymax, spec.reference_y);
    }
    if (!(xmin < xmax)) {
        xmin = 0;
        xmax = 1;
    }
    if (!(ymin < ymax)) {
        ymin = 0;
        ymax = 1;
    }
    const double ypad = 0.05 * (ymax - ymin);
    ymin -= ypad;
    ymax += ypad;

    const double plot_w = kWidth - kLeft - kRight;
    const double plot_h = kHeight - kTop - kBottom;
    auto sx = [&](double x) { return kLeft + (x - xmin) / (xmax - xmin) * plot_w; };
    auto sy = [&](double y) { return kTop + (ymax - y) / (ymax - ymin) * plot_h; };

    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
       << kHeight << "\" viewBox=\"0 0 " << kWidth << " " << kHeight << "\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<text x=\"" << kWidth / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">"
       << spec.title << "</text>\n";

    // axes
    os << "<line x1=\"" << kLeft << "\" y1=\"" << kTop + plot_h << "\" x2=\"" << kLeft + plot_w
       << "\" y2=\"" << kTop + plot_h << "\" stroke=\"black\"/>\n";
    os << "<line x1=\"" << kLeft << "\" y1=\"" << kTop << "\" x2=\"" << kLeft << "\" y2=\""
       << kTop + plot_h << "\" stroke=\"black\"/>\n";
    for (int i = 0; i <= 5; ++i) {
        const double fx = xmin + (xmax - xmin) * i / 5.0;
        const double fy = ymin + (ymax - ymin) * i / 5.0;
        os << "<text x=\"" << fmt(sx(fx)) << "\" y=\"" << kTop + plot_h + 18
           << "\" text-anchor=\"middle\" font-size=\"11\">" << fmt(fx) << "</text>\n";
        os << "<text x=\"" << kLeft - 8 << "\" y=\"" << fmt(sy(fy) + 4)
           << "\" text-anchor=\"end\" font-size=\"11\">" << fmt(fy) << "</text>\n";
    }
    os << "<text x=\"" << kWidth / 2 << "\" y=\"" << kHeight - 10
       << "\" text-anchor=\"middle\" font-size=\"12\">" << spec.x_label << "</text>\n";
    os << "<text x=\"16\" y=\"" << kHeight / 2
       << "\" text-anchor=\"middle\" font-size=\"12\" transform=\"rotate(-90 16 "
       << kHeight / 2 << ")\">" << spec.y_label << "</text>\n";

    if (spec.has_reference) {
        os << "<path d=\"M " << fmt(sx(xmin)) << " " << fmt(sy(spec.reference_y)) << " L "
           << fmt(sx(xmax)) << " " << fmt(sy(spec.reference_y))
           << "\" stroke=\"#888\" stroke-dasharray=\"6 4\" fill=\"none\"/>\n";
        os << "<text x=\"" << kLeft + plot_w - 4 << "\" y=\"" << fmt(sy(spec.reference_y) - 6)
           << "\" text-anchor=\"end\" font-size=\"11\" fill=\"#666\">" << spec.reference_label
           << "</text>\n";
    }

    size_t color = 0;
    for (const auto& s : spec.series) {
        if (s.x.empty()) continue;
        os << "<path d=\"";
        for (size_t i = 0; i < s.x.size(); ++i)
            os << (i ? " L " : "M ") << fmt(sx(s.x[i])) << " " << fmt(sy(s.y[i]));
        os << "\" stroke=\"" << kColors[color % 5] << "\" fill=\"none\" stroke-width=\"1.5\"/>\n";
        os << "<text x=\"" << kLeft + 8 << "\" y=\"" << kTop + 14 + 16 * double(color)
           << "\" font-size=\"11\" fill=\"" << kColors[color % 5] << "\">" << s.label
           << "</text>\n";
        ++color;
    }
    os << "</svg>\n";
    return os.str();
}

void emit_plot(const PlotSpec& spec, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("emit_plot: cannot write " + path);
    out << render_svg(spec);
}

}  // namespace qsc::plot
