#include "ctrpo/svgplot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <stdexcept>

namespace ctrpo {

namespace {

constexpr double kWidth = 860.0;
constexpr double kHeight = 520.0;
constexpr double kLeft = 80.0;
constexpr double kRight = 30.0;
constexpr double kTop = 50.0;
constexpr double kBottom = 60.0;

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
                          "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22"};

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4g", v);
    return buf;
}

}  // namespace

void write_line_chart_svg(const std::string& path, const std::string& title, const std::string& x_label,
                          const std::string& y_label, const std::vector<PlotSeries>& series) {
    if (series.empty()) throw std::invalid_argument("chart needs at least one series");
    double x_min = std::numeric_limits<double>::infinity(), x_max = -x_min;
    double y_min = x_min, y_max = -x_min;
    for (const PlotSeries& s : series) {
        if (s.x.empty() || s.x.size() != s.y.size())
            throw std::invalid_argument("series '" + s.name + "' has bad point lists");
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            x_min = std::min(x_min, s.x[i]);
            x_max = std::max(x_max, s.x[i]);
            y_min = std::min(y_min, s.y[i]);
            y_max = std::max(y_max, s.y[i]);
        }
    }
    if (!(x_max >= x_min) || !(y_max >= y_min)) throw std::invalid_argument("non-finite chart data");
    if (x_max == x_min) x_max = x_min + 1.0;
    if (y_max == y_min) {
        y_min -= 0.5;
        y_max += 0.5;
    } else {
        const double pad = 0.05 * (y_max - y_min);
        y_min -= pad;
        y_max += pad;
    }

    const double plot_w = kWidth - kLeft - kRight;
    const double plot_h = kHeight - kTop - kBottom;
    const auto sx = [&](double v) { return kLeft + (v - x_min) / (x_max - x_min) * plot_w; };
    const auto sy = [&](double v) { return kTop + plot_h - (v - y_min) / (y_max - y_min) * plot_h; };

    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
        << "\" font-family=\"sans-serif\" font-size=\"13\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<text x=\"" << kWidth / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">" << title
        << "</text>\n";

    // Axes with ticks.
    out << "<line x1=\"" << kLeft << "\" y1=\"" << kTop + plot_h << "\" x2=\"" << kLeft + plot_w << "\" y2=\""
        << kTop + plot_h << "\" stroke=\"black\"/>\n";
    out << "<line x1=\"" << kLeft << "\" y1=\"" << kTop << "\" x2=\"" << kLeft << "\" y2=\"" << kTop + plot_h
        << "\" stroke=\"black\"/>\n";
    const int ticks = 5;
    for (int i = 0; i <= ticks; ++i) {
        const double fx = x_min + (x_max - x_min) * i / ticks;
        const double fy = y_min + (y_max - y_min) * i / ticks;
        out << "<line x1=\"" << sx(fx) << "\" y1=\"" << kTop + plot_h << "\" x2=\"" << sx(fx) << "\" y2=\""
            << kTop + plot_h + 5 << "\" stroke=\"black\"/>\n";
        out << "<text x=\"" << sx(fx) << "\" y=\"" << kTop + plot_h + 20 << "\" text-anchor=\"middle\">"
            << fmt(fx) << "</text>\n";
        out << "<line x1=\"" << kLeft - 5 << "\" y1=\"" << sy(fy) << "\" x2=\"" << kLeft << "\" y2=\""
            << sy(fy) << "\" stroke=\"black\"/>\n";
        out << "<text x=\"" << kLeft - 8 << "\" y=\"" << sy(fy) + 4 << "\" text-anchor=\"end\">" << fmt(fy)
            << "</text>\n";
    }
    out << "<text x=\"" << kLeft + plot_w / 2 << "\" y=\"" << kHeight - 12 << "\" text-anchor=\"middle\">"
        << x_label << "</text>\n";
    out << "<text x=\"18\" y=\"" << kTop + plot_h / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
        << kTop + plot_h / 2 << ")\">" << y_label << "</text>\n";

    for (std::size_t si = 0; si < series.size(); ++si) {
        const char* color = kPalette[si % (sizeof(kPalette) / sizeof(kPalette[0]))];
        out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.8\" points=\"";
        for (std::size_t i = 0; i < series[si].x.size(); ++i)
            out << sx(series[si].x[i]) << "," << sy(series[si].y[i]) << " ";
        out << "\"/>\n";
        const double ly = kTop + 16 + 18 * static_cast<double>(si);
        out << "<line x1=\"" << kLeft + plot_w - 150 << "\" y1=\"" << ly - 4 << "\" x2=\""
            << kLeft + plot_w - 125 << "\" y2=\"" << ly - 4 << "\" stroke=\"" << color
            << "\" stroke-width=\"3\"/>\n";
        out << "<text x=\"" << kLeft + plot_w - 118 << "\" y=\"" << ly << "\">" << series[si].name
            << "</text>\n";
    }
    out << "</svg>\n";
    if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

}  // namespace ctrpo
