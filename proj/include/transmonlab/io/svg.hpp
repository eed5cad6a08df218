#pragma once

// Minimal static SVG charts: line plots with linear or log y axes and
// raster heatmaps with a colour bar. Output depends only on the inputs.

#include <string>
#include <vector>

namespace tlab::io {

struct LineSeries {
    std::string name;
    std::vector<double> x;
    std::vector<double> y;  // NaN (or <= 0 on a log axis) breaks the line
    bool dashed = false;
};

struct LineChart {
    std::string title;
    std::string x_label;
    std::string y_label;
    bool log_y = false;
    std::vector<LineSeries> series;
};

// One <polyline> per unbroken run of points.
std::string render_svg(const LineChart& chart);
// Panels stacked vertically, each with its own axes; panel titles are
// drawn above each panel.
std::string render_svg(const std::string& title, const std::vector<LineChart>& panels);

struct Heatmap {
    std::string title;
    std::string x_label;
    std::string y_label;
    std::string value_label;
    std::size_t nx = 0, ny = 0;
    double x0 = 0.0, y0 = 0.0, x1 = 1.0, y1 = 1.0;  // window covered by the raster
    std::vector<double> values;                     // row-major j * nx + i, row 0 at y0; NaN drawn grey
    bool log_scale = false;                         // colour by log10 of positive values
};

std::string render_svg(const Heatmap& map);

std::string xml_escape(const std::string& text);

}  // namespace tlab::io
