#include "transmonlab/io/svg.hpp"

#include "transmonlab/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>

namespace tlab::io {

namespace {

constexpr double kWidth = 760, kHeight = 480;
constexpr double kLeft = 90, kRight = 190, kTop = 40, kBottom = 60;
constexpr double kPanelHeight = 360;

// Plot area in pixels.
struct Box {
    double left = kLeft, top = kTop, right = kWidth - kRight, bottom = kHeight - kBottom;
};

const std::array<const char*, 10> kPalette{"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                                           "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string tick_label(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", std::abs(v) < 1e-12 ? 0.0 : v);
    return buf;
}

struct Range {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    void add(double v) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    bool valid() const { return lo <= hi; }
};

// Widens a degenerate or empty range so the axis has extent.
Range padded(Range r) {
    if (!r.valid()) return {0.0, 1.0};
    if (r.hi - r.lo <= 1e-12 * std::max(1.0, std::abs(r.hi))) {
        const double d = r.lo == 0.0 ? 1.0 : 0.05 * std::abs(r.lo);
        return {r.lo - d, r.hi + d};
    }
    return r;
}

std::vector<double> nice_ticks(double lo, double hi) {
    const double raw = (hi - lo) / 5.0;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double step = mag;
    for (double m : {1.0, 2.0, 5.0, 10.0}) {
        step = m * mag;
        if (step >= raw) break;
    }
    std::vector<double> out;
    for (double t = std::ceil(lo / step) * step; t <= hi + 1e-9 * step; t += step) out.push_back(t);
    return out;
}

std::string header(const std::string& title, double height = kHeight) {
    std::string s = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(kWidth) + "\" height=\"" +
                    num(height) + "\" viewBox=\"0 0 " + num(kWidth) + " " + num(height) +
                    "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    s += "<text x=\"" + num(kWidth / 2) + "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">" + xml_escape(title) +
         "</text>\n";
    return s;
}

std::string axis_labels(const Box& b, const std::string& x_label, const std::string& y_label) {
    const double cx = (b.left + b.right) / 2;
    const double cy = (b.top + b.bottom) / 2;
    std::string s = "<text x=\"" + num(cx) + "\" y=\"" + num(b.bottom + 45) + "\" text-anchor=\"middle\">" +
                    xml_escape(x_label) + "</text>\n";
    s += "<text x=\"20\" y=\"" + num(cy) + "\" text-anchor=\"middle\" transform=\"rotate(-90 20 " + num(cy) + ")\">" +
         xml_escape(y_label) + "</text>\n";
    return s;
}

struct Frame {
    double x0, x1, y0, y1;  // data range (y in axis units: log10 when log)
    Box box;
    double px(double x) const { return box.left + (x - x0) / (x1 - x0) * (box.right - box.left); }
    double py(double y) const { return box.bottom - (y - y0) / (y1 - y0) * (box.bottom - box.top); }
};

std::string frame_and_ticks(const Frame& f, bool log_y) {
    std::string s;
    const double left = f.box.left, right = f.box.right, bottom = f.box.bottom, top = f.box.top;
    s += "<rect x=\"" + num(left) + "\" y=\"" + num(top) + "\" width=\"" + num(right - left) + "\" height=\"" +
         num(bottom - top) + "\" fill=\"none\" stroke=\"black\"/>\n";
    for (double t : nice_ticks(f.x0, f.x1)) {
        const double x = f.px(t);
        s += "<line x1=\"" + num(x) + "\" y1=\"" + num(bottom) + "\" x2=\"" + num(x) + "\" y2=\"" + num(bottom + 5) +
             "\" stroke=\"black\"/>\n";
        s += "<text x=\"" + num(x) + "\" y=\"" + num(bottom + 18) + "\" text-anchor=\"middle\">" + tick_label(t) +
             "</text>\n";
    }
    std::vector<double> yt;
    if (log_y) {
        const double step = std::max(1.0, std::ceil((f.y1 - f.y0) / 8.0));
        for (double t = std::ceil(f.y0); t <= f.y1 + 1e-9; t += step) yt.push_back(t);
    } else {
        yt = nice_ticks(f.y0, f.y1);
    }
    for (double t : yt) {
        const double y = f.py(t);
        s += "<line x1=\"" + num(left - 5) + "\" y1=\"" + num(y) + "\" x2=\"" + num(left) + "\" y2=\"" + num(y) +
             "\" stroke=\"black\"/>\n";
        const std::string label = log_y ? "1e" + tick_label(t) : tick_label(t);
        s += "<text x=\"" + num(left - 8) + "\" y=\"" + num(y + 4) + "\" text-anchor=\"end\">" + label + "</text>\n";
    }
    return s;
}

// Piecewise-linear approximation of the viridis colour map.
std::string colour(double t) {
    static const std::array<std::array<double, 3>, 5> stops{{{68, 1, 84},
                                                            {59, 82, 139},
                                                            {33, 145, 140},
                                                            {94, 201, 98},
                                                            {253, 231, 37}}};
    t = std::clamp(t, 0.0, 1.0) * (stops.size() - 1);
    const std::size_t k = std::min<std::size_t>(static_cast<std::size_t>(t), stops.size() - 2);
    const double f = t - static_cast<double>(k);
    char buf[8];
    std::snprintf(buf, sizeof buf, "#%02x%02x%02x", static_cast<int>(std::lround(stops[k][0] + f * (stops[k + 1][0] - stops[k][0]))),
                  static_cast<int>(std::lround(stops[k][1] + f * (stops[k + 1][1] - stops[k][1]))),
                  static_cast<int>(std::lround(stops[k][2] + f * (stops[k + 1][2] - stops[k][2]))));
    return buf;
}

}  // namespace

std::string xml_escape(const std::string& text) {
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

namespace {

std::string panel(const LineChart& chart, const Box& box) {
    auto usable = [&](double y) { return std::isfinite(y) && (!chart.log_y || y > 0.0); };
    Range xr, yr;
    for (const auto& s : chart.series) {
        if (s.x.size() != s.y.size()) throw Error("output", "series '" + s.name + "' has mismatched x/y lengths");
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (!std::isfinite(s.x[i]) || !usable(s.y[i])) continue;
            xr.add(s.x[i]);
            yr.add(chart.log_y ? std::log10(s.y[i]) : s.y[i]);
        }
    }
    xr = padded(xr);
    yr = padded(yr);
    if (chart.log_y) {
        yr.lo = std::floor(yr.lo);
        yr.hi = std::ceil(yr.hi);
    }
    const Frame f{xr.lo, xr.hi, yr.lo, yr.hi, box};

    std::string s = frame_and_ticks(f, chart.log_y);
    s += axis_labels(box, chart.x_label, chart.y_label);
    for (std::size_t k = 0; k < chart.series.size(); ++k) {
        const auto& series = chart.series[k];
        const std::string stroke = kPalette[k % kPalette.size()];
        const std::string style = "fill=\"none\" stroke=\"" + stroke + "\" stroke-width=\"1.8\"" +
                                  (series.dashed ? " stroke-dasharray=\"6 4\"" : "");
        std::string points;
        auto flush = [&] {
            if (!points.empty()) s += "<polyline " + style + " points=\"" + points + "\"/>\n";
            points.clear();
        };
        for (std::size_t i = 0; i < series.x.size(); ++i) {
            if (!std::isfinite(series.x[i]) || !usable(series.y[i])) {
                flush();
                continue;
            }
            const double y = chart.log_y ? std::log10(series.y[i]) : series.y[i];
            if (!points.empty()) points += ' ';
            points += num(f.px(series.x[i])) + "," + num(f.py(y));
        }
        flush();
        const double ly = box.top + 10 + 18.0 * static_cast<double>(k);
        const double lx = box.right + 12;
        s += "<line x1=\"" + num(lx) + "\" y1=\"" + num(ly) + "\" x2=\"" + num(lx + 24) + "\" y2=\"" + num(ly) + "\" " +
             style + "/>\n";
        s += "<text x=\"" + num(lx + 30) + "\" y=\"" + num(ly + 4) + "\">" + xml_escape(series.name) + "</text>\n";
    }
    return s;
}

}  // namespace

std::string render_svg(const LineChart& chart) {
    return header(chart.title) + panel(chart, Box{}) + "</svg>\n";
}

std::string render_svg(const std::string& title, const std::vector<LineChart>& panels) {
    if (panels.empty()) throw Error("output", "no panels to draw");
    const double height = kTop + 20 + kPanelHeight * static_cast<double>(panels.size());
    std::string s = header(title, height);
    for (std::size_t k = 0; k < panels.size(); ++k) {
        Box box;
        box.top = kTop + 20 + kPanelHeight * static_cast<double>(k);
        box.bottom = kTop + 20 + kPanelHeight * static_cast<double>(k + 1) - kBottom;
        if (!panels[k].title.empty()) {
            s += "<text x=\"" + num((box.left + box.right) / 2) + "\" y=\"" + num(box.top - 6) +
                 "\" text-anchor=\"middle\">" + xml_escape(panels[k].title) + "</text>\n";
        }
        s += panel(panels[k], box);
    }
    return s + "</svg>\n";
}

std::string render_svg(const Heatmap& map) {
    if (map.nx == 0 || map.ny == 0 || map.values.size() != map.nx * map.ny) {
        throw Error("output", "heatmap raster size does not match nx * ny");
    }
    auto scaled = [&](double v) {
        if (!std::isfinite(v)) return std::numeric_limits<double>::quiet_NaN();
        if (map.log_scale) return v > 0.0 ? std::log10(v) : std::numeric_limits<double>::quiet_NaN();
        return v;
    };
    Range vr;
    for (double v : map.values) {
        const double s = scaled(v);
        if (!std::isnan(s)) vr.add(s);
    }
    vr = padded(vr);
    const Frame f{map.x0, map.x1, map.y0, map.y1, Box{}};

    std::string s = header(map.title);
    s += "<g shape-rendering=\"crispEdges\">\n";
    const double cw = (kWidth - kLeft - kRight) / static_cast<double>(map.nx);
    const double ch = (kHeight - kTop - kBottom) / static_cast<double>(map.ny);
    constexpr int kLevels = 64;
    auto level_colour = [&](double v) {
        const double sv = scaled(v);
        if (std::isnan(sv)) return std::string("#bbbbbb");
        const int level = std::clamp(static_cast<int>((sv - vr.lo) / (vr.hi - vr.lo) * kLevels), 0, kLevels - 1);
        return colour((level + 0.5) / kLevels);
    };
    for (std::size_t j = 0; j < map.ny; ++j) {
        const double top = kHeight - kBottom - static_cast<double>(j + 1) * ch;
        std::size_t i = 0;
        while (i < map.nx) {
            const std::string c = level_colour(map.values[j * map.nx + i]);
            std::size_t run = i + 1;
            while (run < map.nx && level_colour(map.values[j * map.nx + run]) == c) ++run;
            s += "<rect x=\"" + num(kLeft + static_cast<double>(i) * cw) + "\" y=\"" + num(top) + "\" width=\"" +
                 num(static_cast<double>(run - i) * cw) + "\" height=\"" + num(ch) + "\" fill=\"" + c +
                 "\"/>\n";
            i = run;
        }
    }
    s += "</g>\n";
    s += frame_and_ticks(f, false);
    s += axis_labels(Box{}, map.x_label, map.y_label);

    // colour bar
    s += "<g shape-rendering=\"crispEdges\">\n";
    const double bx = kWidth - kRight + 30, bw = 20, btop = kTop, bbot = kHeight - kBottom;
    for (int k = 0; k < kLevels; ++k) {
        const double y = bbot - (k + 1) * (bbot - btop) / kLevels;
        s += "<rect x=\"" + num(bx) + "\" y=\"" + num(y) + "\" width=\"" + num(bw) + "\" height=\"" +
             num((bbot - btop) / kLevels) + "\" fill=\"" + colour((k + 0.5) / kLevels) + "\"/>\n";
    }
    s += "</g>\n";
    s += "<rect x=\"" + num(bx) + "\" y=\"" + num(btop) + "\" width=\"" + num(bw) + "\" height=\"" + num(bbot - btop) +
         "\" fill=\"none\" stroke=\"black\"/>\n";
    for (double t : nice_ticks(vr.lo, vr.hi)) {
        const double y = bbot - (t - vr.lo) / (vr.hi - vr.lo) * (bbot - btop);
        s += "<text x=\"" + num(bx + bw + 5) + "\" y=\"" + num(y + 4) + "\">" + tick_label(t) + "</text>\n";
    }
    const double cy = (btop + bbot) / 2, lx = bx + bw + 62;
    s += "<text x=\"" + num(lx) + "\" y=\"" + num(cy) + "\" text-anchor=\"middle\" transform=\"rotate(90 " + num(lx) +
         " " + num(cy) + ")\">" + xml_escape(map.log_scale ? "log10 " + map.value_label : map.value_label) +
         "</text>\n";
    s += "</svg>\n";
    return s;
}

}  // namespace tlab::io
