#include "transmonlab/geometry.hpp"

#include "transmonlab/errors.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace tlab::fem {

namespace {

// The mesher works on a 1 pm integer lattice with 128-bit predicates; that
// bounds the airbox diagonal.
constexpr double kMaxExtentUm = 2000.0;

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

}  // namespace

const char* to_string(RegionKind kind) {
    switch (kind) {
        case RegionKind::air: return "air";
        case RegionKind::substrate: return "substrate";
        case RegionKind::conductor: return "conductor";
        case RegionKind::oxide: return "oxide";
        case RegionKind::penetration: return "penetration";
    }
    return "?";
}

const char* to_string(Terminal terminal) {
    switch (terminal) {
        case Terminal::none: return "none";
        case Terminal::ground: return "ground";
        case Terminal::driven: return "driven";
    }
    return "?";
}

std::vector<std::string> Geometry2D::region_names() const {
    std::vector<std::string> names{"air"};
    for (const auto& r : regions) names.push_back(r.name);
    return names;
}

Rect rectangle_bounds(const std::vector<Point>& outline) {
    Rect r{outline.at(0).x, outline.at(0).y, outline.at(0).x, outline.at(0).y};
    for (const auto& p : outline) {
        r.x0 = std::min(r.x0, p.x);
        r.y0 = std::min(r.y0, p.y);
        r.x1 = std::max(r.x1, p.x);
        r.y1 = std::max(r.y1, p.y);
    }
    return r;
}

std::vector<Point> rectangle(double x0, double y0, double x1, double y1) {
    return {{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}};
}

double signed_area(const std::vector<Point>& outline) {
    double a = 0.0;
    for (std::size_t i = 0; i < outline.size(); ++i) {
        const auto& p = outline[i];
        const auto& q = outline[(i + 1) % outline.size()];
        a += p.x * q.y - q.x * p.y;
    }
    return 0.5 * a;
}

bool contains(const std::vector<Point>& outline, Point p) {
    bool inside = false;
    for (std::size_t i = 0, j = outline.size() - 1; i < outline.size(); j = i++) {
        const auto& a = outline[i];
        const auto& b = outline[j];
        // on-edge test for axis-aligned edges
        if (a.x == b.x && p.x == a.x && p.y >= std::min(a.y, b.y) && p.y <= std::max(a.y, b.y)) return false;
        if (a.y == b.y && p.y == a.y && p.x >= std::min(a.x, b.x) && p.x <= std::max(a.x, b.x)) return false;
        if ((a.y > p.y) != (b.y > p.y)) {
            const double x = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
            if (p.x < x) inside = !inside;
        }
    }
    return inside;
}

bool is_rectangle(const std::vector<Point>& outline) {
    if (outline.size() != 4) return false;
    const auto r = rectangle_bounds(outline);
    for (const auto& p : outline) {
        if ((p.x != r.x0 && p.x != r.x1) || (p.y != r.y0 && p.y != r.y1)) return false;
    }
    return std::abs(signed_area(outline)) == r.width() * r.height();
}

void validate(Geometry2D& g) {
    const Rect& box = g.airbox;
    if (!(box.x1 > box.x0) || !(box.y1 > box.y0)) throw GeometryError("airbox must have positive extent");
    if (std::hypot(box.width(), box.height()) > kMaxExtentUm) {
        throw GeometryError("airbox diagonal exceeds " + fmt(kMaxExtentUm) + " um");
    }

    std::set<std::string> names{"air"};
    for (auto& r : g.regions) {
        if (r.name.empty()) throw GeometryError("region without a name");
        if (!names.insert(r.name).second) throw GeometryError("duplicate region name '" + r.name + "'");
        if (r.outline.size() < 4) throw GeometryError("region '" + r.name + "' needs at least 4 vertices");
        for (std::size_t i = 0; i < r.outline.size(); ++i) {
            const auto& a = r.outline[i];
            const auto& b = r.outline[(i + 1) % r.outline.size()];
            if (!std::isfinite(a.x) || !std::isfinite(a.y)) {
                throw GeometryError("region '" + r.name + "' has a non-finite vertex");
            }
            if (a.x != b.x && a.y != b.y) {
                throw GeometryError("region '" + r.name + "' has a non-axis-aligned edge");
            }
            if (a.x < box.x0 || a.x > box.x1 || a.y < box.y0 || a.y > box.y1) {
                throw GeometryError("region '" + r.name + "' extends outside the airbox");
            }
        }
        const double area = signed_area(r.outline);
        if (!(std::abs(area) > 0.0)) throw GeometryError("region '" + r.name + "' has zero area");
        if (area < 0.0) std::reverse(r.outline.begin(), r.outline.end());
        if (r.kind == RegionKind::air) throw GeometryError("region '" + r.name + "': air is the background");
        if (r.kind == RegionKind::conductor && r.terminal == Terminal::none) {
            throw GeometryError("conductor '" + r.name + "' needs a ground or driven terminal");
        }
        if (r.kind != RegionKind::conductor && r.terminal != Terminal::none) {
            throw GeometryError("only conductors carry terminals ('" + r.name + "')");
        }
    }

    // Pairwise overlap on the compressed grid spanned by every vertex
    // coordinate: within one cell each region is either fully in or fully out.
    std::vector<double> xs{box.x0, box.x1}, ys{box.y0, box.y1};
    for (const auto& r : g.regions) {
        for (const auto& p : r.outline) {
            xs.push_back(p.x);
            ys.push_back(p.y);
        }
    }
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
    std::sort(ys.begin(), ys.end());
    ys.erase(std::unique(ys.begin(), ys.end()), ys.end());
    for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
        for (std::size_t j = 0; j + 1 < ys.size(); ++j) {
            const Point mid{0.5 * (xs[i] + xs[i + 1]), 0.5 * (ys[j] + ys[j + 1])};
            const Region* owner = nullptr;
            for (const auto& r : g.regions) {
                if (!contains(r.outline, mid)) continue;
                if (owner != nullptr) {
                    throw GeometryError("regions '" + owner->name + "' and '" + r.name + "' overlap near (" +
                                        fmt(mid.x) + ", " + fmt(mid.y) + ")");
                }
                owner = &r;
            }
        }
    }
}

PadGeometryParams pad_params_for(const MaterialPreset& preset) {
    PadGeometryParams p;
    p.conductor_material = preset.conductor.name;
    p.substrate_material = preset.substrate.name;
    p.oxide_material = oxide_material_name(preset.conductor);
    p.penetration_material = penetration_material_name(preset.conductor);
    p.oxide_thickness = preset.conductor.oxide_thickness_um;
    p.penetration_depth = preset.conductor.london_penetration_nm * 1e-3;
    return p;
}

Geometry2D build_pad_geometry(const PadGeometryParams& p) {
    auto positive = [](double v, const char* what) {
        if (!(v > 0.0) || !std::isfinite(v)) throw GeometryError(std::string(what) + " must be > 0");
    };
    positive(p.pad_width, "pad width");
    positive(p.pad_thickness, "pad thickness");
    positive(p.gap, "pad gap");
    positive(p.substrate_depth, "substrate depth");
    positive(p.substrate_width, "substrate width");
    if (p.oxide_thickness < 0.0) throw GeometryError("oxide thickness must be >= 0");
    const double lambda = p.penetration ? p.penetration_depth : 0.0;
    if (lambda < 0.0) throw GeometryError("penetration depth must be >= 0");
    if (lambda > 0.0 && (lambda >= p.pad_thickness || 2.0 * lambda >= p.pad_width)) {
        throw GeometryError("penetration depth leaves no conductor core");
    }

    const double half_gap = 0.5 * p.gap;
    const double t = p.pad_thickness;
    const double ox = p.oxide_thickness;
    const double extent_x = half_gap + p.pad_width + ox;
    const Rect& box = p.airbox;
    const bool contained = box.x0 < -0.5 * p.substrate_width && box.x1 > 0.5 * p.substrate_width &&
                           box.y0 < -p.substrate_depth && box.y1 > t + ox &&
                           0.5 * p.substrate_width > extent_x;
    if (!contained) throw GeometryError("airbox must strictly contain the substrate, and the substrate the pads");

    Geometry2D g;
    g.airbox = box;
    const double w2 = 0.5 * p.substrate_width;
    g.regions.push_back({"substrate", RegionKind::substrate, p.substrate_material,
                         rectangle(-w2, -p.substrate_depth, w2, 0.0), Terminal::none});

    auto add_pad = [&](const std::string& side, double x0, double x1, Terminal terminal) {
        g.regions.push_back({"metal_" + side, RegionKind::conductor, p.conductor_material,
                             rectangle(x0 + lambda, 0.0, x1 - lambda, t - lambda), terminal});
        if (ox > 0.0) {
            g.regions.push_back({"oxide_" + side, RegionKind::oxide, p.oxide_material,
                                 {{x0 - ox, 0.0}, {x0, 0.0}, {x0, t}, {x1, t}, {x1, 0.0}, {x1 + ox, 0.0},
                                  {x1 + ox, t + ox}, {x0 - ox, t + ox}},
                                 Terminal::none});
        }
        if (lambda > 0.0) {
            g.regions.push_back({"penetration_" + side, RegionKind::penetration, p.penetration_material,
                                 {{x0, 0.0}, {x0 + lambda, 0.0}, {x0 + lambda, t - lambda}, {x1 - lambda, t - lambda},
                                  {x1 - lambda, 0.0}, {x1, 0.0}, {x1, t}, {x0, t}},
                                 Terminal::none});
        }
        for (const Point c : {Point{x0, 0.0}, Point{x1, 0.0}, Point{x0, t}, Point{x1, t}}) {
            g.refinement_points.push_back(c);
        }
    };
    add_pad("left", -half_gap - p.pad_width, -half_gap, p.left_terminal);
    add_pad("right", half_gap, half_gap + p.pad_width, p.right_terminal);
    g.gap_corners = {{-half_gap, 0.0}, {-half_gap, t}, {half_gap, 0.0}, {half_gap, t}};

    const double pad_extent = 2.0 * (p.pad_width + ox) + p.gap;
    if (box.width() < 5.0 * pad_extent || box.height() < 5.0 * pad_extent) {
        g.warnings.push_back("airbox is smaller than 5x the pad extent (" + fmt(pad_extent) +
                             " um); the Neumann outer boundary may bias the fields");
    }
    validate(g);
    return g;
}

Geometry2D build_parallel_plate(const ParallelPlateParams& p) {
    if (!(p.width > 0.0) || !(p.separation > 0.0) || !(p.plate_thickness > 0.0) || p.substrate_depth < 0.0) {
        throw GeometryError("parallel plate dimensions must be positive");
    }
    const double half_w = 0.5 * p.width;
    const double half_d = 0.5 * p.separation;
    const double t = p.plate_thickness;
    Geometry2D g;
    g.airbox = {-half_w, -half_d - t - p.substrate_depth, half_w, half_d + t};
    g.regions.push_back(
        {"plate_bottom", RegionKind::conductor, "plate", rectangle(-half_w, -half_d - t, half_w, -half_d),
         Terminal::ground});
    g.regions.push_back(
        {"plate_top", RegionKind::conductor, "plate", rectangle(-half_w, half_d, half_w, half_d + t), Terminal::driven});
    if (p.substrate_depth > 0.0) {
        g.regions.push_back({"substrate", RegionKind::substrate, "Si",
                             rectangle(-half_w, -half_d - t - p.substrate_depth, half_w, -half_d - t),
                             Terminal::none});
    }
    g.refinement_points = {{-half_w, -half_d}, {half_w, -half_d}, {-half_w, half_d}, {half_w, half_d}};
    validate(g);
    return g;
}

}  // namespace tlab::fem
