#include "transmonlab/fem.hpp"

#include "transmonlab/errors.hpp"
#include "transmonlab/units.hpp"

#include <Eigen/Sparse>

#include <algorithm>
#include <cmath>
#include <limits>

namespace tlab::fem {

namespace {

constexpr double kMicron = 1e-6;

struct Gradients {
    std::array<double, 3> b{}, c{};  // basis gradient * 2A, in 1/um units
    double area = 0.0;               // um^2
};

Gradients gradients(const Mesh2D& mesh, std::size_t t) {
    const auto& tri = mesh.triangles[t];
    const Point p0 = mesh.nodes[tri[0]], p1 = mesh.nodes[tri[1]], p2 = mesh.nodes[tri[2]];
    Gradients g;
    g.b = {p1.y - p2.y, p2.y - p0.y, p0.y - p1.y};
    g.c = {p2.x - p1.x, p0.x - p2.x, p1.x - p0.x};
    g.area = 0.5 * ((p1.x - p0.x) * (p2.y - p0.y) - (p1.y - p0.y) * (p2.x - p0.x));
    return g;
}

std::vector<double> region_permittivity(const Mesh2D& mesh, const MaterialLibrary& materials) {
    std::vector<double> eps(mesh.regions.size(), std::numeric_limits<double>::quiet_NaN());
    std::vector<char> used(mesh.regions.size(), 0);
    for (int r : mesh.triangle_region) used[static_cast<std::size_t>(r)] = 1;
    for (std::size_t r = 0; r < mesh.regions.size(); ++r) {
        if (!used[r]) continue;
        const auto& region = mesh.regions[r];
        const auto it = materials.find(region.material);
        if (it == materials.end()) {
            throw SetupError("region '" + region.name + "' uses unknown material '" + region.material + "'");
        }
        if (it->second.role != MaterialRole::dielectric) {
            throw SetupError("region '" + region.name + "' is meshed but its material is a conductor");
        }
        validate(it->second);
        eps[r] = it->second.relative_permittivity;
    }
    return eps;
}

double dot(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

// Jacobi-preconditioned conjugate gradients. Convergence is confirmed on the
// true residual; drift in the recursive residual triggers a restart.
Eigen::VectorXd pcg(const Eigen::SparseMatrix<double, Eigen::RowMajor>& K, const Eigen::VectorXd& rhs, double tol,
                    std::size_t max_iterations, SolverStats& stats) {
    const Eigen::Index n = rhs.size();
    Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
    stats.unknowns = static_cast<std::size_t>(n);
    const double bnorm = std::sqrt(dot(rhs, rhs));
    if (bnorm == 0.0) {
        stats.relative_residual = 0.0;
        return x;
    }
    const Eigen::VectorXd inv_diag = K.diagonal().cwiseInverse();
    Eigen::VectorXd r = rhs, z(n), p(n), Ap(n);
    std::size_t it = 0;
    for (int restart = 0; restart < 8; ++restart) {
        z = inv_diag.cwiseProduct(r);
        p = z;
        double rz = dot(r, z);
        double res = std::sqrt(dot(r, r)) / bnorm;
        while (res > tol && it < max_iterations) {
            Ap.noalias() = K * p;
            const double alpha = rz / dot(p, Ap);
            x += alpha * p;
            r -= alpha * Ap;
            res = std::sqrt(dot(r, r)) / bnorm;
            stats.residual_history.push_back(res);
            ++it;
            z = inv_diag.cwiseProduct(r);
            const double rz_next = dot(r, z);
            p = z + (rz_next / rz) * p;
            rz = rz_next;
        }
        r = rhs - K * x;
        const double true_res = std::sqrt(dot(r, r)) / bnorm;
        stats.iterations = it;
        stats.relative_residual = true_res;
        if (true_res <= tol) return x;
        if (it >= max_iterations) break;
    }
    throw NumericalError("conjugate gradients stopped at relative residual " + std::to_string(stats.relative_residual) +
                             " after " + std::to_string(stats.iterations) + " iterations",
                         stats.residual_history, "solver");
}

// Portion of segment a->b inside a counter-clockwise triangle, as a length.
double clipped_length(Point a, Point b, const std::array<Point, 3>& tri) {
    double t0 = 0.0, t1 = 1.0;
    for (int i = 0; i < 3; ++i) {
        const Point p = tri[i], q = tri[(i + 1) % 3];
        auto side = [&](Point s) { return (q.x - p.x) * (s.y - p.y) - (q.y - p.y) * (s.x - p.x); };
        const double fa = side(a), fb = side(b);
        if (fa < 0.0 && fb < 0.0) return 0.0;
        if (fa < 0.0) t0 = std::max(t0, fa / (fa - fb));
        else if (fb < 0.0) t1 = std::min(t1, fa / (fa - fb));
    }
    if (t1 <= t0) return 0.0;
    return (t1 - t0) * std::hypot(b.x - a.x, b.y - a.y);
}

double polygon_area(const std::vector<Point>& poly) {
    double a = 0.0;
    for (std::size_t i = 0; i < poly.size(); ++i) {
        const Point p = poly[i], q = poly[(i + 1) % poly.size()];
        a += p.x * q.y - q.x * p.y;
    }
    return 0.5 * a;
}

// Sutherland-Hodgman clip of a polygon by an axis-aligned rectangle.
std::vector<Point> clip_to_rect(std::vector<Point> poly, const Rect& r) {
    auto clip = [&](auto inside, auto cross) {
        std::vector<Point> out;
        for (std::size_t i = 0; i < poly.size(); ++i) {
            const Point cur = poly[i], prev = poly[(i + poly.size() - 1) % poly.size()];
            const bool ci = inside(cur), pi = inside(prev);
            if (ci) {
                if (!pi) out.push_back(cross(prev, cur));
                out.push_back(cur);
            } else if (pi) {
                out.push_back(cross(prev, cur));
            }
        }
        poly = std::move(out);
    };
    auto at_x = [](double x) {
        return [x](Point p, Point q) { return Point{x, p.y + (q.y - p.y) * (x - p.x) / (q.x - p.x)}; };
    };
    auto at_y = [](double y) {
        return [y](Point p, Point q) { return Point{p.x + (q.x - p.x) * (y - p.y) / (q.y - p.y), y}; };
    };
    clip([&](Point p) { return p.x >= r.x0; }, at_x(r.x0));
    if (!poly.empty()) clip([&](Point p) { return p.x <= r.x1; }, at_x(r.x1));
    if (!poly.empty()) clip([&](Point p) { return p.y >= r.y0; }, at_y(r.y0));
    if (!poly.empty()) clip([&](Point p) { return p.y <= r.y1; }, at_y(r.y1));
    return poly;
}

double rect_distance(const Rect& a, const Rect& b) {
    const double dx = std::max({0.0, b.x0 - a.x1, a.x0 - b.x1});
    const double dy = std::max({0.0, b.y0 - a.y1, a.y0 - b.y1});
    return std::hypot(dx, dy);
}

}  // namespace

FieldSolution assemble_and_solve(const Mesh2D& mesh, const MaterialLibrary& materials, double drive_voltage,
                                 const SolveOptions& options) {
    if (!std::isfinite(drive_voltage)) throw ParameterError("drive voltage must be finite", "setup");
    if (!(options.rel_tol > 0.0)) throw ParameterError("solver tolerance must be positive", "setup");
    if (mesh.triangle_count() == 0) throw SetupError("empty mesh");
    const auto eps_region = region_permittivity(mesh, materials);

    const NodeMarker hot = options.swap_terminals ? NodeMarker::ground : NodeMarker::driven;
    const NodeMarker cold = options.swap_terminals ? NodeMarker::driven : NodeMarker::ground;
    const std::size_t n = mesh.node_count();
    std::size_t n_hot = 0, n_cold = 0;
    for (auto m : mesh.markers) {
        n_hot += m == hot ? 1 : 0;
        n_cold += m == cold ? 1 : 0;
    }
    if (n_hot == 0 && n_cold == 0) throw SetupError("singular system: no Dirichlet nodes");
    if (n_hot == 0 || n_cold == 0) throw SetupError("exactly one ground and one driven terminal are required");

    std::vector<int> free_index(n, -1);
    std::vector<double> fixed(n, 0.0);
    int nf = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (mesh.markers[i] == hot) fixed[i] = drive_voltage;
        else if (mesh.markers[i] != cold) free_index[i] = nf++;
    }

    FieldSolution sol;
    sol.drive_voltage = drive_voltage;
    sol.driven = options.swap_terminals ? Terminal::ground : Terminal::driven;
    sol.permittivity.resize(mesh.triangle_count());

    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(mesh.triangle_count() * 9);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(nf);
    for (std::size_t t = 0; t < mesh.triangle_count(); ++t) {
        const auto g = gradients(mesh, t);
        if (!(g.area > 0.0)) throw SetupError("inverted element " + std::to_string(t));
        const double eps = eps_region[static_cast<std::size_t>(mesh.triangle_region[t])];
        sol.permittivity[t] = eps;
        const auto& tri = mesh.triangles[t];
        for (int i = 0; i < 3; ++i) {
            const int fi = free_index[tri[i]];
            if (fi < 0) continue;
            for (int j = 0; j < 3; ++j) {
                const double k = eps * (g.b[i] * g.b[j] + g.c[i] * g.c[j]) / (4.0 * g.area);
                const int fj = free_index[tri[j]];
                if (fj >= 0) triplets.emplace_back(fi, fj, k);
                else rhs[fi] -= k * fixed[tri[j]];
            }
        }
    }
    Eigen::SparseMatrix<double, Eigen::RowMajor> K(nf, nf);
    K.setFromTriplets(triplets.begin(), triplets.end());
    triplets = {};

    const std::size_t max_it =
        options.max_iterations > 0 ? options.max_iterations : std::max<std::size_t>(2000, 20 * static_cast<std::size_t>(nf));
    const Eigen::VectorXd x = pcg(K, rhs, options.rel_tol, max_it, sol.stats);

    sol.potential.resize(n);
    for (std::size_t i = 0; i < n; ++i) sol.potential[i] = free_index[i] >= 0 ? x[free_index[i]] : fixed[i];

    const double lo = std::min(0.0, drive_voltage), hi = std::max(0.0, drive_voltage);
    const auto [vmin, vmax] = std::minmax_element(sol.potential.begin(), sol.potential.end());
    const double slack = 1e-9 * std::abs(drive_voltage);
    if (*vmin < lo - slack || *vmax > hi + slack) {
        sol.warnings.push_back("discrete maximum principle violated: potential range [" + std::to_string(*vmin) + ", " +
                               std::to_string(*vmax) + "] V");
    }

    const double eps0 = units::vacuum_permittivity;
    sol.e_field.resize(mesh.triangle_count());
    sol.e_norm.resize(mesh.triangle_count());
    sol.energy_density.resize(mesh.triangle_count());
    double energy = 0.0;
    for (std::size_t t = 0; t < mesh.triangle_count(); ++t) {
        const auto g = gradients(mesh, t);
        const auto& tri = mesh.triangles[t];
        double gx = 0.0, gy = 0.0;
        for (int i = 0; i < 3; ++i) {
            gx += sol.potential[tri[i]] * g.b[i];
            gy += sol.potential[tri[i]] * g.c[i];
        }
        const double scale = -1.0 / (2.0 * g.area * kMicron);  // V/um -> V/m
        const double ex = gx * scale, ey = gy * scale;
        sol.e_field[t] = {ex, ey};
        const double e2 = ex * ex + ey * ey;
        sol.e_norm[t] = std::sqrt(e2);
        sol.energy_density[t] = 0.5 * eps0 * sol.permittivity[t] * e2;
        energy += sol.energy_density[t] * g.area * kMicron * kMicron;
    }
    sol.total_energy = energy;
    return sol;
}

TriangleLocator::TriangleLocator(const Mesh2D& mesh, std::size_t target_per_bucket) : mesh_(&mesh) {
    bounds_ = mesh.bounds;
    const double buckets = std::max(1.0, static_cast<double>(mesh.triangle_count()) /
                                             static_cast<double>(std::max<std::size_t>(1, target_per_bucket)));
    const double aspect = bounds_.width() / bounds_.height();
    nx_ = std::max<std::size_t>(1, static_cast<std::size_t>(std::sqrt(buckets * aspect)));
    ny_ = std::max<std::size_t>(1, static_cast<std::size_t>(buckets / static_cast<double>(nx_)));
    nx_ = std::min<std::size_t>(nx_, 4096);
    ny_ = std::min<std::size_t>(ny_, 4096);
    dx_ = bounds_.width() / static_cast<double>(nx_);
    dy_ = bounds_.height() / static_cast<double>(ny_);

    auto cell_range = [&](double lo, double hi, double origin, double d, std::size_t count) {
        const auto clampi = [&](double v) {
            return static_cast<std::size_t>(std::clamp(std::floor((v - origin) / d), 0.0, static_cast<double>(count - 1)));
        };
        return std::make_pair(clampi(lo), clampi(hi));
    };
    std::vector<std::size_t> counts(nx_ * ny_ + 1, 0);
    auto for_cells = [&](std::size_t t, auto&& fn) {
        const auto& tri = mesh.triangles[t];
        double x0 = 1e300, x1 = -1e300, y0 = 1e300, y1 = -1e300;
        for (int v : tri) {
            x0 = std::min(x0, mesh.nodes[v].x);
            x1 = std::max(x1, mesh.nodes[v].x);
            y0 = std::min(y0, mesh.nodes[v].y);
            y1 = std::max(y1, mesh.nodes[v].y);
        }
        const auto [i0, i1] = cell_range(x0, x1, bounds_.x0, dx_, nx_);
        const auto [j0, j1] = cell_range(y0, y1, bounds_.y0, dy_, ny_);
        for (std::size_t j = j0; j <= j1; ++j)
            for (std::size_t i = i0; i <= i1; ++i) fn(j * nx_ + i);
    };
    for (std::size_t t = 0; t < mesh.triangle_count(); ++t) for_cells(t, [&](std::size_t c) { ++counts[c + 1]; });
    for (std::size_t c = 0; c < nx_ * ny_; ++c) counts[c + 1] += counts[c];
    start_ = counts;
    items_.resize(counts.back());
    for (std::size_t t = 0; t < mesh.triangle_count(); ++t) {
        for_cells(t, [&](std::size_t c) { items_[counts[c]++] = static_cast<int>(t); });
    }
}

int TriangleLocator::find(Point p) const {
    if (p.x < bounds_.x0 || p.x > bounds_.x1 || p.y < bounds_.y0 || p.y > bounds_.y1) return -1;
    const auto i = std::min(nx_ - 1, static_cast<std::size_t>((p.x - bounds_.x0) / dx_));
    const auto j = std::min(ny_ - 1, static_cast<std::size_t>((p.y - bounds_.y0) / dy_));
    const std::size_t c = j * nx_ + i;
    for (std::size_t k = start_[c]; k < start_[c + 1]; ++k) {
        const auto& tri = mesh_->triangles[static_cast<std::size_t>(items_[k])];
        bool inside = true;
        for (int e = 0; e < 3 && inside; ++e) {
            const Point a = mesh_->nodes[tri[e]], b = mesh_->nodes[tri[(e + 1) % 3]];
            inside = (b.x - a.x) * (p.y - a.y) - (b.y - a.y) * (p.x - a.x) >= 0.0;
        }
        if (inside) return items_[k];
    }
    return -1;
}

const char* to_string(ParticipationClass c) {
    switch (c) {
        case ParticipationClass::substrate_bulk: return "substrate_bulk";
        case ParticipationClass::substrate_surface_layer: return "substrate_surface_layer";
        case ParticipationClass::metal_oxide: return "metal_oxide";
        case ParticipationClass::penetration_layer: return "penetration_layer";
        case ParticipationClass::air: return "air";
    }
    return "?";
}

ParticipationReport participation(const FieldSolution& sol, const Mesh2D& mesh, double surface_layer_thickness_nm) {
    if (!(surface_layer_thickness_nm > 0.0) || !std::isfinite(surface_layer_thickness_nm)) {
        throw ParameterError("surface layer thickness must be positive", "participation");
    }
    if (sol.energy_density.size() != mesh.triangle_count()) {
        throw ParameterError("field solution does not match the mesh", "participation");
    }
    const double d = surface_layer_thickness_nm * 1e-3;
    const Rect& box = mesh.bounds;

    // Interior (non-layer) part of each substrate region.
    std::vector<std::optional<Rect>> inner(mesh.regions.size());
    bool any_substrate = false;
    for (std::size_t r = 0; r < mesh.regions.size(); ++r) {
        const auto& reg = mesh.regions[r];
        if (reg.kind != RegionKind::substrate) continue;
        any_substrate = true;
        if (!is_rectangle(reg.outline)) {
            throw ParameterError("surface layer needs a rectangular substrate ('" + reg.name + "')", "participation");
        }
        const Rect s = rectangle_bounds(reg.outline);
        Rect in{s.x0 == box.x0 ? s.x0 : s.x0 + d, s.y0 == box.y0 ? s.y0 : s.y0 + d,
                s.x1 == box.x1 ? s.x1 : s.x1 - d, s.y1 == box.y1 ? s.y1 : s.y1 - d};
        if (in.x1 > in.x0 && in.y1 > in.y0) inner[r] = in;
    }

    ParticipationReport rep;
    rep.surface_layer_thickness_nm = surface_layer_thickness_nm;
    bool resolved = false;
    for (std::size_t t = 0; t < mesh.triangle_count(); ++t) {
        const auto r = static_cast<std::size_t>(mesh.triangle_region[t]);
        const double area = mesh.area(t);
        const double e = sol.energy_density[t] * area * kMicron * kMicron;
        auto add = [&](ParticipationClass c, double v) { rep.energy[static_cast<std::size_t>(c)] += v; };
        switch (mesh.regions[r].kind) {
            case RegionKind::air: add(ParticipationClass::air, e); break;
            case RegionKind::oxide: add(ParticipationClass::metal_oxide, e); break;
            case RegionKind::penetration: add(ParticipationClass::penetration_layer, e); break;
            case RegionKind::conductor: break;
            case RegionKind::substrate: {
                double core = 0.0;
                if (inner[r]) {
                    const auto& tri = mesh.triangles[t];
                    const auto clipped =
                        clip_to_rect({mesh.nodes[tri[0]], mesh.nodes[tri[1]], mesh.nodes[tri[2]]}, *inner[r]);
                    core = clipped.size() >= 3 ? std::clamp(polygon_area(clipped), 0.0, area) : 0.0;
                }
                if (core <= 1e-12 * area) resolved = true;
                const double layer_fraction = (area - core) / area;
                add(ParticipationClass::substrate_surface_layer, e * layer_fraction);
                add(ParticipationClass::substrate_bulk, e * (1.0 - layer_fraction));
                break;
            }
        }
    }
    if (any_substrate && !resolved) {
        throw ParameterError("substrate surface layer of " + std::to_string(surface_layer_thickness_nm) +
                                 " nm is not resolved: no element lies inside it; refine the mesh near the "
                                 "substrate interfaces or use a thicker layer",
                             "participation");
    }
    double total = 0.0;
    for (double v : rep.energy) total += v;
    rep.total_energy = total;
    for (std::size_t c = 0; c < kParticipationClasses; ++c) rep.fraction[c] = total > 0.0 ? rep.energy[c] / total : 0.0;
    rep.capacitance = sol.drive_voltage != 0.0 ? 2.0 * total / (sol.drive_voltage * sol.drive_voltage) : 0.0;
    return rep;
}

double gauss_capacitance(const FieldSolution& sol, const Mesh2D& mesh, double margin_fraction) {
    if (!(margin_fraction > 0.0 && margin_fraction < 1.0)) {
        throw ParameterError("margin fraction must lie in (0, 1)", "capacitance");
    }
    if (sol.drive_voltage == 0.0) throw ParameterError("zero drive voltage", "capacitance");
    std::optional<Rect> hot;
    std::vector<Rect> others;
    for (const auto& reg : mesh.regions) {
        if (reg.kind != RegionKind::conductor) continue;
        const Rect b = rectangle_bounds(reg.outline);
        if (reg.terminal == sol.driven) {
            hot = hot ? Rect{std::min(hot->x0, b.x0), std::min(hot->y0, b.y0), std::max(hot->x1, b.x1),
                             std::max(hot->y1, b.y1)}
                      : b;
        } else {
            others.push_back(b);
        }
    }
    if (!hot || others.empty()) throw SetupError("Gauss contour needs a driven and a grounded conductor");
    double gap = std::numeric_limits<double>::infinity();
    for (const Rect& o : others) gap = std::min(gap, rect_distance(*hot, o));
    const double m = margin_fraction * gap;
    const Rect& box = mesh.bounds;
    const Rect c{std::max(hot->x0 - m, box.x0), std::max(hot->y0 - m, box.y0), std::min(hot->x1 + m, box.x1),
                 std::min(hot->y1 + m, box.y1)};

    struct Side {
        Point a, b, normal;
    };
    std::vector<Side> sides;
    if (c.y0 > box.y0) sides.push_back({{c.x0, c.y0}, {c.x1, c.y0}, {0.0, -1.0}});
    if (c.x1 < box.x1) sides.push_back({{c.x1, c.y0}, {c.x1, c.y1}, {1.0, 0.0}});
    if (c.y1 < box.y1) sides.push_back({{c.x1, c.y1}, {c.x0, c.y1}, {0.0, 1.0}});
    if (c.x0 > box.x0) sides.push_back({{c.x0, c.y1}, {c.x0, c.y0}, {-1.0, 0.0}});

    double flux = 0.0;  // V per unit depth times relative permittivity
    for (std::size_t t = 0; t < mesh.triangle_count(); ++t) {
        const auto& tri = mesh.triangles[t];
        const std::array<Point, 3> pts{mesh.nodes[tri[0]], mesh.nodes[tri[1]], mesh.nodes[tri[2]]};
        const double x0 = std::min({pts[0].x, pts[1].x, pts[2].x}), x1 = std::max({pts[0].x, pts[1].x, pts[2].x});
        const double y0 = std::min({pts[0].y, pts[1].y, pts[2].y}), y1 = std::max({pts[0].y, pts[1].y, pts[2].y});
        for (const auto& s : sides) {
            if (std::max(s.a.x, s.b.x) < x0 || std::min(s.a.x, s.b.x) > x1 || std::max(s.a.y, s.b.y) < y0 ||
                std::min(s.a.y, s.b.y) > y1) {
                continue;
            }
            const double len = clipped_length(s.a, s.b, pts);
            if (len <= 0.0) continue;
            const double en = sol.e_field[t][0] * s.normal.x + sol.e_field[t][1] * s.normal.y;
            flux += sol.permittivity[t] * en * len * kMicron;
        }
    }
    return units::vacuum_permittivity * flux / sol.drive_voltage;
}

FieldRaster field_maps(const FieldSolution& sol, const Mesh2D& mesh, std::size_t nx, std::size_t ny,
                       std::optional<Rect> window) {
    if (nx < 2 || ny < 2) throw ParameterError("raster needs at least 2x2 samples", "field_maps");
    FieldRaster out;
    out.nx = nx;
    out.ny = ny;
    out.window = window.value_or(mesh.bounds);
    if (!(out.window.width() > 0.0) || !(out.window.height() > 0.0)) {
        throw ParameterError("raster window must have positive extent", "field_maps");
    }
    const TriangleLocator locator(mesh);
    for (std::size_t i = 0; i < nx; ++i) out.x.push_back(out.window.x0 + (static_cast<double>(i) + 0.5) * out.window.width() / static_cast<double>(nx));
    for (std::size_t j = 0; j < ny; ++j) out.y.push_back(out.window.y0 + (static_cast<double>(j) + 0.5) * out.window.height() / static_cast<double>(ny));
    const double nan = std::numeric_limits<double>::quiet_NaN();
    out.e_norm.assign(nx * ny, nan);
    out.energy_density.assign(nx * ny, nan);
    out.triangle.assign(nx * ny, -1);
    for (std::size_t j = 0; j < ny; ++j) {
        for (std::size_t i = 0; i < nx; ++i) {
            const int t = locator.find({out.x[i], out.y[j]});
            if (t < 0) continue;
            const std::size_t k = j * nx + i;
            out.triangle[k] = t;
            out.e_norm[k] = sol.e_norm[static_cast<std::size_t>(t)];
            out.energy_density[k] = sol.energy_density[static_cast<std::size_t>(t)];
        }
    }
    return out;
}

std::size_t peak_field_triangle(const FieldSolution& sol) {
    if (sol.e_norm.empty()) throw ParameterError("empty field solution", "field_maps");
    return static_cast<std::size_t>(std::max_element(sol.e_norm.begin(), sol.e_norm.end()) - sol.e_norm.begin());
}

}  // namespace tlab::fem
