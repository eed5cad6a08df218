// Constrained Delaunay refinement on an integer lattice.
//
// Coordinates are snapped to a 1 pm lattice so orientation and in-circle
// tests run exactly in 128-bit integers. Region boundaries are recovered as
// constrained edges by midpoint splitting, then Ruppert refinement removes
// skinny and oversized triangles: a circumcenter that would encroach a
// subsegment is rejected and the subsegment is split instead.

#include "transmonlab/errors.hpp"
#include "transmonlab/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <map>
#include <numbers>
#include <optional>
#include <set>
#include <sstream>

namespace tlab::fem {

namespace {

using i64 = std::int64_t;
using i128 = __int128;

constexpr double kUnit = 1e-6;  // um per lattice step

struct IP {
    i64 x = 0;
    i64 y = 0;
    friend bool operator==(const IP&, const IP&) = default;
    friend auto operator<=>(const IP&, const IP&) = default;
};

i64 snap(double v) { return std::llround(v / kUnit); }
IP snap(Point p) { return {snap(p.x), snap(p.y)}; }
Point unsnap(IP p) { return {static_cast<double>(p.x) * kUnit, static_cast<double>(p.y) * kUnit}; }

i128 orient(IP a, IP b, IP c) {
    return static_cast<i128>(b.x - a.x) * (c.y - a.y) - static_cast<i128>(b.y - a.y) * (c.x - a.x);
}

// > 0 when d lies strictly inside the circumcircle of counter-clockwise abc.
i128 incircle(IP a, IP b, IP c, IP d) {
    const i128 adx = a.x - d.x, ady = a.y - d.y;
    const i128 bdx = b.x - d.x, bdy = b.y - d.y;
    const i128 cdx = c.x - d.x, cdy = c.y - d.y;
    const i128 alift = adx * adx + ady * ady;
    const i128 blift = bdx * bdx + bdy * bdy;
    const i128 clift = cdx * cdx + cdy * cdy;
    return alift * (bdx * cdy - bdy * cdx) + blift * (cdx * ady - cdy * adx) + clift * (adx * bdy - ady * bdx);
}

// p strictly inside the diametral circle of ab.
bool encroaches(IP a, IP b, IP p) {
    if (p == a || p == b) return false;
    const i128 d = static_cast<i128>(a.x - p.x) * (b.x - p.x) + static_cast<i128>(a.y - p.y) * (b.y - p.y);
    return d < 0;
}

struct Tri {
    std::array<int, 3> v{};  // counter-clockwise
    std::array<int, 3> n{};  // n[i] is across the edge opposite v[i]; -1 on the domain boundary
    std::array<bool, 3> c{}; // edge i is constrained
    int region = -1;
    bool alive = true;
};

struct Location {
    int tri = -1;
    int edge = -1;    // p lies on this edge
    int vertex = -1;  // p coincides with this vertex
};

enum class Mode { plain, segment, triangle };

struct InsertOutcome {
    enum Status { inserted, duplicate, encroaching, rejected } status = inserted;
    std::vector<std::pair<int, int>> encroached;
    int vertex = -1;
};

struct SegmentKey {
    int a, b;
};

class Refiner {
public:
    Refiner(IP lo, IP hi) {
        const int v0 = add_point(lo);
        const int v1 = add_point({hi.x, lo.y});
        const int v2 = add_point(hi);
        const int v3 = add_point({lo.x, hi.y});
        const int t0 = alloc();
        const int t1 = alloc();
        tris_[t0] = Tri{{v0, v1, v2}, {-1, t1, -1}, {true, false, true}, -1, true};
        tris_[t1] = Tri{{v0, v2, v3}, {-1, -1, t0}, {true, true, false}, -1, true};
        vtri_ = {t0, t0, t0, t1};
        last_ = t0;
    }

    const std::vector<IP>& points() const { return pts_; }
    const std::vector<Tri>& triangles() const { return tris_; }
    std::size_t vertex_count() const { return pts_.size(); }

    // Delaunay insertion of an input vertex (no encroachment rules).
    int insert_input(IP p) {
        const auto loc = locate(p, last_);
        if (!loc) throw MeshError("input vertex outside the airbox");
        if (loc->vertex >= 0) return loc->vertex;
        const auto out = insert(p, *loc, Mode::plain, {-1, -1});
        return out.vertex;
    }

    std::optional<std::pair<int, int>> find_edge(int a, int b) const {
        const int start = vtri_[a];
        for (int dir = 0; dir < 2; ++dir) {
            int t = start;
            while (true) {
                const Tri& T = tris_[t];
                const int k = index_of(T, a);
                const int k1 = (k + 1) % 3, k2 = (k + 2) % 3;
                if (T.v[k1] == b) return std::make_pair(t, k2);
                if (T.v[k2] == b) return std::make_pair(t, k1);
                const int nxt = dir == 0 ? T.n[k2] : T.n[k1];
                if (nxt < 0) break;
                if (nxt == start) return std::nullopt;
                t = nxt;
            }
        }
        return std::nullopt;
    }

    void constrain(int t, int e) {
        Tri& T = tris_[t];
        T.c[e] = true;
        const int nb = T.n[e];
        if (nb >= 0) tris_[nb].c[edge_towards(nb, t)] = true;
    }

    // Splits the constrained edge (a, b) at its lattice midpoint.
    InsertOutcome split_segment(int a, int b) {
        const auto e = find_edge(a, b);
        if (!e) throw MeshError("internal: missing subsegment");
        const IP pa = pts_[a], pb = pts_[b];
        const IP mid{pa.x + (pb.x - pa.x) / 2, pa.y + (pb.y - pa.y) / 2};
        if (mid == pa || mid == pb) throw MeshError("subsegment shorter than the lattice resolution");
        if (orient(pa, pb, mid) != 0) throw MeshError("internal: split point off its segment");
        return insert(mid, Location{e->first, e->second, -1}, Mode::segment, {a, b});
    }

    // Non-constrained split of an edge during segment recovery.
    InsertOutcome insert_on_segment_line(IP p) {
        const auto loc = locate(p, last_);
        if (!loc) throw MeshError("internal: recovery point outside the airbox");
        if (loc->vertex >= 0) return InsertOutcome{InsertOutcome::duplicate, {}, loc->vertex};
        return insert(p, *loc, Mode::plain, {-1, -1});
    }

    // Walks from triangle t towards p without crossing constrained edges; a
    // blocking subsegment is reported as encroached.
    InsertOutcome insert_circumcenter(int t, IP p) {
        const std::size_t limit = 4 * tris_.size() + 64;
        for (std::size_t step = 0; step < limit; ++step) {
            const Tri& T = tris_[t];
            const int k0 = static_cast<int>(walk_counter_++ % 3);
            int next = -2;
            int blocked = -1;
            for (int j = 0; j < 3; ++j) {
                const int i = (k0 + j) % 3;
                if (orient(pts_[T.v[(i + 1) % 3]], pts_[T.v[(i + 2) % 3]], p) < 0) {
                    if (T.c[i]) {
                        blocked = i;
                        continue;
                    }
                    next = T.n[i];
                    break;
                }
            }
            if (next >= 0) {
                t = next;
                continue;
            }
            if (blocked >= 0) {
                InsertOutcome out;
                out.status = InsertOutcome::encroaching;
                out.encroached.emplace_back(T.v[(blocked + 1) % 3], T.v[(blocked + 2) % 3]);
                return out;
            }
            const Location loc = classify(t, p);
            if (loc.vertex >= 0) return InsertOutcome{InsertOutcome::duplicate, {}, loc.vertex};
            return insert(p, loc, Mode::triangle, {-1, -1});
        }
        return InsertOutcome{InsertOutcome::rejected, {}, -1};
    }

    const std::vector<int>& last_created() const { return created_; }

    void set_region(int t, int region) { tris_[t].region = region; }

private:
    static int index_of(const Tri& T, int v) { return T.v[0] == v ? 0 : (T.v[1] == v ? 1 : 2); }

    int edge_towards(int t, int nb) const {
        const Tri& T = tris_[t];
        return T.n[0] == nb ? 0 : (T.n[1] == nb ? 1 : 2);
    }

    int add_point(IP p) {
        pts_.push_back(p);
        vtri_.push_back(-1);
        return static_cast<int>(pts_.size()) - 1;
    }

    int alloc() {
        if (!free_.empty()) {
            const int t = free_.back();
            free_.pop_back();
            return t;
        }
        tris_.emplace_back();
        mark_.push_back(0);
        return static_cast<int>(tris_.size()) - 1;
    }

    std::optional<Location> locate(IP p, int start) {
        int t = (start >= 0 && start < static_cast<int>(tris_.size()) && tris_[start].alive) ? start : last_;
        const std::size_t limit = 4 * tris_.size() + 64;
        for (std::size_t step = 0; step < limit; ++step) {
            const Tri& T = tris_[t];
            const int k0 = static_cast<int>(walk_counter_++ % 3);
            int next = -2;
            for (int j = 0; j < 3; ++j) {
                const int i = (k0 + j) % 3;
                if (orient(pts_[T.v[(i + 1) % 3]], pts_[T.v[(i + 2) % 3]], p) < 0) {
                    next = T.n[i];
                    break;
                }
            }
            if (next == -1) return std::nullopt;
            if (next == -2) return classify(t, p);
            t = next;
        }
        for (int i = 0; i < static_cast<int>(tris_.size()); ++i) {
            if (!tris_[i].alive) continue;
            const Tri& T = tris_[i];
            bool inside = true;
            for (int e = 0; e < 3 && inside; ++e) inside = orient(pts_[T.v[(e + 1) % 3]], pts_[T.v[(e + 2) % 3]], p) >= 0;
            if (inside) return classify(i, p);
        }
        return std::nullopt;
    }

    Location classify(int t, IP p) const {
        Location loc{t, -1, -1};
        const Tri& T = tris_[t];
        for (int i = 0; i < 3; ++i) {
            if (pts_[T.v[i]] == p) loc.vertex = T.v[i];
        }
        if (loc.vertex < 0) {
            for (int i = 0; i < 3; ++i) {
                if (orient(pts_[T.v[(i + 1) % 3]], pts_[T.v[(i + 2) % 3]], p) == 0) loc.edge = i;
            }
        }
        return loc;
    }

    InsertOutcome insert(IP p, const Location& loc, Mode mode, std::pair<int, int> segment) {
        ++epoch_;
        cavity_.clear();
        auto take = [&](int t) {
            mark_[t] = epoch_;
            cavity_.push_back(t);
        };
        take(loc.tri);
        InsertOutcome out;
        if (loc.edge >= 0) {
            const Tri& T = tris_[loc.tri];
            if (T.c[loc.edge] && mode != Mode::segment) {
                if (mode == Mode::triangle) {
                    out.status = InsertOutcome::encroaching;
                    out.encroached.emplace_back(T.v[(loc.edge + 1) % 3], T.v[(loc.edge + 2) % 3]);
                    return out;
                }
                mode = Mode::segment;
                segment = {T.v[(loc.edge + 1) % 3], T.v[(loc.edge + 2) % 3]};
            }
            if (T.n[loc.edge] >= 0) take(T.n[loc.edge]);
        }
        for (std::size_t k = 0; k < cavity_.size(); ++k) {
            const Tri& T = tris_[cavity_[k]];
            for (int i = 0; i < 3; ++i) {
                const int nb = T.n[i];
                if (nb < 0 || mark_[nb] == epoch_ || T.c[i]) continue;
                const Tri& N = tris_[nb];
                if (incircle(pts_[N.v[0]], pts_[N.v[1]], pts_[N.v[2]], p) > 0) take(nb);
            }
        }

        boundary_.clear();
        for (int t : cavity_) {
            const Tri& T = tris_[t];
            for (int i = 0; i < 3; ++i) {
                const int nb = T.n[i];
                if (nb >= 0 && mark_[nb] == epoch_) continue;
                boundary_.push_back({T.v[(i + 1) % 3], T.v[(i + 2) % 3], nb, nb >= 0 ? edge_towards(nb, t) : -1,
                                     T.region, T.c[i]});
            }
        }

        if (mode == Mode::triangle) {
            for (const auto& e : boundary_) {
                if (e.constrained && encroaches(pts_[e.a], pts_[e.b], p)) out.encroached.emplace_back(e.a, e.b);
            }
            if (!out.encroached.empty()) {
                out.status = InsertOutcome::encroaching;
                return out;
            }
        }
        for (const auto& e : boundary_) {
            const i128 o = orient(pts_[e.a], pts_[e.b], p);
            if (o < 0 || (o == 0 && e.outer >= 0)) {
                if (mode == Mode::triangle) {
                    out.status = InsertOutcome::rejected;
                    return out;
                }
                throw MeshError("internal: insertion cavity is not star-shaped");
            }
        }

        const int pv = add_point(p);
        out.vertex = pv;
        created_.clear();
        std::size_t slot = 0;
        std::vector<std::pair<int, int>> start_of;
        start_of.reserve(boundary_.size());
        for (const auto& e : boundary_) {
            if (orient(pts_[e.a], pts_[e.b], p) == 0) continue;
            const int t = slot < cavity_.size() ? cavity_[slot++] : alloc();
            Tri& T = tris_[t];
            T.v = {pv, e.a, e.b};
            T.n = {e.outer, -1, -1};
            T.c = {e.constrained, false, false};
            T.region = e.region;
            T.alive = true;
            if (e.outer >= 0) tris_[e.outer].n[e.outer_edge] = t;
            start_of.emplace_back(e.a, t);
            created_.push_back(t);
        }
        for (; slot < cavity_.size(); ++slot) {
            tris_[cavity_[slot]].alive = false;
            free_.push_back(cavity_[slot]);
        }
        for (int t : created_) {
            const int b = tris_[t].v[2];
            int succ = -1;
            for (const auto& [va, tt] : start_of) {
                if (va == b) {
                    succ = tt;
                    break;
                }
            }
            if (succ >= 0) {
                tris_[t].n[1] = succ;
                tris_[succ].n[2] = t;
            } else {
                tris_[t].c[1] = true;  // piece of a split domain-boundary edge
            }
        }
        for (int t : created_) {
            if (tris_[t].n[2] < 0) tris_[t].c[2] = true;
        }
        if (mode == Mode::segment) {
            for (int t : created_) {
                Tri& T = tris_[t];
                if (T.v[1] == segment.first || T.v[1] == segment.second) {
                    T.c[2] = true;
                    if (T.n[2] >= 0) tris_[T.n[2]].c[1] = true;
                }
            }
        }
        for (int t : created_) {
            vtri_[tris_[t].v[1]] = t;
            vtri_[tris_[t].v[2]] = t;
        }
        vtri_[pv] = created_.front();
        last_ = created_.front();
        return out;
    }

    std::vector<IP> pts_;
    std::vector<Tri> tris_;
    std::vector<int> vtri_;
    std::vector<int> free_;
    std::vector<std::uint64_t> mark_;
    std::vector<int> cavity_;
    struct BoundaryRec {
        int a, b, outer, outer_edge, region;
        bool constrained;
    };
    std::vector<BoundaryRec> boundary_;
    std::vector<int> created_;
    std::uint64_t epoch_ = 0;
    std::uint64_t walk_counter_ = 0;
    int last_ = 0;
};

struct RawMesh {
    std::vector<IP> pts;
    std::vector<std::array<int, 3>> tris;
    std::vector<int> region;  // 0 background, i + 1 for geometry.regions[i]
};

struct Plan {
    IP lo, hi;
    std::vector<int> members;               // geometry region indices present
    std::vector<std::vector<IP>> outlines;  // parallel to members
};

bool inside_polygon(const std::vector<IP>& poly, IP p) {
    bool inside = false;
    for (std::size_t i = 0, j = poly.size() - 1; i < poly.size(); j = i++) {
        const IP a = poly[j], b = poly[i];
        if ((a.y > p.y) != (b.y > p.y)) {
            const i128 o = orient(a, b, p);
            if (b.y > a.y ? o > 0 : o < 0) inside = !inside;
        }
    }
    return inside;
}

std::vector<IP> scaled(const std::vector<IP>& poly, i64 k) {
    std::vector<IP> out;
    out.reserve(poly.size());
    for (const IP& p : poly) out.push_back({p.x * k, p.y * k});
    return out;
}

struct Sizing {
    double target_h;
    double inner_h;
    double gradient;
    std::vector<Point> centres;

    double operator()(Point p) const {
        double h = target_h;
        for (const Point& c : centres) h = std::min(h, inner_h + gradient * std::hypot(p.x - c.x, p.y - c.y));
        return h;
    }
};

RawMesh refine(const Plan& plan, const std::vector<bool>& hole_of_region, const Sizing& sizing,
               const MeshOptions& options) {
    Refiner r(plan.lo, plan.hi);

    // Input vertices and segments split at collinear vertices.
    std::set<IP> vertex_set;
    for (const auto& poly : plan.outlines) vertex_set.insert(poly.begin(), poly.end());
    const std::vector<IP> vertices(vertex_set.begin(), vertex_set.end());
    std::map<IP, int> id;
    for (const IP& p : vertices) id[p] = r.insert_input(p);

    std::set<std::pair<int, int>> pieces;
    for (const auto& poly : plan.outlines) {
        for (std::size_t i = 0; i < poly.size(); ++i) {
            const IP a = poly[i], b = poly[(i + 1) % poly.size()];
            std::vector<IP> on{a, b};
            for (const IP& q : vertices) {
                if (q == a || q == b || orient(a, b, q) != 0) continue;
                if (std::min(a.x, b.x) <= q.x && q.x <= std::max(a.x, b.x) && std::min(a.y, b.y) <= q.y &&
                    q.y <= std::max(a.y, b.y)) {
                    on.push_back(q);
                }
            }
            std::sort(on.begin(), on.end());
            for (std::size_t k = 0; k + 1 < on.size(); ++k) {
                int u = id.at(on[k]), v = id.at(on[k + 1]);
                pieces.emplace(std::min(u, v), std::max(u, v));
            }
        }
    }

    for (const auto& [a0, b0] : pieces) {
        std::vector<std::pair<int, int>> stack{{a0, b0}};
        while (!stack.empty()) {
            const auto [a, b] = stack.back();
            stack.pop_back();
            if (const auto e = r.find_edge(a, b)) {
                r.constrain(e->first, e->second);
                continue;
            }
            const IP pa = r.points()[a], pb = r.points()[b];
            const IP mid{pa.x + (pb.x - pa.x) / 2, pa.y + (pb.y - pa.y) / 2};
            if (mid == pa || mid == pb) throw MeshError("segment recovery reached the lattice resolution");
            const auto out = r.insert_on_segment_line(mid);
            if (orient(pa, pb, r.points()[out.vertex]) != 0) throw MeshError("internal: recovery point off segment");
            stack.emplace_back(a, out.vertex);
            stack.emplace_back(out.vertex, b);
        }
    }

    // Region labels by flood fill across unconstrained edges.
    {
        const auto& tris = r.triangles();
        std::vector<char> seen(tris.size(), 0);
        std::vector<std::vector<IP>> outlines3;
        for (const auto& poly : plan.outlines) outlines3.push_back(scaled(poly, 3));
        for (std::size_t s = 0; s < tris.size(); ++s) {
            if (!tris[s].alive || seen[s]) continue;
            const Tri& S = tris[s];
            const IP c{r.points()[S.v[0]].x + r.points()[S.v[1]].x + r.points()[S.v[2]].x,
                       r.points()[S.v[0]].y + r.points()[S.v[1]].y + r.points()[S.v[2]].y};
            int region = 0;
            for (std::size_t m = 0; m < outlines3.size(); ++m) {
                if (inside_polygon(outlines3[m], c)) {
                    region = plan.members[m] + 1;
                    break;
                }
            }
            std::vector<int> stack{static_cast<int>(s)};
            seen[s] = 1;
            while (!stack.empty()) {
                const int t = stack.back();
                stack.pop_back();
                r.set_region(t, region);
                for (int i = 0; i < 3; ++i) {
                    const int nb = tris[t].n[i];
                    if (nb < 0 || tris[t].c[i] || seen[nb]) continue;
                    seen[nb] = 1;
                    stack.push_back(nb);
                }
            }
        }
    }

    const double bound = 1.0 / (2.0 * std::sin(options.min_angle_deg * std::numbers::pi / 180.0));
    const double bound2 = bound * bound;
    auto is_hole = [&](int t) { return hole_of_region[static_cast<std::size_t>(r.triangles()[t].region)]; };
    auto is_bad = [&](int t) {
        const Tri& T = r.triangles()[t];
        if (hole_of_region[static_cast<std::size_t>(T.region)]) return false;
        const IP a = r.points()[T.v[0]], b = r.points()[T.v[1]], c = r.points()[T.v[2]];
        auto len2 = [](IP p, IP q) {
            const double dx = static_cast<double>(p.x - q.x), dy = static_cast<double>(p.y - q.y);
            return dx * dx + dy * dy;
        };
        const double l0 = len2(b, c), l1 = len2(c, a), l2 = len2(a, b);
        const double area2 = static_cast<double>(orient(a, b, c));
        const double lmin = std::min({l0, l1, l2});
        const double lmax = std::max({l0, l1, l2});
        const double r2 = l0 * l1 * l2 / (4.0 * area2 * area2) * 1.0;
        if (r2 > bound2 * lmin) {
            // Edges at the lattice floor cannot be refined further.
            if (lmin > 16.0) return true;
        }
        const Point centroid = unsnap({(a.x + b.x + c.x) / 3, (a.y + b.y + c.y) / 3});
        const double h = sizing(centroid) / kUnit;
        return lmax > h * h;
    };

    std::deque<std::pair<int, std::array<int, 3>>> bad;
    std::deque<std::pair<int, int>> segments;
    auto check_segments_of = [&](int t) {
        const Tri& T = r.triangles()[t];
        for (int i = 0; i < 3; ++i) {
            if (!T.c[i]) continue;
            const int a = T.v[(i + 1) % 3], b = T.v[(i + 2) % 3];
            if (!is_hole(t) && encroaches(r.points()[a], r.points()[b], r.points()[T.v[i]])) {
                segments.emplace_back(a, b);
                continue;
            }
            const int nb = T.n[i];
            if (nb < 0 || is_hole(nb)) continue;
            const Tri& N = r.triangles()[nb];
            for (int k = 0; k < 3; ++k) {
                if (N.v[k] != a && N.v[k] != b && encroaches(r.points()[a], r.points()[b], r.points()[N.v[k]])) {
                    segments.emplace_back(a, b);
                }
            }
        }
    };
    auto examine = [&](const std::vector<int>& created) {
        for (int t : created) {
            check_segments_of(t);
            if (is_bad(t)) bad.emplace_back(t, r.triangles()[t].v);
        }
    };
    {
        std::vector<int> all;
        for (std::size_t t = 0; t < r.triangles().size(); ++t) {
            if (r.triangles()[t].alive) all.push_back(static_cast<int>(t));
        }
        examine(all);
    }

    auto budget_error = [&]() {
        std::size_t alive = 0;
        for (const auto& T : r.triangles()) alive += T.alive ? 1 : 0;
        std::ostringstream msg;
        msg << "vertex budget exhausted (" << r.vertex_count() << " vertices, " << alive
            << " triangles, limit " << options.max_vertices << ")";
        return MeshError(msg.str());
    };

    while (!segments.empty() || !bad.empty()) {
        if (r.vertex_count() > options.max_vertices) throw budget_error();
        if (!segments.empty()) {
            const auto [a, b] = segments.front();
            segments.pop_front();
            if (!r.find_edge(a, b)) continue;
            r.split_segment(a, b);
            examine(r.last_created());
            continue;
        }
        const auto [t, verts] = bad.front();
        bad.pop_front();
        const Tri& T = r.triangles()[t];
        if (!T.alive || T.v != verts || !is_bad(t)) continue;
        const IP a = r.points()[T.v[0]], b = r.points()[T.v[1]], c = r.points()[T.v[2]];
        const double bx = static_cast<double>(b.x - a.x), by = static_cast<double>(b.y - a.y);
        const double cx = static_cast<double>(c.x - a.x), cy = static_cast<double>(c.y - a.y);
        const double d = 2.0 * (bx * cy - by * cx);
        const double b2 = bx * bx + by * by, c2 = cx * cx + cy * cy;
        const IP centre{a.x + std::llround((cy * b2 - by * c2) / d), a.y + std::llround((bx * c2 - cx * b2) / d)};
        const auto out = r.insert_circumcenter(t, centre);
        switch (out.status) {
            case InsertOutcome::inserted:
                examine(r.last_created());
                break;
            case InsertOutcome::encroaching:
                for (const auto& s : out.encroached) segments.push_back(s);
                bad.emplace_back(t, verts);
                break;
            case InsertOutcome::duplicate:
            case InsertOutcome::rejected:
                break;
        }
    }

    RawMesh raw;
    raw.pts = r.points();
    for (const auto& T : r.triangles()) {
        if (!T.alive) continue;
        raw.tris.push_back(T.v);
        raw.region.push_back(T.region);
    }
    return raw;
}

// Region index map under x -> -x, or nothing when the geometry is not mirror
// symmetric in a form the half mesher supports.
std::optional<std::vector<int>> mirror_map(const Geometry2D& g) {
    if (snap(g.airbox.x0) != -snap(g.airbox.x1)) return std::nullopt;
    auto key = [](const std::vector<Point>& outline, bool flip) {
        std::vector<IP> pts;
        for (const Point& p : outline) pts.push_back({flip ? -snap(p.x) : snap(p.x), snap(p.y)});
        std::sort(pts.begin(), pts.end());
        return pts;
    };
    std::vector<int> map(g.regions.size(), -1);
    for (std::size_t i = 0; i < g.regions.size(); ++i) {
        const auto flipped = key(g.regions[i].outline, true);
        for (std::size_t j = 0; j < g.regions.size(); ++j) {
            if (g.regions[j].kind == g.regions[i].kind && g.regions[j].material == g.regions[i].material &&
                key(g.regions[j].outline, false) == flipped) {
                map[i] = static_cast<int>(j);
                break;
            }
        }
        if (map[i] < 0) return std::nullopt;
        const Rect b = rectangle_bounds(g.regions[i].outline);
        if (snap(b.x0) < 0 && snap(b.x1) > 0 && (!is_rectangle(g.regions[i].outline) || map[i] != static_cast<int>(i))) {
            return std::nullopt;
        }
    }
    return map;
}

std::vector<IP> snap_outline(const std::vector<Point>& outline) {
    std::vector<IP> out;
    for (const Point& p : outline) {
        const IP q = snap(p);
        if (out.empty() || !(out.back() == q)) out.push_back(q);
    }
    while (out.size() > 1 && out.front() == out.back()) out.pop_back();
    return out;
}

}  // namespace

const char* to_string(NodeMarker marker) {
    switch (marker) {
        case NodeMarker::interior: return "interior";
        case NodeMarker::ground: return "ground";
        case NodeMarker::driven: return "driven";
        case NodeMarker::outer: return "outer";
    }
    return "?";
}

double Mesh2D::area(std::size_t t) const {
    const auto& tri = triangles[t];
    const Point a = nodes[tri[0]], b = nodes[tri[1]], c = nodes[tri[2]];
    return 0.5 * ((b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x));
}

double Mesh2D::min_angle_deg(std::size_t t) const {
    const auto& tri = triangles[t];
    double best = 180.0;
    for (int i = 0; i < 3; ++i) {
        const Point p = nodes[tri[i]], q = nodes[tri[(i + 1) % 3]], r = nodes[tri[(i + 2) % 3]];
        const double ux = q.x - p.x, uy = q.y - p.y, vx = r.x - p.x, vy = r.y - p.y;
        const double angle = std::atan2(std::abs(ux * vy - uy * vx), ux * vx + uy * vy);
        best = std::min(best, angle * 180.0 / std::numbers::pi);
    }
    return best;
}

Point Mesh2D::centroid(std::size_t t) const {
    const auto& tri = triangles[t];
    return {(nodes[tri[0]].x + nodes[tri[1]].x + nodes[tri[2]].x) / 3.0,
            (nodes[tri[0]].y + nodes[tri[1]].y + nodes[tri[2]].y) / 3.0};
}

MeshStats statistics(const Mesh2D& mesh) {
    MeshStats s;
    s.nodes = mesh.node_count();
    s.triangles = mesh.triangle_count();
    if (s.triangles == 0) return s;
    s.min_angle_deg = 180.0;
    s.min_area = std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t < mesh.triangle_count(); ++t) {
        const double a = mesh.area(t);
        s.min_angle_deg = std::min(s.min_angle_deg, mesh.min_angle_deg(t));
        s.min_area = std::min(s.min_area, a);
        s.max_area = std::max(s.max_area, a);
    }
    return s;
}

Mesh2D triangulate(const Geometry2D& geometry_in, double target_h, double grading, const MeshOptions& options) {
    if (!(target_h > 0.0) || !std::isfinite(target_h)) throw ParameterError("target_h must be positive", "mesh");
    if (!(grading >= 1.0) || !std::isfinite(grading)) throw ParameterError("grading must be >= 1", "mesh");
    if (!(options.min_angle_deg > 0.0 && options.min_angle_deg <= 30.0)) {
        throw ParameterError("min_angle_deg must lie in (0, 30]", "mesh");
    }
    Geometry2D geometry = geometry_in;
    validate(geometry);

    const Sizing sizing{target_h, target_h / grading, options.size_gradient, geometry.refinement_points};
    if (sizing.inner_h < 2e3 * kUnit) throw ParameterError("element size below the mesher resolution", "mesh");

    std::vector<bool> hole_of_region{false};
    for (const auto& region : geometry.regions) hole_of_region.push_back(region.kind == RegionKind::conductor);

    const auto mirror = options.mirror ? mirror_map(geometry) : std::nullopt;
    Plan plan;
    plan.lo = snap(Point{geometry.airbox.x0, geometry.airbox.y0});
    plan.hi = snap(Point{geometry.airbox.x1, geometry.airbox.y1});
    if (mirror) plan.hi.x = 0;
    for (std::size_t i = 0; i < geometry.regions.size(); ++i) {
        const auto& outline = geometry.regions[i].outline;
        if (!mirror) {
            plan.members.push_back(static_cast<int>(i));
            plan.outlines.push_back(snap_outline(outline));
            continue;
        }
        const Rect b = rectangle_bounds(outline);
        if (snap(b.x0) >= 0) continue;
        plan.members.push_back(static_cast<int>(i));
        if (snap(b.x1) > 0) {
            plan.outlines.push_back(snap_outline(rectangle(b.x0, b.y0, 0.0, b.y1)));
        } else {
            plan.outlines.push_back(snap_outline(outline));
        }
    }

    RawMesh raw = refine(plan, hole_of_region, sizing, options);

    if (mirror) {
        const auto& map = *mirror;
        std::vector<int> image(raw.pts.size());
        const std::size_t n = raw.pts.size();
        for (std::size_t i = 0; i < n; ++i) {
            if (raw.pts[i].x == 0) {
                image[i] = static_cast<int>(i);
            } else {
                image[i] = static_cast<int>(raw.pts.size());
                raw.pts.push_back({-raw.pts[i].x, raw.pts[i].y});
            }
        }
        const std::size_t m = raw.tris.size();
        for (std::size_t t = 0; t < m; ++t) {
            const auto& tri = raw.tris[t];
            raw.tris.push_back({image[tri[0]], image[tri[2]], image[tri[1]]});
            const int r = raw.region[t];
            raw.region.push_back(r == 0 ? 0 : map[static_cast<std::size_t>(r - 1)] + 1);
        }
    }

    // Assemble the output mesh: drop conductor interiors, mark terminals.
    const std::size_t np = raw.pts.size();
    std::vector<NodeMarker> marker(np, NodeMarker::interior);
    std::vector<char> used(np, 0);
    for (std::size_t t = 0; t < raw.tris.size(); ++t) {
        const int r = raw.region[t];
        if (!hole_of_region[static_cast<std::size_t>(r)]) {
            for (int v : raw.tris[t]) used[v] = 1;
            continue;
        }
        const NodeMarker m =
            geometry.regions[static_cast<std::size_t>(r - 1)].terminal == Terminal::ground ? NodeMarker::ground
                                                                                             : NodeMarker::driven;
        for (int v : raw.tris[t]) {
            if (marker[v] != NodeMarker::interior && marker[v] != m) {
                throw MeshError("conductors with different terminals touch near (" +
                                std::to_string(unsnap(raw.pts[v]).x) + ", " + std::to_string(unsnap(raw.pts[v]).y) +
                                ")");
            }
            marker[v] = m;
        }
    }
    const IP lo = snap(Point{geometry.airbox.x0, geometry.airbox.y0});
    const IP hi = snap(Point{geometry.airbox.x1, geometry.airbox.y1});

    Mesh2D mesh;
    mesh.bounds = geometry.airbox;
    mesh.regions.push_back({"air", RegionKind::air, geometry.background_material, {}, Terminal::none});
    for (const auto& region : geometry.regions) {
        mesh.regions.push_back({region.name, region.kind, region.material, region.outline, region.terminal});
    }
    std::vector<int> renumber(np, -1);
    for (std::size_t i = 0; i < np; ++i) {
        if (!used[i]) continue;
        renumber[i] = static_cast<int>(mesh.nodes.size());
        mesh.nodes.push_back(unsnap(raw.pts[i]));
        const IP p = raw.pts[i];
        NodeMarker m = marker[i];
        if (m == NodeMarker::interior && (p.x == lo.x || p.x == hi.x || p.y == lo.y || p.y == hi.y)) {
            m = NodeMarker::outer;
        }
        mesh.markers.push_back(m);
    }
    for (std::size_t t = 0; t < raw.tris.size(); ++t) {
        const int r = raw.region[t];
        if (hole_of_region[static_cast<std::size_t>(r)]) continue;
        const auto& tri = raw.tris[t];
        mesh.triangles.push_back({renumber[tri[0]], renumber[tri[1]], renumber[tri[2]]});
        mesh.triangle_region.push_back(r);
    }
    return mesh;
}

Mesh2D refine_uniform(const Mesh2D& mesh) {
    Mesh2D out;
    out.bounds = mesh.bounds;
    out.regions = mesh.regions;
    out.nodes = mesh.nodes;
    out.markers = mesh.markers;
    std::map<std::pair<int, int>, int> midpoint;
    auto mid = [&](int a, int b) {
        const auto key = std::make_pair(std::min(a, b), std::max(a, b));
        const auto it = midpoint.find(key);
        if (it != midpoint.end()) return it->second;
        const Point pa = mesh.nodes[a], pb = mesh.nodes[b];
        const int id = static_cast<int>(out.nodes.size());
        out.nodes.push_back({0.5 * (pa.x + pb.x), 0.5 * (pa.y + pb.y)});
        const NodeMarker ma = mesh.markers[a], mb = mesh.markers[b];
        NodeMarker m = NodeMarker::interior;
        if (ma == mb && ma != NodeMarker::interior) m = ma;
        out.markers.push_back(m);
        midpoint.emplace(key, id);
        return id;
    };
    // An edge whose endpoints share a marker may still cross the interior; it
    // is a boundary edge only when it has a single adjacent triangle.
    std::map<std::pair<int, int>, int> edge_use;
    for (const auto& tri : mesh.triangles) {
        for (int i = 0; i < 3; ++i) {
            const int a = tri[i], b = tri[(i + 1) % 3];
            ++edge_use[{std::min(a, b), std::max(a, b)}];
        }
    }
    for (std::size_t t = 0; t < mesh.triangle_count(); ++t) {
        const auto& tri = mesh.triangles[t];
        int m[3];
        for (int i = 0; i < 3; ++i) {
            const int a = tri[i], b = tri[(i + 1) % 3];
            m[i] = mid(a, b);
            if (edge_use[{std::min(a, b), std::max(a, b)}] != 1) out.markers[m[i]] = NodeMarker::interior;
        }
        const int r = mesh.triangle_region[t];
        out.triangles.push_back({tri[0], m[0], m[2]});
        out.triangles.push_back({m[0], tri[1], m[1]});
        out.triangles.push_back({m[2], m[1], tri[2]});
        out.triangles.push_back({m[0], m[1], m[2]});
        for (int k = 0; k < 4; ++k) out.triangle_region.push_back(r);
    }
    return out;
}

void write_mesh(std::ostream& out, const Mesh2D& mesh) {
    char buf[64];
    out << mesh.node_count() << ' ' << mesh.triangle_count() << '\n';
    for (std::size_t i = 0; i < mesh.node_count(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g %.17g", mesh.nodes[i].x, mesh.nodes[i].y);
        out << i << ' ' << buf << '\n';
    }
    for (std::size_t t = 0; t < mesh.triangle_count(); ++t) {
        const auto& tri = mesh.triangles[t];
        out << t << ' ' << tri[0] << ' ' << tri[1] << ' ' << tri[2] << ' '
            << mesh.regions[static_cast<std::size_t>(mesh.triangle_region[t])].name << '\n';
    }
}

Mesh2D read_mesh(std::istream& in, const std::vector<MeshRegion>& regions) {
    Mesh2D mesh;
    mesh.regions = regions;
    std::size_t nn = 0, nt = 0;
    if (!(in >> nn >> nt)) throw MeshError("mesh file: missing header");
    mesh.nodes.resize(nn);
    mesh.markers.assign(nn, NodeMarker::interior);
    for (std::size_t i = 0; i < nn; ++i) {
        std::size_t id = 0;
        if (!(in >> id >> mesh.nodes[i].x >> mesh.nodes[i].y) || id != i) {
            throw MeshError("mesh file: bad node record " + std::to_string(i));
        }
    }
    for (std::size_t t = 0; t < nt; ++t) {
        std::size_t id = 0;
        std::array<int, 3> tri{};
        std::string name;
        if (!(in >> id >> tri[0] >> tri[1] >> tri[2] >> name) || id != t) {
            throw MeshError("mesh file: bad triangle record " + std::to_string(t));
        }
        for (int v : tri) {
            if (v < 0 || static_cast<std::size_t>(v) >= nn) throw MeshError("mesh file: node index out of range");
        }
        const auto it = std::find_if(regions.begin(), regions.end(), [&](const MeshRegion& r) { return r.name == name; });
        if (it == regions.end()) throw MeshError("mesh file: unknown region '" + name + "'");
        mesh.triangles.push_back(tri);
        mesh.triangle_region.push_back(static_cast<int>(it - regions.begin()));
    }
    if (!mesh.nodes.empty()) {
        Rect b{mesh.nodes[0].x, mesh.nodes[0].y, mesh.nodes[0].x, mesh.nodes[0].y};
        for (const Point& p : mesh.nodes) {
            b.x0 = std::min(b.x0, p.x);
            b.y0 = std::min(b.y0, p.y);
            b.x1 = std::max(b.x1, p.x);
            b.y1 = std::max(b.y1, p.y);
        }
        mesh.bounds = b;
    }
    return mesh;
}

}  // namespace tlab::fem
