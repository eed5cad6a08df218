// Acceptance run: one PASS/FAIL line per criterion with the measured values
// and the wall time against its budget.
//
//   acceptance            run every criterion
//   acceptance --only 6   run criterion 6 (repeatable)

#include "oracles/sturm.hpp"
#include "transmonlab/adaptive.hpp"
#include "transmonlab/chipsets.hpp"
#include "transmonlab/fem.hpp"
#include "transmonlab/transmon.hpp"
#include "transmonlab/units.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

using namespace tlab;

namespace {

// Pinned tolerances.
constexpr double kFlatBand = 1e-6;         // 1: band-0 peak-to-peak at EJ/EC = 50
constexpr double kDispersiveBand = 0.05;   // 1: band-0 peak-to-peak at EJ/EC = 1
constexpr double kSlopeTol = 0.15;         // 2: |slope + 1|
constexpr double kPointTol = 0.25;         // 2: |alpha / -EC - 1|
constexpr double kFieldTol = 0.02;         // 6
constexpr double kCapTol = 0.10;           // 6: default mesh
constexpr double kCapRefinedTol = 0.03;    // 6: two uniform refinements
constexpr double kLinearityTol = 1e-9;     // 7
constexpr double kReciprocityTol = 1e-9;   // 7
constexpr double kScalingTol = 1e-9;       // 7
constexpr double kSumTol = 1e-6;           // 7
constexpr double kGaussTol = 0.03;         // 7
constexpr double kCornerDistUm = 2.0;      // 8
constexpr double kConvergeTol = 0.005;     // 9
constexpr double kMonotoneSlack = 1e-12;   // 9
constexpr double kCharpolyTol = 1e-8;      // 10
constexpr double kClosedFormTol = 1e-9;    // 10

struct Outcome {
    bool pass = true;
    std::string detail;
};

// Collects sub-checks of one criterion.
class Checks {
public:
    void check(bool ok, const std::string& what) {
        pass_ = pass_ && ok;
        if (!detail_.empty()) detail_ += "; ";
        detail_ += (ok ? "" : "FAILED ") + what;
    }
    Outcome outcome() const { return {pass_, detail_}; }

private:
    bool pass_ = true;
    std::string detail_;
};

std::string fmt(const char* format, ...) __attribute__((format(printf, 1, 2)));
std::string fmt(const char* format, ...) {
    char buf[512];
    va_list args;
    va_start(args, format);
    std::vsnprintf(buf, sizeof buf, format, args);
    va_end(args);
    return buf;
}

double peak_to_peak(const std::vector<double>& v) {
    const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    return *hi - *lo;
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

int slope_sign_changes(const std::vector<double>& y) {
    std::vector<double> v;
    for (double a : y) {
        if (!std::isnan(a)) v.push_back(a);
    }
    int changes = 0;
    for (std::size_t i = 2; i < v.size(); ++i) {
        if ((v[i - 1] - v[i - 2] > 0) != (v[i] - v[i - 1] > 0)) ++changes;
    }
    return changes;
}

struct PadCase {
    fem::Geometry2D geometry;
    fem::Mesh2D mesh;
    fem::MaterialLibrary materials;
};

PadCase pad_case(const std::string& preset) {
    const auto& p = fem::find_material_preset(preset);
    PadCase c;
    c.geometry = fem::build_pad_geometry(fem::pad_params_for(p));
    c.mesh = fem::triangulate(c.geometry, fem::kDefaultTargetH, fem::kDefaultGrading);
    c.materials = fem::library_for(p);
    return c;
}

Outcome band_flattening() {
    Checks c;
    const auto flat = transmon::normalized_bands(50.0, 0.25, 201);
    const auto wavy = transmon::normalized_bands(1.0, 0.25, 201);
    const double p50 = peak_to_peak(flat.bands[0]);
    const double p1 = peak_to_peak(wavy.bands[0]);
    c.check(p50 < kFlatBand, fmt("EJ/EC=50 band0 ptp %.3g < %.0e", p50, kFlatBand));
    c.check(p1 > kDispersiveBand, fmt("EJ/EC=1 band0 ptp %.3g > %.2f", p1, kDispersiveBand));
    return c.outcome();
}

Outcome anharmonicity_law() {
    Checks c;
    const auto grid = chips::linear_grid(0.15, 0.35, 9);
    std::vector<double> alpha;
    double worst = 0.0;
    for (double ec : grid) {
        alpha.push_back(transmon::anharmonicity(50.0 * ec, ec));
        worst = std::max(worst, std::abs(alpha.back() / -ec - 1.0));
    }
    const double slope = chips::fit_line(grid, alpha).slope;
    c.check(std::abs(slope + 1.0) <= kSlopeTol, fmt("slope %.4f within %.0f%% of -1", slope, 100 * kSlopeTol));
    c.check(worst <= kPointTol, fmt("max |alpha/(-EC) - 1| = %.3f <= %.2f", worst, kPointTol));
    return c.outcome();
}

std::vector<double> preset_dispersions(const chips::ChipPreset& chip) {
    std::vector<double> d;
    for (const auto& q : chip.qubits) d.push_back(chips::dispersion_mhz(q.ej, q.ec));
    return d;
}

Outcome dispersion_ranges() {
    Checks c;
    const auto& p = chips::builtin_presets();
    const auto d4 = preset_dispersions(p.chip4);
    const auto d8 = preset_dispersions(p.chip8);
    const auto [lo4, hi4] = std::minmax_element(d4.begin(), d4.end());
    const auto [lo8, hi8] = std::minmax_element(d8.begin(), d8.end());
    c.check(d4.size() == 4 && *lo4 >= 20.0 && *hi4 <= 160.0, fmt("chip4 eps01 %.2f..%.2f MHz in [20, 160]", *lo4, *hi4));
    c.check(d8.size() == 8 && *lo8 >= 2.0 && *hi8 <= 12.0, fmt("chip8 eps01 %.2f..%.2f MHz in [2, 12]", *lo8, *hi8));
    const double cv4 = chips::coefficient_of_variation(d4), cv8 = chips::coefficient_of_variation(d8);
    c.check(cv8 < cv4, fmt("CV chip8 %.3f < chip4 %.3f", cv8, cv4));
    return c.outcome();
}

Outcome dispersion_monotonicity() {
    Checks c;
    const auto grid = chips::linear_grid(10.0, 100.0, 10);
    int series = 0, bad = 0;
    for (const auto* chip : {&chips::builtin_presets().chip4, &chips::builtin_presets().chip8}) {
        for (const auto& s : chips::run_dispersion_sweep(*chip, grid).series) {
            ++series;
            for (std::size_t i = 1; i < s.y.size(); ++i) {
                if (!(s.y[i] < s.y[i - 1])) {
                    ++bad;
                    break;
                }
            }
        }
    }
    c.check(series == 12 && bad == 0, fmt("%d of %d series strictly decreasing over 10 points in [10, 100]", series - bad, series));
    return c.outcome();
}

Outcome coupling_shape() {
    Checks c;
    int dispersive = 0, turning = 0, bare = 0, rising = 0;
    for (const auto* chip : {&chips::builtin_presets().chip4, &chips::builtin_presets().chip8}) {
        for (const auto& q : chip->qubits) {
            // the sweep must actually carry f_q across the resonator
            const double lo = transmon::transition_frequency(q.ej, q.ej / 10.0);
            const double hi = transmon::transition_frequency(q.ej, q.ej / 100.0);
            c.check(std::min(lo, hi) < q.resonator_freq && q.resonator_freq < std::max(lo, hi),
                    fmt("%s/%s f_q sweep crosses %.3f GHz", chip->name.c_str(), q.label.c_str(), q.resonator_freq));
        }
        for (const auto& s : chips::run_coupling_sweep(*chip, chips::default_ratio_grid()).series) {
            if (s.y_name == "chi_GHz") {
                ++dispersive;
                if (slope_sign_changes(s.y) >= 1) ++turning;
            } else {
                ++bare;
                bool up = true;
                for (std::size_t i = 1; i < s.y.size(); ++i) up = up && s.y[i] > s.y[i - 1];
                if (up) ++rising;
            }
        }
    }
    Checks out;
    out.check(turning == dispersive && dispersive == 12,
              fmt("%d of %d dispersive series with an interior slope sign change", turning, dispersive));
    out.check(rising == bare && bare == 12, fmt("%d of %d bare series increasing", rising, bare));
    const auto crossing = c.outcome();
    out.check(crossing.pass, "all f_q sweeps cross their resonator");
    return out.outcome();
}

Outcome fem_oracle() {
    Checks c;
    fem::ParallelPlateParams params;
    const auto g = fem::build_parallel_plate(params);
    fem::MaterialLibrary lib;
    lib[fem::kVacuum] = fem::MaterialSpec{fem::kVacuum, 1.0, fem::MaterialRole::dielectric, 0.0, 1.0, 0.0};
    lib["plate"] = fem::MaterialSpec{"plate", 1.0, fem::MaterialRole::conductor, 0.0, 1.0, 0.0};
    const double v = 1.0;
    const double e_ideal = v / (params.separation * units::um);
    const double c_ideal = units::vacuum_permittivity * params.width / params.separation;

    auto mesh = fem::triangulate(g, fem::kDefaultTargetH);
    const auto sol = fem::assemble_and_solve(mesh, lib, v);
    double worst = 0.0;
    for (std::size_t t = 0; t < mesh.triangle_count(); ++t) {
        if (std::abs(mesh.centroid(t).x) > 0.3 * params.width) continue;  // interior
        worst = std::max(worst, rel(sol.e_norm[t], e_ideal));
    }
    c.check(worst <= kFieldTol, fmt("interior |E| max rel err %.2e <= %.2f", worst, kFieldTol));
    const double c0 = sol.capacitance();
    c.check(rel(c0, c_ideal) <= kCapTol, fmt("C default mesh rel err %.2e <= %.2f", rel(c0, c_ideal), kCapTol));
    for (int k = 0; k < 2; ++k) mesh = fem::refine_uniform(mesh);
    const double c2 = fem::assemble_and_solve(mesh, lib, v).capacitance();
    c.check(rel(c2, c_ideal) <= kCapRefinedTol,
            fmt("C after 2 refinements rel err %.2e <= %.2f (%zu nodes)", rel(c2, c_ideal), kCapRefinedTol, mesh.node_count()));
    return c.outcome();
}

Outcome fem_invariants() {
    Checks c;
    const auto pc = pad_case("Al-on-Si");
    const auto a = fem::assemble_and_solve(pc.mesh, pc.materials, 1.0);
    const auto b = fem::assemble_and_solve(pc.mesh, pc.materials, 2.0);
    const double lin = rel(b.total_energy, 4.0 * a.total_energy);
    c.check(lin <= kLinearityTol, fmt("U(2V)/4U(V) rel err %.1e", lin));

    fem::SolveOptions swapped;
    swapped.swap_terminals = true;
    const auto s = fem::assemble_and_solve(pc.mesh, pc.materials, 1.0, swapped);
    const double rec = rel(s.capacitance(), a.capacitance());
    c.check(rec <= kReciprocityTol, fmt("swapped-terminal C rel diff %.1e", rec));

    auto scaled = pc.materials;
    for (auto& [name, spec] : scaled) spec.relative_permittivity *= 3.0;
    const auto k3 = fem::assemble_and_solve(pc.mesh, scaled, 1.0);
    const double sc = rel(k3.total_energy, 3.0 * a.total_energy);
    c.check(sc <= kScalingTol, fmt("eps x3 -> U x3 rel err %.1e", sc));

    const auto rep = fem::participation(a, pc.mesh);
    double sum = 0.0;
    for (double f : rep.fraction) sum += f;
    c.check(std::abs(sum - 1.0) <= kSumTol, fmt("participation sum - 1 = %.1e", sum - 1.0));

    const double cg = fem::gauss_capacitance(a, pc.mesh);
    c.check(rel(cg, a.capacitance()) <= kGaussTol, fmt("Gauss vs energy C rel diff %.2e", rel(cg, a.capacitance())));
    return c.outcome();
}

Outcome material_contrast() {
    Checks c;
    double lossy[2];
    int k = 0;
    for (const char* preset : {"Al-on-Si", "Nb-on-Si"}) {
        const auto pc = pad_case(preset);
        const auto sol = fem::assemble_and_solve(pc.mesh, pc.materials, 1.0);
        lossy[k++] = fem::participation(sol, pc.mesh).lossy_surface();
        const auto p = pc.mesh.centroid(fem::peak_field_triangle(sol));
        double best = 1e300;
        for (const auto& corner : pc.geometry.gap_corners) best = std::min(best, std::hypot(p.x - corner.x, p.y - corner.y));
        c.check(best <= kCornerDistUm, fmt("%s peak |E| %.3f um from a gap corner", preset, best));
    }
    c.check(lossy[0] > lossy[1], fmt("oxide+surface participation Al %.4e > Nb %.4e", lossy[0], lossy[1]));
    return c.outcome();
}

bool same_report(const adaptive::ConvergenceReport& a, const adaptive::ConvergenceReport& b) {
    if (a.passes.size() != b.passes.size() || a.converged != b.converged) return false;
    for (std::size_t i = 0; i < a.passes.size(); ++i) {
        const auto &p = a.passes[i], &q = b.passes[i];
        if (p.node_count != q.node_count || p.capacitance != q.capacitance || p.fq != q.fq || p.ec != q.ec ||
            p.delta_rel != q.delta_rel || p.solver_iterations != q.solver_iterations) {
            return false;
        }
    }
    return true;
}

Outcome convergence_driver() {
    Checks c;
    const auto pc = pad_case("Al-on-Si");
    adaptive::ConvergenceSettings st;
    st.max_passes = 6;
    st.tol = kConvergeTol;
    const auto rep = adaptive::run_convergence(pc.geometry, pc.materials, st, "default");
    const double last = rep.passes.back().delta_rel.value_or(NAN);
    c.check(rep.converged && rep.passes.size() <= 6 && last <= kConvergeTol,
            fmt("converged=%d after %zu passes, final delta_rel %.2e", rep.converged, rep.passes.size(), last));

    std::string caps;
    bool monotone = true;
    for (std::size_t i = 0; i < rep.passes.size(); ++i) {
        caps += (i ? " -> " : "") + fmt("%.6e", rep.passes[i].capacitance);
        if (i && rep.passes[i].capacitance < rep.passes[i - 1].capacitance * (1.0 - kMonotoneSlack)) monotone = false;
    }
    c.check(monotone, "capacitance non-decreasing: " + caps + " F/m");

    adaptive::QubitVariant v{"twin", pc.geometry, pc.materials, st.ej};
    const auto twins = adaptive::multi_qubit_convergence({v, v}, st);
    const bool same = twins.size() == 2 && twins[0].report && twins[1].report &&
                      same_report(*twins[0].report, *twins[1].report) && same_report(*twins[0].report, rep);
    c.check(same, "identical presets give bitwise-identical reports");
    return c.outcome();
}

Outcome oracle_equivalence() {
    Checks c;
    double worst = 0.0;
    int cases = 0;
    for (int n = 1; n <= 3; ++n) {
        for (double ej : {0.5, 2.0, 10.0}) {
            for (double ec : {0.2, 1.0}) {
                for (double ng : {0.0, 0.25, 0.5}) {
                    const auto h = transmon::build_hamiltonian({ej, ec, ng, n});
                    const auto spec = transmon::diagonalize(h, 2 * n + 1);
                    // roots of det(H - x I) by sign counting on its leading principal minors
                    for (int k = 0; k < 2 * n + 1; ++k) {
                        const double root = oracle::sturm_eigenvalue(h.diagonal, h.off_diagonal, k);
                        worst = std::max(worst, std::abs(root - spec.energies[k]));
                    }
                    ++cases;
                }
            }
        }
    }
    c.check(worst <= kCharpolyTol, fmt("%d matrices (N <= 3): max |eig - root| %.1e", cases, worst));
    const auto s = transmon::diagonalize(transmon::build_hamiltonian({2.0, 1.0, 0.0, 1}), 3);
    const double r6 = std::sqrt(6.0);
    const double err = std::max({std::abs(s.energies[0] - (2.0 - r6)), std::abs(s.energies[1] - 4.0),
                                 std::abs(s.energies[2] - (2.0 + r6))});
    c.check(err <= kClosedFormTol, fmt("(EJ=2, EC=1, ng=0, N=1) vs {2-sqrt6, 4, 2+sqrt6}: max err %.1e", err));
    return c.outcome();
}

struct Criterion {
    int id;
    const char* name;
    double budget_s;  // 0: no runtime bound
    std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
    const std::vector<Criterion> criteria{
        {1, "band flattening", 5, band_flattening},
        {2, "anharmonicity law", 5, anharmonicity_law},
        {3, "dispersion ranges", 10, dispersion_ranges},
        {4, "dispersion monotonicity", 0, dispersion_monotonicity},
        {5, "coupling shape", 10, coupling_shape},
        {6, "FEM parallel-plate oracle", 30, fem_oracle},
        {7, "FEM invariants", 0, fem_invariants},
        {8, "material contrast", 60, material_contrast},
        {9, "convergence driver", 120, convergence_driver},
        {10, "oracle equivalence", 0, oracle_equivalence},
    };

    std::set<int> only;
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--only") == 0 && i + 1 < argc) {
            only.insert(std::atoi(argv[++i]));
        } else {
            std::fprintf(stderr, "usage: %s [--only N]...\n", argv[0]);
            return 2;
        }
    }

    int failed = 0;
    for (const auto& cr : criteria) {
        if (!only.empty() && !only.count(cr.id)) continue;
        const auto t0 = std::chrono::steady_clock::now();
        Outcome out;
        try {
            out = cr.run();
        } catch (const std::exception& e) {
            out = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::string timing = fmt("%.2f s", secs);
        if (cr.budget_s > 0) {
            const bool in_time = secs < cr.budget_s;
            timing += fmt(" (budget %.0f s%s)", cr.budget_s, in_time ? "" : ", EXCEEDED");
            out.pass = out.pass && in_time;
        }
        if (!out.pass) ++failed;
        std::printf("%s [%d] %s: %s [%s]\n", out.pass ? "PASS" : "FAIL", cr.id, cr.name, out.detail.c_str(),
                    timing.c_str());
        std::fflush(stdout);
    }
    return failed == 0 ? 0 : 1;
}
