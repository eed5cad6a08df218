#include "transmonlab/chipsets.hpp"

#include "transmonlab/errors.hpp"
#include "transmonlab/tridiagonal.hpp"
#include "transmonlab/transmon.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <set>

namespace tlab::chips {

namespace {

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

void require(bool ok, const std::string& what) {
    if (!ok) throw ParameterError(what, "chip");
}

void require_grid(const std::vector<double>& grid, const std::string& what, double floor) {
    require(!grid.empty(), what + " grid is empty");
    for (std::size_t i = 0; i < grid.size(); ++i) {
        require(std::isfinite(grid[i]) && grid[i] >= floor, what + " grid values must be >= " + fmt(floor));
        if (i > 0) require(grid[i] > grid[i - 1], what + " grid must be strictly ascending");
    }
}

SweepMetadata metadata_for(const ChipPreset& chip, const std::string& sweep, const std::string& convention) {
    SweepMetadata m;
    m.preset = chip.name;
    m.sweep = sweep;
    m.min_cutoff = std::numeric_limits<int>::max();
    m.max_cutoff = 0;
    m.eigensolver_iterations_per_row = TridiagonalOptions{}.iterations_per_row;
    m.near_resonance_ghz = transmon::near_resonance_ghz;
    m.x_convention = convention;
    m.provenance = chip.provenance;
    return m;
}

void note_cutoff(SweepMetadata& m, double ej, double ec) {
    const int n = transmon::default_cutoff(ej, ec);
    m.min_cutoff = std::min(m.min_cutoff, n);
    m.max_cutoff = std::max(m.max_cutoff, n);
}

// Rethrows with the qubit label attached.
template <class F>
auto for_qubit(const QubitPreset& q, F&& fn) {
    try {
        return fn();
    } catch (const Error&) {
        rethrow_with_context("qubit " + q.label + ": ");
    }
}

}  // namespace

void validate(const ChipPreset& chip) {
    require(!chip.qubits.empty(), "chip '" + chip.name + "' has no qubits");
    if (chip.name == "chip4") require(chip.qubits.size() == 4, "chip4 needs 4 qubits");
    if (chip.name == "chip8") require(chip.qubits.size() == 8, "chip8 needs 8 qubits");
    std::set<std::string> labels;
    for (const auto& q : chip.qubits) {
        require(!q.label.empty(), "qubit without a label");
        require(labels.insert(q.label).second, "duplicate qubit label '" + q.label + "'");
        require(std::isfinite(q.ec) && q.ec > 0.0, "qubit " + q.label + ": ec must be > 0");
        require(std::isfinite(q.ej) && q.ratio() >= 10.0, "qubit " + q.label + ": ej/ec must be >= 10");
        require(std::isfinite(q.resonator_freq) && q.resonator_freq > 0.0,
                "qubit " + q.label + ": resonator frequency must be > 0");
        require(std::isfinite(q.g0) && q.g0 >= 0.0, "qubit " + q.label + ": g0 must be >= 0");
    }
}

double dispersion_mhz(double ej, double ec) { return 1e3 * transmon::charge_dispersion(ej, ec, {0, 1}); }

double ratio_for_dispersion(double ec, double target_mhz, double lo, double hi) {
    require(ec > 0.0 && target_mhz > 0.0 && lo > 0.0 && hi > lo, "ratio_for_dispersion: bad arguments");
    auto f = [&](double r) { return dispersion_mhz(r * ec, ec) - target_mhz; };
    double flo = f(lo), fhi = f(hi);
    require(flo >= 0.0 && fhi <= 0.0, "target dispersion " + fmt(target_mhz) + " MHz not bracketed");
    for (int it = 0; it < 200 && hi - lo > 1e-13 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (f(mid) > 0.0) lo = mid;
        else hi = mid;
    }
    return 0.5 * (lo + hi);
}

FamilyRecipe chip4_recipe() { return {"chip4", 4, 0.7, 40.0, 0.05, 0.05, 30.0}; }
FamilyRecipe chip8_recipe() { return {"chip8", 8, 0.3, 9.0, 0.01, 0.05, 30.0}; }

ChipPreset build_family(const FamilyRecipe& r) {
    require(r.count >= 1, "family needs at least one qubit");
    const double ratio = ratio_for_dispersion(r.nominal_ec, r.target_dispersion);
    const double ej = ratio * r.nominal_ec;
    ChipPreset chip;
    chip.name = r.name;
    chip.provenance = "synthesized preset: nominal ec " + fmt(r.nominal_ec) + " GHz, ej/ec " + fmt(ratio) +
                      " from bisection on a " + fmt(r.target_dispersion) +
                      " MHz transition dispersion, qubits perturbed by up to " +
                      fmt(r.spread * 100.0) + "% in ec (opposite sign in ej)";
    for (int i = 0; i < r.count; ++i) {
        const double o = r.count == 1 ? 0.0 : -r.spread + 2.0 * r.spread * i / (r.count - 1);
        QubitPreset q;
        q.label = "Q" + std::to_string(i + 1);
        q.ec = r.nominal_ec * (1.0 + o);
        q.ej = ej * (1.0 - o);
        q.g0 = r.g0;
        q.resonator_freq = transmon::transition_frequency(q.ej, q.ej / r.resonator_ratio);
        chip.qubits.push_back(q);
    }
    validate(chip);
    return chip;
}

const BuiltinPresets& builtin_presets() {
    static const BuiltinPresets presets{build_family(chip4_recipe()), build_family(chip8_recipe())};
    return presets;
}

const ChipPreset& find_chip_preset(const std::string& name) {
    if (name == "chip4") return builtin_presets().chip4;
    if (name == "chip8") return builtin_presets().chip8;
    throw ParameterError("unknown chip preset '" + name + "' (known: chip4, chip8)", "chip");
}

SweepResult run_dispersion_sweep(const ChipPreset& chip, const std::vector<double>& ratio_grid) {
    validate(chip);
    require_grid(ratio_grid, "ratio", 1.0);
    SweepResult out;
    out.metadata = metadata_for(chip, "dispersion", "x = ej/ec ascending at the preset ec");
    for (const auto& q : chip.qubits) {
        Series s{q.label, "ej_over_ec", "dispersion_MHz", {}, {}, {}};
        for (double r : ratio_grid) {
            s.x.push_back(r);
            s.y.push_back(for_qubit(q, [&] { return dispersion_mhz(r * q.ec, q.ec); }));
            s.notes.emplace_back();
            note_cutoff(out.metadata, r * q.ec, q.ec);
        }
        out.series.push_back(std::move(s));
    }
    return out;
}

SweepResult run_anharmonicity_sweep(const ChipPreset& chip, const std::vector<double>& ec_grid) {
    validate(chip);
    require_grid(ec_grid, "ec", std::numeric_limits<double>::min());
    SweepResult out;
    out.metadata = metadata_for(chip, "anharmonicity", "x = ec ascending at the preset ej/ec");
    for (const auto& q : chip.qubits) {
        Series s{q.label, "ec_GHz", "alpha_GHz", {}, {}, {}};
        const double ratio = q.ratio();
        for (double ec : ec_grid) {
            s.x.push_back(ec);
            s.y.push_back(for_qubit(q, [&] { return transmon::anharmonicity(ratio * ec, ec); }));
            s.notes.emplace_back();
            note_cutoff(out.metadata, ratio * ec, ec);
        }
        out.series.push_back(std::move(s));
    }
    return out;
}

SweepResult run_coupling_sweep(const ChipPreset& chip, const std::vector<double>& ratio_grid) {
    validate(chip);
    require_grid(ratio_grid, "ratio", 1.0);
    SweepResult out;
    out.metadata = metadata_for(chip, "coupling", "x = ej/ec ascending at the preset ej");
    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (const auto& q : chip.qubits) {
        std::vector<double> ec_values;
        for (double r : ratio_grid) {
            ec_values.push_back(q.ej / r);
            note_cutoff(out.metadata, q.ej, q.ej / r);
        }
        const auto curve =
            for_qubit(q, [&] { return transmon::coupling_curve(q.ej, ec_values, q.resonator_freq, q.g0); });
        Series bare{q.label, "ej_over_ec", "g01_GHz", {}, {}, {}};
        Series dispersive{q.label, "ej_over_ec", "chi_GHz", {}, {}, {}};
        for (const auto& p : curve) {
            bare.x.push_back(p.ej_over_ec);
            bare.y.push_back(p.g01);
            bare.notes.emplace_back();
            dispersive.x.push_back(p.ej_over_ec);
            dispersive.y.push_back(p.near_resonant ? nan : p.chi);
            dispersive.notes.push_back(p.near_resonant ? "near resonance: detuning " + fmt(p.detuning) +
                                                             " GHz"
                                                       : std::string());
        }
        out.series.push_back(std::move(bare));
        out.series.push_back(std::move(dispersive));
    }
    return out;
}

std::vector<double> linear_grid(double lo, double hi, std::size_t count) {
    require(count >= 1 && std::isfinite(lo) && std::isfinite(hi), "linear_grid: bad arguments");
    if (count == 1) return {lo};
    std::vector<double> g(count);
    for (std::size_t i = 0; i < count; ++i) {
        const double k = static_cast<double>(i), n = static_cast<double>(count - 1);
        g[i] = (lo * (n - k) + hi * k) / n;
    }
    g.back() = hi;
    return g;
}

std::vector<double> default_ratio_grid() { return linear_grid(10.0, 100.0, 10); }
std::vector<double> default_ec_grid() { return linear_grid(0.15, 0.35, 9); }

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
    require(x.size() == y.size() && x.size() >= 2, "fit_line needs at least two points");
    const double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    require(sxx > 0.0, "fit_line needs distinct abscissas");
    LineFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    double ss = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double r = y[i] - (f.intercept + f.slope * x[i]);
        ss += r * r;
    }
    f.rms_residual = std::sqrt(ss / n);
    return f;
}

LineFit pooled_fit(const SweepResult& result) {
    std::vector<double> x, y;
    for (const auto& s : result.series) {
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (std::isnan(s.y[i])) continue;
            x.push_back(s.x[i]);
            y.push_back(s.y[i]);
        }
    }
    return fit_line(x, y);
}

double coefficient_of_variation(const std::vector<double>& v) {
    require(!v.empty(), "coefficient_of_variation of an empty set");
    double mean = 0.0;
    for (double a : v) mean += a;
    mean /= static_cast<double>(v.size());
    double var = 0.0;
    for (double a : v) var += (a - mean) * (a - mean);
    var /= static_cast<double>(v.size());
    return std::sqrt(var) / std::abs(mean);
}

}  // namespace tlab::chips
