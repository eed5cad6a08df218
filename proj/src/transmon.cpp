#include "transmonlab/transmon.hpp"

#include "transmonlab/errors.hpp"
#include "transmonlab/tridiagonal.hpp"
#include "transmonlab/units.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace tlab::transmon {

namespace {

void require(bool ok, const std::string& what) {
    if (!ok) throw ParameterError(what);
}

int resolve_cutoff(double ej, double ec, int cutoff) {
    return cutoff > 0 ? cutoff : default_cutoff(ej, ec);
}

}  // namespace

int recommended_cutoff(double ej, double ec) {
    require(ec > 0.0 && ej >= 0.0, "recommended_cutoff: need ej >= 0 and ec > 0");
    return static_cast<int>(std::ceil(5.0 + std::sqrt(ej / ec)));
}

int default_cutoff(double ej, double ec) { return std::max(10, recommended_cutoff(ej, ec)); }

void validate(const TransmonParams& p) {
    require(std::isfinite(p.ej) && std::isfinite(p.ec) && std::isfinite(p.ng),
            "transmon parameters must be finite");
    require(p.ej >= 0.0, "ej must be >= 0 (got " + std::to_string(p.ej) + ")");
    require(p.ec > 0.0, "ec must be > 0 (got " + std::to_string(p.ec) + ")");
    require(p.cutoff >= 1, "cutoff must be >= 1 (got " + std::to_string(p.cutoff) + ")");
}

std::vector<std::string> advisories(const TransmonParams& p) {
    validate(p);
    std::vector<std::string> out;
    const int rec = recommended_cutoff(p.ej, p.ec);
    if (p.cutoff < rec) {
        out.push_back("cutoff " + std::to_string(p.cutoff) + " is below the recommended " + std::to_string(rec));
    }
    if (p.ej < p.ec) {
        out.push_back("ej/ec < 1: outside the transmon regime");
    }
    return out;
}

double ChargeBasisMatrix::trace() const noexcept {
    double t = 0.0;
    for (double v : diagonal) t += v;
    return t;
}

Eigen::MatrixXd ChargeBasisMatrix::dense() const {
    const auto n = static_cast<Eigen::Index>(dimension());
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        m(i, i) = diagonal[static_cast<std::size_t>(i)];
        if (i + 1 < n) {
            m(i, i + 1) = off_diagonal;
            m(i + 1, i) = off_diagonal;
        }
    }
    return m;
}

ChargeBasisMatrix build_hamiltonian(const TransmonParams& params) {
    validate(params);
    ChargeBasisMatrix h;
    h.params = params;
    const int n_max = params.cutoff;
    h.diagonal.reserve(static_cast<std::size_t>(2 * n_max + 1));
    for (int n = -n_max; n <= n_max; ++n) {
        const double q = n - params.ng;
        h.diagonal.push_back(4.0 * params.ec * q * q);
    }
    h.off_diagonal = -0.5 * params.ej;
    return h;
}

Spectrum diagonalize(const ChargeBasisMatrix& h, int levels) {
    const auto dim = static_cast<int>(h.dimension());
    if (levels < 1 || levels > dim) {
        throw ParameterError("diagonalize: levels must be in [1, " + std::to_string(dim) + "], got " +
                             std::to_string(levels));
    }
    const std::vector<double> off(static_cast<std::size_t>(dim - 1), h.off_diagonal);
    auto eig = solve_symmetric_tridiagonal(h.diagonal, off);

    Spectrum s;
    s.params = h.params;
    s.energies.assign(eig.values.begin(), eig.values.begin() + levels);
    s.vectors = eig.vectors.leftCols(levels);
    return s;
}

Spectrum solve(double ej, double ec, double ng, int levels, int cutoff) {
    TransmonParams p{ej, ec, ng, 1};
    validate(p);
    p.cutoff = resolve_cutoff(ej, ec, cutoff);
    return diagonalize(build_hamiltonian(p), levels);
}

NormalizedBands normalized_bands(double ej_over_ec, double ec, int ng_samples, int levels, int cutoff) {
    require(ng_samples >= 3, "normalized_bands: need at least 3 ng samples");
    require(ej_over_ec > 0.0, "normalized_bands: ej/ec must be > 0");
    require(ec > 0.0, "normalized_bands: ec must be > 0");
    require(levels >= 2, "normalized_bands: need at least 2 levels");
    const double ej = ej_over_ec * ec;
    const int n_cut = resolve_cutoff(ej, ec, cutoff);

    NormalizedBands out;
    out.cutoff = n_cut;
    const auto half = solve(ej, ec, 0.5, 2, n_cut);
    out.e01_at_half = half.transition(0, 1);
    require(out.e01_at_half > 0.0, "normalized_bands: E01 vanishes at ng = 1/2 (Ej = 0)");

    out.ng_grid.resize(static_cast<std::size_t>(ng_samples));
    out.bands.assign(static_cast<std::size_t>(levels), std::vector<double>(out.ng_grid.size()));
    double e0_min = 0.0;
    for (int k = 0; k < ng_samples; ++k) {
        const double ng = static_cast<double>(k) / (ng_samples - 1);
        out.ng_grid[k] = ng;
        const auto s = solve(ej, ec, ng, levels, n_cut);
        for (int m = 0; m < levels; ++m) out.bands[m][k] = s.energies[m];
        e0_min = k == 0 ? s.energies[0] : std::min(e0_min, s.energies[0]);
    }
    for (auto& band : out.bands) {
        for (double& v : band) v = (v - e0_min) / out.e01_at_half;
    }
    return out;
}

double charge_dispersion(double ej, double ec, std::pair<int, int> levels, int cutoff) {
    const auto [i, j] = levels;
    require(i >= 0 && i <= j && j <= 4, "charge_dispersion: need 0 <= i <= j <= 4");
    const int n_cut = resolve_cutoff(ej, ec, cutoff);
    const auto at_half = solve(ej, ec, 0.5, j + 1, n_cut);
    const auto at_zero = solve(ej, ec, 0.0, j + 1, n_cut);
    if (i == j) return std::abs(at_half.energies[i] - at_zero.energies[i]);
    return std::abs(at_half.transition(i, j) - at_zero.transition(i, j));
}

double anharmonicity(double ej, double ec, int cutoff) {
    const auto s = solve(ej, ec, 0.5, 3, cutoff);
    return s.transition(1, 2) - s.transition(0, 1);
}

double transition_frequency(double ej, double ec, int cutoff) {
    return solve(ej, ec, 0.5, 2, cutoff).transition(0, 1);
}

double qubit_frequency(double ej, double ec) {
    require(ej > 0.0 && ec > 0.0, "qubit_frequency: need ej > 0 and ec > 0");
    return std::sqrt(8.0 * ej * ec) - ec;
}

double charge_matrix_element(const Spectrum& spectrum, std::size_t i, std::size_t j) {
    if (i >= spectrum.levels() || j >= spectrum.levels()) {
        throw ParameterError("charge_matrix_element: level index out of range");
    }
    const int n_max = spectrum.params.cutoff;
    double acc = 0.0;
    for (int k = 0; k < spectrum.vectors.rows(); ++k) {
        acc += spectrum.vectors(k, static_cast<Eigen::Index>(i)) * static_cast<double>(k - n_max) *
               spectrum.vectors(k, static_cast<Eigen::Index>(j));
    }
    return std::abs(acc);
}

std::vector<CouplingPoint> coupling_curve(double ej_fixed, const std::vector<double>& ec_values,
                                          double resonator_freq, double g0) {
    require(ej_fixed > 0.0, "coupling_curve: ej must be > 0");
    require(resonator_freq > 0.0, "coupling_curve: resonator frequency must be > 0");
    for (double ec : ec_values) require(ec > 0.0, "coupling_curve: every ec must be > 0");

    std::vector<CouplingPoint> out;
    out.reserve(ec_values.size());
    for (double ec : ec_values) {
        const auto s = solve(ej_fixed, ec, 0.5, 3);
        CouplingPoint pt;
        pt.ec = ec;
        pt.ej_over_ec = ej_fixed / ec;
        pt.fq = s.transition(0, 1);
        pt.alpha = s.transition(1, 2) - pt.fq;
        pt.detuning = pt.fq - resonator_freq;
        pt.g01 = g0 * charge_matrix_element(s, 0, 1);
        pt.near_resonant = std::abs(pt.detuning) < near_resonance_ghz ||
                           std::abs(pt.detuning + pt.alpha) < near_resonance_ghz;
        if (!pt.near_resonant) {
            pt.chi = pt.g01 * pt.g01 * pt.alpha / (pt.detuning * (pt.detuning + pt.alpha));
        }
        out.push_back(pt);
    }
    std::stable_sort(out.begin(), out.end(),
                     [](const CouplingPoint& a, const CouplingPoint& b) { return a.ej_over_ec < b.ej_over_ec; });
    return out;
}

std::vector<WavefunctionSample> wavefunction(const Spectrum& spectrum, std::size_t level,
                                             const std::vector<double>& phi_grid) {
    if (level >= spectrum.levels()) throw ParameterError("wavefunction: level index out of range");
    const int n_max = spectrum.params.cutoff;
    const double norm = 1.0 / std::sqrt(2.0 * std::numbers::pi);
    const auto col = static_cast<Eigen::Index>(level);

    std::vector<WavefunctionSample> out;
    out.reserve(phi_grid.size());
    for (double phi : phi_grid) {
        std::complex<double> acc{0.0, 0.0};
        for (int k = 0; k < spectrum.vectors.rows(); ++k) {
            acc += spectrum.vectors(k, col) * std::polar(1.0, static_cast<double>(k - n_max) * phi);
        }
        out.push_back({phi, norm * acc});
    }
    return out;
}

std::vector<double> phase_grid(int samples) {
    require(samples >= 2, "phase_grid: need at least 2 samples");
    std::vector<double> grid(static_cast<std::size_t>(samples));
    for (int k = 0; k < samples; ++k) {
        grid[k] = -std::numbers::pi + 2.0 * std::numbers::pi * k / (samples - 1);
    }
    return grid;
}

double ec_from_capacitance(double c_total) {
    require(c_total > 0.0 && std::isfinite(c_total), "ec_from_capacitance: capacitance must be > 0");
    const double e = units::elementary_charge;
    return e * e / (2.0 * c_total * units::planck) / units::ghz;
}

}  // namespace tlab::transmon
