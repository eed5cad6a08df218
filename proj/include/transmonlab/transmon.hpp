#pragma once

// Transmon spectra in the truncated charge basis.
//
// H = 4 Ec (n - ng)^2 - (Ej / 2) sum_n (|n><n+1| + |n+1><n|),  n in [-N, N].
//
// All energies are frequencies E/h in GHz.

#include <Eigen/Dense>

#include <complex>
#include <string>
#include <utility>
#include <vector>

namespace tlab::transmon {

struct TransmonParams {
    double ej = 0.0;  // GHz
    double ec = 1.0;  // GHz
    double ng = 0.0;  // offset charge (Cooper pairs)
    int cutoff = 10;  // N, charge states -N..N
};

// ceil(5 + sqrt(Ej/Ec)); smaller truncations are allowed but flagged.
int recommended_cutoff(double ej, double ec);
// recommended_cutoff clamped to at least 10.
int default_cutoff(double ej, double ec);

// Throws ParameterError for ej < 0, ec <= 0, cutoff < 1 or non-finite inputs.
void validate(const TransmonParams& params);
// Non-fatal findings (cutoff below the recommended bound, Ej/Ec < 1).
std::vector<std::string> advisories(const TransmonParams& params);

struct ChargeBasisMatrix {
    TransmonParams params;
    std::vector<double> diagonal;  // 4 Ec ((i - N) - ng)^2
    double off_diagonal = 0.0;     // -Ej / 2 on both first off-diagonals

    std::size_t dimension() const noexcept { return diagonal.size(); }
    double trace() const noexcept;
    Eigen::MatrixXd dense() const;
};

ChargeBasisMatrix build_hamiltonian(const TransmonParams& params);

struct Spectrum {
    std::vector<double> energies;  // ascending, GHz
    Eigen::MatrixXd vectors;       // (2N+1) x M, column m is level m
    TransmonParams params;

    std::size_t levels() const noexcept { return energies.size(); }
    double transition(std::size_t i, std::size_t j) const { return energies.at(j) - energies.at(i); }
};

// Lowest `levels` eigenpairs. Throws ParameterError when levels is outside
// [1, dimension]; NumericalError on eigensolver breakdown.
Spectrum diagonalize(const ChargeBasisMatrix& h, int levels);

// Shorthand: build + diagonalize at (ej, ec, ng) with the default cutoff
// unless `cutoff` > 0.
Spectrum solve(double ej, double ec, double ng, int levels, int cutoff = 0);

struct NormalizedBands {
    std::vector<double> ng_grid;             // uniform on [0, 1]
    std::vector<std::vector<double>> bands;  // bands[m][k] at ng_grid[k]
    double e01_at_half = 0.0;                // normalization denominator, GHz
    int cutoff = 0;
};

// (E_m(ng) - min_ng E_0(ng)) / E_01(ng = 1/2) on `ng_samples` points.
NormalizedBands normalized_bands(double ej_over_ec, double ec, int ng_samples, int levels = 5,
                                 int cutoff = 0);

// |E_ij(1/2) - E_ij(0)| with E_ij = E_j - E_i; i == j gives the single-level
// dispersion |E_i(1/2) - E_i(0)|. GHz.
double charge_dispersion(double ej, double ec, std::pair<int, int> levels, int cutoff = 0);

// (E_2 - E_1) - (E_1 - E_0) at ng = 1/2. GHz.
double anharmonicity(double ej, double ec, int cutoff = 0);

// Exact E_01 at ng = 1/2. GHz.
double transition_frequency(double ej, double ec, int cutoff = 0);

// Closed-form sqrt(8 Ej Ec) - Ec. GHz.
double qubit_frequency(double ej, double ec);

// |<i| n |j>| with n = diag(-N..N).
double charge_matrix_element(const Spectrum& spectrum, std::size_t i, std::size_t j);

struct CouplingPoint {
    double ec = 0.0;
    double ej_over_ec = 0.0;
    double fq = 0.0;         // exact E_01 at ng = 1/2
    double alpha = 0.0;
    double detuning = 0.0;   // fq - f_resonator
    double g01 = 0.0;        // g0 |<0|n|1>|
    double chi = 0.0;        // g01^2 alpha / (detuning (detuning + alpha)); 0 when flagged
    bool near_resonant = false;  // |detuning| < 1 MHz, or at the alpha pole
};

inline constexpr double near_resonance_ghz = 1e-3;

// Holds Ej fixed, sweeps Ec. Points come back sorted by ascending Ej/Ec.
std::vector<CouplingPoint> coupling_curve(double ej_fixed, const std::vector<double>& ec_values,
                                          double resonator_freq, double g0);

struct WavefunctionSample {
    double phi = 0.0;
    std::complex<double> psi;
};

// psi_m(phi) = sum_n c_n exp(i n phi) / sqrt(2 pi).
std::vector<WavefunctionSample> wavefunction(const Spectrum& spectrum, std::size_t level,
                                             const std::vector<double>& phi_grid);
// `samples` points uniformly covering [-pi, pi] inclusive.
std::vector<double> phase_grid(int samples);

// e^2 / (2 C h) in GHz for a total capacitance in farads.
double ec_from_capacitance(double c_total);

}  // namespace tlab::transmon
