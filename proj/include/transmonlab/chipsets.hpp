#pragma once

// Chip-level qubit families and the dispersion / anharmonicity / coupling
// sweeps run over them.

#include <string>
#include <vector>

namespace tlab::chips {

struct QubitPreset {
    std::string label;
    double ej = 0.0;              // GHz
    double ec = 0.0;              // GHz
    double resonator_freq = 0.0;  // GHz
    double g0 = 0.0;              // GHz

    double ratio() const noexcept { return ej / ec; }
};

struct ChipPreset {
    std::string name;  // chip4, chip8 or custom
    std::vector<QubitPreset> qubits;
    std::string provenance;
};

// Unique labels, ej/ec >= 10, positive ec and resonator frequency, g0 >= 0;
// chip4 / chip8 must hold 4 / 8 qubits. Throws ParameterError.
void validate(const ChipPreset& chip);

// Recipe behind a builtin family: nominal E_C and target transition
// dispersion; the nominal E_J/E_C is found by bisection on the dispersion.
// Qubit i gets ec * (1 + o_i) and ej * (1 - o_i) with offsets o_i evenly
// spaced over [-spread, spread].
struct FamilyRecipe {
    std::string name;
    int count = 0;
    double nominal_ec = 0.0;          // GHz
    double target_dispersion = 0.0;   // MHz at the nominal point
    double spread = 0.0;              // relative
    double g0 = 0.05;                 // GHz
    double resonator_ratio = 30.0;    // resonator sits at f_q(ej, ej / resonator_ratio)
};

FamilyRecipe chip4_recipe();
FamilyRecipe chip8_recipe();
ChipPreset build_family(const FamilyRecipe& recipe);

// Smallest ej/ec in [lo, hi] with transition dispersion equal to
// `dispersion_mhz` at the given ec (dispersion falls monotonically with the
// ratio). Throws ParameterError when the target is not bracketed.
double ratio_for_dispersion(double ec, double dispersion_mhz, double lo = 1.0, double hi = 200.0);

struct BuiltinPresets {
    ChipPreset chip4;
    ChipPreset chip8;
};
const BuiltinPresets& builtin_presets();
// chip4 or chip8; ParameterError otherwise.
const ChipPreset& find_chip_preset(const std::string& name);

// Transition dispersion |E_01(1/2) - E_01(0)| in MHz.
double dispersion_mhz(double ej, double ec);

struct Series {
    std::string qubit;
    std::string x_name;
    std::string y_name;
    std::vector<double> x;
    std::vector<double> y;            // NaN where flagged
    std::vector<std::string> notes;   // non-empty for flagged points
};

struct SweepMetadata {
    std::string preset;
    std::string sweep;
    int min_cutoff = 0;
    int max_cutoff = 0;
    int eigensolver_iterations_per_row = 0;
    double near_resonance_ghz = 0.0;
    std::string x_convention;
    std::string provenance;
};

struct SweepResult {
    std::vector<Series> series;
    SweepMetadata metadata;
};

// Ec held at the preset value, ej = ratio * ec; y is the transition dispersion in MHz.
SweepResult run_dispersion_sweep(const ChipPreset& chip, const std::vector<double>& ratio_grid);
// Ratio held at the preset value, ec from the grid; y is alpha in GHz.
SweepResult run_anharmonicity_sweep(const ChipPreset& chip, const std::vector<double>& ec_grid);
// Ej held at the preset value, ec = ej / ratio; two series per qubit: the
// bare coupling g01 = g0 |<0|n|1>| and the dispersive shift chi (GHz).
SweepResult run_coupling_sweep(const ChipPreset& chip, const std::vector<double>& ratio_grid);

std::vector<double> linear_grid(double lo, double hi, std::size_t count);
std::vector<double> default_ratio_grid();  // 10 points over [10, 100]
std::vector<double> default_ec_grid();     // 9 points over [0.15, 0.35] GHz

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double rms_residual = 0.0;
};
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);
// Least-squares line through the points of every series pooled together.
LineFit pooled_fit(const SweepResult& result);

// Population coefficient of variation.
double coefficient_of_variation(const std::vector<double>& values);

}  // namespace tlab::chips
