#pragma once

// Convergence passes: successive solves with the element size shrinking by
// 1/sqrt(2) per pass, each turned into a lumped qubit frequency through
// C_3D = C' * depth -> E_C -> f_q = sqrt(8 E_J E_C) - E_C.

#include "transmonlab/fem.hpp"

#include <optional>
#include <string>
#include <vector>

namespace tlab::adaptive {

inline constexpr double kRefinementRatio = 0.70710678118654752440;  // 1/sqrt(2)

struct ConvergenceSettings {
    double ej = 20.0;                           // GHz
    double depth_um = 100.0;                    // extrusion depth for C_3D
    int max_passes = 6;
    double tol = 0.005;                         // on |f_q(k) - f_q(k-1)| / f_q(k-1)
    double initial_h = fem::kDefaultTargetH;    // um, pass 1
    double grading = fem::kDefaultGrading;
    double drive_voltage = 1.0;                 // V
    fem::MeshOptions mesh;
    fem::SolveOptions solve;
};

struct PassRecord {
    int pass_index = 0;                // from 1
    double target_h = 0.0;             // um
    double grading = 0.0;
    std::size_t node_count = 0;
    double capacitance = 0.0;          // F/m
    double ec = 0.0;                   // GHz
    double fq = 0.0;                   // GHz
    std::optional<double> delta_rel;   // absent for pass 1
    std::size_t solver_iterations = 0;
};

struct ConvergenceReport {
    std::string label;
    std::vector<PassRecord> passes;
    bool converged = false;
    double criterion = 0.0;
    std::optional<int> passes_to_converge;
    ConvergenceSettings settings;
};

void validate(const ConvergenceSettings& settings);

// Element size of pass k (k >= 1).
double pass_target_h(const ConvergenceSettings& settings, int pass_index);

// One pass with the given mesh controls (used by run_convergence and to
// replay a recorded pass). delta_rel is left empty.
PassRecord run_pass(const fem::Geometry2D& geometry, const fem::MaterialLibrary& materials,
                    const ConvergenceSettings& settings, int pass_index, double target_h, double grading);

// Errors from a pass are rethrown with "pass k: " prepended.
ConvergenceReport run_convergence(const fem::Geometry2D& geometry, const fem::MaterialLibrary& materials,
                                  const ConvergenceSettings& settings, const std::string& label = "qubit");

struct QubitVariant {
    std::string label;
    fem::Geometry2D geometry;
    fem::MaterialLibrary materials;
    double ej = 20.0;  // GHz; overrides settings.ej
};

struct QubitOutcome {
    std::string label;
    std::optional<ConvergenceReport> report;
    std::string error;       // non-empty when the run failed
    std::string error_stage;
};

// Independent runs, one per variant, on up to `threads` workers (0: the
// TRANSMONLAB_NUM_THREADS cap or the hardware concurrency). A failing
// variant is recorded and the others continue. Results keep input order.
std::vector<QubitOutcome> multi_qubit_convergence(const std::vector<QubitVariant>& variants,
                                                  const ConvergenceSettings& settings, unsigned threads = 0);

// Pad-width variants: `count` qubits with widths spread evenly over
// base * [1 - spread, 1 + spread] (count 1 keeps the base width).
std::vector<QubitVariant> pad_width_variants(const fem::PadGeometryParams& base, const fem::MaterialLibrary& materials,
                                             int count, double spread, double ej, const std::string& prefix = "Q");

// Worker cap from TRANSMONLAB_NUM_THREADS (unset or invalid: hardware
// concurrency, at least 1).
unsigned worker_threads();

}  // namespace tlab::adaptive
