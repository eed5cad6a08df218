#pragma once

// P1 electrostatics on a Mesh2D. Geometry is in micrometres; all reported
// quantities are SI and per unit depth (J/m, F/m).

#include "transmonlab/materials.hpp"
#include "transmonlab/mesh.hpp"

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace tlab::fem {

struct SolveOptions {
    double rel_tol = 1e-10;              // ||r|| / ||b|| for Jacobi-preconditioned CG
    std::size_t max_iterations = 0;      // 0: automatic bound from the system size
    bool swap_terminals = false;         // drive the ground pad and ground the driven one
};

struct SolverStats {
    std::size_t unknowns = 0;
    std::size_t iterations = 0;
    double relative_residual = 0.0;
    std::vector<double> residual_history;  // relative residual per iteration
};

struct FieldSolution {
    std::vector<double> potential;                 // V per node
    std::vector<std::array<double, 2>> e_field;    // V/m per triangle
    std::vector<double> e_norm;                    // V/m per triangle
    std::vector<double> energy_density;            // J/m^3 per triangle
    std::vector<double> permittivity;              // relative, per triangle
    double total_energy = 0.0;                     // J/m
    double drive_voltage = 0.0;                    // V
    Terminal driven = Terminal::driven;            // conductor held at drive_voltage
    SolverStats stats;
    std::vector<std::string> warnings;

    double capacitance() const { return 2.0 * total_energy / (drive_voltage * drive_voltage); }  // F/m
};

// Solves div(eps grad V) = 0 with V = 0 on ground nodes, V = drive_voltage on
// driven nodes and natural (Neumann) conditions on the airbox. Every region
// material must be present in `materials`. Throws SetupError when a terminal
// is missing and NumericalError (with residual history) on stagnation.
FieldSolution assemble_and_solve(const Mesh2D& mesh, const MaterialLibrary& materials, double drive_voltage = 1.0,
                                 const SolveOptions& options = {});

// Bucket grid over the mesh bounds for point-in-triangle queries.
class TriangleLocator {
public:
    explicit TriangleLocator(const Mesh2D& mesh, std::size_t target_per_bucket = 4);
    // Triangle containing p (boundary points resolve to one neighbour), or -1.
    int find(Point p) const;

private:
    const Mesh2D* mesh_;
    Rect bounds_;
    std::size_t nx_ = 1, ny_ = 1;
    double dx_ = 1.0, dy_ = 1.0;
    std::vector<std::size_t> start_;
    std::vector<int> items_;
};

enum class ParticipationClass { substrate_bulk, substrate_surface_layer, metal_oxide, penetration_layer, air };
inline constexpr std::size_t kParticipationClasses = 5;
const char* to_string(ParticipationClass c);

struct ParticipationReport {
    std::array<double, kParticipationClasses> fraction{};
    std::array<double, kParticipationClasses> energy{};  // J/m
    double total_energy = 0.0;                           // J/m
    double capacitance = 0.0;                            // F/m
    double surface_layer_thickness_nm = 0.0;

    double operator[](ParticipationClass c) const { return fraction[static_cast<std::size_t>(c)]; }
    // metal_oxide + substrate_surface_layer
    double lossy_surface() const {
        return (*this)[ParticipationClass::metal_oxide] + (*this)[ParticipationClass::substrate_surface_layer];
    }
};

// Energy fractions per region class. The surface layer is the part of each
// substrate region within `surface_layer_thickness_nm` of its interfaces with
// other regions (airbox walls excluded); substrates must be rectangles.
// Throws ParameterError when no substrate element fits inside the layer.
ParticipationReport participation(const FieldSolution& solution, const Mesh2D& mesh,
                                  double surface_layer_thickness_nm = 10.0);

// Capacitance from the flux of eps*E through a rectangle around the driven
// conductor, offset by `margin_fraction` of the distance to the nearest
// other conductor. Contour sides on the airbox carry no flux.
double gauss_capacitance(const FieldSolution& solution, const Mesh2D& mesh, double margin_fraction = 0.382);

struct FieldRaster {
    std::size_t nx = 0, ny = 0;
    Rect window;
    std::vector<double> x, y;              // pixel centres (um)
    std::vector<double> e_norm;            // row-major: index j * nx + i; NaN outside the domain
    std::vector<double> energy_density;
    std::vector<int> triangle;             // sampled triangle or -1
};

// Piecewise-constant sampling of the per-triangle fields at pixel centres.
FieldRaster field_maps(const FieldSolution& solution, const Mesh2D& mesh, std::size_t nx, std::size_t ny,
                       std::optional<Rect> window = std::nullopt);

// Triangle of maximal e_norm.
std::size_t peak_field_triangle(const FieldSolution& solution);

}  // namespace tlab::fem
