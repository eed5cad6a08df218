#pragma once

// Cross-section geometry in micrometres. Regions are rectilinear polygons;
// whatever part of the airbox no region covers is the background (air).

#include "transmonlab/materials.hpp"

#include <string>
#include <vector>

namespace tlab::fem {

struct Point {
    double x = 0.0;
    double y = 0.0;
    friend bool operator==(const Point&, const Point&) = default;
};

struct Rect {
    double x0 = 0.0, y0 = 0.0, x1 = 0.0, y1 = 0.0;
    double width() const noexcept { return x1 - x0; }
    double height() const noexcept { return y1 - y0; }
};

enum class RegionKind { air, substrate, conductor, oxide, penetration };
enum class Terminal { none, ground, driven };

const char* to_string(RegionKind kind);
const char* to_string(Terminal terminal);

struct Region {
    std::string name;  // e.g. "metal_left"
    RegionKind kind = RegionKind::air;
    std::string material;
    std::vector<Point> outline;  // rectilinear, counter-clockwise after validation
    Terminal terminal = Terminal::none;
};

struct Geometry2D {
    Rect airbox;
    std::string background_material = kVacuum;
    std::vector<Region> regions;          // explicit regions; air is implicit
    std::vector<Point> refinement_points; // mesh grading centres (pad corners)
    std::vector<Point> gap_corners;       // conductor corners facing the gap
    std::vector<std::string> warnings;

    // Explicit regions plus the background.
    std::size_t region_count() const noexcept { return regions.size() + 1; }
    std::vector<std::string> region_names() const;
};

Rect rectangle_bounds(const std::vector<Point>& outline);
std::vector<Point> rectangle(double x0, double y0, double x1, double y1);
double signed_area(const std::vector<Point>& outline);
// Even-odd test; points on an edge count as outside.
bool contains(const std::vector<Point>& outline, Point p);
bool is_rectangle(const std::vector<Point>& outline);

// Orients outlines counter-clockwise and checks: rectilinear edges, positive
// area, containment in the airbox, pairwise interior-disjointness, airbox
// extent supported by the mesher. Throws GeometryError naming the offending
// region or pair.
void validate(Geometry2D& geometry);

// Coplanar two-pad cross section.
struct PadGeometryParams {
    double pad_width = 50.0;
    double pad_thickness = 0.1;
    double gap = 10.0;
    double substrate_depth = 100.0;
    double substrate_width = 560.0;
    Rect airbox{-300.0, -260.0, 300.0, 300.0};
    double oxide_thickness = 0.003;    // um; 0 drops the oxide regions
    double penetration_depth = 0.016;  // um; used when `penetration` is set
    bool penetration = true;
    std::string conductor_material = "Al";
    std::string substrate_material = "Si";
    std::string oxide_material = "Al-oxide";
    std::string penetration_material = "Al-penetration";
    Terminal left_terminal = Terminal::ground;
    Terminal right_terminal = Terminal::driven;
};

// Layer thicknesses and material names taken from a material preset.
PadGeometryParams pad_params_for(const MaterialPreset& preset);

// Regions: substrate, metal_{left,right} (conductor core), oxide_{left,right}
// (shell over the exposed pad faces), penetration_{left,right} (outer shell of
// the pad in which field is allowed). Throws GeometryError on bad dimensions.
Geometry2D build_pad_geometry(const PadGeometryParams& params);

// Two horizontal plates spanning the airbox width (guarded parallel plate:
// the Neumann side walls suppress fringing). Bottom plate is grounded.
struct ParallelPlateParams {
    double width = 10.0;
    double separation = 1.0;
    double plate_thickness = 0.5;
    double substrate_depth = 0.0;  // > 0 adds a substrate below the bottom plate
};
Geometry2D build_parallel_plate(const ParallelPlateParams& params);

}  // namespace tlab::fem
