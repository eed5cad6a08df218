#pragma once

#include "transmonlab/geometry.hpp"

#include <array>
#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

namespace tlab::fem {

enum class NodeMarker { interior, ground, driven, outer };

const char* to_string(NodeMarker marker);

struct MeshRegion {
    std::string name;
    RegionKind kind = RegionKind::air;
    std::string material;
    std::vector<Point> outline;  // empty for the background
    Terminal terminal = Terminal::none;
};

// Triangulation of the dielectric part of a geometry. Conductor interiors are
// holes; their boundary nodes carry the conductor's terminal marker.
struct Mesh2D {
    std::vector<Point> nodes;                   // um
    std::vector<std::array<int, 3>> triangles;  // counter-clockwise
    std::vector<int> triangle_region;           // index into `regions`
    std::vector<NodeMarker> markers;            // per node
    std::vector<MeshRegion> regions;            // regions[0] is the background
    Rect bounds;

    std::size_t node_count() const noexcept { return nodes.size(); }
    std::size_t triangle_count() const noexcept { return triangles.size(); }
    double area(std::size_t t) const;        // um^2, signed
    double min_angle_deg(std::size_t t) const;
    Point centroid(std::size_t t) const;
};

struct MeshStats {
    std::size_t nodes = 0;
    std::size_t triangles = 0;
    double min_angle_deg = 0.0;
    double min_area = 0.0;
    double max_area = 0.0;
};

MeshStats statistics(const Mesh2D& mesh);

// Default sizing for the pad cross sections.
inline constexpr double kDefaultTargetH = 20.0;  // um
inline constexpr double kDefaultGrading = 10.0;

struct MeshOptions {
    double min_angle_deg = 25.0;      // refinement target; output is guaranteed >= 20
    double size_gradient = 0.3;       // growth rate of the sizing field away from refinement points
    std::size_t max_vertices = 3000000;
    bool mirror = true;               // mesh half and reflect when the geometry is x-symmetric
};

// Constrained Delaunay refinement (Ruppert) of the geometry's region
// boundaries. `target_h` is the element size away from refinement points;
// within them the size is target_h / grading, growing linearly outwards.
// Throws MeshError with statistics when the vertex budget is exhausted.
Mesh2D triangulate(const Geometry2D& geometry, double target_h, double grading = 1.0,
                   const MeshOptions& options = {});

// Nested refinement: every triangle split into four through its edge midpoints.
Mesh2D refine_uniform(const Mesh2D& mesh);

// Plain-text exchange format:
//   <node_count> <triangle_count>
//   <id> <x> <y>                      (one per node)
//   <id> <n1> <n2> <n3> <region>      (one per triangle, region by name)
void write_mesh(std::ostream& out, const Mesh2D& mesh);
// Reads node coordinates and connectivity; regions are matched by name
// against `regions` (markers are left interior).
Mesh2D read_mesh(std::istream& in, const std::vector<MeshRegion>& regions);

}  // namespace tlab::fem
