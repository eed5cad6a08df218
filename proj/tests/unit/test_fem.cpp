#include <doctest.h>

#include "support/mesh_checks.hpp"
#include "transmonlab/errors.hpp"
#include "transmonlab/fem.hpp"
#include "transmonlab/units.hpp"

#include <algorithm>
#include <cmath>
#include <map>

using namespace tlab::fem;

namespace {

MaterialLibrary vacuum_only() {
    MaterialLibrary lib;
    lib[kVacuum] = MaterialSpec{kVacuum, 1.0, MaterialRole::dielectric, 0.0, 1.0, 0.0};
    lib["Si"] = MaterialSpec{"Si", 11.7, MaterialRole::dielectric, 0.0, 1.0, 0.0};
    lib["plate"] = MaterialSpec{"plate", 1.0, MaterialRole::conductor, 0.0, 1.0, 0.0};
    return lib;
}

struct PadCase {
    Geometry2D geometry;
    Mesh2D mesh;
    MaterialLibrary materials;
};

const PadCase& pad_case(const std::string& preset) {
    static std::map<std::string, PadCase> cache;
    auto it = cache.find(preset);
    if (it == cache.end()) {
        const auto& p = find_material_preset(preset);
        PadCase c;
        c.geometry = build_pad_geometry(pad_params_for(p));
        c.mesh = triangulate(c.geometry, kDefaultTargetH, kDefaultGrading);
        c.materials = library_for(p);
        it = cache.emplace(preset, std::move(c)).first;
    }
    return it->second;
}

const PadCase& bare_case() {
    static const PadCase c = [] {
        PadGeometryParams p;
        p.oxide_thickness = 0.0;
        p.penetration = false;
        PadCase out;
        out.geometry = build_pad_geometry(p);
        out.mesh = triangulate(out.geometry, kDefaultTargetH, kDefaultGrading);
        out.materials = library_for(find_material_preset("Al-on-Si"));
        return out;
    }();
    return c;
}

}  // namespace

TEST_CASE("parallel plate: uniform field, energy density and capacitance") {
    const auto g = build_parallel_plate({});
    const auto m = triangulate(g, kDefaultTargetH);
    const auto sol = assemble_and_solve(m, vacuum_only(), 1.0);
    const double eps0 = tlab::units::vacuum_permittivity;
    for (std::size_t t = 0; t < m.triangle_count(); ++t) {
        const auto c = m.centroid(t);
        if (std::abs(c.x) > 3.0) continue;  // interior, away from the side walls
        CHECK(sol.e_norm[t] == doctest::Approx(1e6).epsilon(0.02));
        CHECK(sol.energy_density[t] == doctest::Approx(0.5 * eps0 * 1e12).epsilon(0.04));
    }
    CHECK(0.5 * eps0 * 1e12 == doctest::Approx(4.427).epsilon(1e-3));
    CHECK(sol.capacitance() == doctest::Approx(eps0 * 10.0).epsilon(0.10));
    CHECK(sol.warnings.empty());
}

TEST_CASE("free-standing plates: fringing raises the capacitance above eps0 w/d") {
    Geometry2D g;
    g.airbox = {-60, -60, 60, 60};
    g.regions.push_back({"bottom", RegionKind::conductor, "plate", rectangle(-5, -1, 5, -0.5), Terminal::ground});
    g.regions.push_back({"top", RegionKind::conductor, "plate", rectangle(-5, 0.5, 5, 1), Terminal::driven});
    g.refinement_points = {{-5, -0.5}, {5, -0.5}, {-5, 0.5}, {5, 0.5}};
    const auto m = triangulate(g, 10.0, 40.0);
    const auto sol = assemble_and_solve(m, vacuum_only(), 1.0);
    const double parallel = tlab::units::vacuum_permittivity * 10.0;
    CHECK(sol.capacitance() > parallel);
    CHECK(sol.capacitance() < 2.0 * parallel);
}

TEST_CASE("energy bookkeeping per triangle") {
    const auto& c = bare_case();
    const auto sol = assemble_and_solve(c.mesh, c.materials, 1.0);
    double sum = 0.0;
    const double eps0 = tlab::units::vacuum_permittivity;
    for (std::size_t t = 0; t < c.mesh.triangle_count(); ++t) {
        const auto e = sol.e_field[t];
        CHECK(sol.e_norm[t] == doctest::Approx(std::hypot(e[0], e[1])).epsilon(1e-14));
        CHECK(sol.energy_density[t] ==
              doctest::Approx(0.5 * eps0 * sol.permittivity[t] * (e[0] * e[0] + e[1] * e[1])).epsilon(1e-14));
        sum += sol.energy_density[t] * c.mesh.area(t) * 1e-12;
    }
    CHECK(sol.total_energy == doctest::Approx(sum).epsilon(1e-12));
    CHECK(sol.capacitance() == doctest::Approx(2.0 * sol.total_energy).epsilon(1e-15));
    CHECK(sol.stats.relative_residual <= 1e-10);
    CHECK(sol.stats.residual_history.size() == sol.stats.iterations);
}

TEST_CASE("Dirichlet values are exact and the maximum principle holds") {
    const auto& c = pad_case("Al-on-Si");
    const auto sol = assemble_and_solve(c.mesh, c.materials, 0.7);
    for (std::size_t i = 0; i < c.mesh.node_count(); ++i) {
        if (c.mesh.markers[i] == NodeMarker::ground) CHECK(sol.potential[i] == 0.0);
        if (c.mesh.markers[i] == NodeMarker::driven) CHECK(sol.potential[i] == 0.7);
    }
    const auto [lo, hi] = std::minmax_element(sol.potential.begin(), sol.potential.end());
    CHECK(*lo >= -1e-9 * 0.7);
    CHECK(*hi <= 0.7 * (1 + 1e-9));
    CHECK(sol.warnings.empty());
}

TEST_CASE("linearity in the drive voltage") {
    const auto& c = bare_case();
    const auto a = assemble_and_solve(c.mesh, c.materials, 1.0);
    const auto b = assemble_and_solve(c.mesh, c.materials, 2.0);
    double worst = 0.0;
    for (std::size_t i = 0; i < a.potential.size(); ++i) worst = std::max(worst, std::abs(b.potential[i] - 2.0 * a.potential[i]));
    CHECK(worst <= 1e-10 * 2.0);
    CHECK(b.total_energy == doctest::Approx(4.0 * a.total_energy).epsilon(1e-10));
    CHECK(b.capacitance() == doctest::Approx(a.capacitance()).epsilon(1e-10));
}

TEST_CASE("reciprocity: swapping terminals keeps energy and capacitance") {
    for (const PadCase* c : {&bare_case(), &pad_case("Nb-on-Si")}) {
        const auto a = assemble_and_solve(c->mesh, c->materials, 1.0);
        SolveOptions swapped;
        swapped.swap_terminals = true;
        const auto b = assemble_and_solve(c->mesh, c->materials, 1.0, swapped);
        CHECK(b.total_energy == doctest::Approx(a.total_energy).epsilon(1e-10));
        CHECK(b.driven == Terminal::ground);
    }
}

TEST_CASE("permittivity scaling multiplies energy exactly") {
    const auto& c = pad_case("Al-on-Si");
    auto scaled = c.materials;
    for (auto& [name, spec] : scaled) spec.relative_permittivity *= 3.0;
    const auto a = assemble_and_solve(c.mesh, c.materials, 1.0);
    const auto b = assemble_and_solve(c.mesh, scaled, 1.0);
    CHECK(b.total_energy == doctest::Approx(3.0 * a.total_energy).epsilon(1e-9));
    CHECK(b.capacitance() == doctest::Approx(3.0 * a.capacitance()).epsilon(1e-9));
}

TEST_CASE("mirror symmetry: V(x) + V(-x) = V0") {
    const auto& c = pad_case("Al-on-Si");
    const auto sol = assemble_and_solve(c.mesh, c.materials, 1.0);
    std::map<std::pair<double, double>, std::size_t> index;
    for (std::size_t i = 0; i < c.mesh.node_count(); ++i) index[{c.mesh.nodes[i].x, c.mesh.nodes[i].y}] = i;
    double worst = 0.0;
    for (std::size_t i = 0; i < c.mesh.node_count(); ++i) {
        const auto it = index.find({-c.mesh.nodes[i].x, c.mesh.nodes[i].y});
        REQUIRE(it != index.end());
        worst = std::max(worst, std::abs(sol.potential[i] + sol.potential[it->second] - 1.0));
    }
    CHECK(worst < 1e-7);
}

TEST_CASE("nested refinement: energy converges from above") {
    const auto& c = bare_case();
    const auto coarse = triangulate(c.geometry, 60.0, 4.0);
    auto mesh = coarse;
    double previous = assemble_and_solve(mesh, c.materials, 1.0).total_energy;
    std::vector<double> energies{previous};
    for (int k = 0; k < 2; ++k) {
        mesh = refine_uniform(mesh);
        const double u = assemble_and_solve(mesh, c.materials, 1.0).total_energy;
        CHECK(u <= previous * (1 + 1e-9));
        energies.push_back(u);
        previous = u;
    }
    // successive differences shrink
    CHECK(std::abs(energies[2] - energies[1]) < std::abs(energies[1] - energies[0]));
}

TEST_CASE("Gauss-law capacitance agrees with the energy capacitance") {
    for (const PadCase* c : {&pad_case("Al-on-Si"), &pad_case("Nb-on-Si"), &bare_case()}) {
        const auto sol = assemble_and_solve(c->mesh, c->materials, 1.0);
        CHECK(gauss_capacitance(sol, c->mesh) == doctest::Approx(sol.capacitance()).epsilon(0.03));
    }
    const auto pp = build_parallel_plate({});
    const auto m = triangulate(pp, 0.5);
    const auto sol = assemble_and_solve(m, vacuum_only(), 2.0);
    CHECK(gauss_capacitance(sol, m) == doctest::Approx(sol.capacitance()).epsilon(1e-6));
}

TEST_CASE("participation: partition of the energy") {
    for (const char* preset : {"Al-on-Si", "Nb-on-Si"}) {
        const auto& c = pad_case(preset);
        const auto sol = assemble_and_solve(c.mesh, c.materials, 1.0);
        const auto rep = participation(sol, c.mesh);
        double sum = 0.0;
        for (double f : rep.fraction) {
            CHECK(f >= 0.0);
            CHECK(f <= 1.0);
            sum += f;
        }
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-6));
        CHECK(rep.capacitance == doctest::Approx(sol.capacitance()).epsilon(1e-12));
        CHECK(rep[ParticipationClass::metal_oxide] > 0.0);
        CHECK(rep[ParticipationClass::penetration_layer] > 0.0);
        CHECK(rep[ParticipationClass::substrate_bulk] > rep[ParticipationClass::air]);
    }
}

TEST_CASE("participation: a thicker surface layer takes a larger share") {
    const auto& c = pad_case("Al-on-Si");
    const auto sol = assemble_and_solve(c.mesh, c.materials, 1.0);
    const auto thin = participation(sol, c.mesh, 10.0);
    const auto thick = participation(sol, c.mesh, 100.0);
    CHECK(thick[ParticipationClass::substrate_surface_layer] > thin[ParticipationClass::substrate_surface_layer]);
    CHECK(thick[ParticipationClass::air] == doctest::Approx(thin[ParticipationClass::air]).epsilon(1e-12));
}

TEST_CASE("participation: parallel plates in vacuum keep the energy in the gap") {
    ParallelPlateParams p;
    p.substrate_depth = 2.0;
    const auto g = build_parallel_plate(p);
    const auto m = triangulate(g, 0.25);
    const auto sol = assemble_and_solve(m, vacuum_only(), 1.0);
    const auto rep = participation(sol, m, 600.0);
    CHECK(rep[ParticipationClass::air] == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(rep[ParticipationClass::substrate_bulk] + rep[ParticipationClass::substrate_surface_layer] < 1e-9);
}

TEST_CASE("participation: aluminium puts more energy in lossy surfaces than niobium") {
    const auto& al = pad_case("Al-on-Si");
    const auto& nb = pad_case("Nb-on-Si");
    const auto ra = participation(assemble_and_solve(al.mesh, al.materials, 1.0), al.mesh);
    const auto rn = participation(assemble_and_solve(nb.mesh, nb.materials, 1.0), nb.mesh);
    CHECK(ra.lossy_surface() > rn.lossy_surface());
}

TEST_CASE("participation: unresolved surface layer is rejected") {
    const auto& c = bare_case();
    const auto sol = assemble_and_solve(c.mesh, c.materials, 1.0);
    CHECK_THROWS_AS(participation(sol, c.mesh, 1.0), tlab::ParameterError);
    CHECK_THROWS_AS(participation(sol, c.mesh, 0.0), tlab::ParameterError);
    CHECK_NOTHROW(participation(sol, c.mesh, 5000.0));
}

TEST_CASE("field maps sample per-triangle values") {
    const auto& c = pad_case("Al-on-Si");
    const auto sol = assemble_and_solve(c.mesh, c.materials, 1.0);
    const Rect window{-40.0, -20.0, 40.0, 20.0};
    const auto r = field_maps(sol, c.mesh, 81, 41, window);
    const double tri_max = *std::max_element(sol.e_norm.begin(), sol.e_norm.end());
    double raster_max = 0.0;
    std::size_t absent = 0;
    for (std::size_t k = 0; k < r.e_norm.size(); ++k) {
        if (r.triangle[k] < 0) {
            CHECK(std::isnan(r.e_norm[k]));
            ++absent;
            continue;
        }
        CHECK(r.e_norm[k] == sol.e_norm[static_cast<std::size_t>(r.triangle[k])]);
        CHECK(r.energy_density[k] == sol.energy_density[static_cast<std::size_t>(r.triangle[k])]);
        raster_max = std::max(raster_max, r.e_norm[k]);
    }
    CHECK(raster_max <= tri_max);
    CHECK(absent < r.e_norm.size());

    // inside the conductor core there is no field
    Rect core{10.0, 0.02, 50.0, 0.07};
    const auto inside = field_maps(sol, c.mesh, 4, 2, core);
    for (double v : inside.e_norm) CHECK(std::isnan(v));
    CHECK_THROWS_AS(field_maps(sol, c.mesh, 1, 5), tlab::ParameterError);
}

TEST_CASE("peak field sits at a gap-side pad corner") {
    for (const char* preset : {"Al-on-Si", "Nb-on-Si"}) {
        const auto& c = pad_case(preset);
        const auto sol = assemble_and_solve(c.mesh, c.materials, 1.0);
        const auto p = c.mesh.centroid(peak_field_triangle(sol));
        double best = 1e300;
        for (const auto& corner : c.geometry.gap_corners) best = std::min(best, std::hypot(p.x - corner.x, p.y - corner.y));
        CHECK(best < 2.0);
    }
}

TEST_CASE("locator returns the triangle containing a centroid") {
    const auto& c = bare_case();
    const TriangleLocator loc(c.mesh);
    for (std::size_t t = 0; t < c.mesh.triangle_count(); t += 7) CHECK(loc.find(c.mesh.centroid(t)) == static_cast<int>(t));
    CHECK(loc.find({1e4, 0}) == -1);
}

TEST_CASE("setup and numerical errors") {
    const auto& c = bare_case();
    MaterialLibrary missing = c.materials;
    missing.erase("Si");
    CHECK_THROWS_AS(assemble_and_solve(c.mesh, missing, 1.0), tlab::SetupError);

    auto floating = c.mesh;
    for (auto& m : floating.markers) {
        if (m == NodeMarker::driven) m = NodeMarker::interior;
    }
    CHECK_THROWS_AS(assemble_and_solve(floating, c.materials, 1.0), tlab::SetupError);
    for (auto& m : floating.markers) {
        if (m == NodeMarker::ground) m = NodeMarker::interior;
    }
    CHECK_THROWS_AS(assemble_and_solve(floating, c.materials, 1.0), tlab::SetupError);

    SolveOptions starved;
    starved.max_iterations = 3;
    try {
        assemble_and_solve(c.mesh, c.materials, 1.0, starved);
        FAIL("expected a numerical error");
    } catch (const tlab::NumericalError& e) {
        CHECK(e.history().size() >= 3);
        CHECK(e.stage() == "solver");
    }
}
