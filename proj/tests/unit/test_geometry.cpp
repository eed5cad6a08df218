#include <doctest.h>

#include "transmonlab/errors.hpp"
#include "transmonlab/geometry.hpp"

#include <algorithm>

using namespace tlab::fem;

namespace {

bool has_region(const Geometry2D& g, const std::string& name) {
    return std::any_of(g.regions.begin(), g.regions.end(), [&](const Region& r) { return r.name == name; });
}

const Region& region(const Geometry2D& g, const std::string& name) {
    return *std::find_if(g.regions.begin(), g.regions.end(), [&](const Region& r) { return r.name == name; });
}

}  // namespace

TEST_CASE("pad geometry: region count with oxide and penetration layers") {
    const auto g = build_pad_geometry(pad_params_for(find_material_preset("Al-on-Si")));
    CHECK(g.region_count() == 8);
    for (const char* name : {"substrate", "metal_left", "metal_right", "oxide_left", "oxide_right", "penetration_left",
                             "penetration_right"}) {
        CHECK(has_region(g, name));
    }
    CHECK(g.region_names().front() == "air");
    CHECK(region(g, "oxide_left").material == "Al-oxide");
    CHECK(region(g, "metal_left").terminal == Terminal::ground);
    CHECK(region(g, "metal_right").terminal == Terminal::driven);
}

TEST_CASE("pad geometry: zero oxide thickness drops the oxide regions") {
    auto p = pad_params_for(find_material_preset("Al-on-Si"));
    p.oxide_thickness = 0.0;
    const auto g = build_pad_geometry(p);
    CHECK(g.region_count() == 6);
    CHECK_FALSE(has_region(g, "oxide_left"));
    CHECK(has_region(g, "penetration_left"));

    p.penetration = false;
    CHECK(build_pad_geometry(p).region_count() == 4);
}

TEST_CASE("pad geometry: rejects a zero or negative gap") {
    PadGeometryParams p;
    p.gap = 0.0;
    CHECK_THROWS_AS(build_pad_geometry(p), tlab::GeometryError);
    p.gap = -1.0;
    CHECK_THROWS_AS(build_pad_geometry(p), tlab::GeometryError);
}

TEST_CASE("pad geometry: layer thicknesses follow the material preset") {
    const auto al = build_pad_geometry(pad_params_for(find_material_preset("Al-on-Si")));
    const auto nb = build_pad_geometry(pad_params_for(find_material_preset("Nb-on-Si")));
    auto core_height = [](const Geometry2D& g) { return rectangle_bounds(region(g, "metal_left").outline).height(); };
    CHECK(core_height(al) == doctest::Approx(0.1 - 0.016).epsilon(1e-12));
    CHECK(core_height(nb) == doctest::Approx(0.1 - 0.039).epsilon(1e-12));
    const auto ox = rectangle_bounds(region(nb, "oxide_right").outline);
    CHECK(ox.height() == doctest::Approx(0.1 + 0.005).epsilon(1e-12));
    CHECK(ox.width() == doctest::Approx(50.0 + 2 * 0.005).epsilon(1e-12));
}

TEST_CASE("pad geometry: pads sit on the substrate and the layout is symmetric") {
    const auto g = build_pad_geometry(PadGeometryParams{});
    const auto sub = rectangle_bounds(region(g, "substrate").outline);
    const auto l = rectangle_bounds(region(g, "penetration_left").outline);
    const auto r = rectangle_bounds(region(g, "penetration_right").outline);
    CHECK(sub.y1 == 0.0);
    CHECK(l.y0 == 0.0);
    CHECK(r.y0 == 0.0);
    CHECK(l.x0 == -r.x1);
    CHECK(r.x0 - l.x1 == doctest::Approx(10.0));
    CHECK(g.warnings.empty());
    CHECK(g.refinement_points.size() == 8);
}

TEST_CASE("pad geometry: small airbox triggers a warning") {
    PadGeometryParams p;
    p.airbox = {-290, -110, 290, 120};
    const auto g = build_pad_geometry(p);
    CHECK(g.warnings.size() == 1);

    p.airbox = {-100, -110, 100, 120};
    CHECK_THROWS_AS(build_pad_geometry(p), tlab::GeometryError);
}

TEST_CASE("validate: overlapping regions name the pair") {
    Geometry2D g;
    g.airbox = {-10, -10, 10, 10};
    g.regions.push_back({"a", RegionKind::substrate, "Si", rectangle(-5, -5, 1, 1), Terminal::none});
    g.regions.push_back({"b", RegionKind::oxide, "x", rectangle(0, 0, 5, 5), Terminal::none});
    try {
        validate(g);
        FAIL("overlap not detected");
    } catch (const tlab::GeometryError& e) {
        const std::string what = e.what();
        CHECK(what.find("'a'") != std::string::npos);
        CHECK(what.find("'b'") != std::string::npos);
    }
}

TEST_CASE("validate: touching regions are accepted, bad outlines rejected") {
    Geometry2D g;
    g.airbox = {-10, -10, 10, 10};
    g.regions.push_back({"a", RegionKind::substrate, "Si", rectangle(-5, -5, 0, 0), Terminal::none});
    g.regions.push_back({"b", RegionKind::oxide, "x", rectangle(0, -5, 5, 0), Terminal::none});
    CHECK_NOTHROW(validate(g));

    auto cw = g;
    std::reverse(cw.regions[0].outline.begin(), cw.regions[0].outline.end());
    validate(cw);
    CHECK(signed_area(cw.regions[0].outline) > 0.0);

    auto slanted = g;
    slanted.regions[0].outline = {{-5, -5}, {0, -4}, {0, 0}, {-5, 0}};
    CHECK_THROWS_AS(validate(slanted), tlab::GeometryError);

    auto outside = g;
    outside.regions[0].outline = rectangle(-11, -5, 0, 0);
    CHECK_THROWS_AS(validate(outside), tlab::GeometryError);

    auto floating = g;
    floating.regions[0].kind = RegionKind::conductor;
    CHECK_THROWS_AS(validate(floating), tlab::GeometryError);

    auto dup = g;
    dup.regions[1].name = "a";
    CHECK_THROWS_AS(validate(dup), tlab::GeometryError);

    auto huge = g;
    huge.airbox = {-1500, -1500, 1500, 1500};
    CHECK_THROWS_AS(validate(huge), tlab::GeometryError);
}

TEST_CASE("contains and is_rectangle") {
    const auto sq = rectangle(0, 0, 2, 2);
    CHECK(contains(sq, {1, 1}));
    CHECK_FALSE(contains(sq, {2, 1}));
    CHECK_FALSE(contains(sq, {3, 1}));
    CHECK(is_rectangle(sq));
    const std::vector<Point> ell{{0, 0}, {2, 0}, {2, 1}, {1, 1}, {1, 2}, {0, 2}};
    CHECK_FALSE(is_rectangle(ell));
    CHECK(contains(ell, {0.5, 1.5}));
    CHECK_FALSE(contains(ell, {1.5, 1.5}));
    CHECK(signed_area(ell) == doctest::Approx(3.0));
}

TEST_CASE("parallel plate geometry") {
    const auto g = build_parallel_plate({});
    CHECK(g.airbox.width() == doctest::Approx(10.0));
    CHECK(g.region_count() == 3);
    ParallelPlateParams p;
    p.substrate_depth = 2.0;
    const auto s = build_parallel_plate(p);
    CHECK(s.region_count() == 4);
    CHECK(s.airbox.y0 == doctest::Approx(-0.5 - 0.5 - 2.0));
}

TEST_CASE("material presets") {
    CHECK(builtin_material_presets().size() == 2);
    CHECK_THROWS_AS(find_material_preset("Cu-on-Si"), tlab::ConfigError);
    const auto lib = library_for(find_material_preset("Al-on-Si"));
    CHECK(lib.at("Al-oxide").relative_permittivity == 9.8);
    CHECK(lib.at("Al-penetration").relative_permittivity == 1.0);
    CHECK(lib.at("Si").relative_permittivity == 11.7);
    CHECK(lib.at(kVacuum).relative_permittivity == 1.0);
    MaterialSpec bad{"x", 0.5, MaterialRole::dielectric, 0, 1, 0};
    CHECK_THROWS_AS(validate(bad), tlab::ParameterError);
}
