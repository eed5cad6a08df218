#include <doctest.h>

#include "oracles/sturm.hpp"
#include "transmonlab/chipsets.hpp"
#include "transmonlab/errors.hpp"
#include "transmonlab/transmon.hpp"

#include <algorithm>
#include <cmath>
#include <set>

using namespace tlab;
using namespace tlab::chips;

namespace {

double oracle_dispersion_mhz(double ej, double ec) {
    const int n = transmon::default_cutoff(ej, ec) + 5;
    auto e01 = [&](double ng) {
        return oracle::transmon_level(ej, ec, ng, n, 1) - oracle::transmon_level(ej, ec, ng, n, 0);
    };
    return 1e3 * std::abs(e01(0.5) - e01(0.0));
}

std::vector<double> dispersions(const ChipPreset& c) {
    std::vector<double> d;
    for (const auto& q : c.qubits) d.push_back(oracle_dispersion_mhz(q.ej, q.ec));
    return d;
}

int slope_sign_changes(const std::vector<double>& y) {
    std::vector<double> v;
    for (double a : y) {
        if (!std::isnan(a)) v.push_back(a);
    }
    int changes = 0;
    for (std::size_t i = 2; i < v.size(); ++i) {
        const double s0 = v[i - 1] - v[i - 2], s1 = v[i] - v[i - 1];
        if ((s0 > 0) != (s1 > 0)) ++changes;
    }
    return changes;
}

}  // namespace

TEST_CASE("Sturm oracle agrees with the library eigensolver") {
    for (double ng : {0.0, 0.25, 0.5}) {
        const auto s = transmon::solve(10.0, 0.7, ng, 3, 12);
        for (int k = 0; k < 3; ++k) CHECK(s.energies[k] == doctest::Approx(oracle::transmon_level(10.0, 0.7, ng, 12, k)).epsilon(1e-11));
    }
}

TEST_CASE("builtin presets: dispersion ranges and clustering") {
    const auto& p = builtin_presets();
    REQUIRE(p.chip4.qubits.size() == 4);
    REQUIRE(p.chip8.qubits.size() == 8);
    const auto d4 = dispersions(p.chip4);
    const auto d8 = dispersions(p.chip8);
    for (double d : d4) {
        CHECK(d >= 20.0);
        CHECK(d <= 160.0);
    }
    for (double d : d8) {
        CHECK(d >= 2.0);
        CHECK(d <= 12.0);
    }
    CHECK(coefficient_of_variation(d8) < coefficient_of_variation(d4));
    for (const auto* c : {&p.chip4, &p.chip8}) {
        for (const auto& q : c->qubits) {
            CHECK(q.ratio() >= 10.0);
            CHECK(dispersion_mhz(q.ej, q.ec) == doctest::Approx(oracle_dispersion_mhz(q.ej, q.ec)).epsilon(1e-6));
        }
    }
}

TEST_CASE("bisection inverts the dispersion") {
    for (double target : {5.0, 40.0, 150.0}) {
        const double r = ratio_for_dispersion(0.5, target);
        CHECK(oracle_dispersion_mhz(r * 0.5, 0.5) == doctest::Approx(target).epsilon(1e-6));
    }
    CHECK_THROWS_AS(ratio_for_dispersion(0.5, 1e6), ParameterError);
    const auto recipe = chip4_recipe();
    const auto nominal = ratio_for_dispersion(recipe.nominal_ec, recipe.target_dispersion);
    CHECK(dispersion_mhz(nominal * recipe.nominal_ec, recipe.nominal_ec) ==
          doctest::Approx(recipe.target_dispersion).epsilon(1e-9));
}

TEST_CASE("heterogeneity: chip4 spread 5%, chip8 spread 1%") {
    auto check = [](const ChipPreset& c, double spread) {
        double lo = 1e300, hi = 0;
        for (const auto& q : c.qubits) {
            lo = std::min(lo, q.ec);
            hi = std::max(hi, q.ec);
        }
        const double mid = 0.5 * (lo + hi);
        CHECK((hi - mid) / mid == doctest::Approx(spread).epsilon(1e-9));
    };
    check(builtin_presets().chip4, 0.05);
    check(builtin_presets().chip8, 0.01);
}

TEST_CASE("dispersion sweep: strictly decreasing per qubit") {
    for (const auto* c : {&builtin_presets().chip4, &builtin_presets().chip8}) {
        const auto r = run_dispersion_sweep(*c, default_ratio_grid());
        CHECK(r.series.size() == c->qubits.size());
        for (const auto& s : r.series) {
            REQUIRE(s.y.size() == 10);
            for (std::size_t i = 1; i < s.y.size(); ++i) CHECK(s.y[i] < s.y[i - 1]);
            for (std::size_t i = 1; i < s.x.size(); ++i) CHECK(s.x[i] > s.x[i - 1]);
        }
        CHECK(r.metadata.min_cutoff >= 10);
        CHECK(r.metadata.max_cutoff >= r.metadata.min_cutoff);
        CHECK(r.metadata.eigensolver_iterations_per_row == 30);
        CHECK(r.metadata.preset == c->name);
    }
    const auto single = run_dispersion_sweep(builtin_presets().chip4, {25.0});
    CHECK(single.series[0].y.size() == 1);
}

TEST_CASE("dispersion sweep: identical presets give identical series") {
    ChipPreset twins{"custom", {}, "test"};
    auto q = builtin_presets().chip8.qubits[0];
    twins.qubits = {q, q};
    twins.qubits[1].label = "copy";
    const auto r = run_dispersion_sweep(twins, default_ratio_grid());
    CHECK(r.series[0].y == r.series[1].y);
}

TEST_CASE("anharmonicity sweep: slope near -1 and tighter chip8 clustering") {
    const auto a4 = run_anharmonicity_sweep(builtin_presets().chip4, default_ec_grid());
    const auto a8 = run_anharmonicity_sweep(builtin_presets().chip8, default_ec_grid());
    for (const auto* r : {&a4, &a8}) {
        for (const auto& s : r->series) CHECK(fit_line(s.x, s.y).slope == doctest::Approx(-1.0).epsilon(0.15));
    }
    CHECK(pooled_fit(a8).rms_residual <= pooled_fit(a4).rms_residual);
    CHECK_THROWS_AS(run_anharmonicity_sweep(builtin_presets().chip4, {}), ParameterError);
    CHECK_THROWS_AS(run_anharmonicity_sweep(builtin_presets().chip4, {0.3, 0.2}), ParameterError);
}

TEST_CASE("coupling sweep: bare rises, dispersive turns, flagged gap at resonance") {
    for (const auto* c : {&builtin_presets().chip4, &builtin_presets().chip8}) {
        const auto r = run_coupling_sweep(*c, default_ratio_grid());
        REQUIRE(r.series.size() == 2 * c->qubits.size());
        for (const auto& s : r.series) {
            if (s.y_name == "g01_GHz") {
                for (std::size_t i = 1; i < s.y.size(); ++i) CHECK(s.y[i] > s.y[i - 1]);
            } else {
                CHECK(slope_sign_changes(s.y) >= 1);
                // the resonator is placed at f_q(ej, ej/30): that grid point is a gap
                const auto it = std::find_if(s.x.begin(), s.x.end(), [](double x) { return std::abs(x - 30.0) < 1e-9; });
                REQUIRE(it != s.x.end());
                const auto k = static_cast<std::size_t>(it - s.x.begin());
                CHECK(std::isnan(s.y[k]));
                CHECK_FALSE(s.notes[k].empty());
            }
        }
    }
}

TEST_CASE("coupling sweep: g0 = 0 gives all-zero series") {
    ChipPreset c = builtin_presets().chip4;
    c.name = "custom";
    for (auto& q : c.qubits) q.g0 = 0.0;
    const auto r = run_coupling_sweep(c, default_ratio_grid());
    for (const auto& s : r.series) {
        for (double y : s.y) {
            if (!std::isnan(y)) CHECK(y == 0.0);
        }
    }
}

TEST_CASE("preset validation") {
    ChipPreset c = builtin_presets().chip4;
    c.qubits.pop_back();
    CHECK_THROWS_AS(validate(c), ParameterError);
    c = builtin_presets().chip8;
    c.qubits[1].label = c.qubits[0].label;
    CHECK_THROWS_AS(validate(c), ParameterError);
    c = builtin_presets().chip8;
    c.qubits[0].ej = 5.0 * c.qubits[0].ec;
    CHECK_THROWS_AS(validate(c), ParameterError);
    CHECK_THROWS_AS(find_chip_preset("chip5"), ParameterError);
    CHECK(find_chip_preset("chip8").qubits.size() == 8);
}

TEST_CASE("grids and fits") {
    const auto g = linear_grid(10.0, 100.0, 10);
    CHECK(g.front() == 10.0);
    CHECK(g.back() == 100.0);
    CHECK(g[1] == doctest::Approx(20.0));
    const auto f = fit_line({0, 1, 2, 3}, {1, 3, 5, 7});
    CHECK(f.slope == doctest::Approx(2.0));
    CHECK(f.intercept == doctest::Approx(1.0));
    CHECK(f.rms_residual == doctest::Approx(0.0));
    CHECK(coefficient_of_variation({2, 2, 2}) == 0.0);
    CHECK(coefficient_of_variation({1, 3}) == doctest::Approx(0.5));
}
