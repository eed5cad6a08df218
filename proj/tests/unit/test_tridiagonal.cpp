#include <doctest.h>

#include "oracles/charpoly.hpp"
#include "transmonlab/errors.hpp"
#include "transmonlab/tridiagonal.hpp"

#include <cmath>
#include <random>

using tlab::solve_symmetric_tridiagonal;

namespace {

Eigen::MatrixXd dense(const std::vector<double>& d, const std::vector<double>& e) {
    const auto n = static_cast<Eigen::Index>(d.size());
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        m(i, i) = d[i];
        if (i + 1 < n) m(i, i + 1) = m(i + 1, i) = e[i];
    }
    return m;
}

}  // namespace

TEST_CASE("1x1 and diagonal matrices") {
    auto one = solve_symmetric_tridiagonal(std::vector<double>{3.5}, std::vector<double>{});
    CHECK(one.values[0] == 3.5);
    CHECK(one.vectors(0, 0) == 1.0);

    auto diag = solve_symmetric_tridiagonal(std::vector<double>{4, 0, 4, 1}, std::vector<double>{0, 0, 0});
    CHECK(diag.values == std::vector<double>{0, 1, 4, 4});
    // degenerate pair ordered by the dominant charge index
    CHECK(diag.vectors(0, 2) == 1.0);
    CHECK(diag.vectors(2, 3) == 1.0);
}

TEST_CASE("shape errors") {
    CHECK_THROWS_AS(solve_symmetric_tridiagonal(std::vector<double>{}, std::vector<double>{}),
                    tlab::ParameterError);
    CHECK_THROWS_AS(solve_symmetric_tridiagonal(std::vector<double>{1, 2}, std::vector<double>{}),
                    tlab::ParameterError);
}

TEST_CASE("exhausted iteration budget reports diagnostics") {
    try {
        solve_symmetric_tridiagonal(std::vector<double>{1, 2, 3, 4}, std::vector<double>{1, 1, 1},
                                    tlab::TridiagonalOptions{0});
        FAIL("expected NumericalError");
    } catch (const tlab::NumericalError& err) {
        CHECK(err.history().size() == 4);
        CHECK(err.stage() == "eigensolver");
    }
}

TEST_CASE("random matrices: residual, orthonormality, oracle roots") {
    std::mt19937_64 rng(1234);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    for (int trial = 0; trial < 40; ++trial) {
        const int n = 1 + trial % 7;
        std::vector<double> d(n), e(n - 1);
        for (auto& v : d) v = u(rng);
        for (auto& v : e) v = u(rng);
        const auto eig = solve_symmetric_tridiagonal(d, e);
        const auto a = dense(d, e);

        for (int k = 0; k < n; ++k) {
            const Eigen::VectorXd v = eig.vectors.col(k);
            CHECK((a * v - eig.values[k] * v).norm() <= 1e-12 * std::max(1.0, std::abs(eig.values[k])));
            if (k > 0) CHECK(eig.values[k - 1] <= eig.values[k]);
        }
        const Eigen::MatrixXd gram = eig.vectors.transpose() * eig.vectors;
        CHECK((gram - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff() < 1e-12);

        const auto roots = oracle::charpoly_roots(a, 20000);
        REQUIRE(roots.size() == static_cast<std::size_t>(n));
        for (int k = 0; k < n; ++k) CHECK(eig.values[k] == doctest::Approx(roots[k]).epsilon(1e-9));
    }
}
