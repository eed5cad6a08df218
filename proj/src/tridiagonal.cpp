#include "transmonlab/tridiagonal.hpp"

#include "transmonlab/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace tlab {

namespace {

Eigen::Index dominant_index(const Eigen::MatrixXd& z, Eigen::Index col) {
    Eigen::Index best = 0;
    double best_abs = -1.0;
    for (Eigen::Index r = 0; r < z.rows(); ++r) {
        // Strict comparison with a relative margin keeps the lowest index on near-ties.
        const double a = std::abs(z(r, col));
        if (a > best_abs * (1.0 + 1e-12)) {
            best_abs = a;
            best = r;
        }
    }
    return best;
}

}  // namespace

TridiagonalEigen solve_symmetric_tridiagonal(std::span<const double> diagonal,
                                             std::span<const double> off_diagonal,
                                             const TridiagonalOptions& options) {
    const auto n = static_cast<int>(diagonal.size());
    if (n == 0) {
        throw ParameterError("tridiagonal eigensolver: empty matrix");
    }
    if (off_diagonal.size() + 1 != diagonal.size()) {
        throw ParameterError("tridiagonal eigensolver: off-diagonal must have n-1 entries");
    }

    std::vector<double> d(diagonal.begin(), diagonal.end());
    std::vector<double> e(static_cast<std::size_t>(n), 0.0);
    std::copy(off_diagonal.begin(), off_diagonal.end(), e.begin());
    Eigen::MatrixXd z = Eigen::MatrixXd::Identity(n, n);

    const double eps = std::numeric_limits<double>::epsilon();
    const int budget = options.iterations_per_row * n;
    int total = 0;
    std::vector<double> per_value(static_cast<std::size_t>(n), 0.0);

    for (int l = 0; l < n; ++l) {
        int iter = 0;
        int m = l;
        do {
            for (m = l; m < n - 1; ++m) {
                const double dd = std::abs(d[m]) + std::abs(d[m + 1]);
                if (std::abs(e[m]) <= eps * dd) break;
            }
            if (m != l) {
                ++iter;
                if (++total > budget) {
                    per_value[l] = iter;
                    throw NumericalError("implicit QL did not converge within " + std::to_string(budget) +
                                             " sweeps (stalled at eigenvalue " + std::to_string(l) + ")",
                                         per_value, "eigensolver");
                }
                double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
                double r = std::hypot(g, 1.0);
                g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
                double s = 1.0;
                double c = 1.0;
                double p = 0.0;
                int i = m - 1;
                for (; i >= l; --i) {
                    double f = s * e[i];
                    const double b = c * e[i];
                    r = std::hypot(f, g);
                    e[i + 1] = r;
                    if (r == 0.0) {
                        d[i + 1] -= p;
                        e[m] = 0.0;
                        break;
                    }
                    s = f / r;
                    c = g / r;
                    g = d[i + 1] - p;
                    r = (d[i] - g) * s + 2.0 * c * b;
                    p = s * r;
                    d[i + 1] = g + p;
                    g = c * r - b;
                    for (int k = 0; k < n; ++k) {
                        f = z(k, i + 1);
                        z(k, i + 1) = s * z(k, i) + c * f;
                        z(k, i) = c * z(k, i) - s * f;
                    }
                }
                if (r == 0.0 && i >= l) continue;
                d[l] -= p;
                e[l] = g;
                e[m] = 0.0;
            }
        } while (m != l);
        per_value[l] = iter;
    }

    std::vector<Eigen::Index> dominant(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) dominant[k] = dominant_index(z, k);

    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        if (d[a] != d[b]) return d[a] < d[b];
        return dominant[a] < dominant[b];
    });
    TridiagonalEigen out;
    out.values.resize(static_cast<std::size_t>(n));
    out.vectors.resize(n, n);
    out.iterations = total;
    for (int k = 0; k < n; ++k) {
        const int src = order[k];
        out.values[k] = d[src];
        const double sign = z(dominant[src], src) < 0.0 ? -1.0 : 1.0;
        out.vectors.col(k) = sign * z.col(src);
    }
    return out;
}

}  // namespace tlab
