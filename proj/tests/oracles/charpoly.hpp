#pragma once

// Brute-force eigenvalue oracle: roots of det(A - x I) found by scanning for
// sign changes of a pivoted-LU determinant and bisecting. Only meant for tiny
// matrices with simple eigenvalues.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <vector>

namespace oracle {

inline double characteristic(const Eigen::MatrixXd& a, double x) {
    const auto n = a.rows();
    Eigen::MatrixXd m = a - x * Eigen::MatrixXd::Identity(n, n);
    double det = 1.0;
    for (Eigen::Index k = 0; k < n; ++k) {
        Eigen::Index piv = k;
        for (Eigen::Index r = k + 1; r < n; ++r) {
            if (std::abs(m(r, k)) > std::abs(m(piv, k))) piv = r;
        }
        if (m(piv, k) == 0.0) return 0.0;
        if (piv != k) {
            m.row(k).swap(m.row(piv));
            det = -det;
        }
        det *= m(k, k);
        for (Eigen::Index r = k + 1; r < n; ++r) {
            const double f = m(r, k) / m(k, k);
            m.row(r) -= f * m.row(k);
        }
    }
    return det;
}

inline std::vector<double> charpoly_roots(const Eigen::MatrixXd& a, int scan_points = 200000) {
    double radius = 0.0;  // Gershgorin
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        double r = std::abs(a(i, i));
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            if (j != i) r += std::abs(a(i, j));
        }
        radius = std::max(radius, r);
    }
    radius = radius * 1.01 + 1.0;
    std::vector<double> roots;
    double x_prev = -radius;
    double f_prev = characteristic(a, x_prev);
    for (int k = 1; k <= scan_points; ++k) {
        const double x = -radius + 2.0 * radius * k / scan_points;
        const double f = characteristic(a, x);
        if (f == 0.0) {
            roots.push_back(x);
        } else if ((f < 0.0) != (f_prev < 0.0) && f_prev != 0.0) {
            double lo = x_prev, hi = x, flo = f_prev;
            for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, std::abs(lo)); ++it) {
                const double mid = 0.5 * (lo + hi);
                const double fm = characteristic(a, mid);
                if ((fm < 0.0) == (flo < 0.0)) {
                    lo = mid;
                    flo = fm;
                } else {
                    hi = mid;
                }
            }
            roots.push_back(0.5 * (lo + hi));
        }
        x_prev = x;
        f_prev = f;
    }
    return roots;
}

}  // namespace oracle
