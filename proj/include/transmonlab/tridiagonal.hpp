#pragma once

#include <Eigen/Dense>

#include <span>
#include <vector>

namespace tlab {

struct TridiagonalOptions {
    // Iteration budget is `iterations_per_row * n` implicit QL sweeps in total.
    int iterations_per_row = 30;
};

struct TridiagonalEigen {
    std::vector<double> values;  // ascending
    Eigen::MatrixXd vectors;     // column k pairs with values[k]
    int iterations = 0;
};

// Full eigendecomposition of the real symmetric tridiagonal matrix with the
// given diagonal (length n) and sub/super-diagonal (length n-1), by implicit
// QL with Wilkinson shifts. Eigenvalues come back ascending; exactly equal values are
// ordered by the index of each vector's dominant component, and every vector
// is signed so its dominant component is positive.
//
// Throws NumericalError (history = per-eigenvalue iteration counts) when the
// budget is exhausted.
TridiagonalEigen solve_symmetric_tridiagonal(std::span<const double> diagonal,
                                             std::span<const double> off_diagonal,
                                             const TridiagonalOptions& options = {});

}  // namespace tlab
