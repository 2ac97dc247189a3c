#pragma once

#include <vector>

#include "lelab/fem.hpp"

namespace lelab {

struct EigenPair {
    double value = 0.0;
    Vector vector;  // free dofs, B-normalized
    double residual = 0.0;  // ‖Ax − μBx‖ / ((‖A‖ + |μ|‖B‖)‖x‖)
};

struct EigenOptions {
    double tolerance = 1e-10;  // normwise backward error of each pair
    int max_iterations = 5000;
    int block = 0;             // 0 picks max(2k, k + 8)
};

/// k smallest eigenpairs of A x = μ B x (A SPD, B symmetric positive
/// semidefinite) by block shift-invert iteration at 0 with Rayleigh-Ritz.
/// Converged vectors are B-orthonormal; values ascend.
std::vector<EigenPair> smallest_generalized_eig(const SparseOperator& A, const SparseOperator& B, int k,
                                                const EigenOptions& options = {});
std::vector<EigenPair> smallest_generalized_eig(const SparseMatrix& A, const SparseMatrix& B, int k,
                                                const EigenOptions& options = {});

} // namespace lelab
