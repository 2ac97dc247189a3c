#include "lelab/eigensolver.hpp"

#include <algorithm>
#include <random>

#include <Eigen/Dense>

#include "lelab/error.hpp"

namespace lelab {

namespace {

using Dense = Eigen::MatrixXd;

// Replaces Y by a B-orthonormal basis of its range; returns the rank kept.
int b_orthonormalize(Dense& Y, const SparseMatrix& B)
{
    for (int pass = 0; pass < 2; ++pass) {
        Dense G = Y.transpose() * (B * Y);
        G = 0.5 * (G + G.transpose());
        Eigen::SelfAdjointEigenSolver<Dense> es(G);
        const Vector& lam = es.eigenvalues();
        const double top = lam.maxCoeff();
        if (!(top > 0.0)) return 0;
        std::vector<int> keep;
        for (int j = static_cast<int>(lam.size()) - 1; j >= 0; --j)
            if (lam[j] > 1e-13 * top) keep.push_back(j);
        Dense Q(Y.rows(), static_cast<Eigen::Index>(keep.size()));
        for (std::size_t c = 0; c < keep.size(); ++c)
            Q.col(static_cast<Eigen::Index>(c)) = Y * es.eigenvectors().col(keep[c]) / std::sqrt(lam[keep[c]]);
        Y = std::move(Q);
    }
    return static_cast<int>(Y.cols());
}

void fill_random(Dense& X, int from, std::mt19937_64& rng)
{
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    for (Eigen::Index j = from; j < X.cols(); ++j)
        for (Eigen::Index i = 0; i < X.rows(); ++i) X(i, j) = dist(rng);
}

} // namespace

std::vector<EigenPair> smallest_generalized_eig(const SparseOperator& A, const SparseOperator& B, int k,
                                                const EigenOptions& options)
{
    if (A.dofs && B.dofs && A.dofs->free_count() != B.dofs->free_count())
        throw InputError("operators live on different dof sets");
    return smallest_generalized_eig(A.matrix, B.matrix, k, options);
}

std::vector<EigenPair> smallest_generalized_eig(const SparseMatrix& A, const SparseMatrix& B, int k,
                                                const EigenOptions& options)
{
    const int n = static_cast<int>(A.rows());
    if (k < 1 || k > 10) throw InputError("eigenpair count must lie in [1, 10]");
    if (n < k) throw InputError("fewer unknowns than requested eigenpairs");
    if (B.rows() != n || B.cols() != n || A.cols() != n) throw InputError("operator sizes differ");
    for (int i = 0; i < n; ++i)
        if (!(B.coeff(i, i) > 0.0)) throw InputError("B has a non-positive diagonal entry");

    const int p = std::min(n, options.block > 0 ? std::max(options.block, k) : std::max(2 * k, k + 8));
    const SpdSolver solver(A);
    const double normA = infinity_norm(A), normB = infinity_norm(B);
    std::mt19937_64 rng(20240611);
    Dense X(n, p);
    X.col(0).setOnes();
    fill_random(X, 1, rng);

    std::vector<EigenPair> out(k);
    std::vector<double> previous(k, 0.0);
    double best = std::numeric_limits<double>::infinity();
    int stalled = 0;
    int settled = 0;
    int extra = 0;
    for (int it = 0; it < options.max_iterations; ++it) {
        const Dense BX = B * X;
        Dense Y(n, X.cols());
        for (Eigen::Index j = 0; j < X.cols(); ++j) Y.col(j) = solver.solve(BX.col(j));
        const int rank = b_orthonormalize(Y, B);
        if (rank < k) throw SolverError("B is singular on the iteration subspace");

        Dense H = Y.transpose() * (A * Y);
        H = 0.5 * (H + H.transpose());
        Eigen::SelfAdjointEigenSolver<Dense> es(H);
        const Dense Z = Y * es.eigenvectors();

        double worst = 0.0;
        double drift = 0.0;
        for (int j = 0; j < k; ++j) {
            const Vector x = Z.col(j);
            const double mu = es.eigenvalues()[j];
            const Vector Bx = B * x;
            const double res = (A * x - mu * Bx).norm() / ((normA + std::abs(mu) * normB) * x.norm());
            out[j] = {mu, x, res};
            worst = std::max(worst, res);
            drift = std::max(drift, std::abs(mu - previous[j]) / std::abs(mu));
            previous[j] = mu;
        }
        // Ritz values converge at twice the rate of the vectors; keep going
        // until they stop moving, not merely until the residual test passes.
        settled = drift <= 1e-13 ? settled + 1 : 0;
        if (worst <= options.tolerance && (settled >= 2 || extra > 20)) {
            for (auto& pair : out)
                if (pair.vector.sum() < 0.0) pair.vector = -pair.vector;
            return out;
        }
        if (worst <= options.tolerance) {
            ++extra;
        } else if (worst < 0.5 * best) {
            best = worst;
            stalled = 0;
        } else if (++stalled > 200) {
            throw SolverError("eigensolver stalled at residual " + std::to_string(worst));
        }

        X.resize(n, p);
        X.leftCols(rank) = Z;
        if (rank < p) fill_random(X, rank, rng);
    }
    throw SolverError("eigensolver reached its iteration cap");
}

} // namespace lelab
