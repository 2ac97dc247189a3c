#include "lelab/fem.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/IterativeLinearSolvers>

#include "lelab/error.hpp"
#include "lelab/kernels.hpp"

namespace lelab {

namespace {

DofPtr ensure_dofs(const Mesh& mesh, DofPtr dofs)
{
    if (!dofs) return DofMap::interior(mesh);
    if (dofs->node_count() != mesh.num_nodes()) throw InputError("dof map does not match the mesh");
    return dofs;
}

bool touches_free(const Mesh& mesh, const DofMap& dofs, int cell)
{
    const auto& map = dofs.node_to_free();
    for (int k = 0; k < mesh.vertices_per_cell(); ++k)
        if (map[mesh.cells[cell][k]] >= 0) return true;
    return false;
}

std::vector<double> powered_weights(const Mesh& mesh, const DofMap& dofs, const std::vector<double>& weight,
                                    double exponent)
{
    if (weight.size() != mesh.cells.size()) throw InputError("cell weight has the wrong length");
    std::vector<double> coef(weight.size(), 0.0);
    for (int c = 0; c < mesh.num_cells(); ++c) {
        if (!touches_free(mesh, dofs, c)) continue;
        if (!(weight[c] > 0.0))
            throw InputError("weight is not positive at the barycenter of cell " + std::to_string(c));
        coef[c] = std::pow(weight[c], exponent);
        if (!std::isfinite(coef[c]) || coef[c] == 0.0)
            throw InputError("weight power under- or overflows at cell " + std::to_string(c));
    }
    return coef;
}

SparseOperator assemble(const Mesh& mesh, DofPtr dofs, kernels::LocalForm form, const std::vector<double>& coef,
                        OperatorKind kind, double exponent)
{
    const auto triplets = kernels::omp::local_triplets(mesh, form, dofs->node_to_free(), coef);
    SparseOperator op;
    op.matrix.resize(dofs->free_count(), dofs->free_count());
    op.matrix.setFromTriplets(triplets.begin(), triplets.end());
    op.matrix.makeCompressed();
    op.dofs = std::move(dofs);
    op.kind = kind;
    op.exponent = exponent;
    return op;
}

} // namespace

double infinity_norm(const SparseMatrix& A)
{
    // Column sums of |A|, equal to row sums for the symmetric matrices used here.
    double n = 0.0;
    for (int k = 0; k < A.outerSize(); ++k) {
        double s = 0.0;
        for (SparseMatrix::InnerIterator it(A, k); it; ++it) s += std::abs(it.value());
        n = std::max(n, s);
    }
    return n;
}

std::shared_ptr<const DofMap> DofMap::interior(const Mesh& mesh)
{
    std::vector<char> free(mesh.nodes.size());
    for (std::size_t i = 0; i < free.size(); ++i) free[i] = !mesh.boundary[i];
    return from_mask(free);
}

std::shared_ptr<const DofMap> DofMap::from_mask(const std::vector<char>& free)
{
    auto map = std::make_shared<DofMap>();
    map->node_to_free_.assign(free.size(), -1);
    for (std::size_t i = 0; i < free.size(); ++i)
        if (free[i]) {
            map->node_to_free_[i] = static_cast<int>(map->free_nodes_.size());
            map->free_nodes_.push_back(static_cast<int>(i));
        }
    return map;
}

Vector DofMap::restrict(const Vector& nodal) const
{
    if (nodal.size() != node_count()) throw InputError("nodal vector has the wrong length");
    Vector out(free_count());
    for (int k = 0; k < free_count(); ++k) out[k] = nodal[free_nodes_[k]];
    return out;
}

Vector DofMap::extend(const Vector& free) const
{
    if (free.size() != free_count()) throw InputError("free vector has the wrong length");
    Vector out = Vector::Zero(node_count());
    for (int k = 0; k < free_count(); ++k) out[free_nodes_[k]] = free[k];
    return out;
}

double SparseOperator::quadratic_form(const Vector& nodal) const
{
    const Vector x = dofs->restrict(nodal);
    return x.dot(matrix * x);
}

double SparseOperator::bilinear_form(const Vector& a, const Vector& b) const
{
    return dofs->restrict(a).dot(matrix * dofs->restrict(b));
}

std::vector<double> cell_means(const Mesh& mesh, const Vector& nodal)
{
    if (nodal.size() != mesh.num_nodes()) throw InputError("nodal vector has the wrong length");
    return kernels::omp::cell_means(mesh, nodal);
}

std::vector<double> cell_samples(const Mesh& mesh, const std::function<double(Point)>& f)
{
    return kernels::omp::cell_samples(mesh, f);
}

SparseOperator assemble_stiffness(const Mesh& mesh, DofPtr dofs)
{
    dofs = ensure_dofs(mesh, std::move(dofs));
    return assemble(mesh, dofs, kernels::LocalForm::Stiffness, std::vector<double>(mesh.cells.size(), 1.0),
                    OperatorKind::Stiffness, 0.0);
}

SparseOperator assemble_mass(const Mesh& mesh, DofPtr dofs)
{
    dofs = ensure_dofs(mesh, std::move(dofs));
    return assemble(mesh, dofs, kernels::LocalForm::Mass, std::vector<double>(mesh.cells.size(), 1.0),
                    OperatorKind::Mass, 0.0);
}

SparseOperator assemble_weighted_mass(const Mesh& mesh, const std::vector<double>& cell_weight, double exponent,
                                      DofPtr dofs)
{
    dofs = ensure_dofs(mesh, std::move(dofs));
    const auto coef = powered_weights(mesh, *dofs, cell_weight, exponent);
    return assemble(mesh, dofs, kernels::LocalForm::Mass, coef, OperatorKind::WeightedMass, exponent);
}

SparseOperator assemble_weighted_mass(const Mesh& mesh, const Vector& nodal_weight, double exponent, DofPtr dofs)
{
    return assemble_weighted_mass(mesh, cell_means(mesh, nodal_weight), exponent, std::move(dofs));
}

SparseOperator assemble_weighted_stiffness(const Mesh& mesh, const std::vector<double>& cell_weight,
                                           double exponent, DofPtr dofs)
{
    dofs = ensure_dofs(mesh, std::move(dofs));
    const auto coef = powered_weights(mesh, *dofs, cell_weight, exponent);
    return assemble(mesh, dofs, kernels::LocalForm::Stiffness, coef, OperatorKind::WeightedStiffness, exponent);
}

Vector nonlinear_load(const Mesh& mesh, const Vector& u, double q)
{
    auto values = cell_means(mesh, u);
    for (double& v : values) v = kernels::signed_power(v, q - 1.0);
    return kernels::omp::barycentric_load(mesh, values);
}

double integrate_abs_power(const Mesh& mesh, const Vector& u, double p)
{
    return kernels::omp::cell_integral(mesh, cell_means(mesh, u), kernels::abs_power, p);
}

double l1_norm(const Mesh& mesh, const Vector& u)
{
    return kernels::omp::cell_integral(mesh, cell_means(mesh, u), kernels::absolute, 0.0);
}

Vector restrict_to_component(const Mesh& mesh, const Vector& u, int component)
{
    Vector out = u;
    for (int i = 0; i < mesh.num_nodes(); ++i)
        if (mesh.node_component[i] != component) out[i] = 0.0;
    return out;
}

SpdSolver::SpdSolver(const SparseMatrix& A) : A_(A)
{
    if (A.rows() != A.cols()) throw InputError("matrix is not square");
    scale_.resize(A.rows());
    for (int i = 0; i < A.rows(); ++i) {
        const double d = A.coeff(i, i);
        if (!(d > 0.0)) throw SolverError("matrix has a non-positive diagonal entry");
        scale_[i] = 1.0 / std::sqrt(d);
    }
    scaled_ = scale_.asDiagonal() * A_ * scale_.asDiagonal();
    norm_inf_ = infinity_norm(A_);
    auto ldlt = std::make_shared<Eigen::SimplicialLDLT<SparseMatrix>>();
    ldlt->compute(scaled_);
    if (ldlt->info() == Eigen::Success && (ldlt->vectorD().array() > 0.0).all()) ldlt_ = std::move(ldlt);
}

Vector SpdSolver::solve(const Vector& rhs) const
{
    constexpr double target = 1e-12;
    if (rhs.size() != A_.rows()) throw InputError("right-hand side has the wrong length");
    if (rhs.cwiseAbs().maxCoeff() == 0.0) {
        last_residual_ = 0.0;
        return Vector::Zero(rhs.size());
    }
    // Normwise backward error ‖b − Ax‖∞ / (‖A‖∞‖x‖∞ + ‖b‖∞).
    auto backward = [&](const Vector& x, const Vector& r) {
        return r.cwiseAbs().maxCoeff() / (norm_inf_ * x.cwiseAbs().maxCoeff() + rhs.cwiseAbs().maxCoeff());
    };
    Vector x = Vector::Zero(rhs.size());
    double err = 1.0;
    if (ldlt_) {
        Vector r = rhs;
        for (int it = 0; it < 4; ++it) {
            x += scale_.cwiseProduct(ldlt_->solve(scale_.cwiseProduct(r)));
            r = rhs - A_ * x;
            const double next = backward(x, r);
            const bool stalled = it > 0 && next > 0.5 * err;
            err = next;
            if (err <= 0.1 * target || stalled) break;
        }
    }
    if (err > target) {
        Eigen::ConjugateGradient<SparseMatrix, Eigen::Lower | Eigen::Upper> cg;
        cg.setTolerance(1e-15);
        cg.setMaxIterations(std::max<Eigen::Index>(1000, 20 * A_.rows()));
        cg.compute(scaled_);
        const Vector y = cg.solveWithGuess(scale_.cwiseProduct(rhs), scale_.cwiseInverse().cwiseProduct(x));
        const Vector xc = scale_.cwiseProduct(y);
        const double errc = backward(xc, rhs - A_ * xc);
        if (errc < err) x = xc, err = errc;
    }
    last_residual_ = err;
    if (!(err <= target)) throw SolverError("SPD solve stalled at backward error " + std::to_string(err));
    return x;
}

Vector solve_spd(const SparseOperator& A, const Vector& rhs)
{
    return SpdSolver(A.matrix).solve(rhs);
}

std::optional<double> interpolate(const Mesh& mesh, const Vector& nodal, Point p)
{
    const auto hit = mesh.locate(p);
    if (!hit) return std::nullopt;
    const auto& [cell, lambda] = *hit;
    double v = 0.0;
    for (int k = 0; k < mesh.vertices_per_cell(); ++k) v += lambda[k] * nodal[mesh.cells[cell][k]];
    return v;
}

} // namespace lelab
