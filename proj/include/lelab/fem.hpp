#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>

#include "lelab/mesh.hpp"

namespace lelab {

using Vector = Eigen::VectorXd;
using SparseMatrix = Eigen::SparseMatrix<double>;

/// Numbering of the free (non-Dirichlet) nodes.
class DofMap {
public:
    /// Every non-boundary node is free.
    static std::shared_ptr<const DofMap> interior(const Mesh& mesh);
    /// Free where mask is nonzero.
    static std::shared_ptr<const DofMap> from_mask(const std::vector<char>& free);

    int free_count() const { return static_cast<int>(free_nodes_.size()); }
    int node_count() const { return static_cast<int>(node_to_free_.size()); }
    const std::vector<int>& free_nodes() const { return free_nodes_; }
    const std::vector<int>& node_to_free() const { return node_to_free_; }

    Vector restrict(const Vector& nodal) const;
    /// Free vector to nodal vector with zeros on constrained nodes.
    Vector extend(const Vector& free) const;

private:
    std::vector<int> free_nodes_;
    std::vector<int> node_to_free_;
};

using DofPtr = std::shared_ptr<const DofMap>;

enum class OperatorKind { Stiffness, Mass, WeightedMass, WeightedStiffness };

/// Symmetric matrix over the free nodes plus its assembly descriptor.
struct SparseOperator {
    SparseMatrix matrix;
    DofPtr dofs;
    OperatorKind kind = OperatorKind::Stiffness;
    double exponent = 1.0;  // weight exponent, weighted kinds only

    int size() const { return static_cast<int>(matrix.rows()); }
    /// xᵀAx for a nodal field (constrained entries ignored).
    double quadratic_form(const Vector& nodal) const;
    /// xᵀAy for nodal fields.
    double bilinear_form(const Vector& a, const Vector& b) const;
};

/// Nodal coefficients on a mesh. Dirichlet-tagged fields vanish on boundary nodes.
struct ScalarField {
    const Mesh* mesh = nullptr;
    Vector values;
    bool dirichlet = true;
};

/// Cell-wise weights: either the mean of nodal values or point samples at
/// barycenters.
std::vector<double> cell_means(const Mesh& mesh, const Vector& nodal);
std::vector<double> cell_samples(const Mesh& mesh, const std::function<double(Point)>& f);

SparseOperator assemble_stiffness(const Mesh& mesh, DofPtr dofs = nullptr);
SparseOperator assemble_mass(const Mesh& mesh, DofPtr dofs = nullptr);

/// Mass with weight^exponent taken at each barycenter times the exact local
/// P1 mass. Throws InputError if a cell touching a free node has weight <= 0
/// (or a non-finite power).
SparseOperator assemble_weighted_mass(const Mesh& mesh, const std::vector<double>& cell_weight, double exponent,
                                      DofPtr dofs = nullptr);
SparseOperator assemble_weighted_mass(const Mesh& mesh, const Vector& nodal_weight, double exponent,
                                      DofPtr dofs = nullptr);
/// Stiffness with weight^exponent per cell.
SparseOperator assemble_weighted_stiffness(const Mesh& mesh, const std::vector<double>& cell_weight,
                                           double exponent, DofPtr dofs = nullptr);

/// Nodal load of |u|^{p-1} sign(u) (p = q) with one-point barycentric quadrature.
Vector nonlinear_load(const Mesh& mesh, const Vector& u, double q);
/// Σ |T| |u_b|^p.
double integrate_abs_power(const Mesh& mesh, const Vector& u, double p);
/// Σ |T| |u_b|; exact for fields of one sign on each cell.
double l1_norm(const Mesh& mesh, const Vector& u);
/// Copy of u with every node outside `component` set to zero.
Vector restrict_to_component(const Mesh& mesh, const Vector& u, int component);

/// Max absolute column sum (the ∞-norm for symmetric A).
double infinity_norm(const SparseMatrix& A);

/// Factorized SPD solve with iterative refinement and a CG fallback.
class SpdSolver {
public:
    explicit SpdSolver(const SparseMatrix& A);
    Vector solve(const Vector& rhs) const;
    /// Backward error of the last solve.
    double last_residual() const { return last_residual_; }

private:
    SparseMatrix A_;
    Vector scale_;
    double norm_inf_ = 0.0;
    SparseMatrix scaled_;
    std::shared_ptr<Eigen::SimplicialLDLT<SparseMatrix>> ldlt_;
    mutable double last_residual_ = 0.0;
};

/// Solution of A x = rhs (free-dof vectors) with normwise backward error
/// ‖b − Ax‖∞ / (‖A‖∞‖x‖∞ + ‖b‖∞) <= 1e-12.
Vector solve_spd(const SparseOperator& A, const Vector& rhs);

/// Value of a nodal P1 field at a point (nullopt outside the mesh).
std::optional<double> interpolate(const Mesh& mesh, const Vector& nodal, Point p);

} // namespace lelab
