#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "lelab/fem.hpp"
#include "lelab/mesh.hpp"

namespace lelab {

enum class InitialGuess { Torsion, Supplied };

struct LaneEmdenConfig {
    double q = 1.5;
    double tolerance = 1e-12;     // relative sup-norm update
    int max_iterations = 20000;
    double damping = 1.0;
    double min_damping = 1.0 / 1024.0;
    InitialGuess start = InitialGuess::Torsion;
    Vector initial;               // nodal, used with InitialGuess::Supplied
};

void validate(const LaneEmdenConfig& config);

struct SolveReport {
    double q = 1.5;
    Vector w;                             // nodal, zero on the boundary
    int iterations = 0;
    double residual = 0.0;
    double energy = 0.0;
    double lambda1 = 0.0;
    std::vector<double> component_masses; // ∫_{Ω_i} w^q
};

/// Stiffness matrix and its factorization on the interior dofs of a mesh.
class LaneEmdenProblem {
public:
    explicit LaneEmdenProblem(const Mesh& mesh);

    const Mesh& mesh() const { return *mesh_; }
    const SparseOperator& stiffness() const { return stiffness_; }
    const DofMap& dofs() const { return *stiffness_.dofs; }

    /// A⁻¹ applied to a nodal load; result is nodal with zero boundary values.
    Vector solve(const Vector& nodal_load) const;
    /// Fixed-point map u ↦ A⁻¹ M[|u|^{q−2}u].
    Vector fixed_point_map(const Vector& u, double q) const;
    double dirichlet(const Vector& u) const { return stiffness_.quadratic_form(u); }

private:
    const Mesh* mesh_;
    SparseOperator stiffness_;
    std::shared_ptr<SpdSolver> solver_;
};

/// Damped fixed-point iteration for the nonnegative least-energy solution.
SolveReport solve_least_energy(const LaneEmdenProblem& problem, const LaneEmdenConfig& config);
SolveReport solve_least_energy(const Mesh& mesh, const LaneEmdenConfig& config);

/// ½∫|∇u|² − (1/q)∫|u|^q.
double energy(const LaneEmdenProblem& problem, const Vector& u, double q);

/// ‖w‖_q^{q−2}.
double first_eigenvalue(const Mesh& mesh, const SolveReport& report);
double first_eigenvalue(const Mesh& mesh, const Vector& w, double q);

struct RayleighConfig {
    double tolerance = 1e-14;   // relative change of the quotient
    int max_iterations = 20000;
};

struct RayleighResult {
    double lambda = 0.0;
    Vector u;                   // ‖u‖_q = 1, u ≥ 0
    int iterations = 0;
};

/// Sobolev-preconditioned projected gradient descent of ∫|∇u|² on the
/// sphere ‖u‖_q = 1, started from the distance function.
RayleighResult rayleigh_minimize(const LaneEmdenProblem& problem, double q, const RayleighConfig& config = {});

/// Dual-norm residual ‖u − A⁻¹M[|u|^{q−2}u]‖_A / ‖u‖_A (0 for u = 0).
double residual(const LaneEmdenProblem& problem, const Vector& u, double q);

/// Torsion function A⁻¹M1.
Vector torsion(const LaneEmdenProblem& problem);

} // namespace lelab
