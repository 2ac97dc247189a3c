#pragma once

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "lelab/fem.hpp"
#include "lelab/mesh.hpp"

namespace lelab {

/// Cone Γ(β, R) in R^N with cap S(β) = {ω : ⟨ω, e₁⟩ > β}.
struct ConeSpec {
    int N = 2;
    double beta = 0.0;
    double radius = 1.0;
};

void validate(const ConeSpec& cone);

/// First Dirichlet eigenvalue of the Laplace-Beltrami operator on S(β).
/// N = 2 uses (π / (2 arccos β))²; N ≥ 3 uses cap_eigenvalue_numeric.
double cap_eigenvalue(int N, double beta);

/// Axisymmetric 1D weighted P1 eigenproblem in the polar angle on
/// (0, arccos β), natural at the pole and Dirichlet at the rim, Richardson
/// extrapolated over `level` and `level + 1`. Valid for every N ≥ 2.
double cap_eigenvalue_numeric(int N, double beta, int level = 10);

/// Positive root of α(N − 2 + α) = λ(S(β)).
double alpha_of_beta(int N, double beta);
/// Inverse of alpha_of_beta (closed form for N = 2, bisection otherwise).
double beta_of_alpha(int N, double alpha);

/// q_Ω = max(2 − 2/α, 1).
double q_threshold(double alpha);

/// Φ(t) = t(N − 2 + t).
double phi_of(int N, double t);
/// 2 / (2 − q), the homogeneity degree of the cone solution.
double cone_degree(double q);
/// Φ(2/(2−q)) < λ(S(β)).
bool is_narrow(int N, double beta, double q);

enum class Compactness { Compact, NonCompact, Boundary };
std::string to_string(Compactness c);

/// Compares 2/(2−q) with α: above is compact, below non-compact, equal
/// (within 1e-12 relative on Φ against λ) is the boundary case.
Compactness compactness_classifier(int N, double beta, double q);
Compactness compactness_from_alpha(int N, double alpha, double q);

/// Least-energy angular profile ψ on the cap, sampled on a uniform polar-angle
/// grid over [0, arccos β] (ψ is even in the angle).
struct AngularProfile {
    int N = 2;
    double beta = 0.0;
    double q = 1.5;
    std::vector<double> theta;  // grid, theta.back() = arccos β
    std::vector<double> psi;    // ψ at grid points, psi.back() = 0
    double mu = 0.0;            // μ_q(β)
    double integral_q = 0.0;    // ∫ψ^q over the cap
    double integral_2 = 0.0;    // ∫ψ² over the cap
    double residual = 0.0;      // discrete residual of the angular equation
    int iterations = 0;

    /// ψ at polar angle |θ| (linear interpolation; 0 outside the cap).
    double operator()(double theta) const;
};

/// Requires narrowness; throws InputError otherwise.
AngularProfile angular_profile(int N, double beta, double q, int cells = 4096);

/// V(x) = |x|^{2/(2−q)} ψ(angle of x), planar cones (N = 2) with axis +x.
class HomogeneousSolution {
public:
    HomogeneousSolution(const ConeSpec& cone, double q, int cells = 4096);
    /// Throws InputError for points outside the infinite cone.
    double operator()(Point x) const;
    const AngularProfile& profile() const { return profile_; }
    double degree() const { return degree_; }

private:
    ConeSpec cone_;
    double q_;
    double degree_;
    AngularProfile profile_;
};

struct SigmaReport {
    double sigma = 0.0;
    double theta = 0.0;
    double discrepancy = 0.0;  // |σ − 1 − Θ|
    int level = 0;
    int rings = 0;
    Vector sigma_field;        // nodal eigenfield of σ
};

/// σ(β) and Θ(β) on a tip-graded sector mesh of Γ(β, R), N = 2.
SigmaReport sigma_beta(const ConeSpec& cone, double q, int level, int rings = 96);

/// Quotient of ∫|∇φ|² over ∫φ² V^{q−2} on a given sector mesh (P1 field φ,
/// Dirichlet); the infimum property gives σ ≤ this value.
double sigma_quotient(const Mesh& mesh, const HomogeneousSolution& V, const Vector& phi);

/// Terms of the rescaled quotient along φ_n(x) = φ(n x).
struct ConcentrationTerms {
    double n = 1.0;
    double gradient = 0.0;      // ∫|∇φ_n|²
    double l2 = 0.0;            // ∫φ_n²
    double weighted_w = 0.0;    // ∫φ_n² w^{q−2}
    double weighted_V = 0.0;    // ∫φ_n² V^{q−2}
    double quotient() const { return gradient / weighted_w; }
    double quotient_V() const { return gradient / weighted_V; }
};

/// Smooth test field supported in {r_in < |x| < r_out} ∩ Γ(β, R): radial bump
/// times cos(π θ / (2 θ₀)).
struct ConeBump {
    double r_in = 0.001;
    double r_out = 0.003;
    double theta0 = 0.0;
    double value(double r, double theta) const;
    /// (∂φ/∂r, (1/r) ∂φ/∂θ)
    std::array<double, 2> gradient(double r, double theta) const;
};

/// Evaluates the concentration terms by tensor Gauss quadrature on the polar
/// support of φ_n. `w` maps a point of the cone to the least-energy solution.
ConcentrationTerms concentration_sequence(const ConeSpec& cone, double q, const ConeBump& phi, double n,
                                          const std::function<double(Point)>& w,
                                          const HomogeneousSolution& V, int nodes = 64);

} // namespace lelab
