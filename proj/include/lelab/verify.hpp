#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "lelab/geometry.hpp"
#include "lelab/lane_emden.hpp"
#include "lelab/shooting.hpp"

namespace lelab {

struct CheckResult {
    std::string name;
    bool pass = false;
    double margin = 0.0;  // signed, positive means satisfied with slack
    double slack = 0.0;   // pass iff margin >= -slack
    long samples = 0;
    std::string offending;
    std::vector<std::pair<std::string, double>> details;
};

CheckResult make_check(std::string name, double margin, double slack, long samples, std::string offending = {});

/// (RHS − LHS) / RHS for |a^α − |b|^{α−1}b| ≤ 2^{1−α} a^{α−1} |a − b|; 0 when both sides vanish.
double pointwise_margin(double a, double b, double alpha);

/// a log-uniform in [1e-6, 1e6], b uniform in [-1e6, 1e6], α uniform in (0, 1).
CheckResult check_pointwise(long samples, std::uint64_t seed = 1);

/// A⁻¹ξ for nodal Gaussian noise ξ (zero boundary values).
Vector random_smooth_field(const LaneEmdenProblem& problem, std::uint64_t seed);

/// Σ|T| w̄^{q−2} φ̄² / φᵀAφ, the weighted form in the one-point rule of the solver.
double hardy_lane_emden_ratio(const LaneEmdenProblem& problem, const Vector& w, const Vector& phi, double q);

/// Random fields must satisfy ratio ≤ 1 + 1e-8 and φ = w must give 1 within 1e-8.
CheckResult check_hardy_lane_emden(const LaneEmdenProblem& problem, const Vector& w, double q, int samples,
                                   std::uint64_t seed = 1);

struct WeightedMu {
    double mu1 = 0.0;
    Vector field;           // nodal, sup-normalized and positive
    double distance = 0.0;  // sup distance to w / ‖w‖∞
};

/// Smallest eigenpair of (stiffness, w^{q−2}-weighted mass).
WeightedMu weighted_mu1(const Mesh& mesh, const Vector& w, double q);

struct LinearizedReport {
    bool positive_definite = false;  // LDLᵀ inertia of A − (q−1)M_w
    double smallest = 0.0;           // least ν with (A − (q−1)M_w)x = νMx, NaN if indefinite
    double mu1 = 0.0;
};

LinearizedReport linearized_positivity(const Mesh& mesh, const Vector& w, double q);

struct HardyEstimate {
    double eigenvalue = 0.0;  // least eigenvalue of (stiffness, d^{-2}-weighted mass)
    double constant = 0.0;    // 1 / eigenvalue
};

HardyEstimate hardy_constant(const Mesh& mesh, const DomainSpec& domain);

/// Exponent e with ‖w‖∞ ∝ λ₁^e under dilation: −2q / ((2−q)(2q + N(2−q))).
double linfty_exponent(int N, double q);

struct LinftyPoint {
    double lambda1 = 0.0;
    double sup = 0.0;
};

/// Log-log slope within 2% of linfty_exponent; implied constants within 5% of each other.
CheckResult check_linfty_universal(const std::vector<LinftyPoint>& family, int N, double q);

/// ratio = ‖∇(u−v)‖₂ / √‖u−v‖₁ against √(‖u‖∞^{q−1} + ‖v‖∞^{q−1}).
CheckResult gradient_l1_bound(double gradient_l2, double l1, double sup_u, double sup_v, double q);
/// Nodal discrete solutions; throws InputError if either residual exceeds `tolerance`.
CheckResult check_gradient_l1(const LaneEmdenProblem& problem, const Vector& u, const Vector& v, double q,
                              double tolerance = 1e-8);

struct BoundaryFit {
    double exponent = 0.0;
    int points = 0;
    double r_min = 0.0;
    double r_max = 0.0;
};

/// Least-squares slope of log w against log r at the mesh nodes on the ray
/// corner + r·direction, r ∈ [10h, feature/10] with h the mesh size at the corner.
BoundaryFit boundary_exponent_fit(const Mesh& mesh, const Vector& w, Point corner, Point direction,
                                  double feature);

/// min(π / interior angle, 2 / (2 − q)).
double expected_corner_exponent(double interior_angle, double q);

struct WnReport {
    Vector W;
    double margin = std::numeric_limits<double>::infinity();  // min of W/bound and 1 − W/bound
    int unstable = 0;
    int evaluated = 0;
};

/// W = (u^{q−1} − |v|^{q−2}v)/(u − v) where u > 0, (q−1)u^{q−2} where u ≈ v.
WnReport wn_weight(const Vector& u, const Vector& v, double q);

struct CensusEntry {
    std::vector<int> spin;
    Vector w;
    double residual = 0.0;
    double l1 = 0.0;
};

struct Census {
    std::vector<CensusEntry> solutions;
    std::vector<double> component_l1;              // ∫ w_i
    std::vector<std::vector<double>> distances;    // pairwise L¹
    int full = -1;                                 // index of the all-ones spin
    double min_distance_from_full = 0.0;
};

/// Per-component least-energy solves composed over all nonzero spins.
Census solution_census(const LaneEmdenProblem& problem, double q, double tolerance = 1e-8);

struct IsolationReport {
    int restarts = 0;
    int failures = 0;          // solver did not converge (reported, not fatal)
    int outside_census = 0;
    std::vector<int> returned; // census index per restart, -1 unmatched or failed
    double radius = std::numeric_limits<double>::infinity();
    CheckResult check;
};

/// Restarts from w + εφ clamped at 0, ε ∈ epsilons, `fields` random smooth φ
/// scaled to ‖φ‖∞ = ‖w‖∞. The radius is the least L¹ distance from w to a
/// distinct solution among the returned ones and the census.
IsolationReport isolation_probe(const LaneEmdenProblem& problem, const Census& census, double q,
                                std::uint64_t seed = 1, std::vector<double> epsilons = {1e-3, 1e-2, 1e-1},
                                int fields = 20);

struct AccumulationRow {
    int n = 0;
    double lambda = 0.0;       // λ_n of the second interval
    double distance = 0.0;     // ‖∇U_n − ∇w₁‖₂ by quadrature
    double closed_form = 0.0;  // λ_n^{1/(q−2)+1/2}
    double terminal = 0.0;     // |U_n| at the far end, relative to its sup
};

/// U_n = w on the first interval plus the n-bump solution on the second.
std::vector<AccumulationRow> accumulation_rates(const Interval& first, const Interval& second, double q, int nmax);

/// ∫|u'|² of a shot solution by mapped Gauss quadrature on each half-bump.
double shot_gradient_norm_sq(const ShotSolution& shot, int nodes = 48);

} // namespace lelab
