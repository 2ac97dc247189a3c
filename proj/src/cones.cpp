#include "lelab/cones.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <boost/math/special_functions/gamma.hpp>

#include "lelab/eigensolver.hpp"
#include "lelab/error.hpp"
#include "lelab/quadrature.hpp"

namespace lelab {

namespace {

constexpr double pi = std::numbers::pi;

void check_beta(double beta)
{
    if (!(beta >= 0.0 && beta < 1.0)) throw InputError("beta must lie in [0, 1)");
}

void check_dimension(int N)
{
    if (N < 2) throw InputError("cone dimension must be >= 2");
}

void check_q(double q)
{
    if (!(q > 1.0 && q < 2.0)) throw InputError("q must lie in (1, 2)");
}

// Surface measure of S^{N-2}; weights the axisymmetric reduction so that
// integrals over the polar angle are integrals over the cap.
double sphere_measure(int N)
{
    const double m = N - 1;
    return 2.0 * std::pow(pi, m / 2.0) / boost::math::tgamma(m / 2.0);
}

// Weighted P1 matrices on a uniform polar-angle grid of (0, θ₀); the last
// node carries the Dirichlet condition and is dropped.
struct CapSystem {
    double h = 0.0;
    std::vector<double> grid;
    SparseMatrix stiffness;
    SparseMatrix mass;
    std::vector<double> cell_weight;  // ω(θ_mid) · |S^{N−2}|
};

CapSystem cap_system(int N, double theta0, int cells)
{
    static const double gx[3] = {-std::sqrt(0.6), 0.0, std::sqrt(0.6)};
    static const double gw[3] = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};
    const double scale = sphere_measure(N);
    CapSystem sys;
    sys.h = theta0 / cells;
    for (int i = 0; i <= cells; ++i) sys.grid.push_back(i == cells ? theta0 : i * sys.h);
    std::vector<Eigen::Triplet<double>> kt, mt;
    const int free = cells;  // nodes 0..cells-1
    for (int c = 0; c < cells; ++c) {
        const double a = sys.grid[c], b = sys.grid[c + 1], len = b - a;
        double k = 0.0, m00 = 0.0, m01 = 0.0, m11 = 0.0;
        for (int g = 0; g < 3; ++g) {
            const double t = 0.5 * (a + b) + 0.5 * len * gx[g];
            const double wq = 0.5 * len * gw[g] * scale * std::pow(std::sin(t), N - 2);
            const double l1 = (t - a) / len, l0 = 1.0 - l1;
            k += wq / (len * len);
            m00 += wq * l0 * l0, m01 += wq * l0 * l1, m11 += wq * l1 * l1;
        }
        const int i = c, j = c + 1;
        const double K[2][2] = {{k, -k}, {-k, k}};
        const double Mm[2][2] = {{m00, m01}, {m01, m11}};
        const int idx[2] = {i, j};
        for (int r = 0; r < 2; ++r)
            for (int s = 0; s < 2; ++s)
                if (idx[r] < free && idx[s] < free) {
                    kt.emplace_back(idx[r], idx[s], K[r][s]);
                    mt.emplace_back(idx[r], idx[s], Mm[r][s]);
                }
        sys.cell_weight.push_back(scale * std::pow(std::sin(0.5 * (a + b)), N - 2));
    }
    sys.stiffness.resize(free, free);
    sys.mass.resize(free, free);
    sys.stiffness.setFromTriplets(kt.begin(), kt.end());
    sys.mass.setFromTriplets(mt.begin(), mt.end());
    return sys;
}

double cap_eigenvalue_at(int N, double theta0, int cells)
{
    const CapSystem sys = cap_system(N, theta0, cells);
    return smallest_generalized_eig(sys.stiffness, sys.mass, 1).front().value;
}

// Load of ψ^{q−1} and ∫ψ^p with one-point quadrature per cell.
Vector cap_load(const CapSystem& sys, const Vector& psi, double q)
{
    const int free = static_cast<int>(psi.size());
    Vector b = Vector::Zero(free);
    for (std::size_t c = 0; c < sys.cell_weight.size(); ++c) {
        const double left = psi[c];
        const double right = static_cast<int>(c) + 1 < free ? psi[c + 1] : 0.0;
        const double value = sys.cell_weight[c] * 0.5 * sys.h * std::pow(std::max(0.5 * (left + right), 0.0), q - 1.0);
        b[c] += value;
        if (static_cast<int>(c) + 1 < free) b[c + 1] += value;
    }
    return b;
}

double cap_power_integral(const CapSystem& sys, const Vector& psi, double p)
{
    const int free = static_cast<int>(psi.size());
    double s = 0.0;
    for (std::size_t c = 0; c < sys.cell_weight.size(); ++c) {
        const double right = static_cast<int>(c) + 1 < free ? psi[c + 1] : 0.0;
        s += sys.cell_weight[c] * sys.h * std::pow(std::max(0.5 * (psi[c] + right), 0.0), p);
    }
    return s;
}

} // namespace

void validate(const ConeSpec& cone)
{
    check_dimension(cone.N);
    check_beta(cone.beta);
    if (!(cone.radius > 0.0) || !std::isfinite(cone.radius)) throw InputError("cone radius must be positive");
}

double cap_eigenvalue(int N, double beta)
{
    check_dimension(N);
    check_beta(beta);
    if (N == 2) {
        const double r = pi / (2.0 * std::acos(beta));
        return r * r;
    }
    return cap_eigenvalue_numeric(N, beta);
}

double cap_eigenvalue_numeric(int N, double beta, int level)
{
    check_dimension(N);
    check_beta(beta);
    if (level < 2 || level > 20) throw InputError("cap level must lie in [2, 20]");
    const double theta0 = std::acos(beta);
    const double coarse = cap_eigenvalue_at(N, theta0, 1 << level);
    const double fine = cap_eigenvalue_at(N, theta0, 1 << (level + 1));
    return (4.0 * fine - coarse) / 3.0;
}

double alpha_of_beta(int N, double beta)
{
    const double lambda = cap_eigenvalue(N, beta);
    const double m = N - 2;
    return (std::sqrt(m * m + 4.0 * lambda) - m) / 2.0;
}

double beta_of_alpha(int N, double alpha)
{
    check_dimension(N);
    if (!(alpha >= 1.0) || !std::isfinite(alpha)) throw InputError("alpha must be >= 1");
    if (N == 2) return std::cos(pi / (2.0 * alpha));
    if (alpha_of_beta(N, 0.0) >= alpha) return 0.0;
    double lo = 0.0, hi = 0.5;
    while (alpha_of_beta(N, hi) < alpha) {
        lo = hi;
        hi = 0.5 * (1.0 + hi);
        if (hi > 1.0 - 1e-12) throw InputError("alpha too large for this dimension");
    }
    while (hi - lo > 1e-12) {
        const double mid = 0.5 * (lo + hi);
        (alpha_of_beta(N, mid) < alpha ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

double q_threshold(double alpha)
{
    if (!(alpha >= 1.0)) throw InputError("alpha must be >= 1");
    return std::max(2.0 - 2.0 / alpha, 1.0);
}

double phi_of(int N, double t) { return t * (N - 2 + t); }

double cone_degree(double q)
{
    check_q(q);
    return 2.0 / (2.0 - q);
}

bool is_narrow(int N, double beta, double q)
{
    return phi_of(N, cone_degree(q)) < cap_eigenvalue(N, beta);
}

std::string to_string(Compactness c)
{
    switch (c) {
    case Compactness::Compact: return "compact";
    case Compactness::NonCompact: return "non-compact";
    case Compactness::Boundary: return "boundary";
    }
    return "unknown";
}

Compactness compactness_from_alpha(int N, double alpha, double q)
{
    check_dimension(N);
    check_q(q);
    if (!(alpha >= 1.0)) throw InputError("alpha must be >= 1");
    const double lambda = phi_of(N, alpha);
    const double phi = phi_of(N, cone_degree(q));
    if (std::abs(phi - lambda) <= 1e-12 * lambda) return Compactness::Boundary;
    if (q > q_threshold(alpha)) return Compactness::Compact;
    return phi < lambda ? Compactness::NonCompact : Compactness::Compact;
}

Compactness compactness_classifier(int N, double beta, double q)
{
    return compactness_from_alpha(N, alpha_of_beta(N, beta), q);
}

double AngularProfile::operator()(double t) const
{
    t = std::abs(t);
    if (t >= theta.back()) return 0.0;
    const double h = theta[1] - theta[0];
    const std::size_t i = std::min(static_cast<std::size_t>(t / h), theta.size() - 2);
    const double s = (t - theta[i]) / (theta[i + 1] - theta[i]);
    return (1.0 - s) * psi[i] + s * psi[i + 1];
}

AngularProfile angular_profile(int N, double beta, double q, int cells)
{
    check_dimension(N);
    check_beta(beta);
    check_q(q);
    if (cells < 16) throw InputError("angular profile needs at least 16 cells");
    const double Phi = phi_of(N, cone_degree(q));
    if (!(Phi < cap_eigenvalue(N, beta)))
        throw InputError("cap is not narrow: Phi(2/(2-q)) >= lambda(S(beta))");

    const double theta0 = std::acos(beta);
    const CapSystem sys = cap_system(N, theta0, cells);
    const SparseMatrix L = sys.stiffness - Phi * sys.mass;
    const SpdSolver solver(L);
    auto form = [&](const Vector& v) { return v.dot(L * v); };

    Vector psi(cells);
    for (int i = 0; i < cells; ++i) psi[i] = std::cos(pi * sys.grid[i] / (2.0 * theta0));
    const double a = form(psi), g = cap_power_integral(sys, psi, q);
    psi *= std::pow(g / a, 1.0 / (2.0 - q));

    AngularProfile out;
    int quiet = 0;
    for (int it = 1; it <= 100000; ++it) {
        Vector next = solver.solve(cap_load(sys, psi, q)).cwiseMax(0.0);
        const double update = (next - psi).cwiseAbs().maxCoeff() / next.cwiseAbs().maxCoeff();
        psi = std::move(next);
        out.iterations = it;
        quiet = update <= 1e-14 ? quiet + 1 : 0;
        if (quiet >= 3) break;
        if (it == 100000) throw SolverError("angular profile iteration did not converge");
    }
    const Vector r = psi - solver.solve(cap_load(sys, psi, q));
    out.residual = std::sqrt(std::max(0.0, form(r)) / form(psi));

    out.N = N;
    out.beta = beta;
    out.q = q;
    out.theta = sys.grid;
    out.psi.assign(psi.data(), psi.data() + psi.size());
    out.psi.push_back(0.0);
    out.integral_q = cap_power_integral(sys, psi, q);
    out.integral_2 = psi.dot(sys.mass * psi);
    out.mu = form(psi) / std::pow(out.integral_q, 2.0 / q);
    return out;
}

HomogeneousSolution::HomogeneousSolution(const ConeSpec& cone, double q, int cells)
    : cone_(cone), q_(q), degree_(cone_degree(q)), profile_(angular_profile(2, cone.beta, q, cells))
{
    validate(cone);
    if (cone.N != 2) throw InputError("homogeneous solution is implemented for planar cones");
}

double HomogeneousSolution::operator()(Point x) const
{
    const double r = norm(x);
    if (r == 0.0) return 0.0;
    const double t = std::atan2(x.y, x.x);
    const double t0 = profile_.theta.back();
    if (std::abs(t) > t0 * (1.0 + 1e-12)) throw InputError("point lies outside the cone");
    return std::pow(r, degree_) * profile_(t);
}

SigmaReport sigma_beta(const ConeSpec& cone, double q, int level, int rings)
{
    validate(cone);
    if (cone.N != 2) throw InputError("sigma_beta is implemented for N = 2");
    if (!is_narrow(2, cone.beta, q)) throw InputError("sigma_beta requires a narrow cone");
    const HomogeneousSolution V(cone, q);
    const DomainSpec domain = DomainSpec::sector(cone.beta, cone.radius);
    MeshOptions options;
    options.rings = rings;
    const Mesh mesh = triangulate(domain, level, options);
    const auto weight = cell_samples(mesh, [&V](Point p) { return V(p); });

    SigmaReport report;
    report.level = level;
    report.rings = rings;
    // Both problems clamp a tip core of radius 1e-12 R and at least the
    // innermost ring; the fan cells around the apex would otherwise carry a
    // spurious mode. Θ leaves the lateral sides free, σ clamps them.
    const int inner = mesh.polar->angles + 2;
    const double core = 1e-12 * cone.radius;
    std::vector<char> free_sigma(mesh.nodes.size()), free_theta(mesh.nodes.size());
    for (int i = inner; i < mesh.num_nodes(); ++i) {
        if (norm(mesh.nodes[i]) <= core) continue;
        free_sigma[i] = !mesh.boundary[i];
        free_theta[i] = std::abs(norm(mesh.nodes[i]) - cone.radius) > 1e-12 * cone.radius;
    }
    try {
        const auto dofs = DofMap::from_mask(free_sigma);
        const auto A = assemble_stiffness(mesh, dofs);
        const auto B = assemble_weighted_mass(mesh, weight, q - 2.0, dofs);
        const auto pair = smallest_generalized_eig(A, B, 1).front();
        report.sigma = pair.value;
        report.sigma_field = dofs->extend(pair.vector);

        const auto dofs2 = DofMap::from_mask(free_theta);
        const auto A2 = assemble_weighted_stiffness(mesh, weight, 2.0, dofs2);
        const auto B2 = assemble_weighted_mass(mesh, weight, q, dofs2);
        report.theta = smallest_generalized_eig(A2, B2, 1).front().value;
    } catch (const InputError& e) {
        throw SolverError(std::string("weight underflow near the tip: ") + e.what());
    }
    report.discrepancy = std::abs(report.sigma - 1.0 - report.theta);
    return report;
}

double sigma_quotient(const Mesh& mesh, const HomogeneousSolution& V, const Vector& phi)
{
    const auto weight = cell_samples(mesh, [&V](Point p) { return V(p); });
    const auto A = assemble_stiffness(mesh);
    const auto B = assemble_weighted_mass(mesh, weight, V.profile().q - 2.0, A.dofs);
    return A.quadratic_form(phi) / B.quadratic_form(phi);
}

double ConeBump::value(double r, double theta) const
{
    if (r <= r_in || r >= r_out || std::abs(theta) >= theta0) return 0.0;
    const double s = (2.0 * r - r_in - r_out) / (r_out - r_in);
    return std::exp(-1.0 / (1.0 - s * s)) * std::cos(pi * theta / (2.0 * theta0));
}

std::array<double, 2> ConeBump::gradient(double r, double theta) const
{
    if (r <= r_in || r >= r_out || std::abs(theta) >= theta0) return {0.0, 0.0};
    const double s = (2.0 * r - r_in - r_out) / (r_out - r_in);
    const double ds = 2.0 / (r_out - r_in);
    const double one = 1.0 - s * s;
    const double radial = std::exp(-1.0 / one);
    const double radial_prime = radial * (-2.0 * s / (one * one)) * ds;
    const double k = pi / (2.0 * theta0);
    return {radial_prime * std::cos(k * theta), radial * (-k * std::sin(k * theta)) / r};
}

ConcentrationTerms concentration_sequence(const ConeSpec& cone, double q, const ConeBump& phi, double n,
                                          const std::function<double(Point)>& w, const HomogeneousSolution& V,
                                          int nodes)
{
    validate(cone);
    check_q(q);
    if (!(n >= 1.0)) throw InputError("concentration index must be >= 1");
    const double theta0 = std::acos(cone.beta);
    if (phi.r_out > cone.radius || phi.theta0 > theta0 * (1.0 + 1e-12) || !(phi.r_in > 0.0))
        throw InputError("test field is not supported in the cone");
    const double r_lo = phi.r_in / n, r_hi = phi.r_out / n;
    // φ_n is supported in {|x| < r_out/n} ⊂ Γ(β, R) for n ≥ 1.
    if (r_hi > cone.radius) throw SolverError("rescaled support escapes the cone");

    const auto [x, wt] = gauss_legendre(nodes);
    ConcentrationTerms terms;
    terms.n = n;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double r = 0.5 * (r_lo + r_hi) + 0.5 * (r_hi - r_lo) * x[i];
        const double wr = 0.5 * (r_hi - r_lo) * wt[i];
        for (std::size_t j = 0; j < x.size(); ++j) {
            const double t = phi.theta0 * x[j];
            const double weight = wr * phi.theta0 * wt[j] * r;
            const double v = phi.value(n * r, t);
            const auto g = phi.gradient(n * r, t);
            const Point p{r * std::cos(t), r * std::sin(t)};
            terms.gradient += weight * n * n * (g[0] * g[0] + g[1] * g[1]);
            terms.l2 += weight * v * v;
            if (v != 0.0) {
                terms.weighted_w += weight * v * v * std::pow(w(p), q - 2.0);
                terms.weighted_V += weight * v * v * std::pow(V(p), q - 2.0);
            }
        }
    }
    return terms;
}

} // namespace lelab
