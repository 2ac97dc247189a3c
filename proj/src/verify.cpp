#include "lelab/verify.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include <Eigen/SparseCholesky>

#include "lelab/eigensolver.hpp"
#include "lelab/error.hpp"
#include "lelab/kernels.hpp"
#include "lelab/quadrature.hpp"
#include "lelab/spectrum.hpp"

namespace lelab {

namespace {

double sup_norm(const Vector& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

void check_q(double q)
{
    if (!(q > 1.0 && q < 2.0)) throw InputError("q must lie in (1, 2)");
}

std::string describe(std::initializer_list<std::pair<const char*, double>> values)
{
    std::ostringstream os;
    os.precision(17);
    bool first = true;
    for (const auto& [k, v] : values) {
        os << (first ? "" : " ") << k << '=' << v;
        first = false;
    }
    return os.str();
}

std::pair<double, double> least_squares_slope(const std::vector<double>& x, const std::vector<double>& y)
{
    const double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) mx += x[i], my += y[i];
    mx /= n, my /= n;
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
    }
    const double slope = sxy / sxx;
    return {slope, my - slope * mx};
}

int component_count(const Mesh& mesh)
{
    int k = 0;
    for (int c : mesh.node_component) k = std::max(k, c + 1);
    return k;
}

} // namespace

CheckResult make_check(std::string name, double margin, double slack, long samples, std::string offending)
{
    CheckResult r;
    r.name = std::move(name);
    r.margin = margin;
    r.slack = slack;
    r.samples = samples;
    r.pass = margin >= -slack;
    if (!r.pass) r.offending = std::move(offending);
    return r;
}

double pointwise_margin(double a, double b, double alpha)
{
    if (!(a > 0.0) || !(alpha > 0.0 && alpha < 1.0)) throw InputError("pointwise inequality needs a > 0, α ∈ (0, 1)");
    const double lhs = std::abs(std::pow(a, alpha) - kernels::signed_power(b, alpha));
    const double rhs = std::pow(2.0, 1.0 - alpha) * std::pow(a, alpha - 1.0) * std::abs(a - b);
    if (rhs == 0.0) return lhs == 0.0 ? 0.0 : -std::numeric_limits<double>::infinity();
    return (rhs - lhs) / rhs;
}

CheckResult check_pointwise(long samples, std::uint64_t seed)
{
    if (samples < 1) throw InputError("sample count must be >= 1");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> log_a(-6.0, 6.0), ub(-1e6, 1e6), ua(0.0, 1.0);
    double worst = std::numeric_limits<double>::infinity();
    std::string offending;
    for (long i = 0; i < samples; ++i) {
        const double a = std::pow(10.0, log_a(rng));
        const double b = ub(rng);
        double alpha = ua(rng);
        while (alpha == 0.0) alpha = ua(rng);
        const double m = pointwise_margin(a, b, alpha);
        if (m < worst) {
            worst = m;
            offending = describe({{"a", a}, {"b", b}, {"alpha", alpha}});
        }
    }
    return make_check("pointwise", worst, 1e-12, samples, offending);
}

Vector random_smooth_field(const LaneEmdenProblem& problem, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    Vector xi(problem.mesh().num_nodes());
    for (int i = 0; i < xi.size(); ++i) xi[i] = normal(rng);
    return problem.solve(xi);
}

double hardy_lane_emden_ratio(const LaneEmdenProblem& problem, const Vector& w, const Vector& phi, double q)
{
    check_q(q);
    const Mesh& mesh = problem.mesh();
    const auto wb = cell_means(mesh, w);
    const auto pb = cell_means(mesh, phi);
    std::vector<double> terms(wb.size(), 0.0);
    for (std::size_t c = 0; c < wb.size(); ++c) {
        if (pb[c] == 0.0) continue;
        if (!(wb[c] > 0.0)) return std::numeric_limits<double>::infinity();
        terms[c] = mesh.measure(static_cast<int>(c)) * std::pow(wb[c], q - 2.0) * pb[c] * pb[c];
    }
    const double grad = problem.dirichlet(phi);
    if (!(grad > 0.0)) throw InputError("test field has no gradient energy");
    return kernels::omp::blocked_sum(terms) / grad;
}

CheckResult check_hardy_lane_emden(const LaneEmdenProblem& problem, const Vector& w, double q, int samples,
                                   std::uint64_t seed)
{
    if (samples < 1) throw InputError("sample count must be >= 1");
    double worst = -std::numeric_limits<double>::infinity();
    long worst_index = -1;
    for (int i = 0; i < samples; ++i) {
        const Vector phi = random_smooth_field(problem, seed * 1'000'003ULL + static_cast<std::uint64_t>(i));
        const double r = hardy_lane_emden_ratio(problem, w, phi, q);
        if (r > worst) worst = r, worst_index = i;
    }
    const double equality = hardy_lane_emden_ratio(problem, w, w, q);
    const double margin = std::min(1.0 - worst, -std::abs(equality - 1.0));
    auto result = make_check("hardy_lane_emden", margin, 1e-8, samples,
                             describe({{"field", static_cast<double>(worst_index)}, {"ratio", worst},
                                       {"ratio_w", equality}}));
    result.details = {{"max_ratio", worst}, {"ratio_w", equality}};
    return result;
}

WeightedMu weighted_mu1(const Mesh& mesh, const Vector& w, double q)
{
    check_q(q);
    const auto A = assemble_stiffness(mesh);
    const auto B = assemble_weighted_mass(mesh, w, q - 2.0, A.dofs);
    const auto pair = smallest_generalized_eig(A, B, 1).front();
    WeightedMu out;
    out.mu1 = pair.value;
    out.field = A.dofs->extend(pair.vector);
    out.field /= sup_norm(out.field);
    out.distance = sup_norm(out.field - w / sup_norm(w));
    return out;
}

LinearizedReport linearized_positivity(const Mesh& mesh, const Vector& w, double q)
{
    check_q(q);
    const auto A = assemble_stiffness(mesh);
    const auto Mw = assemble_weighted_mass(mesh, w, q - 2.0, A.dofs);
    const SparseMatrix L = A.matrix - (q - 1.0) * Mw.matrix;
    LinearizedReport out;
    Eigen::SimplicialLDLT<SparseMatrix> ldlt(L);
    out.positive_definite = ldlt.info() == Eigen::Success && (ldlt.vectorD().array() > 0.0).all();
    out.smallest = std::numeric_limits<double>::quiet_NaN();
    if (out.positive_definite) {
        const auto M = assemble_mass(mesh, A.dofs);
        out.smallest = smallest_generalized_eig(L, M.matrix, 1).front().value;
    }
    out.mu1 = smallest_generalized_eig(A, Mw, 1).front().value;
    return out;
}

HardyEstimate hardy_constant(const Mesh& mesh, const DomainSpec& domain)
{
    const auto d = cell_samples(mesh, [&domain](Point p) { return domain.distance_to_boundary(p); });
    const auto A = assemble_stiffness(mesh);
    const auto B = assemble_weighted_mass(mesh, d, -2.0, A.dofs);
    const double mu = smallest_generalized_eig(A, B, 1).front().value;
    return {mu, 1.0 / mu};
}

double linfty_exponent(int N, double q)
{
    check_q(q);
    if (N < 1) throw InputError("dimension must be >= 1");
    return -2.0 * q / ((2.0 - q) * (2.0 * q + N * (2.0 - q)));
}

CheckResult check_linfty_universal(const std::vector<LinftyPoint>& family, int N, double q)
{
    if (family.size() < 5) throw InputError("the L-infinity check needs at least 5 points");
    const double expected = linfty_exponent(N, q);
    std::vector<double> x, y;
    for (const auto& p : family) {
        if (!(p.lambda1 > 0.0 && p.sup > 0.0)) throw InputError("family point must have positive λ₁ and sup");
        x.push_back(std::log(p.lambda1));
        y.push_back(std::log(p.sup));
    }
    const double slope = least_squares_slope(x, y).first;
    double cmin = std::numeric_limits<double>::infinity(), cmax = 0.0;
    for (const auto& p : family) {
        const double c = p.sup / std::pow(p.lambda1, expected);
        cmin = std::min(cmin, c), cmax = std::max(cmax, c);
    }
    const double rel = std::abs(slope - expected) / std::abs(expected);
    const double spread = cmax / cmin - 1.0;
    auto result = make_check("linfty_universal", std::min(0.02 - rel, 0.05 - spread), 0.0,
                             static_cast<long>(family.size()),
                             describe({{"slope", slope}, {"expected", expected}, {"spread", spread}}));
    result.details = {{"slope", slope}, {"expected", expected}, {"constant_spread", spread}};
    return result;
}

CheckResult gradient_l1_bound(double gradient_l2, double l1, double sup_u, double sup_v, double q)
{
    check_q(q);
    const double bound = std::sqrt(std::pow(sup_u, q - 1.0) + std::pow(sup_v, q - 1.0));
    double ratio = 0.0;
    if (l1 > 0.0) ratio = gradient_l2 / std::sqrt(l1);
    else if (gradient_l2 > 0.0) ratio = std::numeric_limits<double>::infinity();
    const double margin = bound > 0.0 ? (bound - ratio) / bound : (ratio == 0.0 ? 0.0 : -1.0);
    auto result = make_check("gradient_l1", margin, 1e-12, 1, describe({{"ratio", ratio}, {"bound", bound}}));
    result.details = {{"ratio", ratio}, {"bound", bound}};
    return result;
}

CheckResult check_gradient_l1(const LaneEmdenProblem& problem, const Vector& u, const Vector& v, double q,
                              double tolerance)
{
    if (residual(problem, u, q) > tolerance || residual(problem, v, q) > tolerance)
        throw InputError("gradient-L1 check needs discrete solutions");
    const Vector d = u - v;
    const double grad = std::sqrt(std::max(0.0, problem.dirichlet(d)));
    return gradient_l1_bound(grad, l1_norm(problem.mesh(), d), sup_norm(u), sup_norm(v), q);
}

BoundaryFit boundary_exponent_fit(const Mesh& mesh, const Vector& w, Point corner, Point direction, double feature)
{
    const double len = norm(direction);
    if (!(len > 0.0) || !(feature > 0.0)) throw InputError("fit needs a direction and a positive feature size");
    direction = (1.0 / len) * direction;

    int nearest = 0;
    for (int i = 1; i < mesh.num_nodes(); ++i)
        if (norm(mesh.nodes[i] - corner) < norm(mesh.nodes[nearest] - corner)) nearest = i;
    double h = 0.0;
    for (int k = mesh.node_cell_offsets[nearest]; k < mesh.node_cell_offsets[nearest + 1]; ++k) {
        const auto& cell = mesh.cells[mesh.node_cells[k]];
        for (int a = 0; a < mesh.vertices_per_cell(); ++a)
            for (int b = a + 1; b < mesh.vertices_per_cell(); ++b)
                h = std::max(h, norm(mesh.nodes[cell[a]] - mesh.nodes[cell[b]]));
    }
    const double lo = 10.0 * h, hi = feature / 10.0;

    std::vector<double> x, y;
    BoundaryFit fit;
    fit.r_min = std::numeric_limits<double>::infinity();
    for (int i = 0; i < mesh.num_nodes(); ++i) {
        const Point d = mesh.nodes[i] - corner;
        const double r = norm(d);
        if (r < lo || r > hi || dot(d, direction) <= 0.0) continue;
        if (std::abs(cross(d, direction)) > 1e-9 * r || !(w[i] > 0.0)) continue;
        x.push_back(std::log(r));
        y.push_back(std::log(w[i]));
        fit.r_min = std::min(fit.r_min, r);
        fit.r_max = std::max(fit.r_max, r);
    }
    fit.points = static_cast<int>(x.size());
    if (fit.points < 5 || !(fit.r_max >= 10.0 * fit.r_min)) throw InputError("insufficient decades of r for the fit");
    fit.exponent = least_squares_slope(x, y).first;
    return fit;
}

double expected_corner_exponent(double interior_angle, double q)
{
    check_q(q);
    if (!(interior_angle > 0.0 && interior_angle < std::numbers::pi))
        throw InputError("corner must be convex");
    return std::min(std::numbers::pi / interior_angle, 2.0 / (2.0 - q));
}

WnReport wn_weight(const Vector& u, const Vector& v, double q)
{
    check_q(q);
    if (u.size() != v.size()) throw InputError("fields differ in length");
    WnReport out;
    out.W = Vector::Zero(u.size());
    const double scale = sup_norm(u);
    const double c = std::pow(2.0, 2.0 - q);
    for (int i = 0; i < u.size(); ++i) {
        const double a = u[i];
        if (!(a > 0.0)) continue;
        const double diff = a - v[i];
        const double num = std::pow(a, q - 1.0) - kernels::signed_power(v[i], q - 1.0);
        double W;
        if (std::abs(diff) <= 1e-12 * a) {
            W = (q - 1.0) * std::pow(a, q - 2.0);
        } else {
            if (std::abs(diff) < 1e-14 * scale && std::abs(num) > 1e-8 * std::pow(a, q - 1.0)) ++out.unstable;
            W = num / diff;
        }
        out.W[i] = W;
        const double bound = c * std::pow(a, q - 2.0);
        out.margin = std::min({out.margin, W / bound, 1.0 - W / bound});
        ++out.evaluated;
    }
    return out;
}

Census solution_census(const LaneEmdenProblem& problem, double q, double tolerance)
{
    const Mesh& mesh = problem.mesh();
    const int k = component_count(mesh);
    if (k > 6) throw InputError("census is limited to 6 components");
    const Vector t = torsion(problem);

    std::vector<Vector> parts(k);
    Census census;
    for (int i = 0; i < k; ++i) {
        LaneEmdenConfig config;
        config.q = q;
        config.start = InitialGuess::Supplied;
        config.initial = restrict_to_component(mesh, t, i);
        parts[i] = solve_least_energy(problem, config).w;
        census.component_l1.push_back(l1_norm(mesh, parts[i]));
    }
    for (int mask = 1; mask < (1 << k); ++mask) {
        CensusEntry e;
        e.w = Vector::Zero(mesh.num_nodes());
        for (int i = 0; i < k; ++i) {
            e.spin.push_back((mask >> i) & 1);
            if (e.spin.back()) e.w += parts[i];
        }
        e.residual = residual(problem, e.w, q);
        if (!(e.residual <= tolerance))
            throw SolverError("census composite fails the residual test: " + std::to_string(e.residual));
        e.l1 = l1_norm(mesh, e.w);
        if (mask == (1 << k) - 1) census.full = static_cast<int>(census.solutions.size());
        census.solutions.push_back(std::move(e));
    }
    const std::size_t n = census.solutions.size();
    census.distances.assign(n, std::vector<double>(n, 0.0));
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = a + 1; b < n; ++b)
            census.distances[a][b] = census.distances[b][a] =
                l1_norm(mesh, census.solutions[a].w - census.solutions[b].w);
    census.min_distance_from_full = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < n; ++j)
        if (static_cast<int>(j) != census.full)
            census.min_distance_from_full = std::min(census.min_distance_from_full, census.distances[census.full][j]);
    return census;
}

IsolationReport isolation_probe(const LaneEmdenProblem& problem, const Census& census, double q,
                                std::uint64_t seed, std::vector<double> epsilons, int fields)
{
    if (census.full < 0) throw InputError("census has no least-energy entry");
    const Mesh& mesh = problem.mesh();
    const Vector& w = census.solutions[census.full].w;
    const double match = 1e-6 * census.solutions[census.full].l1;
    IsolationReport out;
    out.radius = census.min_distance_from_full;
    for (double eps : epsilons)
        for (int f = 0; f < fields; ++f) {
            ++out.restarts;
            Vector phi = random_smooth_field(problem, seed * 7'919ULL + static_cast<std::uint64_t>(out.restarts));
            phi *= sup_norm(w) / sup_norm(phi);
            LaneEmdenConfig config;
            config.q = q;
            config.start = InitialGuess::Supplied;
            config.initial = w + eps * phi;
            Vector u;
            try {
                u = solve_least_energy(problem, config).w;
            } catch (const SolverError&) {
                ++out.failures;
                out.returned.push_back(-1);
                continue;
            }
            int best = -1;
            double best_d = std::numeric_limits<double>::infinity();
            for (std::size_t j = 0; j < census.solutions.size(); ++j) {
                const double d = l1_norm(mesh, u - census.solutions[j].w);
                if (d < best_d) best_d = d, best = static_cast<int>(j);
            }
            if (best_d <= match) {
                out.returned.push_back(best);
            } else {
                ++out.outside_census;
                out.returned.push_back(-1);
                out.radius = std::min(out.radius, l1_norm(mesh, u - w));
            }
        }
    out.check = make_check("isolation", out.outside_census == 0 && out.radius > 0.0 ? out.radius : -1.0, 0.0,
                           out.restarts, "restart left the census");
    out.check.details = {{"radius", out.radius},
                         {"failures", static_cast<double>(out.failures)},
                         {"outside_census", static_cast<double>(out.outside_census)}};
    return out;
}

double shot_gradient_norm_sq(const ShotSolution& shot, int nodes)
{
    // x = zero ± (ℓ/2) t³ clusters nodes at the bump ends, where u' has a
    // |x|^q-type singularity.
    constexpr int p = 3;
    const auto [gx, gw] = gauss_legendre(nodes);
    const double half = 0.5 * shot.bump_length;
    std::vector<double> xs, weights;
    for (int j = 0; j < shot.bumps; ++j) {
        const double left = shot.interval.a + j * shot.bump_length;
        const double right = left + shot.bump_length;
        for (std::size_t i = 0; i < gx.size(); ++i) {
            const double t = 0.5 * (gx[i] + 1.0);
            const double jac = half * p * std::pow(t, p - 1) * 0.5 * gw[i];
            xs.push_back(left + half * std::pow(t, p));
            weights.push_back(jac);
            xs.push_back(right - half * std::pow(t, p));
            weights.push_back(jac);
        }
    }
    const auto du = shot.derivatives(xs);
    std::vector<double> terms(du.size());
    for (std::size_t i = 0; i < du.size(); ++i) terms[i] = weights[i] * du[i] * du[i];
    return kernels::serial::blocked_sum(terms);
}

std::vector<AccumulationRow> accumulation_rates(const Interval& first, const Interval& second, double q, int nmax)
{
    check_q(q);
    if (nmax < 1) throw InputError("nmax must be >= 1");
    if (!(first.b < second.a || second.b < first.a)) throw InputError("intervals must be disjoint");
    const auto spectrum = interval_spectrum(second, q, nmax);
    std::vector<AccumulationRow> rows;
    for (int n = 1; n <= nmax; ++n) {
        // U_n − w₁ vanishes on the first interval and equals the n-bump
        // solution on the second.
        const ShotSolution shot = shoot_1d(second, q, n);
        AccumulationRow row;
        row.n = n;
        row.lambda = spectrum[n - 1].lambda;
        row.distance = std::sqrt(shot_gradient_norm_sq(shot));
        row.closed_form = std::pow(row.lambda, 1.0 / (q - 2.0) + 0.5);
        row.terminal = std::abs(shot.terminal_value) / shot.sup_norm;
        rows.push_back(row);
    }
    return rows;
}

} // namespace lelab
