#include "lelab/lane_emden.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <tuple>

#include "lelab/error.hpp"
#include "lelab/kernels.hpp"

namespace lelab {

namespace {

double sup_norm(const Vector& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

void clamp_nonnegative(Vector& u)
{
    for (Eigen::Index i = 0; i < u.size(); ++i)
        if (!(u[i] > 0.0)) u[i] = 0.0;
}

void zero_boundary(const Mesh& mesh, Vector& u)
{
    for (int i = 0; i < mesh.num_nodes(); ++i)
        if (mesh.boundary[i]) u[i] = 0.0;
}

// Energy comparisons are made up to this multiple of the term magnitudes.
constexpr double roundoff = 1e-13;

bool energies_monotone(const std::deque<double>& changes, double scale)
{
    for (double d : changes)
        if (d > roundoff * scale) return false;
    return true;
}

std::vector<double> component_masses(const Mesh& mesh, const Vector& w, double q)
{
    const auto means = cell_means(mesh, w);
    int count = 0;
    for (int c : mesh.cell_component) count = std::max(count, c + 1);
    std::vector<std::vector<double>> terms(count);
    for (int c = 0; c < mesh.num_cells(); ++c)
        terms[mesh.cell_component[c]].push_back(mesh.measure(c) * kernels::abs_power(means[c], q));
    std::vector<double> out;
    for (const auto& t : terms) out.push_back(kernels::omp::blocked_sum(t));
    return out;
}

Vector initial_guess(const LaneEmdenProblem& problem, const LaneEmdenConfig& config)
{
    const Mesh& mesh = problem.mesh();
    if (config.start == InitialGuess::Supplied) {
        if (config.initial.size() != mesh.num_nodes()) throw InputError("supplied initial guess has the wrong length");
        Vector u = config.initial;
        clamp_nonnegative(u);
        zero_boundary(mesh, u);
        if (!(sup_norm(u) > 0.0)) throw InputError("supplied initial guess vanishes after clamping");
        return u;
    }
    // Scale the torsion function to the energy-minimizing multiple, which has
    // negative energy.
    Vector t = torsion(problem);
    const double a = problem.dirichlet(t);
    const double g = integrate_abs_power(mesh, t, config.q);
    return std::pow(g / a, 1.0 / (2.0 - config.q)) * t;
}

} // namespace

void validate(const LaneEmdenConfig& config)
{
    if (!(config.q > 1.0 && config.q < 2.0)) throw InputError("q must lie in (1, 2)");
    if (!(config.tolerance > 0.0)) throw InputError("tolerance must be positive");
    if (config.max_iterations < 1) throw InputError("max_iterations must be positive");
    if (!(config.damping > 0.0 && config.damping <= 1.0)) throw InputError("damping must lie in (0, 1]");
}

LaneEmdenProblem::LaneEmdenProblem(const Mesh& mesh) : mesh_(&mesh), stiffness_(assemble_stiffness(mesh))
{
    if (stiffness_.size() == 0) throw InputError("mesh has no interior nodes");
    std::vector<int> free_per_component;
    for (int node : stiffness_.dofs->free_nodes()) {
        const int c = mesh.node_component[node];
        if (c >= static_cast<int>(free_per_component.size())) free_per_component.resize(c + 1, 0);
        ++free_per_component[c];
    }
    int components = 0;
    for (int c : mesh.node_component) components = std::max(components, c + 1);
    if (static_cast<int>(free_per_component.size()) < components ||
        std::find(free_per_component.begin(), free_per_component.end(), 0) != free_per_component.end())
        throw InputError("every component needs at least one interior node");
    solver_ = std::make_shared<SpdSolver>(stiffness_.matrix);
}

Vector LaneEmdenProblem::solve(const Vector& nodal_load) const
{
    const DofMap& map = dofs();
    return map.extend(solver_->solve(map.restrict(nodal_load)));
}

Vector LaneEmdenProblem::fixed_point_map(const Vector& u, double q) const
{
    return solve(nonlinear_load(*mesh_, u, q));
}

Vector torsion(const LaneEmdenProblem& problem)
{
    const Mesh& mesh = problem.mesh();
    return problem.solve(kernels::omp::barycentric_load(mesh, std::vector<double>(mesh.cells.size(), 1.0)));
}

double energy(const LaneEmdenProblem& problem, const Vector& u, double q)
{
    return 0.5 * problem.dirichlet(u) - integrate_abs_power(problem.mesh(), u, q) / q;
}

namespace {

// Energy together with the size of its two terms.
std::pair<double, double> energy_and_scale(const LaneEmdenProblem& problem, const Vector& u, double q)
{
    const double a = 0.5 * problem.dirichlet(u);
    const double g = integrate_abs_power(problem.mesh(), u, q) / q;
    return {a - g, a + g};
}

// E(c) − E(u) from the difference c − u, so its rounding error scales with
// the step rather than with the energy. Differencing two energies loses
// about (diameter / h)² ulps in the quadratic term.
double energy_change(const LaneEmdenProblem& problem, const Vector& u, const Vector& c, double q)
{
    const Mesh& mesh = problem.mesh();
    const double quadratic = 0.5 * problem.stiffness().bilinear_form(c - u, c + u);
    const auto mu = cell_means(mesh, u), mc = cell_means(mesh, c);
    std::vector<double> terms(mu.size());
    for (int k = 0; k < mesh.num_cells(); ++k)
        terms[k] = mesh.measure(k) * (kernels::abs_power(mc[k], q) - kernels::abs_power(mu[k], q));
    return quadratic - kernels::omp::blocked_sum(terms) / q;
}

} // namespace

SolveReport solve_least_energy(const Mesh& mesh, const LaneEmdenConfig& config)
{
    validate(config);
    return solve_least_energy(LaneEmdenProblem(mesh), config);
}

SolveReport solve_least_energy(const LaneEmdenProblem& problem, const LaneEmdenConfig& config)
{
    validate(config);
    const Mesh& mesh = problem.mesh();
    const double q = config.q;
    Vector u = initial_guess(problem, config);
    double scale = energy_and_scale(problem, u, q).second;
    double theta = config.damping;
    std::deque<double> recent;

    SolveReport report;
    report.q = q;
    int it = 0;
    for (;; ++it) {
        if (it >= config.max_iterations) throw SolverError("Lane-Emden iteration cap reached");
        const Vector Tu = problem.fixed_point_map(u, q);
        Vector candidate;
        double change = 0.0;
        for (;;) {
            candidate = (1.0 - theta) * u + theta * Tu;
            clamp_nonnegative(candidate);
            scale = energy_and_scale(problem, candidate, q).second;
            change = energy_change(problem, u, candidate, q);
            if (change <= roundoff * scale) break;
            theta *= 0.5;
            if (theta < config.min_damping) throw SolverError("energy increased at the damping floor");
        }
        theta = std::min(config.damping, 2.0 * theta);
        const double update = sup_norm(candidate - u) / sup_norm(candidate);
        u = std::move(candidate);
        recent.push_back(change);
        if (recent.size() > 6) recent.pop_front();
        if (update <= config.tolerance && recent.size() == 6 && energies_monotone(recent, scale)) break;
    }

    report.w = std::move(u);
    report.iterations = it + 1;
    report.energy = energy_and_scale(problem, report.w, q).first;
    report.residual = residual(problem, report.w, q);
    report.lambda1 = first_eigenvalue(mesh, report.w, q);
    report.component_masses = component_masses(mesh, report.w, q);
    return report;
}

double first_eigenvalue(const Mesh& mesh, const Vector& w, double q)
{
    const double mass = integrate_abs_power(mesh, w, q);
    if (!(mass > 0.0)) throw InputError("first_eigenvalue needs a nonzero field");
    return std::pow(mass, (q - 2.0) / q);
}

double first_eigenvalue(const Mesh& mesh, const SolveReport& report)
{
    return first_eigenvalue(mesh, report.w, report.q);
}

double residual(const LaneEmdenProblem& problem, const Vector& u, double q)
{
    const double norm_u = std::sqrt(problem.dirichlet(u));
    if (norm_u == 0.0) return 0.0;
    const Vector r = u - problem.fixed_point_map(u, q);
    return std::sqrt(std::max(0.0, problem.dirichlet(r))) / norm_u;
}

RayleighResult rayleigh_minimize(const LaneEmdenProblem& problem, double q, const RayleighConfig& config)
{
    if (!(q > 1.0 && q < 2.0)) throw InputError("q must lie in (1, 2)");
    const Mesh& mesh = problem.mesh();
    auto normalize = [&](Vector v) {
        clamp_nonnegative(v);
        zero_boundary(mesh, v);
        const double n = integrate_abs_power(mesh, v, q);
        if (!(n > 0.0)) throw SolverError("Rayleigh iterate collapsed to zero");
        return Vector(v / std::pow(n, 1.0 / q));
    };
    Vector u = normalize(Eigen::Map<const Vector>(mesh.distance.data(), mesh.num_nodes()));
    double R = problem.dirichlet(u);

    RayleighResult result;
    int quiet = 0;
    for (int it = 0; it < config.max_iterations; ++it) {
        const Vector g = problem.fixed_point_map(u, q);
        const Vector d = u - R * g;
        const double slope = problem.dirichlet(d);
        double tau = 1.0;
        Vector candidate;
        double Rc = R;
        bool accepted = false;
        for (int k = 0; k < 40; ++k, tau *= 0.5) {
            candidate = normalize(u - tau * d);
            Rc = problem.dirichlet(candidate);
            if (Rc <= R - 1e-4 * tau * 2.0 * slope || Rc <= R * (1.0 - 1e-15)) {
                accepted = true;
                break;
            }
        }
        result.iterations = it + 1;
        if (!accepted) break;  // no descent left at machine precision
        const double change = (R - Rc) / R;
        u = std::move(candidate);
        R = Rc;
        quiet = change <= config.tolerance ? quiet + 1 : 0;
        if (quiet >= 5) break;
        if (it + 1 == config.max_iterations) throw SolverError("Rayleigh minimization stagnated above its cap");
    }
    result.lambda = R;
    result.u = std::move(u);
    return result;
}

} // namespace lelab
