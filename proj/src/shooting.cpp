#include "lelab/shooting.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <numeric>

#include <boost/math/tools/roots.hpp>
#include <boost/numeric/odeint.hpp>

#include "lelab/error.hpp"

namespace lelab {

namespace {

namespace odeint = boost::numeric::odeint;

// (u, u', ∫u'², ∫|u|^q)
using State = std::array<double, 4>;

struct LaneEmdenOde {
    double q;
    void operator()(const State& s, State& ds, double) const
    {
        const double au = std::abs(s[0]);
        ds[0] = s[1];
        ds[1] = -std::copysign(std::pow(au, q - 1.0), s[0]);
        ds[2] = s[1] * s[1];
        ds[3] = std::pow(au, q);
    }
};

constexpr double ode_tol = 1e-14;

auto make_stepper()
{
    return odeint::make_dense_output(ode_tol, ode_tol, odeint::runge_kutta_dopri5<State>());
}

State integrate_to(double q, double slope, double length)
{
    State s{0.0, slope, 0.0, 0.0};
    odeint::integrate_adaptive(make_stepper(), LaneEmdenOde{q}, s, 0.0, length, length * 1e-3);
    return s;
}

// First positive zero of the solution with u(0) = 0, u'(0) = 1.
double canonical_first_zero(double q)
{
    auto stepper = make_stepper();
    const LaneEmdenOde ode{q};
    stepper.initialize(State{0.0, 1.0, 0.0, 0.0}, 0.0, 1e-3);
    for (int steps = 0; steps < 1000000; ++steps) {
        const auto [t0, t1] = stepper.do_step(ode);
        if (t0 > 0.0 && stepper.current_state()[0] <= 0.0) {
            State tmp;
            double lo = t0, hi = t1;
            for (int k = 0; k < 200 && hi - lo > 1e-15 * hi; ++k) {
                const double mid = 0.5 * (lo + hi);
                stepper.calc_state(mid, tmp);
                (tmp[0] > 0.0 ? lo : hi) = mid;
            }
            return 0.5 * (lo + hi);
        }
    }
    throw SolverError("canonical bump did not return to zero");
}

} // namespace

// The problem is solved in units where each bump has the length X₁ of the
// canonical bump (v(0) = 0, v'(0) = 1), so amplitudes and slopes are O(1):
// u(x) = A v(X₁(x − a)/ℓ) with A = (ℓ/X₁)^{2/(2−q)} maps solutions of
// −v'' = |v|^{q−2}v to solutions of the same equation.
ShotSolution shoot_1d(const Interval& interval, double q, int bumps)
{
    if (!(q > 1.0 && q < 2.0)) throw InputError("q must lie in (1, 2)");
    if (bumps < 1) throw InputError("bump count must be >= 1");
    if (!(interval.length() > 0.0)) throw InputError("interval must have positive length");

    const double L = interval.length();
    const double ell = L / bumps;
    const double x1 = canonical_first_zero(q);
    const double unit = ell / x1;  // physical length per unit of the scaled coordinate
    const double amplitude = std::pow(unit, 2.0 / (2.0 - q));

    auto terminal = [&](double s) { return integrate_to(q, s, x1)[0]; };
    const double guess = 1.0;
    double lo = 0.9 * guess, hi = 1.1 * guess;
    double flo = terminal(lo), fhi = terminal(hi);
    for (int expand = 0; flo * fhi > 0.0 && expand < 20; ++expand) {
        lo *= 0.8, hi *= 1.25;
        flo = terminal(lo), fhi = terminal(hi);
    }
    if (flo * fhi > 0.0) throw SolverError("shooting bracket failure");

    boost::uintmax_t iterations = 200;
    const auto [a, b] = boost::math::tools::toms748_solve(terminal, lo, hi, flo, fhi,
                                                          boost::math::tools::eps_tolerance<double>(52), iterations);
    double sigma = 0.5 * (a + b);
    if (std::abs(terminal(a)) < std::abs(terminal(sigma))) sigma = a;
    if (std::abs(terminal(b)) < std::abs(terminal(sigma))) sigma = b;

    ShotSolution sol;
    sol.interval = interval;
    sol.q = q;
    sol.bumps = bumps;
    sol.bump_length = ell;
    sol.amplitude = amplitude;
    sol.unit_length = x1;
    sol.unit_slope = sigma;
    sol.slope = amplitude / unit * sigma;
    const double unit_sup = std::pow(0.5 * q * sigma * sigma, 1.0 / q);
    sol.sup_norm = amplitude * unit_sup;

    // The k-bump solution is the odd continuation of the first bump, so one
    // bump gives the terminal value and 1/k of each integral. Integrating
    // through k zeros of the non-smooth right-hand side would only add error.
    const State end = integrate_to(q, sigma, x1);
    sol.terminal_value = (bumps % 2 ? 1.0 : -1.0) * amplitude * end[0];
    sol.integral_grad = bumps * amplitude * amplitude / unit * end[2];
    sol.log_integral_q =
        2.0 * q / (2.0 - q) * std::log(unit) + std::log(unit) + std::log(bumps * end[3]);
    sol.integral_q = std::exp(sol.log_integral_q);
    if (!(std::abs(end[0]) <= 1e-9 * unit_sup))
        throw SolverError("k-bump solution misses the terminal condition: |u(L)|/sup = " + [&] {
                              char buf[32];
                              std::snprintf(buf, sizeof buf, "%.3g", std::abs(end[0]) / unit_sup);
                              return std::string(buf);
                          }());
    return sol;
}

namespace {

// Evaluates (v, v') on the first scaled bump at sorted coordinates in [0, X₁/2].
std::vector<std::array<double, 2>> first_bump(double q, double slope, const std::vector<double>& sorted)
{
    std::vector<double> times{0.0};
    times.insert(times.end(), sorted.begin(), sorted.end());
    std::vector<std::array<double, 2>> out;
    out.reserve(times.size());
    State s{0.0, slope, 0.0, 0.0};
    auto observer = [&out](const State& st, double) { out.push_back({st[0], st[1]}); };
    const double dt = 1e-3;
    odeint::integrate_times(make_stepper(), LaneEmdenOde{q}, s, times.begin(), times.end(), dt, observer);
    out.erase(out.begin());
    return out;
}

std::vector<std::array<double, 2>> evaluate(const ShotSolution& sol, const std::vector<double>& xs)
{
    const double ell = sol.bump_length;
    const double X = sol.unit_length;
    std::vector<double> local(xs.size());  // scaled coordinate in [0, X₁/2]
    std::vector<double> sign(xs.size());
    std::vector<bool> mirrored(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double y = std::clamp((xs[i] - sol.interval.a) / ell, 0.0, static_cast<double>(sol.bumps));
        const int j = std::min(static_cast<int>(y), sol.bumps - 1);
        double z = y - j;
        mirrored[i] = z > 0.5;
        if (mirrored[i]) z = 1.0 - z;
        local[i] = std::max(z, 0.0) * X;
        sign[i] = j % 2 == 0 ? 1.0 : -1.0;
    }
    std::vector<std::size_t> order(xs.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t l, std::size_t r) { return local[l] < local[r]; });
    std::vector<double> sorted;
    for (std::size_t k : order) sorted.push_back(local[k]);
    // integrate_times needs strictly increasing times; evaluate unique values.
    std::vector<double> unique = sorted;
    unique.erase(std::unique(unique.begin(), unique.end()), unique.end());
    std::vector<double> positive(unique.begin() + (unique.front() == 0.0 ? 1 : 0), unique.end());
    std::vector<std::array<double, 2>> at_unique;
    if (unique.front() == 0.0) at_unique.push_back({0.0, sol.unit_slope});
    if (!positive.empty()) {
        const auto rest = first_bump(sol.q, sol.unit_slope, positive);
        at_unique.insert(at_unique.end(), rest.begin(), rest.end());
    }
    std::vector<std::array<double, 2>> out(xs.size());
    std::size_t u = 0;
    for (std::size_t k = 0; k < order.size(); ++k) {
        while (unique[u] != sorted[k]) ++u;
        const std::size_t i = order[k];
        const auto [val, der] = at_unique[u];
        const double v = sol.amplitude * val, dv = sol.amplitude * X / ell * der;
        out[i] = {sign[i] * v, sign[i] * (mirrored[i] ? -dv : dv)};
    }
    return out;
}

} // namespace

std::vector<double> ShotSolution::values(const std::vector<double>& xs) const
{
    std::vector<double> out;
    for (const auto& p : evaluate(*this, xs)) out.push_back(p[0]);
    return out;
}

std::vector<double> ShotSolution::derivatives(const std::vector<double>& xs) const
{
    std::vector<double> out;
    for (const auto& p : evaluate(*this, xs)) out.push_back(p[1]);
    return out;
}

Vector ShotSolution::sample(const Mesh& mesh) const
{
    if (mesh.dim != 1) throw InputError("shot solutions sample onto 1D meshes");
    std::vector<double> xs;
    std::vector<int> idx;
    Vector out = Vector::Zero(mesh.num_nodes());
    for (int i = 0; i < mesh.num_nodes(); ++i) {
        const double x = mesh.nodes[i].x;
        if (x >= interval.a && x <= interval.b) {
            xs.push_back(x);
            idx.push_back(i);
        }
    }
    if (xs.empty()) return out;
    const auto v = values(xs);
    for (std::size_t k = 0; k < idx.size(); ++k) out[idx[k]] = v[k];
    for (int i = 0; i < mesh.num_nodes(); ++i)
        if (mesh.boundary[i]) out[i] = 0.0;
    return out;
}

} // namespace lelab
