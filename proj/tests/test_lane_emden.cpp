#include <cmath>
#include <numbers>
#include <random>

#include <doctest.h>

#include "lelab/eigensolver.hpp"
#include "lelab/error.hpp"
#include "lelab/lane_emden.hpp"
#include "oracles.hpp"

using namespace lelab;

namespace {

constexpr double pi = std::numbers::pi;

double sup(const Vector& v) { return v.cwiseAbs().maxCoeff(); }

SolveReport solve(const Mesh& m, double q)
{
    LaneEmdenConfig c;
    c.q = q;
    return solve_least_energy(m, c);
}

} // namespace

TEST_SUITE("lane_emden") {

TEST_CASE("interval solution matches the closed-form bump")
{
    for (double q : {1.25, 1.5, 1.75}) {
        const Mesh m = triangulate(DomainSpec::interval(0, 1), 8);
        const auto rep = solve(m, q);
        const oracle::IntervalSolution exact(q, 0.0, 1.0);
        double err = 0.0;
        for (int i = 0; i < m.num_nodes(); ++i) err = std::max(err, std::abs(rep.w[i] - exact(m.nodes[i].x)));
        INFO("q " << q);
        CHECK(err <= 1e-5);
        CHECK(err <= 2e-6 * exact.sup());
        CHECK(rep.lambda1 == doctest::Approx(exact.lambda()).epsilon(1e-5));
    }
}

TEST_CASE("report invariants")
{
    for (const auto& dom : {DomainSpec::interval(0, 1), DomainSpec::polygon({{0, 0}, {1, 0}, {1, 1}, {0, 1}}),
                            DomainSpec::sector(0.5, 1.0)}) {
        const Mesh m = triangulate(dom, 3);
        const auto rep = solve(m, 1.5);
        CHECK(rep.energy < 0.0);
        CHECK(rep.residual <= 1e-10);
        for (int i = 0; i < m.num_nodes(); ++i) {
            if (m.boundary[i]) CHECK(rep.w[i] == 0.0);
            else CHECK(rep.w[i] > 0.0);
        }
    }
}

TEST_CASE("scaling law on intervals")
{
    const double q = 1.5;
    const auto r1 = solve(triangulate(DomainSpec::interval(0, 1), 6), q);
    const Mesh m2 = triangulate(DomainSpec::interval(0, 2), 6);
    const auto r2 = solve(m2, q);
    const double A = std::pow(2.0, 2.0 / (2.0 - q));
    CHECK(sup(r2.w - A * r1.w) <= 1e-6 * sup(r2.w));
    CHECK(r2.lambda1 / r1.lambda1 == doctest::Approx(std::pow(2.0, -2.0 + (q - 2.0) / q)).epsilon(1e-10));
}

TEST_CASE("union components decouple")
{
    const double q = 1.5;
    const Mesh single = triangulate(DomainSpec::interval(0, 1), 5);
    const Mesh both = triangulate(DomainSpec::interval_union({{0, 1}, {2, 3}}), 5);
    const auto rs = solve(single, q), rb = solve(both, q);
    const int n = single.num_nodes();
    for (int i = 0; i < n; ++i) {
        CHECK(rb.w[i] == doctest::Approx(rs.w[i]).epsilon(1e-9).scale(sup(rs.w)));
        CHECK(rb.w[n + i] == doctest::Approx(rs.w[i]).epsilon(1e-9).scale(sup(rs.w)));
    }
    CHECK(rb.component_masses.size() == 2);
    CHECK(rb.lambda1 == doctest::Approx(std::pow(2.0, (q - 2.0) / q) * rs.lambda1).epsilon(1e-10));
}

TEST_CASE("energy examples")
{
    const double q = 1.5;
    const Mesh m = triangulate(DomainSpec::interval(0, 1), 6);
    const LaneEmdenProblem p(m);
    CHECK(energy(p, Vector::Zero(m.num_nodes()), q) == 0.0);

    const auto rep = solve_least_energy(p, LaneEmdenConfig{});
    const double wq = integrate_abs_power(m, rep.w, q);
    CHECK(rep.energy == doctest::Approx((0.5 - 1.0 / q) * wq).epsilon(1e-9));

    const Vector phi = torsion(p);
    for (double t : {1e-2, 1e-3, 1e-4}) CHECK(energy(p, t * phi, q) < 0.0);
}

TEST_CASE("fixed-point iterates decrease the energy")
{
    const double q = 1.5;
    const Mesh m = triangulate(DomainSpec::polygon({{0, 0}, {2, 0}, {2, 1}, {1, 1}, {1, 2}, {0, 2}}), 3);
    const LaneEmdenProblem p(m);
    Vector u = 1e-3 * torsion(p);
    double previous = energy(p, u, q);
    for (int it = 0; it < 30; ++it) {
        u = p.fixed_point_map(u, q);
        const double e = energy(p, u, q);
        CHECK(e <= previous + 1e-13 * std::abs(previous));
        previous = e;
    }
}

TEST_CASE("short intervals on fine meshes")
{
    // Small amplitudes and fine meshes: the step acceptance must not trip on
    // rounding in the quadratic form.
    const double q = 1.5;
    for (int level = 7; level <= 9; ++level)
        for (double a : {0.0, 2.0}) {
            const auto rep = solve(triangulate(DomainSpec::interval(a, a + 0.6), level), q);
            CHECK(rep.residual <= 1e-10);
            CHECK(rep.lambda1 == doctest::Approx(oracle::IntervalSolution(q, a, 0.6).lambda()).epsilon(1e-5));
        }
}

TEST_CASE("first eigenvalue examples")
{
    const double q = 1.5;
    const auto r1 = solve(triangulate(DomainSpec::interval(0, 1), 6), q);
    const auto r3 = solve(triangulate(DomainSpec::interval(0, 3), 6), q);
    CHECK(r3.lambda1 / r1.lambda1 == doctest::Approx(std::pow(3.0, -2.0 + (q - 2.0) / q)).epsilon(1e-10));

    // Continuity toward the linear problem.
    const Mesh m = triangulate(DomainSpec::interval(0, 1), 6);
    const auto near_linear = solve(m, 1.99);
    const auto A = assemble_stiffness(m);
    const double mu = smallest_generalized_eig(A, assemble_mass(m, A.dofs), 1).front().value;
    CHECK(near_linear.lambda1 == doctest::Approx(mu).epsilon(0.02));
    CHECK(near_linear.lambda1 == doctest::Approx(pi * pi).epsilon(0.02));
}

TEST_CASE("Rayleigh minimization agrees with the fixed point")
{
    const double q = 1.5;
    for (const auto& dom : {DomainSpec::interval(0, 1), DomainSpec::polygon({{0, 0}, {1, 0}, {1, 1}, {0, 1}})}) {
        const Mesh m = triangulate(dom, dom.dim() == 1 ? 7 : 4);
        const LaneEmdenProblem p(m);
        LaneEmdenConfig c;
        c.q = q;
        const auto rep = solve_least_energy(p, c);
        const auto ray = rayleigh_minimize(p, q);
        CHECK(ray.lambda == doctest::Approx(first_eigenvalue(m, rep)).epsilon(1e-6));
    }
}

TEST_CASE("Rayleigh minimizer on unequal intervals charges both components")
{
    const double q = 1.5;
    const Mesh m = triangulate(DomainSpec::interval_union({{0, 1}, {2, 2.5}}), 6);
    const LaneEmdenProblem p(m);
    const auto ray = rayleigh_minimize(p, q);
    double on_short = 0.0, on_long = 0.0;
    for (int i = 0; i < m.num_nodes(); ++i)
        if (m.node_component[i] == 1)
            on_short = std::max(on_short, ray.u[i]);
        else
            on_long = std::max(on_long, ray.u[i]);
    CHECK(on_short > 0.0);
    CHECK(on_long > on_short);
    const double l_long = solve(triangulate(DomainSpec::interval(0, 1), 6), q).lambda1;
    const double l_short = solve(triangulate(DomainSpec::interval(2, 2.5), 6), q).lambda1;
    const double both = std::pow(std::pow(l_long, -q / (2 - q)) + std::pow(l_short, -q / (2 - q)), (q - 2) / q);
    CHECK(ray.lambda < std::min(l_long, l_short));
    CHECK(ray.lambda == doctest::Approx(both).epsilon(1e-6));
}

TEST_CASE("residual examples")
{
    const double q = 1.5;
    const Mesh m = triangulate(DomainSpec::interval(0, 1), 6);
    const LaneEmdenProblem p(m);
    LaneEmdenConfig c;
    const auto rep = solve_least_energy(p, c);
    CHECK(residual(p, rep.w, q) <= 10.0 * c.tolerance);
    CHECK(residual(p, Vector::Zero(m.num_nodes()), q) == 0.0);
    const double r2 = residual(p, 2.0 * rep.w, q);
    CHECK(r2 > 0.1 * (2.0 - std::pow(2.0, q - 1.0)) / 2.0);
}

TEST_CASE("random positive starts reach the same solution")
{
    const double q = 1.5;
    const Mesh m = triangulate(DomainSpec::polygon({{0, 0}, {1, 0}, {1, 1}, {0, 1}}), 3);
    const LaneEmdenProblem p(m);
    const Vector ref = solve_least_energy(p, LaneEmdenConfig{}).w;
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
        LaneEmdenConfig c;
        c.start = InitialGuess::Supplied;
        c.initial = Vector(m.num_nodes());
        const double scale = std::pow(10.0, -4.0 + 4.0 * u(rng));
        for (int i = 0; i < m.num_nodes(); ++i) c.initial[i] = m.boundary[i] ? 0.0 : scale * (0.1 + u(rng));
        CHECK(sup(solve_least_energy(p, c).w - ref) <= 1e-8 * sup(ref));
    }
}

TEST_CASE("enlarging the domain increases w")
{
    const double q = 1.5;
    const Mesh small = triangulate(DomainSpec::interval(0, 1), 5);  // h = 1/256
    MeshOptions o;
    o.base_cells = 12;
    const Mesh large = triangulate(DomainSpec::interval(0, 1.5), 5, o);  // same h
    const auto ws = solve(small, q).w, wl = solve(large, q).w;
    for (int i = 0; i < small.num_nodes(); ++i) CHECK(wl[i] >= ws[i]);
}

TEST_CASE("configuration checks")
{
    LaneEmdenConfig c;
    c.q = 2.0;
    CHECK_THROWS_AS(validate(c), InputError);
    c.q = 1.5;
    c.tolerance = 0.0;
    CHECK_THROWS_AS(validate(c), InputError);
    c.tolerance = 1e-12;
    c.start = InitialGuess::Supplied;
    const Mesh m = triangulate(DomainSpec::interval(0, 1), 2);
    CHECK_THROWS_AS(solve_least_energy(m, c), InputError);
}

}
