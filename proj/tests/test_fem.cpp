#include <cmath>
#include <numbers>

#include <doctest.h>

#include "lelab/eigensolver.hpp"
#include "lelab/error.hpp"
#include "lelab/fem.hpp"
#include "lelab/lane_emden.hpp"
#include "lelab/quadrature.hpp"

using namespace lelab;

namespace {

constexpr double pi = std::numbers::pi;

Vector nodal(const Mesh& m, double (*f)(Point))
{
    Vector u(m.num_nodes());
    for (int i = 0; i < m.num_nodes(); ++i) u[i] = f(m.nodes[i]);
    return u;
}

Mesh square(int level) { return triangulate(DomainSpec::polygon({{0, 0}, {1, 0}, {1, 1}, {0, 1}}), level); }

double symmetry_defect(const SparseMatrix& A)
{
    const SparseMatrix T = A.transpose();
    return (A - T).norm() / A.norm();
}

} // namespace

TEST_SUITE("fem") {

TEST_CASE("stiffness examples")
{
    const Mesh m = triangulate(DomainSpec::interval(0, 1), 1);  // h = 1/16
    const auto A = assemble_stiffness(m);
    const double h = 1.0 / 16.0;
    CHECK(A.matrix.coeff(3, 3) == doctest::Approx(2.0 / h));
    CHECK(A.matrix.coeff(3, 2) == doctest::Approx(-1.0 / h));
    CHECK(A.matrix.coeff(3, 4) == doctest::Approx(-1.0 / h));

    const auto all = DofMap::from_mask(std::vector<char>(m.num_nodes(), 1));
    const auto Afull = assemble_stiffness(m, all);
    CHECK(Afull.quadratic_form(Vector::Constant(m.num_nodes(), 3.0)) == doctest::Approx(0.0).scale(1.0));
    CHECK(Afull.quadratic_form(nodal(m, [](Point p) { return p.x; })) == doctest::Approx(1.0).epsilon(1e-13));

    const Mesh sq = square(3);
    const auto As = assemble_stiffness(sq, DofMap::from_mask(std::vector<char>(sq.num_nodes(), 1)));
    CHECK(As.quadratic_form(nodal(sq, [](Point p) { return p.x + 2.0 * p.y; })) == doctest::Approx(5.0));
    CHECK(symmetry_defect(As.matrix) <= 1e-14);
}

TEST_CASE("mass examples")
{
    const Mesh m = triangulate(DomainSpec::interval(0, 1), 3);
    const auto all = DofMap::from_mask(std::vector<char>(m.num_nodes(), 1));
    const auto M = assemble_mass(m, all);
    CHECK(M.quadratic_form(Vector::Ones(m.num_nodes())) == doctest::Approx(1.0).epsilon(1e-14));

    const Mesh sq = square(3);
    const auto Mw = assemble_weighted_mass(sq, Vector::Ones(sq.num_nodes()), -0.5);
    const auto M0 = assemble_mass(sq);
    CHECK((Mw.matrix - M0.matrix).norm() <= 1e-14 * M0.matrix.norm());
    CHECK(symmetry_defect(Mw.matrix) <= 1e-14);
}

TEST_CASE("weighted mass of w against a high-order quadrature of w^q")
{
    const double q = 1.5;
    const Mesh m = triangulate(DomainSpec::interval(0, 1), 7);
    LaneEmdenConfig cfg;
    cfg.q = q;
    const Vector w = solve_least_energy(m, cfg).w;
    const auto B = assemble_weighted_mass(m, w, q - 2.0);
    const double form = B.quadratic_form(w);

    // 8-point Gauss rule per cell on the P1 interpolant of w.
    const auto [gx, gw] = gauss_legendre(8);
    double oracle = 0.0;
    for (int c = 0; c < m.num_cells(); ++c) {
        const int a = m.cells[c][0], b = m.cells[c][1];
        const double h = m.measure(c);
        for (std::size_t i = 0; i < gx.size(); ++i) {
            const double t = 0.5 * (gx[i] + 1.0);
            oracle += 0.5 * h * gw[i] * std::pow((1.0 - t) * w[a] + t * w[b], q);
        }
    }
    CHECK(form == doctest::Approx(oracle).epsilon(2e-3));
}

TEST_CASE("weighted mass rejects non-positive weights")
{
    const Mesh sq = square(2);
    Vector w = Vector::Ones(sq.num_nodes());
    w.setZero();
    CHECK_THROWS_AS(assemble_weighted_mass(sq, w, -0.5), InputError);
}

TEST_CASE("weighted mass is monotone in the weight")
{
    const Mesh sq = square(3);
    std::vector<double> small(sq.num_cells()), large(sq.num_cells());
    for (int c = 0; c < sq.num_cells(); ++c) {
        small[c] = 1.0 + sq.barycenter(c).x;
        large[c] = small[c] + 0.5 * sq.barycenter(c).y;
    }
    const auto Ms = assemble_weighted_mass(sq, small, 1.0), Ml = assemble_weighted_mass(sq, large, 1.0);
    for (int trial = 0; trial < 10; ++trial) {
        const Vector phi = Vector::Random(sq.num_nodes());
        CHECK(Ml.quadratic_form(phi) >= Ms.quadratic_form(phi));
    }
}

TEST_CASE("solve_spd examples")
{
    const Mesh m = triangulate(DomainSpec::interval(0, 1), 4);
    const auto A = assemble_stiffness(m);
    // Exact load ∫φ_i, including the coupling to boundary basis functions.
    const auto M = assemble_mass(m, DofMap::from_mask(std::vector<char>(m.num_nodes(), 1)));
    const Vector rhs = A.dofs->restrict(M.matrix * Vector::Ones(m.num_nodes()));
    const Vector u = A.dofs->extend(solve_spd(A, rhs));
    // The 1D P1 solution is nodally exact for the torsion problem.
    for (int i = 0; i < m.num_nodes(); ++i) {
        const double x = m.nodes[i].x;
        CHECK(u[i] == doctest::Approx(0.5 * x * (1.0 - x)).epsilon(1e-12).scale(1e-3));
    }
    CHECK(solve_spd(A, Vector::Zero(A.size())).norm() == 0.0);

    SparseOperator I;
    I.matrix.resize(5, 5);
    I.matrix.setIdentity();
    I.matrix *= 4.0;
    const Vector b = Vector::LinSpaced(5, 1.0, 5.0);
    CHECK((solve_spd(I, b) - b / 4.0).norm() <= 1e-15);
}

TEST_CASE("solve_spd residual is Galerkin orthogonal")
{
    const Mesh sq = square(4);
    const auto A = assemble_stiffness(sq);
    const Vector b = Vector::Random(A.size());
    const Vector x = solve_spd(A, b);
    const Vector r = b - A.matrix * x;
    CHECK(r.cwiseAbs().maxCoeff() <= 1e-10 * b.cwiseAbs().maxCoeff());
}

TEST_CASE("interval eigenvalues converge to π² and 4π²")
{
    std::vector<double> mu1, mu2;
    for (int level = 4; level <= 6; ++level) {
        const Mesh m = triangulate(DomainSpec::interval(0, 1), level);
        const auto A = assemble_stiffness(m);
        const auto B = assemble_mass(m, A.dofs);
        const auto pairs = smallest_generalized_eig(A, B, 2);
        CHECK(pairs[0].residual <= 1e-10);
        CHECK(pairs[0].value >= pi * pi);  // P1 Rayleigh quotients overestimate
        mu1.push_back(pairs[0].value);
        mu2.push_back(pairs[1].value);
        // B-orthonormal
        CHECK(B.matrix.cwiseAbs().sum() > 0.0);
        CHECK((pairs[0].vector.dot(B.matrix * pairs[0].vector)) == doctest::Approx(1.0));
        CHECK(std::abs(pairs[0].vector.dot(B.matrix * pairs[1].vector)) <= 1e-10);
    }
    CHECK(mu1[2] < mu1[1]);
    CHECK(mu1[1] < mu1[0]);
    const double r1 = (4.0 * mu1[2] - mu1[1]) / 3.0, r2 = (4.0 * mu2[2] - mu2[1]) / 3.0;
    CHECK(r1 == doctest::Approx(pi * pi).epsilon(1e-6));
    CHECK(r2 == doctest::Approx(4.0 * pi * pi).epsilon(1e-6));
}

TEST_CASE("square eigenvalue bounds the continuum value from above")
{
    double previous = 1e300;
    for (int level = 2; level <= 4; ++level) {
        const Mesh sq = square(level);
        const auto A = assemble_stiffness(sq);
        const auto pair = smallest_generalized_eig(A, assemble_mass(sq, A.dofs), 1).front();
        CHECK(pair.value >= 2.0 * pi * pi);
        CHECK(pair.value < previous);
        previous = pair.value;
    }
}

TEST_CASE("eigensolver argument checks")
{
    const Mesh m = triangulate(DomainSpec::interval(0, 1), 0);
    const auto A = assemble_stiffness(m);
    const auto B = assemble_mass(m, A.dofs);
    CHECK_THROWS_AS(smallest_generalized_eig(A, B, 0), InputError);
    CHECK_THROWS_AS(smallest_generalized_eig(A, B, 11), InputError);
}

TEST_CASE("P1 interpolation and field helpers")
{
    const Mesh sq = square(3);
    const Vector u = nodal(sq, [](Point p) { return 2.0 * p.x - p.y; });
    CHECK(*interpolate(sq, u, {0.3, 0.7}) == doctest::Approx(-0.1));
    CHECK_FALSE(interpolate(sq, u, {1.5, 0.5}).has_value());
    CHECK(l1_norm(sq, Vector::Ones(sq.num_nodes())) == doctest::Approx(1.0));
    CHECK(integrate_abs_power(sq, Vector::Constant(sq.num_nodes(), -2.0), 2.0) == doctest::Approx(4.0));

    const Mesh two = triangulate(DomainSpec::interval_union({{0, 1}, {2, 3}}), 2);
    const Vector r = restrict_to_component(two, Vector::Ones(two.num_nodes()), 1);
    for (int i = 0; i < two.num_nodes(); ++i) CHECK(r[i] == (two.node_component[i] == 1 ? 1.0 : 0.0));
}

}
