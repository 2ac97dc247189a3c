#include <cmath>
#include <numbers>

#include <doctest.h>

#include "lelab/error.hpp"
#include "lelab/lane_emden.hpp"
#include "lelab/shooting.hpp"
#include "lelab/spectrum.hpp"
#include "oracles.hpp"

using namespace lelab;

namespace {

constexpr double pi = std::numbers::pi;

} // namespace

TEST_SUITE("spectrum") {

TEST_CASE("interval spectrum examples")
{
    const double q = 1.5;
    const auto spec = interval_spectrum({0, 1}, q, 8);
    REQUIRE(spec.size() == 8);
    LaneEmdenConfig c;
    c.q = q;
    const auto rep = solve_least_energy(triangulate(DomainSpec::interval(0, 1), 8), c);
    CHECK(spec[0].lambda == doctest::Approx(rep.lambda1).epsilon(1e-5));

    for (int k = 1; k <= 8; ++k) {
        const oracle::IntervalSolution exact(q, 0.0, 1.0, k);
        CHECK(spec[k - 1].lambda == doctest::Approx(exact.lambda()).epsilon(1e-10));
        // Each bump has length 1/k and the q-mass adds over k bumps.
        CHECK(spec[k - 1].lambda == doctest::Approx(k * k * spec[0].lambda).epsilon(1e-10));
        if (k > 1) CHECK(spec[k - 1].lambda > spec[k - 2].lambda);
        CHECK(spec[k - 1].bumps == std::vector<int>{k});
    }
}

TEST_CASE("near-linear exponent approaches the Dirichlet spectrum")
{
    const auto spec = interval_spectrum({0, 1}, 1.99, 10);
    for (int k = 1; k <= 10; ++k) CHECK(spec[k - 1].lambda == doctest::Approx(k * k * pi * pi).epsilon(0.03));
}

TEST_CASE("bump solutions satisfy the discrete equation up to mesh error")
{
    const double q = 1.5;
    double previous = 1.0;
    for (int level = 5; level <= 8; level += 3) {
        const Mesh m = triangulate(DomainSpec::interval(0, 1), level);
        const LaneEmdenProblem p(m);
        for (int k = 1; k <= 3; ++k) {
            const double r = residual(p, shoot_1d({0, 1}, q, k).sample(m), q);
            CHECK(r <= 1e-2);
            if (k == 3) {
                CHECK(r < previous);
                previous = r;
            }
        }
    }
}

TEST_CASE("spin combination examples")
{
    const double q = 1.5;
    const auto one = interval_spectrum({0, 1}, q, 4);
    const auto same = spin_combine({one}, q);
    REQUIRE(same.size() == one.size());
    for (std::size_t i = 0; i < one.size(); ++i) CHECK(same[i].lambda == doctest::Approx(one[i].lambda).epsilon(1e-14));

    const auto two = spin_combine({one, interval_spectrum({2, 3}, q, 4)}, q);
    const double factor = std::pow(2.0, (q - 2.0) / q);
    CHECK(two.front().lambda == doctest::Approx(factor * one[0].lambda).epsilon(1e-12));
    CHECK(two.front().lambda < one[0].lambda);
    CHECK(two.front().spin == std::vector<int>{1, 1});

    // Next comes one bump on one interval and two on the other.
    const auto gap = spectral_gap(two);
    const double mixed = one[0].lambda * std::pow(1.0 + std::pow(4.0, -q / (2.0 - q)), (q - 2.0) / q);
    CHECK(gap.lambda2 == doctest::Approx(mixed).epsilon(1e-12));
    CHECK(gap.gap == doctest::Approx(mixed - factor * one[0].lambda).epsilon(1e-10));
    CHECK(two[1].lambda < one[0].lambda);
}

TEST_CASE("union lambda agrees with the union solve")
{
    const double q = 1.5;
    const auto a = interval_spectrum({0, 1}, q, 2), b = interval_spectrum({2, 2.7}, q, 2);
    const auto combined = spin_combine({a, b}, q);
    LaneEmdenConfig c;
    c.q = q;
    const auto rep = solve_least_energy(triangulate(DomainSpec::interval_union({{0, 1}, {2, 2.7}}), 8), c);
    CHECK(combined.front().lambda == doctest::Approx(rep.lambda1).epsilon(1e-6));
    CHECK(combined.front().lambda == doctest::Approx(spin_formula({a[0].lambda, b[0].lambda}, {1, 1}, q)).epsilon(1e-14));
}

TEST_CASE("spin outputs satisfy the defining formula and are sorted")
{
    const double q = 1.25;
    std::vector<std::vector<SpectrumEntry>> parts{interval_spectrum({0, 1}, q, 3), interval_spectrum({2, 2.5}, q, 3),
                                                  interval_spectrum({3, 4.5}, q, 2)};
    const auto all = spin_combine(parts, q);
    double lowest = all.front().lambda;
    for (std::size_t i = 0; i < all.size(); ++i) {
        const auto& e = all[i];
        std::vector<double> lambdas;
        for (std::size_t c = 0; c < parts.size(); ++c)
            lambdas.push_back(e.spin[c] ? parts[c][e.bumps[c] - 1].lambda : 1.0);
        CHECK(spin_formula(lambdas, e.spin, q) == doctest::Approx(e.lambda).epsilon(1e-12));
        CHECK(e.lambda >= lowest);
        if (i) CHECK(e.lambda > all[i - 1].lambda * (1.0 + 1e-12));
    }
    const double least = spin_formula({parts[0][0].lambda, parts[1][0].lambda, parts[2][0].lambda}, {1, 1, 1}, q);
    CHECK(all.front().lambda == doctest::Approx(least).epsilon(1e-14));
}

TEST_CASE("gap collapses as shrinking components are added")
{
    const double q = 1.5;
    std::vector<std::vector<SpectrumEntry>> parts;
    double a = 0.0, len = 1.0, previous = 1e300;
    for (int k = 1; k <= 5; ++k) {
        parts.push_back(interval_spectrum({a, a + len}, q, 2));
        a += len + 1.0;
        len *= 0.5;
        const double gap = spectral_gap(spin_combine(parts, q)).gap;
        CHECK(gap > 0.0);
        CHECK(gap < previous);
        previous = gap;
    }
}

TEST_CASE("spectrum errors")
{
    CHECK_THROWS_AS(interval_spectrum({0, 1}, 1.5, 0), InputError);
    CHECK_THROWS_AS(spin_formula({1.0, 2.0}, {0, 0}, 1.5), InputError);
    CHECK_THROWS_AS(spin_combine({}, 1.5), InputError);
    std::vector<std::vector<SpectrumEntry>> many(4, interval_spectrum({0, 1}, 1.5, 6));
    CHECK_THROWS_AS(spin_combine(many, 1.5, 100), InputError);
    CHECK_THROWS_AS(spectral_gap({SpectrumEntry{1.0, {1}, {1}}}), InputError);
}

}
