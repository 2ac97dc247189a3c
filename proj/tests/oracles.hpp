#pragma once

// Closed-form and dense reference values used only by the tests. None of
// these share code paths with the library routines they check.

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <numbers>
#include <stdexcept>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <boost/math/special_functions/beta.hpp>
#include <boost/math/tools/roots.hpp>
#include <boost/numeric/odeint.hpp>

namespace oracle {

// Canonical bump of −v'' = v^{q−1} with v(0) = 0, v'(0) = 1. Energy
// conservation gives x(v) as an incomplete beta function of (v/M)^q.
struct Bump {
    double q;
    double M;       // max v = (q/2)^{1/q}
    double X;       // first zero
    double int_q;   // ∫₀^X v^q
    double int_g;   // ∫₀^X v'²
    double int_1;   // ∫₀^X v

    explicit Bump(double q_) : q(q_)
    {
        M = std::pow(q / 2.0, 1.0 / q);
        X = 2.0 * M / q * boost::math::beta(1.0 / q, 0.5);
        int_q = 2.0 * std::pow(M, q + 1.0) / q * boost::math::beta(1.0 / q + 1.0, 0.5);
        int_g = 2.0 * M / q * boost::math::beta(1.0 / q, 1.5);
        int_1 = 2.0 * M * M / q * boost::math::beta(2.0 / q, 0.5);
    }

    // v at 0 <= y <= X.
    double value(double y) const
    {
        y = std::min(y, X - y);
        if (y <= 0.0) return 0.0;
        const double frac = y / (M / q * boost::math::beta(1.0 / q, 0.5));
        const double t = boost::math::ibeta_inv(1.0 / q, 0.5, std::min(frac, 1.0));
        return M * std::pow(t, 1.0 / q);
    }
};

// k-bump solution of −u'' = |u|^{q−2}u on (a, a + L).
struct IntervalSolution {
    Bump bump;
    double a, L;
    int k;
    double c, A;  // u(x) = ±A v((x − a − j L/k)/c)

    IntervalSolution(double q, double a_, double L_, int k_ = 1) : bump(q), a(a_), L(L_), k(k_)
    {
        c = L / (k * bump.X);
        A = std::pow(c, 2.0 / (2.0 - q));
    }

    double operator()(double x) const
    {
        const double len = L / k;
        double s = x - a;
        if (s <= 0.0 || s >= L) return 0.0;
        const int j = std::min(static_cast<int>(s / len), k - 1);
        s -= j * len;
        return (j % 2 ? -1.0 : 1.0) * A * bump.value(s / c);
    }

    double sup() const { return A * bump.M; }
    double integral_q() const { return k * std::pow(A, bump.q) * c * bump.int_q; }
    double log_integral_q() const
    {
        const double q = bump.q;
        return std::log(k * c * bump.int_q) + q * 2.0 / (2.0 - q) * std::log(c);
    }
    double integral_1() const { return k * A * c * bump.int_1; }
    double integral_grad() const { return k * A * A / c * bump.int_g; }
    double lambda() const { return std::pow(integral_q(), (bump.q - 2.0) / bump.q); }
};

// Gauss hypergeometric 2F1(a, b; c; z) for |z| <= 1/2 by direct summation.
inline double hyp2f1(double a, double b, double c, double z)
{
    double term = 1.0, sum = 1.0, magnitude = 1.0;
    for (int k = 0; k < 10000; ++k) {
        term *= (a + k) * (b + k) / ((c + k) * (k + 1.0)) * z;
        sum += term;
        magnitude += std::abs(term);
        if (std::abs(term) < 1e-18 * magnitude) return sum;
    }
    throw std::runtime_error("hypergeometric series did not converge");
}

// First Dirichlet eigenvalue of the Laplace-Beltrami operator on the cap
// {θ < arccos β} of S^{N−1}. The axisymmetric eigenfunctions are
// 2F1(−ν, ν+N−2; (N−1)/2; (1 − cos θ)/2) with eigenvalue ν(ν + N − 2).
inline double cap_eigenvalue(int N, double beta)
{
    const double z = (1.0 - beta) / 2.0;
    auto f = [&](double nu) { return hyp2f1(-nu, nu + N - 2.0, (N - 1.0) / 2.0, z); };
    double lo = 1e-3, hi = lo;
    while (f(hi) > 0.0) lo = hi, hi += 0.01;
    boost::uintmax_t iters = 200;
    const auto r = boost::math::tools::toms748_solve(f, lo, hi, boost::math::tools::eps_tolerance<double>(50),
                                                      iters);
    const double nu = 0.5 * (r.first + r.second);
    return nu * (nu + N - 2.0);
}

// Planar narrow cone with half-aperture θ₀: the angular profile solves
// −ψ'' − d²ψ = ψ^{q−1} on (−θ₀, θ₀), d = 2/(2−q), and
// σ = inf ∫g'² / ∫ψ^{q−2}g² over g vanishing at ±θ₀ (radial energy can be
// spread over arbitrarily many scales).
class AngularSigma {
public:
    AngularSigma(double beta, double q) : q_(q), t0_(std::acos(beta)), d_(2.0 / (2.0 - q))
    {
        // The first zero of ψ moves outward as the peak grows: small peaks are
        // dominated by the sublinear term, large ones by the subcritical
        // linear term. Bisect on "ψ vanishes before θ₀".
        double lo = 1e-6, hi = 1.0;
        while (!crosses(lo)) lo /= 4.0;
        while (crosses(hi)) hi *= 4.0;
        for (int it = 0; it < 200 && hi - lo > 1e-16 * hi; ++it) {
            const double mid = 0.5 * (lo + hi);
            (crosses(mid) ? lo : hi) = mid;
        }
        peak_ = 0.5 * (lo + hi);
    }

    double peak() const { return peak_; }

    // ψ on [0, θ₀], n uniform cells, sampled at cell midpoints.
    std::vector<double> profile_midpoints(int n) const
    {
        std::vector<double> out;
        std::array<double, 2> y{peak_, 0.0};
        double t = 0.0;
        const double h = t0_ / n;
        for (int i = 0; i < n; ++i) {
            const double mid = (i + 0.5) * h;
            y = advance(y, t, mid);
            t = mid;
            out.push_back(std::max(y[0], 0.0));
        }
        return out;
    }

    // Even P1 problem on [0, θ₀] (natural at 0, Dirichlet at θ₀), midpoint
    // weight, Richardson over n and 2n.
    double sigma(int n) const
    {
        const double s1 = sigma_at(n), s2 = sigma_at(2 * n);
        return (4.0 * s2 - s1) / 3.0;
    }

    double sigma_at(int n) const
    {
        const double h = t0_ / n;
        const auto psi = profile_midpoints(n);
        Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n), B = Eigen::MatrixXd::Zero(n, n);
        for (int c = 0; c < n; ++c) {
            const double wgt = std::pow(psi[c], q_ - 2.0);
            const int nodes[2] = {c, c + 1};
            const double kl[2][2] = {{1.0 / h, -1.0 / h}, {-1.0 / h, 1.0 / h}};
            const double ml[2][2] = {{h / 3.0, h / 6.0}, {h / 6.0, h / 3.0}};
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 2; ++j) {
                    if (nodes[i] == n || nodes[j] == n) continue;
                    A(nodes[i], nodes[j]) += kl[i][j];
                    B(nodes[i], nodes[j]) += wgt * ml[i][j];
                }
        }
        Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(A, B, Eigen::EigenvaluesOnly);
        return es.eigenvalues()[0];
    }

private:
    using State = std::array<double, 2>;

    State advance(State y, double from, double to) const
    {
        namespace ode = boost::numeric::odeint;
        const double q = q_, d2 = d_ * d_;
        auto rhs = [q, d2](const State& s, State& ds, double) {
            ds[0] = s[1];
            ds[1] = -d2 * s[0] - std::copysign(std::pow(std::abs(s[0]), q - 1.0), s[0]);
        };
        if (to > from)
            ode::integrate_adaptive(ode::make_controlled<ode::runge_kutta_dopri5<State>>(1e-13, 1e-13), rhs, y,
                                    from, to, (to - from) * 1e-3);
        return y;
    }

    bool crosses(double s) const
    {
        State y{s, 0.0};
        constexpr int samples = 400;
        for (int i = 1; i <= samples; ++i) {
            y = advance(y, t0_ * (i - 1) / samples, t0_ * i / samples);
            if (y[0] < 0.0) return true;
        }
        return false;
    }

    double q_, t0_, d_;
    double peak_ = 0.0;
};

} // namespace oracle
