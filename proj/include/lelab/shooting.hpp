#pragma once

#include <vector>

#include "lelab/fem.hpp"
#include "lelab/geometry.hpp"
#include "lelab/mesh.hpp"

namespace lelab {

/// k-bump solution of −u'' = |u|^{q−2}u on an interval with zero end values.
/// The first bump is positive; bumps alternate in sign.
struct ShotSolution {
    Interval interval;
    double q = 1.5;
    int bumps = 1;
    double slope = 0.0;            // u'(a)
    double bump_length = 0.0;
    double amplitude = 0.0;        // u(x) = amplitude · v(unit_length (x − a) / bump_length)
    double unit_length = 0.0;      // first zero X₁ of the canonical bump
    double unit_slope = 0.0;       // v'(0) in scaled coordinates
    double sup_norm = 0.0;
    double terminal_value = 0.0;   // u(b) from integrating across all bumps
    double integral_q = 0.0;       // ∫|u|^q
    double log_integral_q = 0.0;   // log ∫|u|^q (amplitudes underflow as q → 2)
    double integral_grad = 0.0;    // ∫|u'|²

    /// Values at arbitrary points of the interval (dense ODE output).
    std::vector<double> values(const std::vector<double>& xs) const;
    std::vector<double> derivatives(const std::vector<double>& xs) const;
    /// Nodal samples on a 1D mesh (zero outside the interval).
    Vector sample(const Mesh& mesh) const;
};

/// Shooting on the initial slope with a bracketed root finder, then a full
/// integration across the interval that must end within 1e-9·‖u‖∞ of zero.
ShotSolution shoot_1d(const Interval& interval, double q, int bumps);

} // namespace lelab
