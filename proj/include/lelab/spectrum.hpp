#pragma once

#include <cstddef>
#include <vector>

#include "lelab/geometry.hpp"

namespace lelab {

/// One value of the variational (bump) spectrum of an interval or of a union.
struct SpectrumEntry {
    double lambda = 0.0;
    std::vector<int> bumps;  // per component, 0 where the spin is off
    std::vector<int> spin;   // δ ∈ {0,1}^k, not identically zero
};

/// λ_k = ‖U_k‖_q^{q−2} for the k-bump shooting solutions, k = 1..kmax.
std::vector<SpectrumEntry> interval_spectrum(const Interval& interval, double q, int kmax);

/// [Σ_{δ_i = 1} λ_i^{−q/(2−q)}]^{(q−2)/q}; throws if no spin is on.
double spin_formula(const std::vector<double>& lambdas, const std::vector<int>& spin, double q);

/// All spin vectors and per-component entries, deduplicated within 1e-12
/// relative and sorted. Throws when the number of combinations exceeds `cap`.
std::vector<SpectrumEntry> spin_combine(const std::vector<std::vector<SpectrumEntry>>& components, double q,
                                        std::size_t cap = 1'000'000);

struct SpectralGap {
    double lambda1 = 0.0;
    double lambda2 = 0.0;
    double gap = 0.0;
};

/// λ₂ is the least entry above λ₁(1 + 1e-10).
SpectralGap spectral_gap(const std::vector<SpectrumEntry>& spectrum);

} // namespace lelab
