#include "lelab/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "lelab/error.hpp"
#include "lelab/shooting.hpp"

namespace lelab {

namespace {

void check_q(double q)
{
    if (!(q > 1.0 && q < 2.0)) throw InputError("q must lie in (1, 2)");
}

} // namespace

std::vector<SpectrumEntry> interval_spectrum(const Interval& interval, double q, int kmax)
{
    check_q(q);
    if (kmax < 1) throw InputError("kmax must be >= 1");
    std::vector<SpectrumEntry> out(kmax);
#pragma omp parallel for schedule(dynamic)
    for (int k = 1; k <= kmax; ++k) {
        const ShotSolution shot = shoot_1d(interval, q, k);
        out[k - 1] = {std::exp((q - 2.0) / q * shot.log_integral_q), {k}, {1}};
    }
    for (int k = 1; k < kmax; ++k)
        if (!(out[k].lambda > out[k - 1].lambda)) throw SolverError("bump spectrum is not increasing");
    return out;
}

double spin_formula(const std::vector<double>& lambdas, const std::vector<int>& spin, double q)
{
    check_q(q);
    if (lambdas.size() != spin.size()) throw InputError("spin vector and eigenvalues differ in length");
    // Summed in log space: the exponent −q/(2−q) is huge as q → 2.
    std::vector<double> logs;
    for (std::size_t i = 0; i < spin.size(); ++i) {
        if (!spin[i]) continue;
        if (!(lambdas[i] > 0.0)) throw InputError("eigenvalues must be positive");
        logs.push_back(-q / (2.0 - q) * std::log(lambdas[i]));
    }
    if (logs.empty()) throw InputError("spin vector is identically zero");
    const double top = *std::max_element(logs.begin(), logs.end());
    double sum = 0.0;
    for (double t : logs) sum += std::exp(t - top);
    return std::exp((q - 2.0) / q * (top + std::log(sum)));
}

std::vector<SpectrumEntry> spin_combine(const std::vector<std::vector<SpectrumEntry>>& components, double q,
                                        std::size_t cap)
{
    check_q(q);
    const std::size_t k = components.size();
    if (k == 0) throw InputError("no components");
    if (k > 20) throw InputError("too many components");
    double total = 1.0;
    for (const auto& c : components) {
        if (c.empty()) throw InputError("component spectrum is empty");
        total *= static_cast<double>(c.size() + 1);
    }
    if (total - 1.0 > static_cast<double>(cap)) throw InputError("spin combination count exceeds the cap");

    const std::size_t masks = std::size_t{1} << k;
    std::vector<std::vector<SpectrumEntry>> per_mask(masks);
#pragma omp parallel for schedule(dynamic)
    for (std::size_t mask = 1; mask < masks; ++mask) {
        std::vector<int> spin(k), index(k, 0);
        for (std::size_t i = 0; i < k; ++i) spin[i] = (mask >> i) & 1u;
        std::vector<double> lambdas(k, 1.0);
        for (;;) {
            SpectrumEntry e;
            e.spin = spin;
            e.bumps.assign(k, 0);
            for (std::size_t i = 0; i < k; ++i)
                if (spin[i]) {
                    const auto& src = components[i][index[i]];
                    lambdas[i] = src.lambda;
                    e.bumps[i] = src.bumps.empty() ? 1 : src.bumps.front();
                }
            e.lambda = spin_formula(lambdas, spin, q);
            per_mask[mask].push_back(std::move(e));
            // Odometer over the entries of the active components.
            std::size_t i = 0;
            for (; i < k; ++i) {
                if (!spin[i]) continue;
                if (++index[i] < static_cast<int>(components[i].size())) break;
                index[i] = 0;
            }
            if (i == k) break;
        }
    }

    std::vector<SpectrumEntry> all;
    for (auto& v : per_mask) all.insert(all.end(), v.begin(), v.end());
    std::stable_sort(all.begin(), all.end(),
                     [](const SpectrumEntry& a, const SpectrumEntry& b) { return a.lambda < b.lambda; });
    std::vector<SpectrumEntry> out;
    for (auto& e : all)
        if (out.empty() || e.lambda > out.back().lambda * (1.0 + 1e-12)) out.push_back(std::move(e));
    return out;
}

SpectralGap spectral_gap(const std::vector<SpectrumEntry>& spectrum)
{
    if (spectrum.size() < 2) throw InputError("spectral gap needs at least two entries");
    double l1 = spectrum.front().lambda;
    for (const auto& e : spectrum) l1 = std::min(l1, e.lambda);
    double l2 = std::numeric_limits<double>::infinity();
    for (const auto& e : spectrum)
        if (e.lambda > l1 * (1.0 + 1e-10)) l2 = std::min(l2, e.lambda);
    if (!std::isfinite(l2)) throw InputError("spectrum has fewer than two distinct values");
    return {l1, l2, l2 - l1};
}

} // namespace lelab
