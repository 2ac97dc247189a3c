#pragma once

#include <utility>
#include <vector>

namespace lelab {

/// n-point Gauss-Legendre nodes and weights on [-1, 1].
std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int n);

} // namespace lelab
