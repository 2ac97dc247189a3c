#include "lelab/quadrature.hpp"

#include <boost/math/special_functions/legendre.hpp>

#include "lelab/error.hpp"

namespace lelab {

std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int n)
{
    if (n < 1) throw InputError("quadrature order must be >= 1");
    const auto positive = boost::math::legendre_p_zeros<double>(n);
    std::vector<double> x, w;
    for (double z : positive) {
        const double dp = boost::math::legendre_p_prime(n, z);
        const double wt = 2.0 / ((1.0 - z * z) * dp * dp);
        x.push_back(z), w.push_back(wt);
        if (z != 0.0) x.push_back(-z), w.push_back(wt);
    }
    return {x, w};
}

} // namespace lelab
