#pragma once

#include <functional>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "lelab/mesh.hpp"

// Data-parallel inner loops. Each kernel exists twice: a serial reference and
// an OpenMP version. Both write into fixed slots and reduce over fixed blocks,
// so they return bit-identical results for any thread count.
namespace lelab::kernels {

using Triplet = Eigen::Triplet<double>;

/// Block length of every reduction.
inline constexpr int reduction_block = 4096;

/// Which local form to assemble.
enum class LocalForm { Stiffness, Mass };

namespace serial {

/// Local P1 matrices scaled by `cell_coef[c]`, emitted in cell order. Rows or
/// columns whose node maps to -1 in `node_to_free` are dropped.
std::vector<Triplet> local_triplets(const Mesh& mesh, LocalForm form, const std::vector<int>& node_to_free,
                                    const std::vector<double>& cell_coef);
std::vector<double> cell_means(const Mesh& mesh, const Eigen::VectorXd& nodal);
std::vector<double> cell_samples(const Mesh& mesh, const std::function<double(Point)>& f);
/// b_i = Σ_{T ∋ i} |T|/(d+1) · cell_values[T].
Eigen::VectorXd barycentric_load(const Mesh& mesh, const std::vector<double>& cell_values);
/// Σ_c |T_c| · g(cell_values[c]) with fixed-block summation.
double cell_integral(const Mesh& mesh, const std::vector<double>& cell_values, double (*g)(double, double),
                     double parameter);
double blocked_sum(const std::vector<double>& values);

} // namespace serial

namespace omp {

std::vector<Triplet> local_triplets(const Mesh& mesh, LocalForm form, const std::vector<int>& node_to_free,
                                    const std::vector<double>& cell_coef);
std::vector<double> cell_means(const Mesh& mesh, const Eigen::VectorXd& nodal);
std::vector<double> cell_samples(const Mesh& mesh, const std::function<double(Point)>& f);
Eigen::VectorXd barycentric_load(const Mesh& mesh, const std::vector<double>& cell_values);
double cell_integral(const Mesh& mesh, const std::vector<double>& cell_values, double (*g)(double, double),
                     double parameter);
double blocked_sum(const std::vector<double>& values);

} // namespace omp

/// Integrands for cell_integral: g(value, p).
double abs_power(double v, double p);
double signed_power(double v, double p);
double absolute(double v, double p);

} // namespace lelab::kernels
