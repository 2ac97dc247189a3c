#include "lelab/kernels.hpp"

#include <cmath>

namespace lelab::kernels {

namespace {

constexpr int unused = -1;

int slots_per_cell(const Mesh& mesh) { return mesh.vertices_per_cell() * mesh.vertices_per_cell(); }

// Writes the (d+1)^2 local entries of `cell` into `out`, row-major.
void local_matrix(const Mesh& mesh, int cell, LocalForm form, double coef, double* out)
{
    const auto& c = mesh.cells[cell];
    if (mesh.dim == 1) {
        const double h = std::abs(mesh.nodes[c[1]].x - mesh.nodes[c[0]].x);
        if (form == LocalForm::Stiffness) {
            const double k = coef / h;
            out[0] = k, out[1] = -k, out[2] = -k, out[3] = k;
        } else {
            const double m = coef * h / 6.0;
            out[0] = 2 * m, out[1] = m, out[2] = m, out[3] = 2 * m;
        }
        return;
    }
    const Point p0 = mesh.nodes[c[0]], p1 = mesh.nodes[c[1]], p2 = mesh.nodes[c[2]];
    const double area = 0.5 * std::abs(cross(p1 - p0, p2 - p0));
    if (form == LocalForm::Stiffness) {
        // Edge vectors opposite each vertex; grad λ_i ⟂ e_i with |e_i|/(2|T|).
        const Point e[3] = {p2 - p1, p0 - p2, p1 - p0};
        const double s = coef / (4.0 * area);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) out[3 * i + j] = s * dot(e[i], e[j]);
    } else {
        const double m = coef * area / 12.0;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) out[3 * i + j] = i == j ? 2 * m : m;
    }
}

void fill_slots(const Mesh& mesh, int cell, LocalForm form, const std::vector<int>& node_to_free, double coef,
                int* rows, int* cols, double* vals)
{
    const int per = mesh.vertices_per_cell();
    local_matrix(mesh, cell, form, coef, vals);
    const auto& c = mesh.cells[cell];
    for (int i = 0; i < per; ++i)
        for (int j = 0; j < per; ++j) {
            rows[per * i + j] = node_to_free[c[i]];
            cols[per * i + j] = node_to_free[c[j]];
        }
}

std::vector<Triplet> compact(const std::vector<int>& rows, const std::vector<int>& cols,
                             const std::vector<double>& vals)
{
    std::vector<Triplet> out;
    out.reserve(rows.size());
    for (std::size_t k = 0; k < rows.size(); ++k)
        if (rows[k] != unused && cols[k] != unused && vals[k] != 0.0) out.emplace_back(rows[k], cols[k], vals[k]);
    return out;
}

double cell_mean(const Mesh& mesh, const Eigen::VectorXd& nodal, int cell)
{
    const auto& c = mesh.cells[cell];
    if (mesh.dim == 1) return 0.5 * (nodal[c[0]] + nodal[c[1]]);
    return (nodal[c[0]] + nodal[c[1]] + nodal[c[2]]) / 3.0;
}

double gather_load(const Mesh& mesh, const std::vector<double>& cell_values, const std::vector<double>& weights,
                   int node)
{
    double s = 0.0;
    for (int k = mesh.node_cell_offsets[node]; k < mesh.node_cell_offsets[node + 1]; ++k) {
        const int c = mesh.node_cells[k];
        s += weights[c] * cell_values[c];
    }
    return s;
}

std::vector<double> load_weights(const Mesh& mesh)
{
    std::vector<double> w(mesh.cells.size());
    for (int c = 0; c < mesh.num_cells(); ++c) w[c] = mesh.measure(c) / mesh.vertices_per_cell();
    return w;
}

int block_count(std::size_t n) { return static_cast<int>((n + reduction_block - 1) / reduction_block); }

double block_partial(const std::vector<double>& values, int block)
{
    const std::size_t lo = static_cast<std::size_t>(block) * reduction_block;
    const std::size_t hi = std::min(values.size(), lo + reduction_block);
    double s = 0.0;
    for (std::size_t i = lo; i < hi; ++i) s += values[i];
    return s;
}

double sum_partials(const std::vector<double>& partials)
{
    double s = 0.0;
    for (double p : partials) s += p;
    return s;
}

} // namespace

double abs_power(double v, double p) { return std::pow(std::abs(v), p); }
double signed_power(double v, double p) { return std::copysign(std::pow(std::abs(v), p), v); }
double absolute(double v, double) { return std::abs(v); }

namespace serial {

std::vector<Triplet> local_triplets(const Mesh& mesh, LocalForm form, const std::vector<int>& node_to_free,
                                    const std::vector<double>& cell_coef)
{
    const int per = slots_per_cell(mesh);
    const std::size_t n = static_cast<std::size_t>(mesh.num_cells()) * per;
    std::vector<int> rows(n), cols(n);
    std::vector<double> vals(n);
    for (int c = 0; c < mesh.num_cells(); ++c)
        fill_slots(mesh, c, form, node_to_free, cell_coef[c], &rows[c * per], &cols[c * per], &vals[c * per]);
    return compact(rows, cols, vals);
}

std::vector<double> cell_means(const Mesh& mesh, const Eigen::VectorXd& nodal)
{
    std::vector<double> out(mesh.cells.size());
    for (int c = 0; c < mesh.num_cells(); ++c) out[c] = cell_mean(mesh, nodal, c);
    return out;
}

std::vector<double> cell_samples(const Mesh& mesh, const std::function<double(Point)>& f)
{
    std::vector<double> out(mesh.cells.size());
    for (int c = 0; c < mesh.num_cells(); ++c) out[c] = f(mesh.barycenter(c));
    return out;
}

Eigen::VectorXd barycentric_load(const Mesh& mesh, const std::vector<double>& cell_values)
{
    const auto weights = load_weights(mesh);
    Eigen::VectorXd b(mesh.num_nodes());
    for (int i = 0; i < mesh.num_nodes(); ++i) b[i] = gather_load(mesh, cell_values, weights, i);
    return b;
}

double blocked_sum(const std::vector<double>& values)
{
    std::vector<double> partials(block_count(values.size()));
    for (int b = 0; b < static_cast<int>(partials.size()); ++b) partials[b] = block_partial(values, b);
    return sum_partials(partials);
}

double cell_integral(const Mesh& mesh, const std::vector<double>& cell_values, double (*g)(double, double),
                     double parameter)
{
    std::vector<double> terms(cell_values.size());
    for (int c = 0; c < mesh.num_cells(); ++c) terms[c] = mesh.measure(c) * g(cell_values[c], parameter);
    return blocked_sum(terms);
}

} // namespace serial

namespace omp {

std::vector<Triplet> local_triplets(const Mesh& mesh, LocalForm form, const std::vector<int>& node_to_free,
                                    const std::vector<double>& cell_coef)
{
    const int per = slots_per_cell(mesh);
    const std::size_t n = static_cast<std::size_t>(mesh.num_cells()) * per;
    std::vector<int> rows(n), cols(n);
    std::vector<double> vals(n);
#pragma omp parallel for schedule(static)
    for (int c = 0; c < mesh.num_cells(); ++c)
        fill_slots(mesh, c, form, node_to_free, cell_coef[c], &rows[c * per], &cols[c * per], &vals[c * per]);
    return compact(rows, cols, vals);
}

std::vector<double> cell_means(const Mesh& mesh, const Eigen::VectorXd& nodal)
{
    std::vector<double> out(mesh.cells.size());
#pragma omp parallel for schedule(static)
    for (int c = 0; c < mesh.num_cells(); ++c) out[c] = cell_mean(mesh, nodal, c);
    return out;
}

std::vector<double> cell_samples(const Mesh& mesh, const std::function<double(Point)>& f)
{
    std::vector<double> out(mesh.cells.size());
#pragma omp parallel for schedule(static)
    for (int c = 0; c < mesh.num_cells(); ++c) out[c] = f(mesh.barycenter(c));
    return out;
}

Eigen::VectorXd barycentric_load(const Mesh& mesh, const std::vector<double>& cell_values)
{
    const auto weights = load_weights(mesh);
    Eigen::VectorXd b(mesh.num_nodes());
#pragma omp parallel for schedule(static)
    for (int i = 0; i < mesh.num_nodes(); ++i) b[i] = gather_load(mesh, cell_values, weights, i);
    return b;
}

double blocked_sum(const std::vector<double>& values)
{
    std::vector<double> partials(block_count(values.size()));
#pragma omp parallel for schedule(static)
    for (int b = 0; b < static_cast<int>(partials.size()); ++b) partials[b] = block_partial(values, b);
    return sum_partials(partials);
}

double cell_integral(const Mesh& mesh, const std::vector<double>& cell_values, double (*g)(double, double),
                     double parameter)
{
    std::vector<double> terms(cell_values.size());
#pragma omp parallel for schedule(static)
    for (int c = 0; c < mesh.num_cells(); ++c) terms[c] = mesh.measure(c) * g(cell_values[c], parameter);
    return blocked_sum(terms);
}

} // namespace omp

} // namespace lelab::kernels
