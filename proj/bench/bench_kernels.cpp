// Serial reference kernels against their OpenMP counterparts on a square mesh.
// Run with OMP_NUM_THREADS set to compare thread counts.

#include <map>

#include <benchmark/benchmark.h>

#include "lelab/fem.hpp"
#include "lelab/kernels.hpp"
#include "lelab/lane_emden.hpp"

namespace {

using namespace lelab;
namespace k = lelab::kernels;

const Mesh& square_mesh(int level)
{
    static std::map<int, Mesh> cache;
    auto it = cache.find(level);
    if (it == cache.end()) {
        const auto square = DomainSpec::polygon({{0, 0}, {1, 0}, {1, 1}, {0, 1}});
        it = cache.emplace(level, triangulate(square, level)).first;
    }
    return it->second;
}

Vector field(const Mesh& m)
{
    Vector u(m.num_nodes());
    for (int i = 0; i < m.num_nodes(); ++i) u[i] = m.distance[i];
    return u;
}

template <class F>
void run(benchmark::State& state, F&& body)
{
    const Mesh& m = square_mesh(static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(body(m));
    state.counters["cells"] = m.num_cells();
    state.SetItemsProcessed(state.iterations() * m.num_cells());
}

void BM_triplets_serial(benchmark::State& s)
{
    run(s, [](const Mesh& m) {
        const auto dofs = DofMap::interior(m);
        return k::serial::local_triplets(m, k::LocalForm::Stiffness, dofs->node_to_free(),
                                         std::vector<double>(m.num_cells(), 1.0));
    });
}
void BM_triplets_omp(benchmark::State& s)
{
    run(s, [](const Mesh& m) {
        const auto dofs = DofMap::interior(m);
        return k::omp::local_triplets(m, k::LocalForm::Stiffness, dofs->node_to_free(),
                                      std::vector<double>(m.num_cells(), 1.0));
    });
}

void BM_power_integral_serial(benchmark::State& s)
{
    run(s, [](const Mesh& m) {
        const Vector u = field(m);
        return k::serial::cell_integral(m, k::serial::cell_means(m, u), k::abs_power, 1.5);
    });
}
void BM_power_integral_omp(benchmark::State& s)
{
    run(s, [](const Mesh& m) {
        const Vector u = field(m);
        return k::omp::cell_integral(m, k::omp::cell_means(m, u), k::abs_power, 1.5);
    });
}

void BM_load_serial(benchmark::State& s)
{
    run(s, [](const Mesh& m) { return k::serial::barycentric_load(m, std::vector<double>(m.num_cells(), 1.0)); });
}
void BM_load_omp(benchmark::State& s)
{
    run(s, [](const Mesh& m) { return k::omp::barycentric_load(m, std::vector<double>(m.num_cells(), 1.0)); });
}

void BM_least_energy_solve(benchmark::State& state)
{
    const Mesh& m = square_mesh(static_cast<int>(state.range(0)));
    const LaneEmdenProblem p(m);
    LaneEmdenConfig c;
    for (auto _ : state) benchmark::DoNotOptimize(solve_least_energy(p, c).lambda1);
    state.counters["nodes"] = m.num_nodes();
}

} // namespace

BENCHMARK(BM_triplets_serial)->DenseRange(5, 7)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_triplets_omp)->DenseRange(5, 7)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_power_integral_serial)->DenseRange(5, 7)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_power_integral_omp)->DenseRange(5, 7)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_load_serial)->DenseRange(5, 7)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_load_omp)->DenseRange(5, 7)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_least_energy_solve)->DenseRange(4, 5)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
