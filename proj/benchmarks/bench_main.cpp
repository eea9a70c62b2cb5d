#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "mfg/coupling.hpp"
#include "mfg/fitted_fvm.hpp"
#include "mfg/gradient.hpp"
#include "mfg/hjb_solver.hpp"
#include "mfg/kfp_solver.hpp"
#include "mfg/model.hpp"
#include "mfg/validation.hpp"

namespace {

void bm_bernoulli(benchmark::State& state) {
    double x = -8.0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(mfg::bernoulli(x));
        x += 0.25;
        if (x > 8.0) x = -8.0;
    }
}
BENCHMARK(bm_bernoulli);

void bm_edge_flux(benchmark::State& state) {
    double b = -1.0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(mfg::edge_flux_coeffs(b, 0.045, 0.0625));
        b += 0.01;
        if (b > 1.0) b = -1.0;
    }
}
BENCHMARK(bm_edge_flux);

void bm_assemble(benchmark::State& state) {
    const std::size_t n = static_cast<std::size_t>(state.range(0));
    const mfg::SpaceGrid grid = mfg::make_space_grid(n, 1.0, 5.0);
    std::vector<double> drift(n, 0.3);
    std::vector<double> reaction(n + 1, 0.1);
    for (auto _ : state)
        benchmark::DoNotOptimize(mfg::assemble_operator(drift, reaction, 0.045, grid));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}
BENCHMARK(bm_assemble)->Arg(64)->Arg(256)->Arg(1024);

void bm_thomas(benchmark::State& state) {
    const std::size_t n = static_cast<std::size_t>(state.range(0));
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.1, 1.0);
    mfg::TridiagonalSystem sys;
    sys.matrix.sub.resize(n - 1);
    sys.matrix.diag.resize(n);
    sys.matrix.sup.resize(n - 1);
    sys.rhs.resize(n);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        sys.matrix.sub[i] = -u(rng);
        sys.matrix.sup[i] = -u(rng);
    }
    for (std::size_t i = 0; i < n; ++i) {
        sys.matrix.diag[i] = 3.0 + u(rng);
        sys.rhs[i] = u(rng);
    }
    for (auto _ : state) benchmark::DoNotOptimize(mfg::solve_tridiagonal(sys));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}
BENCHMARK(bm_thomas)->Arg(65)->Arg(257)->Arg(1025);

void bm_kfp_step(benchmark::State& state) {
    const std::size_t n = static_cast<std::size_t>(state.range(0));
    const mfg::ModelParams params;
    const mfg::SpaceGrid grid = mfg::make_space_grid(n, params.e_min, params.e_max);
    const std::vector<double> m0 = mfg::sample_initial_density(mfg::TruncatedNormal{}, grid);
    std::vector<double> tau_nodes(n + 1, 0.4);
    std::vector<double> tau_edges(n, 0.4);
    const mfg::DriftLevel level{tau_nodes, tau_edges};
    for (auto _ : state)
        benchmark::DoNotOptimize(
            mfg::kfp_step(m0, level, level, 0.5, 1.0 / 64.0, grid, params));
}
BENCHMARK(bm_kfp_step)->Arg(64)->Arg(256)->Arg(1024);

void bm_equilibrium(benchmark::State& state) {
    mfg::SolverConfig solver;
    solver.n_space = static_cast<std::size_t>(state.range(0));
    solver.n_time = solver.n_space;
    const mfg::ModelParams params;
    for (auto _ : state)
        benchmark::DoNotOptimize(
            mfg::solve_equilibrium(solver, params, mfg::ConstantPrice{}, mfg::TruncatedNormal{}));
}
BENCHMARK(bm_equilibrium)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

void bm_particles(benchmark::State& state) {
    const mfg::ModelParams params;
    const mfg::SpaceGrid grid = mfg::make_space_grid(64, params.e_min, params.e_max);
    const mfg::TimeGrid times = mfg::make_time_grid(64, params.horizon);
    const mfg::Field tau(mfg::FieldKind::control, times.num_levels(), grid.num_nodes(), 0.4);
    for (auto _ : state)
        benchmark::DoNotOptimize(mfg::simulate_particles(
            tau, mfg::TruncatedNormal{}, static_cast<std::size_t>(state.range(0)), 4, 42, grid,
            times, params));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(bm_particles)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

} // namespace

int main(int argc, char** argv) {
    benchmark::Initialize(&argc, argv);
    if (benchmark::ReportUnrecognizedArguments(argc, argv)) return 1;
    benchmark::RunSpecifiedBenchmarks();
    return 0;
}
