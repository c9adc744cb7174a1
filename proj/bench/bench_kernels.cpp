// Serial vs parallel kernel timings (build with --target bench_kernels).
//
// The age rows of one implicit step are independent tridiagonal solves, so
// the row sweep is the parallel kernel; the duality reduction is the other
// hot loop.  Both are timed against the serial reference on the canonical
// grid and one refinement.

#include "cascade/config.hpp"
#include "cascade/quadrature.hpp"
#include "cascade/solver.hpp"

#include <benchmark/benchmark.h>

#include <random>

using namespace cascade;

namespace {

struct Instance {
    TensorGrid grid;
    ExperimentConfig cfg;
    Field u0, v0;

    explicit Instance(std::size_t nt, std::size_t na, std::size_t nx)
        : grid(TensorGrid::make(2.0, 1.0, nt, na, nx)),
          cfg(ExperimentConfig::from_file(ConfigFile::parse_string("", "bench"))),
          u0(grid),
          v0(grid) {
        std::mt19937_64 eng(1234);
        std::uniform_real_distribution<double> dist(0.0, 1.0);
        for (std::size_t j = 0; j <= grid.Na; ++j)
            for (std::size_t i = 1; i < grid.Nx; ++i) {
                u0.at(j, i) = dist(eng);
                v0.at(j, i) = dist(eng);
            }
    }
};

void forward_march(benchmark::State& state, std::size_t nt, std::size_t na, std::size_t nx,
                   bool parallel) {
    const Instance inst(nt, na, nx);
    const CascadeSolver solver(inst.grid, inst.cfg.k1, inst.cfg.k2, inst.cfg.rates,
                               inst.cfg.hum.omega, parallel);
    CascadeSolver::ForwardInput in;
    in.u0 = inst.u0;
    in.v0 = inst.v0;
    for (auto _ : state) {
        auto out = solver.solve_forward(0, inst.grid.Nt, in);
        benchmark::DoNotOptimize(out.u.slices.back().v.data());
    }
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) *
                            static_cast<std::int64_t>(nt * (na + 1) * (nx + 1)));
}

void adjoint_march(benchmark::State& state, std::size_t nt, std::size_t na, std::size_t nx,
                   bool parallel) {
    const Instance inst(nt, na, nx);
    const CascadeSolver solver(inst.grid, inst.cfg.k1, inst.cfg.k2, inst.cfg.rates,
                               inst.cfg.hum.omega, parallel);
    CascadeSolver::AdjointInput in;
    in.zT = inst.u0;
    in.yT = inst.v0;
    for (auto _ : state) {
        auto out = solver.solve_adjoint(0, inst.grid.Nt, in);
        benchmark::DoNotOptimize(out.z.slices.front().v.data());
    }
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) *
                            static_cast<std::int64_t>(nt * (na + 1) * (nx + 1)));
}

void duality_reduction(benchmark::State& state, std::size_t nx) {
    const Instance inst(80, 40, nx);
    for (auto _ : state) {
        const double s = dual_pair(inst.grid, inst.u0, inst.v0, inst.cfg.k1);
        benchmark::DoNotOptimize(s);
    }
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) *
                            static_cast<std::int64_t>((inst.grid.Na + 1) * (nx + 1)));
}

BENCHMARK_CAPTURE(forward_march, canonical_serial, 80, 40, 60, false);
BENCHMARK_CAPTURE(forward_march, canonical_parallel, 80, 40, 60, true);
BENCHMARK_CAPTURE(forward_march, refined_serial, 160, 80, 120, false);
BENCHMARK_CAPTURE(forward_march, refined_parallel, 160, 80, 120, true);
BENCHMARK_CAPTURE(adjoint_march, canonical_serial, 80, 40, 60, false);
BENCHMARK_CAPTURE(adjoint_march, canonical_parallel, 80, 40, 60, true);
BENCHMARK_CAPTURE(duality_reduction, canonical, 60);
BENCHMARK_CAPTURE(duality_reduction, refined, 120);

} // namespace

BENCHMARK_MAIN();
