#include <benchmark/benchmark.h>

#include "egrowth/balayage.hpp"
#include "egrowth/green.hpp"
#include "egrowth/growth.hpp"
#include "egrowth/solver.hpp"

using namespace egrowth;

namespace {

GridSpec box(benchmark::State& state) { return GridSpec::square(-2.0, 2.0, static_cast<int>(state.range(0))); }

void BM_GreenSOR(benchmark::State& state) {
    const GridSpec s = box(state);
    const GridDomain d = make_disk({0, 0}, 1.0, s);
    for (auto _ : state) benchmark::DoNotOptimize(green(OperatorDesc::laplace(), d, {0.3, 0.2}));
}

void BM_GreenBeltrami(benchmark::State& state) {
    const GridSpec s = box(state);
    const GridDomain d = make_disk({0, 0}, 1.0, s);
    const OperatorDesc op = OperatorDesc::beltrami(ScalarField::sample(s, [](Point p) { return 1.0 + 0.3 * p.x * p.x; }));
    for (auto _ : state) benchmark::DoNotOptimize(green(op, d, {0.3, 0.2}));
}

void BM_DirectFactor(benchmark::State& state) {
    const GridSpec s = box(state);
    const GridDomain d = make_disk({0, 0}, 1.0, s);
    const EllipticSystem sys(OperatorDesc::laplace(), d);
    for (auto _ : state) benchmark::DoNotOptimize(DirectSolver(sys));
}

void BM_GreenDirect(benchmark::State& state) {
    const GridSpec s = box(state);
    const GridDomain d = make_disk({0, 0}, 1.0, s);
    const DirectSolver solver{EllipticSystem(OperatorDesc::laplace(), d)};
    for (auto _ : state) benchmark::DoNotOptimize(green(solver, OperatorDesc::laplace(), d, {0.3, 0.2}));
}

void BM_PointMassBalayage(benchmark::State& state) {
    const GridSpec s = box(state);
    Measure mu;
    mu.density = ScalarField(s);
    mu.add_atom({0, 0}, 0.785);
    for (auto _ : state) benchmark::DoNotOptimize(partial_balayage(mu, std::nullopt, s));
}

void BM_StrongStep(benchmark::State& state) {
    const GridSpec s = box(state);
    const GrowthState g = GrowthState::start(make_disk({0, 0}, 1.0, s), OperatorDesc::laplace(), {0, 0}, 1.0);
    const double dt = 0.4 * s.h * two_pi;
    for (auto _ : state) benchmark::DoNotOptimize(strong_step(g, dt));
}

}  // namespace

BENCHMARK(BM_GreenSOR)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_GreenBeltrami)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_DirectFactor)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_GreenDirect)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_PointMassBalayage)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_StrongStep)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
