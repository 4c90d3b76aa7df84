#include <fracbilin/forward.hpp>
#include <fracbilin/fracop.hpp>
#include <fracbilin/optimize.hpp>
#include <fracbilin/problem.hpp>

#include <benchmark/benchmark.h>

using namespace fracbilin;

namespace {

// the shipped default case, desk scale
ProblemSpec desk_spec() {
    ProblemSpec sp;
    sp.y0.space.kind = SpaceFunc::Kind::Gaussian;
    sp.y0.space.amp = 1.0;
    sp.y0.space.center = 0.0;
    sp.y0.space.width = 0.4;
    sp.yd.space.kind = SpaceFunc::Kind::Gaussian;
    sp.yd.space.amp = 0.8;
    sp.yd.space.center = 0.2;
    sp.yd.space.width = 0.4;
    sp.f.space.kind = SpaceFunc::Kind::Constant;
    sp.f.space.value = 0.1;
    sp.kappa.kind = KernelSpec::Kind::Constant;
    sp.kappa.value = 0.5;
    sp.kappa.sup_bound = 0.5;
    return sp;
}

void bm_assemble(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    Grid g = Grid::make(-1.0, 1.0, n);
    for (auto _ : state) {
        StiffnessMatrix a = assemble(g, 0.5);
        benchmark::DoNotOptimize(a.a.data());
    }
    state.SetComplexityN(n);
}

void bm_forward_solve(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    ProblemSpec sp = desk_spec();
    Discretization d = make_discretization(sp, {n, n});
    ControlField v = project_control(zero_field(d.tg, d.grid), sp, d.grid);
    for (auto _ : state) {
        Field y = solve_forward(sp, d, v);
        benchmark::DoNotOptimize(y.data());
    }
    state.SetComplexityN(n);
}

void bm_gradient_step(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    ProblemSpec sp = desk_spec();
    Discretization d = make_discretization(sp, {n, n});
    ControlField u = project_control(zero_field(d.tg, d.grid), sp, d.grid);
    for (auto _ : state) {
        DirectionField g = gradient_at(sp, d, u);
        ControlField next = project_control(u - g, sp, d.grid);
        benchmark::DoNotOptimize(next.data());
    }
    state.SetComplexityN(n);
}

void bm_pgd_full(benchmark::State& state) {
    ProblemSpec sp = desk_spec();
    Discretization d = make_discretization(sp, {64, 64});
    OptimizerConfig cfg;
    cfg.seed = 20240817;
    ControlField u0 = project_control(zero_field(d.tg, d.grid), sp, d.grid);
    for (auto _ : state) {
        OptResult r = solve_pgd(sp, d, cfg, u0);
        benchmark::DoNotOptimize(r.u_opt.data());
    }
}

} // namespace

BENCHMARK(bm_assemble)->Arg(64)->Arg(128)->Arg(256)->Arg(512)->Unit(benchmark::kMillisecond);
BENCHMARK(bm_forward_solve)->Arg(32)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);
BENCHMARK(bm_gradient_step)->Arg(32)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);
BENCHMARK(bm_pgd_full)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
