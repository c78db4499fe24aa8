#include <string>

#include <benchmark/benchmark.h>

#include "dissipate/formcheck.hpp"

namespace {

using namespace dissipate;

const std::string kSpecs = std::string(DISSIPATE_SOURCE_DIR) + "/specs/";

GridFunction modulated_bump(const Grid& g) {
    return GridFunction::from_function(g, [](std::span<const double> x) {
        return bump(2.0 * x[0] - 1.0) * bump(2.0 * x[1] - 1.0) * std::exp(Complex(0.0, 8.0 * x[1]));
    });
}

void BM_TransformedFunctional(benchmark::State& state) {
    OperatorSpec spec = load_spec(kSpecs + "example2.json");
    spec.grid = {static_cast<int>(state.range(0)), static_cast<int>(state.range(0))};
    const FormContext ctx(spec);
    const GridFunction v = modulated_bump(ctx.grid());
    for (auto _ : state) benchmark::DoNotOptimize(ctx.transformed(v, 3.0));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(v.size()));
}
BENCHMARK(BM_TransformedFunctional)->Arg(16)->Arg(32)->Arg(64);

void BM_DirectFunctional(benchmark::State& state) {
    OperatorSpec spec = load_spec(kSpecs + "example2.json");
    spec.grid = {static_cast<int>(state.range(0)), static_cast<int>(state.range(0))};
    const FormContext ctx(spec);
    const GridFunction u = modulated_bump(ctx.grid());
    for (auto _ : state) benchmark::DoNotOptimize(ctx.direct(u, 3.0));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(u.size()));
}
BENCHMARK(BM_DirectFunctional)->Arg(32);

void BM_Falsify(benchmark::State& state) {
    OperatorSpec spec = load_spec(kSpecs + "example1.json");
    spec.grid = {16, 16};
    FalsifyOptions opts;
    opts.workers = 1;
    for (auto _ : state) benchmark::DoNotOptimize(falsify(spec, 2.0, static_cast<std::uint64_t>(state.range(0)), 7, opts));
}
BENCHMARK(BM_Falsify)->Arg(200)->Unit(benchmark::kMillisecond);

}  // namespace
