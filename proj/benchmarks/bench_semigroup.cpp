#include <string>

#include <benchmark/benchmark.h>

#include "dissipate/semigroup.hpp"

namespace {

using namespace dissipate;

const std::string kSpecs = std::string(DISSIPATE_SOURCE_DIR) + "/specs/";

DiscreteOperator operator_for(int n) {
    OperatorSpec spec = load_spec(kSpecs + "example2.json");
    spec.grid = {n, n};
    return discretize(spec);
}

// I - dt A_h
BandedMatrix implicit_euler_matrix(const BandedMatrix& a, double dt) {
    BandedMatrix m(a.size(), a.lower(), a.upper());
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = i > a.lower() ? i - a.lower() : 0; j < a.size() && j <= i + a.upper(); ++j)
            m.at(i, j) = (i == j ? 1.0 : 0.0) - dt * a.get(i, j);
    return m;
}

void BM_Discretize(benchmark::State& state) {
    OperatorSpec spec = load_spec(kSpecs + "example2.json");
    spec.grid = {static_cast<int>(state.range(0)), static_cast<int>(state.range(0))};
    for (auto _ : state) benchmark::DoNotOptimize(discretize(spec));
}
BENCHMARK(BM_Discretize)->Arg(32)->Arg(64);

void BM_BandedLUFactor(benchmark::State& state) {
    const DiscreteOperator op = operator_for(static_cast<int>(state.range(0)));
    const BandedMatrix m = implicit_euler_matrix(op.matrix, 1e-4);
    for (auto _ : state) benchmark::DoNotOptimize(BandedLU(m));
}
BENCHMARK(BM_BandedLUFactor)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_BandedLUSolve(benchmark::State& state) {
    const DiscreteOperator op = operator_for(static_cast<int>(state.range(0)));
    const BandedMatrix m = implicit_euler_matrix(op.matrix, 1e-4);
    const BandedLU lu(m);
    std::vector<Complex> rhs(m.size(), Complex(1.0, 0.5));
    for (auto _ : state) {
        std::vector<Complex> x = rhs;
        lu.solve(x);
        benchmark::DoNotOptimize(x.data());
    }
}
BENCHMARK(BM_BandedLUSolve)->Arg(32)->Arg(64);

void BM_Evolve(benchmark::State& state) {
    const DiscreteOperator op = operator_for(32);
    const GridFunction u0 = GridFunction::from_function(op.grid, [](std::span<const double> x) {
        return Complex(bump(2.0 * x[0] - 1.0) * bump(2.0 * x[1] - 1.0));
    });
    for (auto _ : state) benchmark::DoNotOptimize(evolve(op, u0, 1e-4, 1e-2, 2.0));
}
BENCHMARK(BM_Evolve)->Unit(benchmark::kMillisecond);

}  // namespace
