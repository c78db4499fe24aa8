#include <random>

#include <benchmark/benchmark.h>

#include "dissipate/pointwise.hpp"

namespace {

using namespace dissipate;

ComplexMatrix random_coefficients(std::size_t n) {
    std::mt19937_64 rng(n);
    std::normal_distribution<double> g;
    RealMatrix f(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) f(i, j) = g(rng);
    const RealMatrix sr = matmul(f, f.transpose());
    ComplexMatrix a(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) a(i, j) = Complex(sr(i, j), 0.3 * g(rng));
    return a;
}

void BM_JacobiEigen(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const RealMatrix s = decompose(random_coefficients(n)).S_r;
    for (auto _ : state) benchmark::DoNotOptimize(jacobi_eigen(s));
}
BENCHMARK(BM_JacobiEigen)->Arg(2)->Arg(5)->Arg(16)->Arg(64);

void BM_CheckPCondition(benchmark::State& state) {
    const SymDecomp d = decompose(random_coefficients(static_cast<std::size_t>(state.range(0))));
    for (auto _ : state) benchmark::DoNotOptimize(check_p_condition(d, 3.0));
}
BENCHMARK(BM_CheckPCondition)->Arg(2)->Arg(5);

void BM_LambdaBisection(benchmark::State& state) {
    const SymDecomp d = decompose(random_coefficients(static_cast<std::size_t>(state.range(0))));
    for (auto _ : state) benchmark::DoNotOptimize(lambda_of(d));
}
BENCHMARK(BM_LambdaBisection)->Arg(2)->Arg(5);

}  // namespace
BENCHMARK_MAIN();
