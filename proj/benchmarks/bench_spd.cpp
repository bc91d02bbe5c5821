#include "landau/spd.hpp"

#include <benchmark/benchmark.h>

#include <random>

using namespace landau;

namespace {

PsdMatrix random_psd(std::size_t d, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    std::vector<double> g(d * d);
    for (auto &v : g)
        v = normal(rng);
    SymMatrix a(d);
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = i; j < d; ++j) {
            double s = 0;
            for (std::size_t k = 0; k < d; ++k)
                s += g[i * d + k] * g[j * d + k];
            a.set(i, j, s);
        }
    return PsdMatrix(a);
}

void BM_SymSqrt(benchmark::State &state)
{
    auto const a = random_psd(static_cast<std::size_t>(state.range(0)), 3);
    for (auto _ : state)
        benchmark::DoNotOptimize(sym_sqrt(a));
}

void BM_Cholesky(benchmark::State &state)
{
    auto const a = random_psd(static_cast<std::size_t>(state.range(0)), 3);
    for (auto _ : state)
        benchmark::DoNotOptimize(cholesky_psd(a));
}

} // namespace

BENCHMARK(BM_SymSqrt)->Arg(2)->Arg(3);
BENCHMARK(BM_Cholesky)->Arg(2)->Arg(3);

BENCHMARK_MAIN();
