#include "landau/coefficient_field.hpp"
#include "landau/ensemble.hpp"
#include "landau/integrator.hpp"

#include <benchmark/benchmark.h>

using namespace landau;

namespace {

void evaluate_all(benchmark::State &state, CoefficientField &field)
{
    auto const n = static_cast<std::size_t>(state.range(0));
    auto const ens = sample_initial(InitialLaw::paper_sec5(), n, 1);
    field.bind(ens);
    for (auto _ : state) {
        for (std::size_t i = 0; i < n; ++i)
            benchmark::DoNotOptimize(field.evaluate(i, ens.state(i)));
    }
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * n));
}

void BM_PairwiseMaxwell(benchmark::State &state)
{
    PairwiseField field({2, Maxwell{}}, false);
    evaluate_all(state, field);
}

void BM_PairwiseSoft(benchmark::State &state)
{
    PairwiseField field({2, Soft{-1.0}}, true);
    evaluate_all(state, field);
}

void BM_MomentMaxwell(benchmark::State &state)
{
    MaxwellMomentField field(false);
    evaluate_all(state, field);
}

void BM_StepMoments(benchmark::State &state)
{
    SimConfig c;
    c.n = static_cast<std::size_t>(state.range(0));
    c.steps_per_unit = 200;
    c.horizon = 0.05;
    for (auto _ : state)
        benchmark::DoNotOptimize(simulate(c));
    state.SetItemsProcessed(state.iterations() * 10);
}

} // namespace

BENCHMARK(BM_PairwiseMaxwell)->Arg(500)->Arg(2000);
BENCHMARK(BM_PairwiseSoft)->Arg(500)->Arg(2000);
BENCHMARK(BM_MomentMaxwell)->Arg(500)->Arg(5000);
BENCHMARK(BM_StepMoments)->Arg(500)->Arg(5000);
