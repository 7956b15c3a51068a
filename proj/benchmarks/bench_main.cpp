#include <memory>
#include <numbers>

#include <benchmark/benchmark.h>

#include "ionloss/cross_section.hpp"
#include "ionloss/special_functions.hpp"

using namespace ionloss;

namespace
{
std::shared_ptr<IonizationTable const> shared_table()
{
    static auto const table
        = std::make_shared<IonizationTable const>(IonizationTable::build(20, 400, 20));
    return table;
}

void BM_BesselK01(benchmark::State& state)
{
    double x = 1e-3;
    for (auto _ : state)
    {
        benchmark::DoNotOptimize(bessel_k01(x));
        x = x < 100 ? x * 1.37 : 1e-3;
    }
}
BENCHMARK(BM_BesselK01);

void BM_TableLookup(benchmark::State& state)
{
    auto const& table = *shared_table();
    double s = 0;
    for (auto _ : state)
    {
        benchmark::DoNotOptimize(table(s));
        s = s < 19 ? s + 0.0137 : 0;
    }
}
BENCHMARK(BM_TableLookup);

void BM_DirectIonization(benchmark::State& state)
{
    for (auto _ : state)
    {
        benchmark::DoNotOptimize(ionization_probability(1.3));
    }
}
BENCHMARK(BM_DirectIonization)->Unit(benchmark::kMillisecond);

void BM_CrossSectionFixed(benchmark::State& state)
{
    CollisionSystem const system{
        MoleculeGeometry::diatomic(find_atom(builtin_hfs_table(), 7), 2.07),
        ProjectileSpec(26, int(state.range(0))), velocity_from_energy(100), shared_table()};
    Orientation const orient(0.5);
    for (auto _ : state)
    {
        benchmark::DoNotOptimize(cross_section_fixed(system, orient));
    }
}
BENCHMARK(BM_CrossSectionFixed)->Arg(1)->Arg(3)->Unit(benchmark::kMillisecond);
}  // namespace

BENCHMARK_MAIN();
