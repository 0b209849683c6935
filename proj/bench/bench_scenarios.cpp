// Serial vs OpenMP scenario integration and multistart on the fed-batch case.
#include <benchmark/benchmark.h>

#include <string>
#include <vector>

#include "droc/config.hpp"
#include "droc/integrator.hpp"
#include "droc/outer.hpp"
#include "droc/parallel.hpp"

using namespace droc;

namespace {

const PenaltyProblem& fedbatch() {
    static const PenaltyProblem p = load_config(std::string(DROC_SOURCE_DIR) + "/configs/fedbatch.json").build_problem();
    return p;
}

// Support of m evenly spaced points over the fermentation range.
std::vector<double> support(int m) {
    std::vector<double> pts(m);
    for (int i = 0; i < m; ++i) pts[i] = 1.76 + 0.88 * (i + 0.5) / m;
    return pts;
}

void BM_ScenariosSerial(benchmark::State& state) {
    const PenaltyProblem& p = fedbatch();
    const std::vector<double> pts = support(static_cast<int>(state.range(0)));
    const bool sens = state.range(1) != 0;
    for (auto _ : state)
        benchmark::DoNotOptimize(integrate_scenarios_serial(p.model, p.grid, pts, p.integrator, sens));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_ScenariosParallel(benchmark::State& state) {
    const PenaltyProblem& p = fedbatch();
    const std::vector<double> pts = support(static_cast<int>(state.range(0)));
    const bool sens = state.range(1) != 0;
    set_threads(static_cast<int>(state.range(2)));
    for (auto _ : state) benchmark::DoNotOptimize(integrate_scenarios(p.model, p.grid, pts, p.integrator, sens));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_Multistart(benchmark::State& state) {
    const PenaltyProblem& p = fedbatch();
    set_threads(static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(multistart_init(p, 50, 42));
}

}  // namespace

BENCHMARK(BM_ScenariosSerial)->ArgsProduct({{10, 40, 160}, {0, 1}})->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_ScenariosParallel)
    ->ArgsProduct({{10, 40, 160}, {0, 1}, {1, 2, 4}})
    ->Unit(benchmark::kMicrosecond)
    ->UseRealTime();
BENCHMARK(BM_Multistart)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
