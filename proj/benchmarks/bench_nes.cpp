// Microbenchmarks for the hot paths: ground-state evaluation, passage-time
// quadrature, the xi' solve, closed-form pricing and one calibration loss
// evaluation.  Run with --benchmark_min_time=... for tighter numbers.

#include "nes/calibrate.hpp"
#include "nes/measure.hpp"
#include "nes/passage.hpp"
#include "nes/potential.hpp"
#include "nes/pricing.hpp"
#include "nes/simulate.hpp"

#include <benchmark/benchmark.h>

#include <vector>

using namespace nes;

namespace {

NesParams bench_params() { return symmetric_mu_params(0.4, 0.2, 0.3, 0.3, 0.159); }
const MarketEnv kMarket{100.0, 0.02, 0.005};

void BM_GroundStateBuild(benchmark::State& state) {
    const NesParams p = bench_params();
    for (auto _ : state) benchmark::DoNotOptimize(ground_state(p));
}
BENCHMARK(BM_GroundStateBuild);

void BM_LogPsi0(benchmark::State& state) {
    const GroundState gs = ground_state(bench_params());
    double y = -0.8;
    for (auto _ : state) {
        benchmark::DoNotOptimize(gs.psi.log_value(y));
        y = y < 0.8 ? y + 1e-3 : -0.8;
    }
}
BENCHMARK(BM_LogPsi0);

void BM_PotentialValue(benchmark::State& state) {
    const PotentialFn pot(bench_params());
    double y = -0.8;
    for (auto _ : state) {
        benchmark::DoNotOptimize(potential_value(pot, y));
        y = y < 0.8 ? y + 1e-3 : -0.8;
    }
}
BENCHMARK(BM_PotentialValue);

void BM_PassageQuadrature(benchmark::State& state) {
    const NesParams p = bench_params();
    for (auto _ : state)
        benchmark::DoNotOptimize(passage_time_quadrature(p, 0.25, -0.35).mean_passage_time);
}
BENCHMARK(BM_PassageQuadrature);

void BM_XiPrimeSolve(benchmark::State& state) {
    const NesParams p = bench_params();
    for (auto _ : state) benchmark::DoNotOptimize(solve_xi_prime(p, kMarket));
}
BENCHMARK(BM_XiPrimeSolve);

void BM_PriceClosedForm(benchmark::State& state) {
    const MeasureDensity q = risk_neutral_density(bench_params(), kMarket);
    for (auto _ : state)
        benchmark::DoNotOptimize(nes_option_price(q, kMarket, 100.0, OptionKind::call));
}
BENCHMARK(BM_PriceClosedForm);

void BM_PriceFromParams(benchmark::State& state) {
    const NesParams p = bench_params();
    for (auto _ : state)
        benchmark::DoNotOptimize(nes_option_price(p, kMarket, 100.0, 1.0, OptionKind::call));
}
BENCHMARK(BM_PriceFromParams);

void BM_LossTenQuotes(benchmark::State& state) {
    const NesParams p = bench_params();
    std::vector<OptionQuote> quotes;
    for (double K = 80.0; K < 130.0; K += 5.0)
        quotes.push_back({K, 1.0, OptionKind::put,
                          nes_option_price(p, kMarket, K, 1.0, OptionKind::put), std::nullopt});
    const CalibConfig cfg;
    for (auto _ : state) benchmark::DoNotOptimize(loss(p, quotes, kMarket, cfg));
}
BENCHMARK(BM_LossTenQuotes);

void BM_SimulateEuler(benchmark::State& state) {
    const NesParams p = bench_params();
    SimConfig cfg;
    cfg.dt = 1e-3;
    cfg.n_paths = 100;
    cfg.horizon = 1.0;
    cfg.seed = 7;
    for (auto _ : state) benchmark::DoNotOptimize(simulate_paths(p, cfg));
    state.SetItemsProcessed(state.iterations() * 100 * 1000);  // Euler steps
}
BENCHMARK(BM_SimulateEuler);

}  // namespace

BENCHMARK_MAIN();
