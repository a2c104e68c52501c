#include <benchmark/benchmark.h>

#include <random>
#include <string>
#include <vector>

#include "synergy/hybrid_controller.hpp"
#include "synergy/scenario.hpp"
#include "synergy/simulator.hpp"

namespace synergy {
namespace {

ScenarioConfig half_turn() {
  return load_scenario(std::string(SYNERGY_SCENARIO_DIR) + "/half_turn_hybrid.scn").config;
}

void BM_SymmetricEigen(benchmark::State& state) {
  std::mt19937_64 rng(1);
  std::vector<Mat3> mats;
  for (int i = 0; i < 256; ++i) {
    const Mat3 r = random_rotation(rng).matrix();
    mats.push_back(r * Mat3::diag(1.0, 2.0 + i * 1e-3, 4.0) * r.transpose());
  }
  std::size_t i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(symmetric_eigen(mats[i++ % mats.size()]));
}
BENCHMARK(BM_SymmetricEigen);

void BM_OptimalAxis(benchmark::State& state) {
  const auto w = WeightMatrix::build(Mat3::diag(1, 3, 5));
  for (auto _ : state) benchmark::DoNotOptimize(optimal_u(w));
}
BENCHMARK(BM_OptimalAxis);

// Family construction computes the critical set and the gap.
void BM_FamilyAndGap(benchmark::State& state) {
  const auto w = WeightMatrix::build(Mat3::diag(1, 3, 5));
  const double k = 0.99 * k_bound(w);
  const Vec3 u = optimal_u(w).u;
  for (auto _ : state) benchmark::DoNotOptimize(gap(WarpedPotential::make(w, u, {k, -k})));
}
BENCHMARK(BM_FamilyAndGap);

void BM_Torque(benchmark::State& state) {
  const auto cfg = half_turn();
  std::mt19937_64 rng(2);
  const Rotation r = random_rotation(rng);
  const Rotation y1 = random_rotation(rng);
  const Rotation y2 = random_rotation(rng);
  const auto obs = cfg.measurements.observed_at(r);
  const LogicState logic{1, 2};
  for (auto _ : state) benchmark::DoNotOptimize(torque(obs, *cfg.hybrid, logic, y1, y2));
}
BENCHMARK(BM_Torque);

void BM_FlowStep(benchmark::State& state) {
  const auto cfg = half_turn();
  PlantState s{cfg.r0, cfg.omega0, cfg.r_hat0};
  const LogicState logic{1, 1};
  for (auto _ : state) {
    s = flow_step(s, logic, cfg, cfg.dt, nullptr);
    benchmark::DoNotOptimize(s);
  }
}
BENCHMARK(BM_FlowStep);

void BM_HalfTurnRun(benchmark::State& state) {
  const auto cfg = half_turn();
  for (auto _ : state) benchmark::DoNotOptimize(run(cfg));
}
BENCHMARK(BM_HalfTurnRun)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace synergy

BENCHMARK_MAIN();
