#include <benchmark/benchmark.h>

#include "rotpend/control.hpp"
#include "rotpend/fuzzy.hpp"
#include "rotpend/sim.hpp"

namespace {

using namespace rotpend;

void BM_FuzzyBasis(benchmark::State& state) {
  FuzzyConfig fz;
  for (auto& a : fz.axes) a.centers = static_cast<std::size_t>(state.range(0));
  const auto parts = fz.partitions();
  const double X[] = {-3.1, 0.2, 1.7};
  for (auto _ : state) benchmark::DoNotOptimize(fuzzy_basis(parts, X));
  state.SetLabel(std::to_string(rule_count(parts)) + " rules");
}
BENCHMARK(BM_FuzzyBasis)->Arg(5)->Arg(9)->Arg(17);

void BM_Rk4PlantStep(benchmark::State& state) {
  const auto c = derive_coefficients(PhysicalParams{});
  auto field = [&c](double, const Eigen::VectorXd& s) {
    const auto d = plant_derivative(c, {s[0], s[1], s[2], s[3]}, 0.01);
    Eigen::VectorXd out(4);
    out << d.x1, d.x2, d.x3, d.x4;
    return out;
  };
  Eigen::VectorXd s(4);
  s << 0, 0, 0.1, 0;
  for (auto _ : state) benchmark::DoNotOptimize(rk4_step(field, s, 0.0, 1e-3));
}
BENCHMARK(BM_Rk4PlantStep);

void BM_SolveLyapunov(benchmark::State& state) {
  const Eigen::MatrixXd A = companion_matrix(AdaptiveControllerConfig::stable().K);
  const Eigen::MatrixXd Q = 1000 * Eigen::MatrixXd::Identity(4, 4);
  for (auto _ : state) benchmark::DoNotOptimize(solve_lyapunov(A, Q));
}
BENCHMARK(BM_SolveLyapunov);

void BM_Simulation(benchmark::State& state) {
  ScenarioConfig cfg;
  cfg.controller = state.range(0) ? ControllerType::kAdaptive : ControllerType::kClassical;
  cfg.schedule = default_uncertainty_schedule();
  for (auto _ : state) benchmark::DoNotOptimize(run_simulation(cfg));
  state.SetLabel(std::string(to_string(cfg.controller)) + ", 20 s at dt = 1 ms");
}
BENCHMARK(BM_Simulation)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
