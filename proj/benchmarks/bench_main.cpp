#include <benchmark/benchmark.h>

#include <vector>

#include "sigtrade/backtest.hpp"
#include "sigtrade/evaluation.hpp"
#include "sigtrade/irf.hpp"
#include "sigtrade/rng.hpp"
#include "sigtrade/var.hpp"

namespace {

using namespace sigtrade;

// Simulate a stable 3-variable lag-1 system long enough for fitting work.
Eigen::MatrixXd simulated_panel(int t) {
  Rng rng(42);
  Eigen::Matrix3d phi;
  phi << 0.5, 0.1, 0.0, 0.0, 0.3, 0.2, 0.1, 0.0, 0.4;
  Eigen::MatrixXd data(t, 3);
  data.row(0).setZero();
  for (int i = 1; i < t; ++i) {
    Eigen::Vector3d eps(rng.normal(), rng.normal(), rng.normal());
    data.row(i) = (phi * data.row(i - 1).transpose() + eps).transpose();
  }
  return data;
}

const std::vector<std::string> kNames{"a", "b", "ret"};

void bm_var_fit(benchmark::State& state) {
  const Eigen::MatrixXd data = simulated_panel(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(fit_var_data(data, kNames, 1));
}
BENCHMARK(bm_var_fit)->Arg(500)->Arg(2000);

void bm_lag_selection(benchmark::State& state) {
  const Eigen::MatrixXd data = simulated_panel(800);
  for (auto _ : state) benchmark::DoNotOptimize(select_lag_data(data, kNames, 6));
}
BENCHMARK(bm_lag_selection);

void bm_bootstrap_irf(benchmark::State& state) {
  const Eigen::MatrixXd data = simulated_panel(400);
  const VarFit fit = fit_var_data(data, kNames, 1);
  for (auto _ : state)
    benchmark::DoNotOptimize(
        bootstrap_irf(fit, data, 10, static_cast<int>(state.range(0)), 7, 0));
}
BENCHMARK(bm_bootstrap_irf)->Arg(100)->Arg(500)->Unit(benchmark::kMillisecond);

void bm_backtest(benchmark::State& state) {
  const int t = static_cast<int>(state.range(0));
  Rng rng(7);
  std::vector<Date> dates;
  std::vector<double> prices;
  std::vector<int> preds;
  double p = 100.0;
  for (int i = 0; i < t; ++i) {
    dates.push_back(Date(19000 + i));
    prices.push_back(p);
    p *= 1.0 + 0.01 * rng.normal();
    preds.push_back(rng.sign());
  }
  const Signal price = make_signal("price", dates, prices);
  const PredictionSeries series{dates, preds};
  const CostModel cost = CostModel::flat(0.001);
  for (auto _ : state)
    benchmark::DoNotOptimize(run_backtest(price, series, cost, TradeMode::full));
}
BENCHMARK(bm_backtest)->Arg(1000)->Arg(10000);

void bm_kde(benchmark::State& state) {
  Rng rng(11);
  std::vector<double> sample(500);
  for (double& x : sample) x = 10.0 * rng.normal();
  for (auto _ : state) benchmark::DoNotOptimize(kde(sample, 5.0, 512));
}
BENCHMARK(bm_kde);

}  // namespace

BENCHMARK_MAIN();
