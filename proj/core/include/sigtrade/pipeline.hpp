#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "sigtrade/backtest.hpp"
#include "sigtrade/evaluation.hpp"
#include "sigtrade/irf.hpp"
#include "sigtrade/sentiment.hpp"
#include "sigtrade/signal.hpp"
#include "sigtrade/stationarity.hpp"
#include "sigtrade/strategy.hpp"
#include "sigtrade/var.hpp"

namespace sigtrade {

struct VarSettings {
  int lag = 0;  // 0 selects by information criterion up to max_lag
  int max_lag = 6;
};

struct IrfSettings {
  int horizon = 10;
  int n_boot = 1000;
  double threshold = 0.001;  // cumulative return-response screening level
  int n_perm = 0;            // 0 skips the permutation check
  std::vector<std::string> ordering;  // optional Cholesky ordering override
};

struct StrategySettings {
  int rsi_window = 5;
  double rsi_hi = 0.7;
  double rsi_lo = 0.3;
  int random_traders = 1000;
};

struct CostSettings {
  double cost = 0.0;  // flat c_b = c_s for the main run
  TradeMode mode = TradeMode::full;
  std::vector<double> sweep = default_cost_grid();
};

struct EvalSettings {
  double risk_free = 0.0;
  double kde_bandwidth = 15.0;  // percent, same unit as profit
  int kde_grid = 512;
};

struct SentimentSettings {
  bool configured = false;
  std::filesystem::path corpus;
  std::filesystem::path valence_lexicon;
  std::filesystem::path polarity_lexicon;
  Date start;
  Date end;
};

// One signal file in the panel manifest. extra_lag shifts the signal's
// availability for prediction by that many days (publication delay).
struct ManifestEntry {
  std::string name;
  std::filesystem::path path;
  int extra_lag = 0;
};

struct Manifest {
  std::string price;  // which entry carries the traded price
  Date analysis_end;
  Date leave_out_end;
  std::vector<ManifestEntry> signals;
};

Manifest load_manifest(const std::filesystem::path& path);

struct RunConfig {
  std::filesystem::path manifest_path;
  std::filesystem::path out_dir = "out";
  std::uint64_t seed = 0;
  int threads = 0;  // 0 = hardware concurrency
  GapPolicy gap_policy = GapPolicy::fail;
  VarSettings var;
  IrfSettings irf;
  StrategySettings strategies;
  CostSettings costs;
  EvalSettings evaluation;
  SentimentSettings sentiment;

  // Parses a JSON config; relative paths resolve against the config file's
  // directory. Missing sections keep their defaults.
  static RunConfig load(const std::filesystem::path& path);
};

// Loads, validates, and aligns the manifest signals into a raw panel.
std::pair<Panel, Manifest> load_panel(const RunConfig& config);

struct AnalyzeResult {
  std::vector<std::string> ordering;      // variable order used for the shock rotation
  std::vector<StationarityReport> reports;
  std::map<std::string, ZParams> z_params;
  bool auto_lag = false;
  LagSelection lag_selection;             // populated when auto_lag
  int lag = 0;
  VarFit fit;
  IrfSet irf;
  std::vector<ScreenHit> screen;
  std::optional<PermutationReport> permutation;
  ResidualDiagnostics diagnostics;
};

// Analysis-period branch: stationarity/transforms, model fit, bootstrap
// responses, screening, permutation check. Writes JSON/CSV artifacts to
// config.out_dir. Everything here depends only on data up to analysis_end.
AnalyzeResult run_analyze(const RunConfig& config);

struct DesignResult {
  std::vector<StrategySpec> specs;  // signal strategies plus a combined vote
};

// Turns the screening output into strategy specs (reads screen.json).
DesignResult run_design(const RunConfig& config);

struct StrategyEval {
  std::string name;
  Ledger ledger;
  bool degenerate = false;  // constant capital: risk-adjusted stats undefined
  SharpeResult sharpe;
  std::optional<ReturnDiagnostics> diagnostics;
};

struct BacktestResult {
  std::vector<StrategyEval> strategies;
  RandomTraderSummary random;
  double random_mean_sharpe = 0.0;
  int random_skipped_degenerate = 0;
  std::vector<std::tuple<std::string, std::string, WilcoxonResult>> wilcoxon;
};

// Leave-out branch: designed strategies (strategies.json) plus technical
// benchmarks and the random-trader reference, backtested and evaluated.
BacktestResult run_backtest_stage(const RunConfig& config);

struct SentimentResult {
  SentimentSignals signals;
  std::filesystem::path volume_csv;
  std::filesystem::path valence_csv;
  std::filesystem::path polarization_csv;
};

// Corpus to daily signal files.
SentimentResult run_sentiment_stage(const RunConfig& config);

// Bundles the stage artifacts into report.json and a plain-text summary table.
void run_report_stage(const RunConfig& config);

}  // namespace sigtrade
