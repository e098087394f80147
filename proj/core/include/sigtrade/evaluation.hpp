#pragma once

#include <span>
#include <vector>

#include "sigtrade/backtest.hpp"
#include "sigtrade/stationarity.hpp"

namespace sigtrade {

struct SharpeResult {
  double annualized = 0.0;  // sqrt(365) (mu - r_f) / sd
  double mean_daily = 0.0;  // mu_R
  double sd_daily = 0.0;    // sigma_R, sample convention
};

// Risk-adjusted performance of a ledger's daily capital returns
// R(t) = (C(t) - C(t-1)) / C(t-1), annualized over 365 trading days.
SharpeResult sharpe(const Ledger& ledger, double risk_free = 0.0);
SharpeResult sharpe_from_returns(std::span<const double> returns, double risk_free = 0.0);

// Profit(t) for every possible stop date (percent).
std::vector<double> profit_distribution(const Ledger& ledger);

struct WilcoxonResult {
  double statistic = 0.0;  // rank sum of the first sample (midranks under ties)
  double p = 1.0;          // two-sided
  bool exact = false;      // exact enumeration used (min(n) <= 20, no ties)
};

// Two-sided rank-sum test. Exact null enumeration when the smaller sample has
// at most 20 values and the pooled sample is tie-free; tie-corrected normal
// approximation otherwise (p = 1 when the variance degenerates).
WilcoxonResult wilcoxon_rank_sum(std::span<const double> a, std::span<const double> b);

struct KdeCurve {
  std::vector<double> x;
  std::vector<double> density;
  double bandwidth = 0.0;
};

// Gaussian kernel density on an even grid spanning the data range plus 3
// bandwidths on each side, rescaled so the trapezoid integral is 1.
KdeCurve kde(std::span<const double> values, double bandwidth, int grid_points = 512);

struct ReturnDiagnostics {
  // MLE lognormal fit of 1 + R (shifted into positivity when needed).
  double lognormal_mu = 0.0;
  double lognormal_sigma = 0.0;
  double shift = 0.0;       // applied to 1 + R before taking logs
  double ks_stat = 0.0;
  double ks_p = 0.0;        // asymptotic, no parameter-estimation correction
  double lb_stat = 0.0;     // portmanteau statistic of R at lb_lags
  double lb_p = 0.0;
  int lb_lags = 0;
  double adf_stat = 0.0;
  double adf_p = 0.0;
  double kpss_stat = 0.0;
  double kpss_p = 0.0;
  StationarityVerdict verdict = StationarityVerdict::ambiguous;
};

// Distributional and dependence diagnostics of a ledger's daily returns.
// Needs at least 21 ledger rows (20 returns).
ReturnDiagnostics return_diagnostics(const Ledger& ledger);

}  // namespace sigtrade
