#pragma once

#include <optional>
#include <span>
#include <string>
#include <utility>

#include "sigtrade/signal.hpp"

namespace sigtrade {

struct AdfResult {
  double stat = 0.0;   // t statistic on the level coefficient
  double p = 0.0;      // response-surface p-value, constant-only case
  int used_lag = 0;    // augmentation lags chosen by AIC (or as given)
};

// Augmented Dickey-Fuller unit-root test with a constant term:
//   dx_t = c + rho x_{t-1} + sum_{i<=L} b_i dx_{t-i} + e_t.
// If max_lag is not given it defaults to floor(12 (T/100)^{1/4}); the
// augmentation order is then chosen by AIC over 0..max_lag on a common
// sample and the regression refit at the chosen order on the full sample.
// Pass lag to skip selection and use a fixed augmentation order.
AdfResult adf_test(std::span<const double> x, std::optional<int> max_lag = std::nullopt,
                   std::optional<int> lag = std::nullopt);

struct KpssResult {
  double stat = 0.0;  // level-stationarity statistic
  double p = 0.0;     // interpolated from the 0.01..0.10 critical band, clamped
  int bandwidth = 0;  // Newey-West lag truncation
};

// KPSS level-stationarity test on the demeaned series with Bartlett-kernel
// long-run variance, bandwidth floor(4 (T/100)^{1/4}). The p-value is linear
// interpolation against the published critical values and is clamped to
// [0.01, 0.10], so p == 0.10 means "at or beyond the weakest tabulated level".
KpssResult kpss_test(std::span<const double> x);

enum class StationarityVerdict { stationary, non_stationary, ambiguous };
const char* to_string(StationarityVerdict v);

// stationary when the unit root is rejected (adf_p < 0.05) and level
// stationarity is retained (kpss_p at the 0.10 clamp); non_stationary when
// both tests point the other way; ambiguous otherwise.
StationarityVerdict combine_verdict(double adf_p, double kpss_p);

struct StationarityReport {
  std::string signal_name;
  double adf_stat = 0.0;
  double adf_p = 0.0;
  double kpss_stat = 0.0;
  double kpss_p = 0.0;
  StationarityVerdict verdict = StationarityVerdict::ambiguous;
  int differences_applied = 0;
};

// Runs both tests and combines them: stationary needs the unit root rejected
// (ADF p < 0.05) and level stationarity not rejected (KPSS p at the 0.10
// clamp); non_stationary needs the reverse of both; anything else is ambiguous.
StationarityReport stationarity_report(const Signal& signal);

// First difference, applied `order` times; drops one leading row per pass and
// appends "difference" to the transform log.
Signal difference(const Signal& signal, int order = 1);

struct ZParams {
  double mean = 0.0;
  double sd = 0.0;   // sample (n-1) convention
  Date fit_from;     // range the parameters were estimated on
  Date fit_to;
};

// Standardizes with mean/sd estimated on [fit_from, fit_to] only and applied
// to the whole series, so later rows never influence the scaling.
std::pair<Signal, ZParams> z_transform(const Signal& signal, Date fit_from, Date fit_to);

// Differences (up to max_order passes) until the combined verdict is
// stationary. The returned report describes the final series and records
// differences_applied; errors (non_convergence) if still not stationary after
// max_order passes. Callers that must avoid look-ahead run this on their
// estimation slice and re-apply the chosen order to the full series.
std::pair<Signal, StationarityReport> auto_stationarize(const Signal& signal, int max_order = 2);

}  // namespace sigtrade
