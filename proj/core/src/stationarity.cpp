#include "sigtrade/stationarity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Dense>

#include "ols.hpp"
#include "sigtrade/errors.hpp"
#include "sigtrade/stats.hpp"

namespace sigtrade {

namespace {

// Response-surface coefficients for the unit-root t statistic p-value,
// constant-only regression, one integrated variable. The statistic is mapped
// through a cubic (upper branch) or quadratic (lower branch) polynomial and
// then the standard normal CDF; outside [tau_min, tau_max] the p-value
// saturates at 0 or 1.
constexpr double kTauStar = -1.61;
constexpr double kTauMin = -18.83;
constexpr double kTauMax = 2.74;
constexpr double kSmallP[] = {2.1659, 1.4412, 0.038269};
constexpr double kLargeP[] = {1.7339, 0.93202, -0.12745, -0.010368};

double adf_pvalue(double stat) {
  if (stat > kTauMax) return 1.0;
  if (stat < kTauMin) return 0.0;
  double z;
  if (stat <= kTauStar)
    z = kSmallP[0] + stat * (kSmallP[1] + stat * kSmallP[2]);
  else
    z = kLargeP[0] + stat * (kLargeP[1] + stat * (kLargeP[2] + stat * kLargeP[3]));
  return normal_cdf(z);
}

// Level-stationarity critical values (statistic ascending, p descending).
constexpr double kKpssCrit[] = {0.347, 0.463, 0.574, 0.739};
constexpr double kKpssP[] = {0.10, 0.05, 0.025, 0.01};

double kpss_pvalue(double stat) {
  if (stat <= kKpssCrit[0]) return kKpssP[0];
  if (stat >= kKpssCrit[3]) return kKpssP[3];
  for (int i = 0; i < 3; ++i) {
    if (stat <= kKpssCrit[i + 1]) {
      const double f = (stat - kKpssCrit[i]) / (kKpssCrit[i + 1] - kKpssCrit[i]);
      return kKpssP[i] + f * (kKpssP[i + 1] - kKpssP[i]);
    }
  }
  return kKpssP[3];
}

bool zero_variance(std::span<const double> x) {
  for (std::size_t i = 1; i < x.size(); ++i)
    if (x[i] != x[0]) return false;
  return true;
}

// Builds the augmented regression for rows j = first_row..T-2 (0-based):
//   dx[j] = c + rho x[j] + sum_{i<=lags} b_i dx[j-i].
// Column 1 is the level term, so its t statistic is coef index 1.
struct AdfRegression {
  Eigen::MatrixXd X;
  Eigen::VectorXd y;
};

AdfRegression build_adf(std::span<const double> x, const std::vector<double>& dx, int lags,
                        std::size_t first_row) {
  const std::size_t rows = dx.size() - first_row;
  AdfRegression r;
  r.X.resize(static_cast<Eigen::Index>(rows), 2 + lags);
  r.y.resize(static_cast<Eigen::Index>(rows));
  for (std::size_t i = 0; i < rows; ++i) {
    const std::size_t j = first_row + i;
    const auto row = static_cast<Eigen::Index>(i);
    r.y(row) = dx[j];
    r.X(row, 0) = 1.0;
    r.X(row, 1) = x[j];
    for (int l = 1; l <= lags; ++l) r.X(row, 1 + l) = dx[j - static_cast<std::size_t>(l)];
  }
  return r;
}

}  // namespace

AdfResult adf_test(std::span<const double> x, std::optional<int> max_lag,
                   std::optional<int> lag) {
  const auto T = x.size();
  if (T < 20)
    throw DataError(ErrorKind::too_short, "unit-root test needs at least 20 observations");
  if (zero_variance(x))
    throw NumericError(ErrorKind::zero_variance, "unit-root test on a constant series");

  std::vector<double> dx(T - 1);
  for (std::size_t t = 0; t + 1 < T; ++t) dx[t] = x[t + 1] - x[t];

  // Feasibility: with L augmentation lags the regression has T-1-L rows and
  // L+2 columns; keep at least one residual degree of freedom beyond that.
  const int hard_cap = static_cast<int>((T - 4) / 2);
  int cap = max_lag ? *max_lag
                    : static_cast<int>(std::floor(12.0 * std::pow(static_cast<double>(T) / 100.0, 0.25)));
  if (cap < 0) throw ConfigError(ErrorKind::bad_config, "max_lag must be nonnegative");
  cap = std::min(cap, hard_cap);
  if (cap < 0) throw DataError(ErrorKind::too_short, "series too short for the augmented regression");

  int chosen = 0;
  if (lag) {
    if (*lag < 0 || *lag > hard_cap)
      throw ConfigError(ErrorKind::bad_config, "fixed augmentation order out of range");
    chosen = *lag;
  } else {
    // AIC over a common sample: all candidates use rows cap..T-2 so their
    // likelihoods are comparable.
    const auto n_common = static_cast<double>(dx.size() - static_cast<std::size_t>(cap));
    double best = std::numeric_limits<double>::infinity();
    for (int L = 0; L <= cap; ++L) {
      const auto reg = build_adf(x, dx, L, static_cast<std::size_t>(cap));
      const auto fit = detail::ols(reg.X, reg.y);
      const double aic = n_common * std::log(fit.rss / n_common) + 2.0 * (L + 2);
      if (aic < best) {
        best = aic;
        chosen = L;
      }
    }
  }

  const auto reg = build_adf(x, dx, chosen, static_cast<std::size_t>(chosen));
  const auto fit = detail::ols(reg.X, reg.y);
  const auto n = static_cast<double>(reg.y.size());
  const double dof = n - static_cast<double>(reg.X.cols());
  if (dof <= 0)
    throw DataError(ErrorKind::too_short, "no residual degrees of freedom in unit-root regression");
  const double s2 = fit.rss / dof;
  const double se = std::sqrt(s2 * fit.xtx_inv(1, 1));
  if (se == 0.0)
    throw NumericError(ErrorKind::zero_variance, "degenerate unit-root regression");
  AdfResult out;
  out.stat = fit.coef(1) / se;
  out.p = adf_pvalue(out.stat);
  out.used_lag = chosen;
  return out;
}

KpssResult kpss_test(std::span<const double> x) {
  const auto T = x.size();
  if (T < 20)
    throw DataError(ErrorKind::too_short, "stationarity test needs at least 20 observations");
  KpssResult out;
  out.bandwidth =
      static_cast<int>(std::floor(4.0 * std::pow(static_cast<double>(T) / 100.0, 0.25)));
  if (zero_variance(x)) {
    // No deviations from the mean: trivially on the stationary side.
    out.stat = 0.0;
    out.p = kKpssP[0];
    return out;
  }
  const double m = mean(x);
  std::vector<double> e(T);
  for (std::size_t t = 0; t < T; ++t) e[t] = x[t] - m;

  const auto n = static_cast<double>(T);
  double gamma0 = 0.0;
  for (double v : e) gamma0 += v * v;
  gamma0 /= n;
  double s2 = gamma0;
  for (int s = 1; s <= out.bandwidth; ++s) {
    double g = 0.0;
    for (std::size_t t = static_cast<std::size_t>(s); t < T; ++t)
      g += e[t] * e[t - static_cast<std::size_t>(s)];
    g /= n;
    const double w = 1.0 - static_cast<double>(s) / (out.bandwidth + 1.0);
    s2 += 2.0 * w * g;
  }
  if (s2 <= 0.0)
    throw NumericError(ErrorKind::zero_variance, "long-run variance estimate is not positive");

  double cum = 0.0, num = 0.0;
  for (double v : e) {
    cum += v;
    num += cum * cum;
  }
  out.stat = num / (n * n * s2);
  out.p = kpss_pvalue(out.stat);
  return out;
}

const char* to_string(StationarityVerdict v) {
  switch (v) {
    case StationarityVerdict::stationary: return "stationary";
    case StationarityVerdict::non_stationary: return "non_stationary";
    case StationarityVerdict::ambiguous: return "ambiguous";
  }
  return "?";
}

StationarityVerdict combine_verdict(double adf_p, double kpss_p) {
  // The KPSS p-value is clamped to [0.01, 0.1]; "retained" therefore means
  // sitting at the 0.1 clamp.
  if (adf_p < 0.05 && kpss_p >= 0.10) return StationarityVerdict::stationary;
  if (adf_p >= 0.05 && kpss_p < 0.10) return StationarityVerdict::non_stationary;
  return StationarityVerdict::ambiguous;
}

StationarityReport stationarity_report(const Signal& signal) {
  StationarityReport rep;
  rep.signal_name = signal.name;
  const std::span<const double> x(signal.values);
  if (zero_variance(x) && !x.empty()) {
    // A constant series has no unit root and no level deviations.
    rep.adf_stat = 0.0;
    rep.adf_p = 0.0;
    const auto k = kpss_test(x);
    rep.kpss_stat = k.stat;
    rep.kpss_p = k.p;
    rep.verdict = StationarityVerdict::stationary;
    return rep;
  }
  const auto a = adf_test(x);
  const auto k = kpss_test(x);
  rep.adf_stat = a.stat;
  rep.adf_p = a.p;
  rep.kpss_stat = k.stat;
  rep.kpss_p = k.p;
  rep.verdict = combine_verdict(a.p, k.p);
  return rep;
}

Signal difference(const Signal& signal, int order) {
  if (order < 1) throw ConfigError(ErrorKind::bad_config, "difference order must be positive");
  if (signal.size() <= static_cast<std::size_t>(order))
    throw DataError(ErrorKind::too_short,
                    "signal '" + signal.name + "' too short to difference " +
                        std::to_string(order) + " time(s)");
  Signal out = signal;
  for (int pass = 0; pass < order; ++pass) {
    std::vector<double> v(out.values.size() - 1);
    for (std::size_t i = 1; i < out.values.size(); ++i) v[i - 1] = out.values[i] - out.values[i - 1];
    out.values = std::move(v);
    out.dates.erase(out.dates.begin());
    out.transform_log.push_back("difference");
  }
  return out;
}

std::pair<Signal, ZParams> z_transform(const Signal& signal, Date fit_from, Date fit_to) {
  const Signal fit_slice = signal.slice(fit_from, fit_to);
  if (fit_slice.size() < 2)
    throw DataError(ErrorKind::too_short, "z-transform fit range has fewer than 2 points");
  ZParams params;
  params.mean = mean(fit_slice.values);
  params.sd = sample_sd(fit_slice.values);
  params.fit_from = fit_slice.first_date();
  params.fit_to = fit_slice.last_date();
  if (params.sd <= 0.0)
    throw NumericError(ErrorKind::zero_variance,
                       "signal '" + signal.name + "' has zero variance over the fit range");
  Signal out = signal;
  for (double& v : out.values) v = (v - params.mean) / params.sd;
  out.transform_log.push_back("z_transform");
  return {std::move(out), params};
}

std::pair<Signal, StationarityReport> auto_stationarize(const Signal& signal, int max_order) {
  if (max_order < 0) throw ConfigError(ErrorKind::bad_config, "max_order must be nonnegative");
  Signal s = signal;
  for (int d = 0;; ++d) {
    StationarityReport rep = stationarity_report(s);
    rep.differences_applied = d;
    if (rep.verdict == StationarityVerdict::stationary) return {std::move(s), rep};
    if (d == max_order)
      throw NumericError(ErrorKind::non_convergence,
                         "signal '" + signal.name + "' still not stationary after " +
                             std::to_string(max_order) + " difference pass(es)");
    s = difference(s, 1);
  }
}

}  // namespace sigtrade
