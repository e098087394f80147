#include "sigtrade/evaluation.hpp"

#include <algorithm>
#include <cmath>

#include "sigtrade/stats.hpp"

namespace sigtrade {

namespace {

std::vector<double> daily_returns(const Ledger& ledger) {
  if (ledger.rows.size() < 2)
    throw DataError(ErrorKind::too_short, "ledger has fewer than 2 days");
  std::vector<double> r(ledger.rows.size() - 1);
  for (std::size_t t = 1; t < ledger.rows.size(); ++t)
    r[t - 1] = (ledger.rows[t].cr - ledger.rows[t - 1].cr) / ledger.rows[t - 1].cr;
  return r;
}

}  // namespace

SharpeResult sharpe_from_returns(std::span<const double> returns, double risk_free) {
  if (returns.size() < 2)
    throw DataError(ErrorKind::too_short, "need at least 2 daily returns");
  SharpeResult out;
  out.mean_daily = mean(returns);
  out.sd_daily = sample_sd(returns);
  if (out.sd_daily <= 0.0)
    throw NumericError(ErrorKind::zero_variance, "returns have zero variance");
  out.annualized = std::sqrt(365.0) * (out.mean_daily - risk_free) / out.sd_daily;
  return out;
}

SharpeResult sharpe(const Ledger& ledger, double risk_free) {
  return sharpe_from_returns(daily_returns(ledger), risk_free);
}

std::vector<double> profit_distribution(const Ledger& ledger) {
  if (ledger.rows.empty()) throw DataError(ErrorKind::empty_input, "empty ledger");
  return ledger.profit_pct();
}

namespace {

struct RankedPool {
  std::vector<double> rank_a;  // midranks of sample a
  double rank_sum_a = 0.0;
  bool has_ties = false;
  double tie_term = 0.0;  // sum of t^3 - t over tie groups
};

RankedPool pool_ranks(std::span<const double> a, std::span<const double> b) {
  struct Item {
    double value;
    bool from_a;
  };
  std::vector<Item> pool;
  pool.reserve(a.size() + b.size());
  for (double v : a) pool.push_back({v, true});
  for (double v : b) pool.push_back({v, false});
  std::stable_sort(pool.begin(), pool.end(),
                   [](const Item& x, const Item& y) { return x.value < y.value; });
  RankedPool out;
  std::size_t i = 0;
  while (i < pool.size()) {
    std::size_t j = i;
    while (j < pool.size() && pool[j].value == pool[i].value) ++j;
    const auto t = static_cast<double>(j - i);
    // Midrank of a group spanning 1-based ranks i+1..j.
    const double midrank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    if (t > 1.0) {
      out.has_ties = true;
      out.tie_term += t * t * t - t;
    }
    for (std::size_t k = i; k < j; ++k)
      if (pool[k].from_a) {
        out.rank_sum_a += midrank;
        out.rank_a.push_back(midrank);
      }
    i = j;
  }
  return out;
}

// Exact null distribution of the rank sum of m items drawn from ranks 1..n:
// count[j][s] = number of j-subsets summing to s.
double exact_two_sided_p(int n, int m, double w_observed) {
  const int max_sum = m * n;
  std::vector<std::vector<double>> count(
      static_cast<std::size_t>(m) + 1, std::vector<double>(static_cast<std::size_t>(max_sum) + 1, 0.0));
  count[0][0] = 1.0;
  for (int r = 1; r <= n; ++r) {
    for (int j = std::min(m, r); j >= 1; --j) {
      for (int s = max_sum; s >= r; --s) {
        const double add = count[static_cast<std::size_t>(j - 1)][static_cast<std::size_t>(s - r)];
        if (add != 0.0) count[static_cast<std::size_t>(j)][static_cast<std::size_t>(s)] += add;
      }
    }
  }
  const auto& dist = count[static_cast<std::size_t>(m)];
  double total = 0.0, below = 0.0, above = 0.0;
  const auto w = static_cast<int>(std::llround(w_observed));  // integer ranks, no ties
  for (int s = 0; s <= max_sum; ++s) {
    total += dist[static_cast<std::size_t>(s)];
    if (s <= w) below += dist[static_cast<std::size_t>(s)];
    if (s >= w) above += dist[static_cast<std::size_t>(s)];
  }
  return std::min(1.0, 2.0 * std::min(below, above) / total);
}

}  // namespace

WilcoxonResult wilcoxon_rank_sum(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty())
    throw DataError(ErrorKind::empty_input, "rank-sum test needs two nonempty samples");
  const auto n1 = static_cast<double>(a.size());
  const auto n2 = static_cast<double>(b.size());
  const double n = n1 + n2;
  const RankedPool pool = pool_ranks(a, b);

  WilcoxonResult out;
  out.statistic = pool.rank_sum_a;
  const std::size_t m = std::min(a.size(), b.size());
  if (m <= 20 && !pool.has_ties) {
    out.exact = true;
    // Enumerate over the smaller sample; the two-sided p is symmetric in the
    // choice because the rank sums add to n(n+1)/2.
    const double w_small =
        a.size() <= b.size() ? pool.rank_sum_a : n * (n + 1.0) / 2.0 - pool.rank_sum_a;
    out.p = exact_two_sided_p(static_cast<int>(n), static_cast<int>(m), w_small);
    return out;
  }

  const double mu = n1 * (n + 1.0) / 2.0;
  const double tie_adj = pool.tie_term / (n * (n - 1.0));
  const double var = n1 * n2 / 12.0 * ((n + 1.0) - tie_adj);
  if (var <= 0.0) {
    out.p = 1.0;  // every pooled value identical
    return out;
  }
  const double z = (pool.rank_sum_a - mu) / std::sqrt(var);
  out.p = std::min(1.0, 2.0 * normal_sf(std::abs(z)));
  return out;
}

KdeCurve kde(std::span<const double> values, double bandwidth, int grid_points) {
  if (values.empty()) throw DataError(ErrorKind::empty_input, "density of an empty sample");
  if (!(bandwidth > 0.0)) throw ConfigError(ErrorKind::bad_config, "bandwidth must be positive");
  if (grid_points < 2) throw ConfigError(ErrorKind::bad_config, "grid needs at least 2 points");

  const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
  const double lo = *lo_it - 3.0 * bandwidth;
  const double hi = *hi_it + 3.0 * bandwidth;
  const double step = (hi - lo) / static_cast<double>(grid_points - 1);

  KdeCurve curve;
  curve.bandwidth = bandwidth;
  curve.x.resize(static_cast<std::size_t>(grid_points));
  curve.density.resize(static_cast<std::size_t>(grid_points));
  const double scale = 1.0 / (static_cast<double>(values.size()) * bandwidth);
  for (int i = 0; i < grid_points; ++i) {
    const double x = lo + step * static_cast<double>(i);
    double d = 0.0;
    for (double v : values) d += normal_pdf((x - v) / bandwidth);
    curve.x[static_cast<std::size_t>(i)] = x;
    curve.density[static_cast<std::size_t>(i)] = d * scale;
  }

  // The grid clips the Gaussian tails beyond 3 bandwidths (~0.27% of mass);
  // rescale so the curve is a proper density on its own support.
  double integral = 0.0;
  for (int i = 1; i < grid_points; ++i)
    integral += 0.5 * (curve.density[static_cast<std::size_t>(i - 1)] +
                       curve.density[static_cast<std::size_t>(i)]) *
                step;
  if (integral <= 0.0)
    throw NumericError(ErrorKind::zero_variance, "density integrates to zero");
  for (double& d : curve.density) d /= integral;
  return curve;
}

ReturnDiagnostics return_diagnostics(const Ledger& ledger) {
  if (ledger.rows.size() < 21)
    throw DataError(ErrorKind::insufficient_data,
                    "return diagnostics need at least 21 ledger days");
  const std::vector<double> r = daily_returns(ledger);

  ReturnDiagnostics diag;
  std::vector<double> y(r.size());
  for (std::size_t i = 0; i < r.size(); ++i) y[i] = 1.0 + r[i];
  const double y_min = *std::min_element(y.begin(), y.end());
  diag.shift = y_min > 0.0 ? 0.0 : 1e-6 - y_min;
  for (double& v : y) v += diag.shift;

  const auto n = static_cast<double>(y.size());
  std::vector<double> logs(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) logs[i] = std::log(y[i]);
  diag.lognormal_mu = mean(logs);
  double ss = 0.0;
  for (double v : logs) ss += (v - diag.lognormal_mu) * (v - diag.lognormal_mu);
  diag.lognormal_sigma = std::sqrt(ss / n);  // ML (1/n) by definition
  if (diag.lognormal_sigma <= 0.0)
    throw NumericError(ErrorKind::zero_variance, "returns are constant");

  std::sort(y.begin(), y.end());
  double d_stat = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double f = normal_cdf((std::log(y[i]) - diag.lognormal_mu) / diag.lognormal_sigma);
    const double lo = static_cast<double>(i) / n;
    const double hi = static_cast<double>(i + 1) / n;
    d_stat = std::max({d_stat, f - lo, hi - f});
  }
  diag.ks_stat = d_stat;
  diag.ks_p = kolmogorov_sf(std::sqrt(n) * d_stat);

  diag.lb_lags = 10;
  const LjungBox lb = ljung_box(r, diag.lb_lags);
  diag.lb_stat = lb.stat.back();
  diag.lb_p = lb.p.back();

  const AdfResult adf = adf_test(r);
  const KpssResult kpss = kpss_test(r);
  diag.adf_stat = adf.stat;
  diag.adf_p = adf.p;
  diag.kpss_stat = kpss.stat;
  diag.kpss_p = kpss.p;
  diag.verdict = combine_verdict(adf.p, kpss.p);
  return diag;
}

}  // namespace sigtrade
