#include "sigtrade/stats.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/distributions/chi_squared.hpp>

#include "sigtrade/errors.hpp"

namespace sigtrade {

double mean(std::span<const double> x) {
  if (x.empty()) throw DataError(ErrorKind::empty_input, "mean of empty sample");
  double s = 0.0;
  for (double v : x) s += v;
  return s / static_cast<double>(x.size());
}

double sample_variance(std::span<const double> x) {
  if (x.size() < 2)
    throw DataError(ErrorKind::too_short, "sample variance needs at least 2 observations");
  const double m = mean(x);
  double s = 0.0;
  for (double v : x) s += (v - m) * (v - m);
  return s / static_cast<double>(x.size() - 1);
}

double sample_sd(std::span<const double> x) { return std::sqrt(sample_variance(x)); }

double normal_pdf(double x) {
  static const double inv_sqrt_2pi = 0.3989422804014326779;
  return inv_sqrt_2pi * std::exp(-0.5 * x * x);
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x * M_SQRT1_2); }

double normal_sf(double x) { return 0.5 * std::erfc(x * M_SQRT1_2); }

double chi_squared_sf(double x, double df) {
  if (x <= 0.0) return 1.0;
  boost::math::chi_squared dist(df);
  return boost::math::cdf(boost::math::complement(dist, x));
}

double kolmogorov_sf(double lambda) {
  if (lambda <= 0.0) return 1.0;
  double s = 0.0;
  for (int j = 1; j <= 100; ++j) {
    const double term = 2.0 * ((j % 2 == 1) ? 1.0 : -1.0) *
                        std::exp(-2.0 * static_cast<double>(j) * j * lambda * lambda);
    s += term;
    if (std::abs(term) < 1e-16) break;
  }
  return std::clamp(s, 0.0, 1.0);
}

double quantile_sorted(std::span<const double> sorted, double q) {
  if (sorted.empty()) throw DataError(ErrorKind::empty_input, "quantile of empty sample");
  if (q <= 0.0) return sorted.front();
  if (q >= 1.0) return sorted.back();
  const double h = static_cast<double>(sorted.size() - 1) * q;
  const auto lo = static_cast<std::size_t>(h);
  if (lo + 1 >= sorted.size()) return sorted.back();
  const double frac = h - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

std::vector<double> autocorrelations(std::span<const double> x, int max_lag) {
  const auto n = x.size();
  if (n < 2) throw DataError(ErrorKind::too_short, "autocorrelation needs at least 2 observations");
  if (max_lag < 1 || static_cast<std::size_t>(max_lag) >= n)
    throw ConfigError(ErrorKind::bad_config, "autocorrelation max_lag must be in [1, n-1]");
  const double m = mean(x);
  double denom = 0.0;
  for (double v : x) denom += (v - m) * (v - m);
  std::vector<double> r(static_cast<std::size_t>(max_lag), 0.0);
  if (denom == 0.0) return r;  // constant series: define r_k = 0
  for (int k = 1; k <= max_lag; ++k) {
    double s = 0.0;
    for (std::size_t t = static_cast<std::size_t>(k); t < n; ++t)
      s += (x[t] - m) * (x[t - static_cast<std::size_t>(k)] - m);
    r[static_cast<std::size_t>(k - 1)] = s / denom;
  }
  return r;
}

LjungBox ljung_box(std::span<const double> x, int max_lag) {
  const auto r = autocorrelations(x, max_lag);
  const double n = static_cast<double>(x.size());
  LjungBox out;
  out.stat.resize(r.size());
  out.p.resize(r.size());
  double acc = 0.0;
  for (std::size_t h = 0; h < r.size(); ++h) {
    acc += r[h] * r[h] / (n - static_cast<double>(h + 1));
    out.stat[h] = n * (n + 2.0) * acc;
    out.p[h] = chi_squared_sf(out.stat[h], static_cast<double>(h + 1));
  }
  return out;
}

}  // namespace sigtrade
