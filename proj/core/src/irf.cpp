#include "sigtrade/irf.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>

#include <Eigen/Dense>

#include "sigtrade/errors.hpp"
#include "sigtrade/parallel.hpp"
#include "sigtrade/rng.hpp"
#include "sigtrade/stats.hpp"

namespace sigtrade {

namespace {

Eigen::MatrixXd lower_cholesky(const Eigen::MatrixXd& sigma) {
  Eigen::LLT<Eigen::MatrixXd> llt(sigma);
  if (llt.info() != Eigen::Success)
    throw NumericError(ErrorKind::not_positive_definite,
                       "residual covariance is not positive definite");
  return llt.matrixL();
}

// MA coefficient matrices Psi_0..Psi_H of the fitted VAR.
std::vector<Eigen::MatrixXd> ma_coefficients(const VarFit& fit, int horizon) {
  const int k = fit.dim();
  std::vector<Eigen::MatrixXd> psi;
  psi.reserve(static_cast<std::size_t>(horizon) + 1);
  psi.push_back(Eigen::MatrixXd::Identity(k, k));
  for (int h = 1; h <= horizon; ++h) {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(k, k);
    for (int j = 1; j <= std::min(h, fit.lag); ++j)
      m += psi[static_cast<std::size_t>(h - j)] * fit.phi[static_cast<std::size_t>(j - 1)];
    psi.push_back(std::move(m));
  }
  return psi;
}

std::vector<Eigen::MatrixXd> point_responses(const VarFit& fit, int horizon) {
  const Eigen::MatrixXd L = lower_cholesky(fit.sigma);
  auto psi = ma_coefficients(fit, horizon);
  for (auto& m : psi) m = m * L;
  return psi;
}

void fill_cumulative(IrfSet& set) {
  set.cumulative.clear();
  set.cumulative.reserve(set.response.size());
  for (std::size_t h = 0; h < set.response.size(); ++h) {
    if (h == 0)
      set.cumulative.push_back(set.response[0]);
    else
      set.cumulative.push_back(set.cumulative[h - 1] + set.response[h]);
  }
}

// Rebuilds one surrogate sample: first p rows copied from the original data,
// the rest generated by the fitted recursion with resampled residual rows.
Eigen::MatrixXd surrogate_series(const VarFit& fit, const Eigen::MatrixXd& data,
                                 const Eigen::MatrixXd& centered_residuals, Rng& rng) {
  const int p = fit.lag;
  const Eigen::Index k = data.cols();
  const Eigen::Index T = data.rows();
  const auto n_res = static_cast<std::uint64_t>(centered_residuals.rows());
  Eigen::MatrixXd y(T, k);
  y.topRows(p) = data.topRows(p);
  for (Eigen::Index t = p; t < T; ++t) {
    const double idx = static_cast<double>(t - p + 1);  // matches the fit's time index
    Eigen::VectorXd v = fit.intercept + fit.trend * idx;
    for (int j = 1; j <= p; ++j)
      v += fit.phi[static_cast<std::size_t>(j - 1)] * y.row(t - j).transpose();
    v += centered_residuals.row(static_cast<Eigen::Index>(rng.uniform_below(n_res))).transpose();
    y.row(t) = v.transpose();
  }
  return y;
}

struct ReplicateResponses {
  std::vector<Eigen::MatrixXd> theta;  // empty when the replicate failed
};

}  // namespace

Eigen::Index IrfSet::index_of(const std::string& name) const {
  for (std::size_t i = 0; i < variable_names.size(); ++i)
    if (variable_names[i] == name) return static_cast<Eigen::Index>(i);
  throw DataError(ErrorKind::unknown_variable, "no variable '" + name + "' in impulse set");
}

std::vector<double> IrfSet::response_path(const std::string& impulse,
                                          const std::string& resp) const {
  const auto i = index_of(impulse);
  const auto j = index_of(resp);
  std::vector<double> out;
  out.reserve(response.size());
  for (const auto& m : response) out.push_back(m(j, i));
  return out;
}

std::vector<double> IrfSet::cumulative_path(const std::string& impulse,
                                            const std::string& resp) const {
  const auto i = index_of(impulse);
  const auto j = index_of(resp);
  std::vector<double> out;
  out.reserve(cumulative.size());
  for (const auto& m : cumulative) out.push_back(m(j, i));
  return out;
}

IrfSet compute_irf(const VarFit& fit, int horizon) {
  if (horizon < 1) throw ConfigError(ErrorKind::bad_config, "horizon must be positive");
  if (fit.lag < 1 || fit.phi.size() != static_cast<std::size_t>(fit.lag))
    throw DataError(ErrorKind::precondition, "fit has no coefficient matrices");
  IrfSet set;
  set.variable_names = fit.variable_names;
  set.horizon = horizon;
  set.n_boot = 0;
  set.response = point_responses(fit, horizon);
  set.ci_low = set.response;
  set.ci_high = set.response;
  fill_cumulative(set);
  return set;
}

IrfSet bootstrap_irf(const VarFit& fit, const Eigen::MatrixXd& data, int horizon, int n_boot,
                     std::uint64_t seed, int threads) {
  if (n_boot < 100)
    throw ConfigError(ErrorKind::bad_config, "n_boot must be at least 100");
  if (data.rows() != fit.t_effective + fit.lag || data.cols() != fit.dim())
    throw DataError(ErrorKind::misaligned, "data shape does not match the fit's sample");

  IrfSet set = compute_irf(fit, horizon);
  set.n_boot = n_boot;

  Eigen::MatrixXd centered = fit.residuals;
  centered.rowwise() -= fit.residuals.colwise().mean();

  // Each replicate owns slot r; aggregation below is sequential, so the output
  // is independent of the thread count.
  std::vector<ReplicateResponses> reps(static_cast<std::size_t>(n_boot));
  parallel_for(static_cast<std::size_t>(n_boot), threads, [&](std::size_t r) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(r)));
    try {
      const Eigen::MatrixXd y = surrogate_series(fit, data, centered, rng);
      const VarFit refit = fit_var_data(y, fit.variable_names, fit.lag);
      reps[r].theta = point_responses(refit, horizon);
    } catch (const Error&) {
      reps[r].theta.clear();  // counted below
    }
  });

  int skipped = 0;
  for (const auto& r : reps)
    if (r.theta.empty()) ++skipped;
  set.skipped_replicates = skipped;
  if (static_cast<double>(skipped) > 0.01 * static_cast<double>(n_boot))
    throw NumericError(ErrorKind::too_many_failures,
                       std::to_string(skipped) + " of " + std::to_string(n_boot) +
                           " bootstrap replicates failed");

  const int k = fit.dim();
  std::vector<double> cell;
  cell.reserve(static_cast<std::size_t>(n_boot));
  for (int h = 0; h <= horizon; ++h) {
    set.ci_low[static_cast<std::size_t>(h)].resize(k, k);
    set.ci_high[static_cast<std::size_t>(h)].resize(k, k);
    for (int j = 0; j < k; ++j) {
      for (int i = 0; i < k; ++i) {
        cell.clear();
        for (const auto& r : reps)
          if (!r.theta.empty()) cell.push_back(r.theta[static_cast<std::size_t>(h)](j, i));
        std::sort(cell.begin(), cell.end());
        double lo = quantile_sorted(cell, 0.025);
        double hi = quantile_sorted(cell, 0.975);
        // Percentile bands from a finite replicate set can miss the point
        // estimate; widen so the documented containment always holds.
        const double point = set.response[static_cast<std::size_t>(h)](j, i);
        lo = std::min(lo, point);
        hi = std::max(hi, point);
        set.ci_low[static_cast<std::size_t>(h)](j, i) = lo;
        set.ci_high[static_cast<std::size_t>(h)](j, i) = hi;
      }
    }
  }
  return set;
}

IrfSet bootstrap_irf(const VarFit& fit, const Panel& panel, int horizon, int n_boot,
                     std::uint64_t seed, int threads) {
  const Eigen::MatrixXd data =
      panel.matrix(fit.variable_names, panel.dates().front(), panel.analysis_end());
  return bootstrap_irf(fit, data, horizon, n_boot, seed, threads);
}

std::vector<ScreenHit> cumulative_screen(const IrfSet& irfs, const std::string& response_var,
                                         double threshold) {
  if (threshold < 0.0) throw ConfigError(ErrorKind::bad_config, "threshold must be nonnegative");
  if (irfs.horizon < 1 || irfs.response.empty())
    throw DataError(ErrorKind::precondition, "impulse set has no responses");
  const auto j = irfs.index_of(response_var);
  std::vector<ScreenHit> hits;
  const auto& cum_last = irfs.cumulative.back();
  const auto& theta1 = irfs.response[1];
  for (int i = 0; i < irfs.dim(); ++i) {
    if (static_cast<Eigen::Index>(i) == j) continue;  // self-response is not a predictor
    const double cum = cum_last(j, i);
    if (std::abs(cum) < threshold) continue;
    const double lo = irfs.ci_low[1](j, i);
    const double hi = irfs.ci_high[1](j, i);
    if (!(lo > 0.0 || hi < 0.0)) continue;  // h=1 band must exclude zero
    const double r1 = theta1(j, i);
    ScreenHit hit;
    hit.impulse = irfs.variable_names[static_cast<std::size_t>(i)];
    hit.sign = r1 > 0.0 ? 1 : (r1 < 0.0 ? -1 : 0);
    hit.cumulative_at_horizon = cum;
    hit.h1_response = r1;
    hits.push_back(std::move(hit));
  }
  return hits;
}

PermutationReport permutation_test(const Eigen::MatrixXd& data,
                                   const std::vector<std::string>& names, int lag, int horizon,
                                   int n_perm, std::uint64_t seed, int threads) {
  if (n_perm < 100)
    throw ConfigError(ErrorKind::bad_config, "n_perm must be at least 100");
  if (horizon < 1) throw ConfigError(ErrorKind::bad_config, "horizon must be positive");

  const VarFit base = fit_var_data(data, names, lag);
  const IrfSet base_irf = compute_irf(base, 1);

  PermutationReport rep;
  rep.variable_names = names;
  rep.n_perm = n_perm;
  rep.lag = lag;
  rep.observed_h1 = base_irf.response[1].cwiseAbs();

  const Eigen::Index T = data.rows();
  const Eigen::Index k = data.cols();
  std::vector<Eigen::MatrixXd> h1(static_cast<std::size_t>(n_perm));
  parallel_for(static_cast<std::size_t>(n_perm), threads, [&](std::size_t r) {
    Rng rng(derive_seed(seed, 0x7065726dULL + static_cast<std::uint64_t>(r)));
    Eigen::MatrixXd shuffled = data;
    // Independent Fisher-Yates shuffle per column kills cross-correlations
    // while preserving each marginal distribution.
    for (Eigen::Index c = 0; c < k; ++c) {
      for (Eigen::Index t = T - 1; t > 0; --t) {
        const auto s =
            static_cast<Eigen::Index>(rng.uniform_below(static_cast<std::uint64_t>(t) + 1));
        std::swap(shuffled(t, c), shuffled(s, c));
      }
    }
    try {
      const VarFit refit = fit_var_data(shuffled, names, lag);
      h1[r] = compute_irf(refit, 1).response[1].cwiseAbs();
    } catch (const Error&) {
      h1[r].resize(0, 0);
    }
  });

  int kept = 0, skipped = 0;
  Eigen::MatrixXd exceed = Eigen::MatrixXd::Zero(k, k);
  for (const auto& m : h1) {
    if (m.size() == 0) {
      ++skipped;
      continue;
    }
    ++kept;
    for (Eigen::Index j = 0; j < k; ++j)
      for (Eigen::Index i = 0; i < k; ++i)
        if (m(j, i) > rep.observed_h1(j, i)) exceed(j, i) += 1.0;
  }
  rep.skipped = skipped;
  if (static_cast<double>(skipped) > 0.01 * static_cast<double>(n_perm))
    throw NumericError(ErrorKind::too_many_failures,
                       std::to_string(skipped) + " of " + std::to_string(n_perm) +
                           " permutation replicates failed");
  rep.p = exceed / static_cast<double>(kept);
  return rep;
}

PermutationReport permutation_test(const Panel& panel, int lag, int horizon, int n_perm,
                                   std::uint64_t seed, int threads) {
  const auto names = panel.names();
  const Eigen::MatrixXd data =
      panel.matrix(names, panel.dates().front(), panel.analysis_end());
  return permutation_test(data, names, lag, horizon, n_perm, seed, threads);
}

}  // namespace sigtrade
