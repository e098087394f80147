#include "sigtrade/var.hpp"

#include <cmath>
#include <limits>

#include <Eigen/Dense>

#include "sigtrade/errors.hpp"
#include "sigtrade/stats.hpp"

namespace sigtrade {

namespace {

// Stacks the regressor matrix for responses data[first_row..T). Column layout:
// [lag-1 block | lag-2 block | ... | time index | 1]. The time index is 1 at
// the first response row so refits on the same sample are reproducible.
Eigen::MatrixXd build_regressors(const Eigen::MatrixXd& data, int lag, Eigen::Index first_row) {
  const Eigen::Index k = data.cols();
  const Eigen::Index rows = data.rows() - first_row;
  Eigen::MatrixXd X(rows, k * lag + 2);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const Eigen::Index t = first_row + i;
    for (int j = 1; j <= lag; ++j)
      X.block(i, (j - 1) * k, 1, k) = data.row(t - j);
    X(i, k * lag) = static_cast<double>(i + 1);
    X(i, k * lag + 1) = 1.0;
  }
  return X;
}

VarFit fit_on_rows(const Eigen::MatrixXd& data, const std::vector<std::string>& names, int lag,
                   Eigen::Index first_row) {
  const Eigen::Index k = data.cols();
  const Eigen::Index t_eff = data.rows() - first_row;
  const Eigen::Index n_params = k * lag + 2;
  if (t_eff <= n_params)
    throw DataError(ErrorKind::insufficient_data,
                    "effective sample (" + std::to_string(t_eff) + ") must exceed " +
                        std::to_string(n_params) + " parameters per equation");

  const Eigen::MatrixXd X = build_regressors(data, lag, first_row);
  const Eigen::MatrixXd Y = data.bottomRows(t_eff);

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
  if (qr.rank() < X.cols())
    throw NumericError(ErrorKind::rank_deficient,
                       "regressors are collinear (is a variable constant?)");
  const Eigen::MatrixXd B = qr.solve(Y);  // n_params x k

  VarFit fit;
  fit.variable_names = names;
  fit.lag = lag;
  fit.t_effective = static_cast<int>(t_eff);
  fit.phi.reserve(static_cast<std::size_t>(lag));
  for (int j = 1; j <= lag; ++j)
    fit.phi.push_back(B.middleRows((j - 1) * k, k).transpose());
  fit.trend = B.row(k * lag).transpose();
  fit.intercept = B.row(k * lag + 1).transpose();
  fit.residuals = Y - X * B;

  const Eigen::MatrixXd ee = fit.residuals.transpose() * fit.residuals;
  const Eigen::Index dof = t_eff - n_params;
  fit.sigma = ee / static_cast<double>(dof);
  fit.sigma_ml = ee / static_cast<double>(t_eff);
  return fit;
}

void check_var_args(const Eigen::MatrixXd& data, const std::vector<std::string>& names, int lag) {
  if (lag < 1) throw ConfigError(ErrorKind::bad_config, "lag order must be at least 1");
  if (static_cast<std::size_t>(data.cols()) != names.size())
    throw DataError(ErrorKind::misaligned, "variable names do not match data columns");
  if (data.cols() < 1) throw DataError(ErrorKind::empty_input, "no variables");
  if (!data.allFinite()) throw DataError(ErrorKind::non_finite, "data matrix has non-finite entries");
}

double log_det_spd(const Eigen::MatrixXd& m) {
  Eigen::LLT<Eigen::MatrixXd> llt(m);
  if (llt.info() != Eigen::Success)
    throw NumericError(ErrorKind::not_positive_definite,
                       "residual covariance is not positive definite");
  double s = 0.0;
  const auto& L = llt.matrixLLT();
  for (Eigen::Index i = 0; i < m.rows(); ++i) s += std::log(L(i, i));
  return 2.0 * s;
}

}  // namespace

VarFit fit_var_data(const Eigen::MatrixXd& data, const std::vector<std::string>& names, int lag) {
  check_var_args(data, names, lag);
  return fit_on_rows(data, names, lag, lag);
}

VarFit fit_var(const Panel& panel, int lag) {
  const auto names = panel.names();
  const Eigen::MatrixXd data =
      panel.matrix(names, panel.dates().front(), panel.analysis_end());
  return fit_var_data(data, names, lag);
}

LagSelection select_lag_data(const Eigen::MatrixXd& data, const std::vector<std::string>& names,
                             int max_lag) {
  check_var_args(data, names, max_lag);
  const auto k = data.cols();
  const auto T = data.rows();
  if (static_cast<double>(max_lag) > static_cast<double>(T) / (2.0 * static_cast<double>(k)))
    throw DataError(ErrorKind::insufficient_data,
                    "max_lag " + std::to_string(max_lag) + " exceeds T/(2k) = " +
                        std::to_string(T / (2 * k)));
  const Eigen::Index t_eff = T - max_lag;
  if (t_eff <= k * max_lag + 2)
    throw DataError(ErrorKind::insufficient_data, "not enough rows for the largest candidate");

  LagSelection sel;
  double best = std::numeric_limits<double>::infinity();
  for (int p = 1; p <= max_lag; ++p) {
    // Every candidate is fit to the same response rows [max_lag, T).
    const VarFit fit = fit_on_rows(data, names, p, max_lag);
    const double n = static_cast<double>(t_eff);
    const double n_params = static_cast<double>(k * p + 2);
    const double bic =
        log_det_spd(fit.sigma_ml) + n_params * static_cast<double>(k) * std::log(n) / n;
    sel.bic_by_lag[p] = bic;
    if (bic < best) {
      best = bic;
      sel.lag = p;
    }
  }
  return sel;
}

LagSelection select_lag(const Panel& panel, int max_lag) {
  const auto names = panel.names();
  const Eigen::MatrixXd data =
      panel.matrix(names, panel.dates().front(), panel.analysis_end());
  return select_lag_data(data, names, max_lag);
}

ResidualDiagnostics residual_diagnostics(const VarFit& fit, int max_autocorr_lag) {
  if (max_autocorr_lag < 1)
    throw ConfigError(ErrorKind::bad_config, "max_autocorr_lag must be positive");
  const Eigen::Index k = fit.residuals.cols();
  const Eigen::Index n = fit.residuals.rows();
  if (k == 0 || n < 2) throw DataError(ErrorKind::empty_input, "fit has no residuals");
  if (max_autocorr_lag >= n)
    throw ConfigError(ErrorKind::bad_config, "max_autocorr_lag must be below the sample size");

  ResidualDiagnostics diag;
  diag.variable_names = fit.variable_names;
  diag.max_lag = max_autocorr_lag;
  diag.lb_stat.resize(k, max_autocorr_lag);
  diag.lb_p.resize(k, max_autocorr_lag);
  for (Eigen::Index eq = 0; eq < k; ++eq) {
    std::vector<double> col(static_cast<std::size_t>(n));
    for (Eigen::Index t = 0; t < n; ++t) col[static_cast<std::size_t>(t)] = fit.residuals(t, eq);
    const LjungBox lb = ljung_box(col, max_autocorr_lag);
    for (int h = 0; h < max_autocorr_lag; ++h) {
      diag.lb_stat(eq, h) = lb.stat[static_cast<std::size_t>(h)];
      diag.lb_p(eq, h) = lb.p[static_cast<std::size_t>(h)];
    }
  }

  diag.residual_correlation.resize(k, k);
  Eigen::VectorXd sd(k);
  Eigen::VectorXd mu = fit.residuals.colwise().mean();
  for (Eigen::Index j = 0; j < k; ++j) {
    const auto c = fit.residuals.col(j).array() - mu(j);
    sd(j) = std::sqrt(c.square().sum());
  }
  for (Eigen::Index i = 0; i < k; ++i) {
    for (Eigen::Index j = 0; j < k; ++j) {
      if (i == j) {
        diag.residual_correlation(i, j) = 1.0;
      } else if (sd(i) == 0.0 || sd(j) == 0.0) {
        diag.residual_correlation(i, j) = 0.0;  // degenerate column
      } else {
        const auto ci = fit.residuals.col(i).array() - mu(i);
        const auto cj = fit.residuals.col(j).array() - mu(j);
        diag.residual_correlation(i, j) = (ci * cj).sum() / (sd(i) * sd(j));
      }
    }
  }
  return diag;
}

}  // namespace sigtrade
