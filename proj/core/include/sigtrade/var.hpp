#pragma once

#include <map>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "sigtrade/signal.hpp"

namespace sigtrade {

// Least-squares fit of V(t) = sum_j phi_j V(t-j) + r t + c + eps over an
// effective sample of T' = T - p rows. The deterministic time index starts at
// 1 on the first effective observation.
struct VarFit {
  std::vector<std::string> variable_names;
  int lag = 0;                         // p
  std::vector<Eigen::MatrixXd> phi;    // one k-by-k matrix per lag
  Eigen::VectorXd trend;               // r
  Eigen::VectorXd intercept;           // c
  Eigen::MatrixXd residuals;           // T'-by-k
  Eigen::MatrixXd sigma;               // dof-corrected residual covariance
  Eigen::MatrixXd sigma_ml;            // maximum-likelihood (1/T') version
  int t_effective = 0;                 // T'

  int dim() const { return static_cast<int>(variable_names.size()); }
  int params_per_equation() const { return dim() * lag + 2; }
};

// Equation-by-equation OLS on a row-per-day data matrix. Regressors are the
// p lags of every variable, a linear time index, and a constant.
VarFit fit_var_data(const Eigen::MatrixXd& data, const std::vector<std::string>& names, int lag);

// Same, on the analysis period of a panel (rows from the first date through
// panel.analysis_end()), variables in panel order.
VarFit fit_var(const Panel& panel, int lag);

struct LagSelection {
  int lag = 0;
  std::map<int, double> bic_by_lag;
};

// Fits orders 1..max_lag on a common effective sample (all candidates lose the
// first max_lag rows) and picks the Bayesian information criterion minimum:
//   BIC(p) = ln det(Sigma_ML(p)) + (p k + 2) k ln(T_eff) / T_eff.
LagSelection select_lag_data(const Eigen::MatrixXd& data, const std::vector<std::string>& names,
                             int max_lag);
LagSelection select_lag(const Panel& panel, int max_lag);

struct ResidualDiagnostics {
  std::vector<std::string> variable_names;
  int max_lag = 0;
  // Portmanteau autocorrelation statistics per equation: row = equation,
  // column h-1 = statistic/p-value with h autocorrelation terms.
  Eigen::MatrixXd lb_stat;
  Eigen::MatrixXd lb_p;
  Eigen::MatrixXd residual_correlation;  // cross-equation, unit diagonal
};

ResidualDiagnostics residual_diagnostics(const VarFit& fit, int max_autocorr_lag);

}  // namespace sigtrade
