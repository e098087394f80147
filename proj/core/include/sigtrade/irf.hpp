#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "sigtrade/signal.hpp"
#include "sigtrade/var.hpp"

namespace sigtrade {

// Orthogonalized impulse responses. Matrix (j, i) at step h is the response of
// variable j, h days after a one-standard-deviation orthogonalized shock to
// variable i; the shock rotation is the lower Cholesky factor of sigma, so the
// variable ordering matters and is recorded in variable_names.
struct IrfSet {
  std::vector<std::string> variable_names;
  int horizon = 0;
  int n_boot = 0;                         // 0 for point estimates only
  std::vector<Eigen::MatrixXd> response;  // indexed by h = 0..horizon
  std::vector<Eigen::MatrixXd> ci_low;    // 95% band; equals response when n_boot == 0
  std::vector<Eigen::MatrixXd> ci_high;
  std::vector<Eigen::MatrixXd> cumulative;  // running sum of response over h
  int skipped_replicates = 0;

  int dim() const { return static_cast<int>(variable_names.size()); }
  Eigen::Index index_of(const std::string& name) const;  // unknown_variable if absent

  // Convenience views of one (impulse, response) pair across the horizon.
  std::vector<double> response_path(const std::string& impulse, const std::string& response) const;
  std::vector<double> cumulative_path(const std::string& impulse, const std::string& response) const;
};

// Point responses: Theta_h = Psi_h L with Psi_0 = I and
// Psi_h = sum_{j=1..min(h,p)} Psi_{h-j} phi_j, L = lower Cholesky of fit.sigma.
IrfSet compute_irf(const VarFit& fit, int horizon);

// Residual-bootstrap bands: iid resampling of centered residual rows, surrogate
// series rebuilt recursively from the original first p values with the fitted
// deterministic terms, refit, responses recomputed. Bands are empirical
// 2.5/97.5 percentiles, widened if needed so they always contain the point
// estimate. Per-replicate seeds are derived from `seed` by counter, so results
// do not depend on thread count. Replicates whose refit fails numerically are
// skipped and counted; more than 1% skipped aborts. data must be the sample
// the fit was estimated on.
IrfSet bootstrap_irf(const VarFit& fit, const Eigen::MatrixXd& data, int horizon, int n_boot,
                     std::uint64_t seed, int threads = 0);

// Same, drawing the estimation sample from the panel's analysis period using
// the fit's variable order.
IrfSet bootstrap_irf(const VarFit& fit, const Panel& panel, int horizon, int n_boot,
                     std::uint64_t seed, int threads = 0);

struct ScreenHit {
  std::string impulse;
  int sign = 0;                    // sign of the h=1 response
  double cumulative_at_horizon = 0.0;
  double h1_response = 0.0;
};

// Impulses (other than response_var itself) whose |cumulative response at the
// final horizon| on response_var reaches `threshold` and whose h=1 band
// excludes zero. Feeds strategy construction.
std::vector<ScreenHit> cumulative_screen(const IrfSet& irfs, const std::string& response_var,
                                         double threshold);

struct PermutationReport {
  std::vector<std::string> variable_names;
  int n_perm = 0;
  int lag = 0;
  Eigen::MatrixXd observed_h1;  // |response| at h=1, (response j, impulse i)
  Eigen::MatrixXd p;            // fraction of permuted |response| >= observed
  int skipped = 0;
};

// Null-model check: every column shuffled independently per replicate,
// destroying cross-correlations; VAR refit and h=1 responses recomputed.
PermutationReport permutation_test(const Eigen::MatrixXd& data,
                                   const std::vector<std::string>& names, int lag, int horizon,
                                   int n_perm, std::uint64_t seed, int threads = 0);

// Same, over the panel's analysis period in panel order.
PermutationReport permutation_test(const Panel& panel, int lag, int horizon, int n_perm,
                                   std::uint64_t seed, int threads = 0);

}  // namespace sigtrade
