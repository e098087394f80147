#pragma once

#include <Eigen/Dense>

#include "sigtrade/errors.hpp"

namespace sigtrade::detail {

struct OlsFit {
  Eigen::VectorXd coef;
  Eigen::VectorXd residuals;
  Eigen::MatrixXd xtx_inv;  // (X'X)^{-1}, for standard errors
  double rss = 0.0;
};

// Least squares via column-pivoted Householder QR. Throws on rank deficiency.
inline OlsFit ols(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
  if (qr.rank() < X.cols())
    throw NumericError(ErrorKind::rank_deficient, "regressor matrix is rank deficient");
  OlsFit fit;
  fit.coef = qr.solve(y);
  fit.residuals = y - X * fit.coef;
  fit.rss = fit.residuals.squaredNorm();
  // X P = Q R  =>  (X'X)^{-1} = P R^{-1} R^{-T} P'
  const Eigen::Index k = X.cols();
  Eigen::MatrixXd rinv = qr.matrixR()
                             .topLeftCorner(k, k)
                             .template triangularView<Eigen::Upper>()
                             .solve(Eigen::MatrixXd::Identity(k, k));
  Eigen::MatrixXd a = qr.colsPermutation() * rinv;
  fit.xtx_inv = a * a.transpose();
  return fit;
}

}  // namespace sigtrade::detail
