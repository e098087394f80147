#include <doctest.h>

#include <vector>

#include "sigtrade/errors.hpp"
#include "sigtrade/var.hpp"
#include "test_util.hpp"

using namespace sigtrade;

namespace {

const std::vector<std::string> kAB{"a", "b"};

Panel panel_from_matrix(const Eigen::MatrixXd& data, int analysis_rows = -1) {
  const auto dates = testutil::make_dates("2013-01-01", static_cast<std::size_t>(data.rows()));
  std::vector<Signal> signals;
  for (Eigen::Index j = 0; j < data.cols(); ++j) {
    std::vector<double> v(data.rows());
    for (Eigen::Index i = 0; i < data.rows(); ++i) v[static_cast<std::size_t>(i)] = data(i, j);
    signals.push_back(make_signal(std::string(1, static_cast<char>('a' + j)), dates, v));
  }
  const auto split =
      analysis_rows < 0 ? data.rows() - 2 : static_cast<Eigen::Index>(analysis_rows) - 1;
  return Panel(signals, dates[static_cast<std::size_t>(split)], dates.back());
}

}  // namespace

TEST_SUITE("var") {
  TEST_CASE("exact fit on an alternating univariate series") {
    // y alternates 1,2 -> y_t = -y_{t-1} + 3 fits exactly with zero noise
    Eigen::MatrixXd data(7, 1);
    data << 1, 2, 1, 2, 1, 2, 1;
    const VarFit fit = fit_var_data(data, {"y"}, 1);
    CHECK(fit.phi[0](0, 0) == doctest::Approx(-1.0).epsilon(1e-10));
    CHECK(fit.trend(0) == doctest::Approx(0.0).epsilon(1e-10));
    CHECK(fit.intercept(0) == doctest::Approx(3.0).epsilon(1e-9));
    CHECK(fit.t_effective == 6);
    CHECK(fit.residuals.cwiseAbs().maxCoeff() < 1e-9);
    CHECK(fit.sigma(0, 0) == doctest::Approx(0.0).epsilon(1e-12));
  }

  TEST_CASE("recovers known VAR(1) coefficients") {
    Eigen::MatrixXd phi(2, 2);
    phi << 0.5, 0.1, 0.0, 0.3;
    const Eigen::MatrixXd data = testutil::simulate_var1(phi, 5000, 42);
    const VarFit fit = fit_var_data(data, kAB, 1);
    REQUIRE(fit.phi.size() == 1);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) CHECK(std::abs(fit.phi[0](i, j) - phi(i, j)) < 0.05);
    CHECK(std::abs(fit.trend(0)) < 0.001);
    CHECK(std::abs(fit.intercept(0)) < 0.1);
    // residual covariance close to identity
    CHECK(fit.sigma(0, 0) == doctest::Approx(1.0).epsilon(0.1));
    CHECK(fit.sigma(1, 1) == doctest::Approx(1.0).epsilon(0.1));
    CHECK(std::abs(fit.sigma(0, 1)) < 0.1);
  }

  TEST_CASE("recovers known VAR(2) coefficients") {
    Eigen::MatrixXd p1(2, 2), p2(2, 2);
    p1 << 0.4, 0.1, -0.1, 0.2;
    p2 << 0.2, 0.0, 0.1, 0.15;
    const Eigen::MatrixXd data = testutil::simulate_var(
        {p1, p2}, Eigen::VectorXd::Zero(2), Eigen::VectorXd::Zero(2),
        Eigen::MatrixXd::Identity(2, 2), 5000, 43);
    const VarFit fit = fit_var_data(data, kAB, 2);
    REQUIRE(fit.phi.size() == 2);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) {
        CHECK(std::abs(fit.phi[0](i, j) - p1(i, j)) < 0.05);
        CHECK(std::abs(fit.phi[1](i, j) - p2(i, j)) < 0.05);
      }
  }

  TEST_CASE("recovers a deterministic time trend") {
    Eigen::MatrixXd phi(1, 1);
    phi << 0.5;
    Eigen::VectorXd trend(1), intercept(1);
    trend << 0.01;
    intercept << 0.2;
    const Eigen::MatrixXd data =
        testutil::simulate_var({phi}, intercept, trend, Eigen::MatrixXd::Identity(1, 1), 3000,
                               44, 0);
    const VarFit fit = fit_var_data(data, {"y"}, 1);
    CHECK(fit.phi[0](0, 0) == doctest::Approx(0.5).epsilon(0.1));
    CHECK(fit.trend(0) == doctest::Approx(0.01).epsilon(0.15));
  }

  TEST_CASE("sigma uses the degrees-of-freedom correction over sigma_ml") {
    Eigen::MatrixXd phi(2, 2);
    phi << 0.3, 0.0, 0.1, 0.2;
    const Eigen::MatrixXd data = testutil::simulate_var1(phi, 300, 45);
    const VarFit fit = fit_var_data(data, kAB, 1);
    const double tp = fit.t_effective;
    const double scale = tp / (tp - (2.0 * 1 + 2.0));
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        CHECK(fit.sigma(i, j) == doctest::Approx(fit.sigma_ml(i, j) * scale).epsilon(1e-12));
  }

  TEST_CASE("equation residuals have zero mean under an intercept") {
    Eigen::MatrixXd phi(2, 2);
    phi << 0.3, -0.2, 0.1, 0.2;
    const Eigen::MatrixXd data = testutil::simulate_var1(phi, 400, 46);
    const VarFit fit = fit_var_data(data, kAB, 1);
    CHECK(fit.residuals.rows() == fit.t_effective);
    for (int j = 0; j < 2; ++j)
      CHECK(std::abs(fit.residuals.col(j).mean()) < 1e-10);
  }

  TEST_CASE("bic selects the true lag most of the time") {
    Eigen::MatrixXd p1(2, 2), p2(2, 2);
    p1 << 0.4, 0.1, -0.1, 0.2;
    p2 << 0.3, 0.0, 0.1, 0.25;
    int correct = 0;
    for (int seed = 0; seed < 10; ++seed) {
      const Eigen::MatrixXd data = testutil::simulate_var(
          {p1, p2}, Eigen::VectorXd::Zero(2), Eigen::VectorXd::Zero(2),
          Eigen::MatrixXd::Identity(2, 2), 800, 100 + seed);
      correct += select_lag_data(data, kAB, 4).lag == 2;
    }
    CHECK(correct >= 8);
  }

  TEST_CASE("bic table covers every candidate and matches refits") {
    Eigen::MatrixXd phi(2, 2);
    phi << 0.5, 0.1, 0.0, 0.3;
    const Eigen::MatrixXd data = testutil::simulate_var1(phi, 400, 47);
    const LagSelection sel = select_lag_data(data, kAB, 3);
    REQUIRE(sel.bic_by_lag.size() == 3);
    CHECK(sel.bic_by_lag.count(1) == 1);
    CHECK(sel.bic_by_lag.count(3) == 1);
    double best = sel.bic_by_lag.at(sel.lag);
    for (const auto& [p, b] : sel.bic_by_lag) CHECK(best <= b);
  }

  TEST_CASE("lag selection refuses an over-parameterized search") {
    const Eigen::MatrixXd data = testutil::simulate_var1(
        (Eigen::MatrixXd(2, 2) << 0.2, 0.0, 0.0, 0.2).finished(), 40, 48);
    CHECK_THROWS_AS(select_lag_data(data, kAB, 11), DataError);  // > T/(2k) = 10
    CHECK_NOTHROW(select_lag_data(data, kAB, 3));
  }

  TEST_CASE("collinear data raises a rank error") {
    // a strictly linear ramp makes lag and time index identical columns
    Eigen::MatrixXd data(30, 1);
    for (int i = 0; i < 30; ++i) data(i, 0) = i + 1.0;
    CHECK_THROWS_AS(fit_var_data(data, {"y"}, 1), NumericError);
  }

  TEST_CASE("too little data raises insufficient-data") {
    Eigen::MatrixXd data(5, 2);
    data.setRandom();
    CHECK_THROWS_AS(fit_var_data(data, kAB, 2), DataError);
  }

  TEST_CASE("fit over a panel ignores the leave-out region") {
    Eigen::MatrixXd phi(2, 2);
    phi << 0.5, 0.1, 0.0, 0.3;
    Eigen::MatrixXd data = testutil::simulate_var1(phi, 120, 49);
    const Panel clean = panel_from_matrix(data, 100);
    Eigen::MatrixXd corrupted = data;
    corrupted.bottomRows(20).setConstant(1e6);
    const Panel dirty = panel_from_matrix(corrupted, 100);
    const VarFit f1 = fit_var(clean, 1);
    const VarFit f2 = fit_var(dirty, 1);
    CHECK(f1.t_effective == 99);
    CHECK((f1.phi[0] - f2.phi[0]).cwiseAbs().maxCoeff() == 0.0);
    CHECK((f1.sigma - f2.sigma).cwiseAbs().maxCoeff() == 0.0);
  }

  TEST_CASE("residual diagnostics on a well-specified model") {
    Eigen::MatrixXd phi(2, 2);
    phi << 0.5, 0.1, 0.0, 0.3;
    const Eigen::MatrixXd data = testutil::simulate_var1(phi, 600, 50);
    const VarFit fit = fit_var_data(data, kAB, 1);
    const ResidualDiagnostics diag = residual_diagnostics(fit, 10);
    CHECK(diag.variable_names == kAB);
    CHECK(diag.lb_p.rows() == 2);
    CHECK(diag.lb_p.cols() == 10);
    // good model: no overwhelming autocorrelation evidence at the last lag
    CHECK(diag.lb_p(0, 9) > 0.001);
    CHECK(diag.residual_correlation(0, 0) == doctest::Approx(1.0));
    CHECK(diag.residual_correlation(1, 1) == doctest::Approx(1.0));
    CHECK(diag.residual_correlation(0, 1) ==
          doctest::Approx(diag.residual_correlation(1, 0)));
  }

  TEST_CASE("residual diagnostics flag an underfit model") {
    // strong VAR(2) dynamics fitted with lag 1 leave autocorrelated residuals
    Eigen::MatrixXd p1 = Eigen::MatrixXd::Zero(1, 1), p2(1, 1);
    p2 << 0.8;
    const Eigen::MatrixXd data = testutil::simulate_var(
        {p1, p2}, Eigen::VectorXd::Zero(1), Eigen::VectorXd::Zero(1),
        Eigen::MatrixXd::Identity(1, 1), 500, 51);
    const VarFit fit = fit_var_data(data, {"y"}, 1);
    const ResidualDiagnostics diag = residual_diagnostics(fit, 5);
    CHECK(diag.lb_p(0, 4) < 0.01);
  }

  TEST_CASE("fitting is deterministic") {
    Eigen::MatrixXd phi(2, 2);
    phi << 0.5, 0.1, 0.0, 0.3;
    const Eigen::MatrixXd data = testutil::simulate_var1(phi, 300, 52);
    const VarFit f1 = fit_var_data(data, kAB, 2);
    const VarFit f2 = fit_var_data(data, kAB, 2);
    CHECK((f1.phi[0] - f2.phi[0]).cwiseAbs().maxCoeff() == 0.0);
    CHECK((f1.phi[1] - f2.phi[1]).cwiseAbs().maxCoeff() == 0.0);
    CHECK((f1.residuals - f2.residuals).cwiseAbs().maxCoeff() == 0.0);
  }
}
