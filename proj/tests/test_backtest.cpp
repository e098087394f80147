#include <doctest.h>

#include <cmath>
#include <map>
#include <vector>

#include "sigtrade/backtest.hpp"
#include "sigtrade/errors.hpp"
#include "sigtrade/rng.hpp"
#include "sigtrade/stats.hpp"
#include "sigtrade/strategy.hpp"
#include "test_util.hpp"

using namespace sigtrade;
using testutil::make_dates;
using testutil::make_series;

namespace {

// Straight-line reference implementation of the trading loop, kept free of
// the library's control flow so the two can disagree. Expressions appear in
// the same order as the documented algorithm, so agreement is exact.
struct OracleResult {
  std::vector<double> cr;
  std::vector<double> cash;
  std::vector<double> asset;
  bool bankrupt = false;
};

OracleResult oracle_backtest(const std::vector<double>& p, const std::vector<int>& preds,
                             double c_b, double c_s, TradeMode mode) {
  const std::size_t T = p.size();
  OracleResult out;
  out.cr.assign(T, 1.0);
  out.cash.assign(T, 0.0);
  out.asset.assign(T, 0.0);
  double nUSD = 1.0;
  double nBTC = 0.0;
  for (std::size_t t = 0; t + 1 < T; ++t) {
    const int pred = t < preds.size() ? preds[t] : 0;
    bool bankrupt = false;
    if (pred == 1 && nBTC == 0.0 && mode != TradeMode::short_only) {
      nBTC = nUSD * (1.0 - c_b) / p[t];
      nUSD = 0.0;
    } else if (pred == -1 && nBTC > 0.0) {
      nUSD = nBTC * (1.0 - c_s) * p[t];
      nBTC = 0.0;
    } else if (pred == -1 && nBTC == 0.0 &&
               (mode == TradeMode::full || mode == TradeMode::short_only ||
                mode == TradeMode::forced_close)) {
      const double nBTCb = nUSD / p[t];
      nUSD = nUSD + nBTCb * (1.0 - c_s) * p[t] - nBTCb * p[t + 1] / (1.0 - c_b);
      if (nUSD < 0.0) bankrupt = true;
    }
    out.cash[t] = nUSD;
    out.asset[t] = nBTC;
    out.cr[t + 1] = nUSD + nBTC * p[t + 1] * (1.0 - c_s);
    if (bankrupt) {
      out.cr.resize(t + 2);
      out.cash.resize(t + 2);
      out.asset.resize(t + 2);
      out.cash[t + 1] = nUSD;
      out.asset[t + 1] = nBTC;
      out.bankrupt = true;
      return out;
    }
    if (mode == TradeMode::forced_close && nBTC > 0.0) {
      nUSD = nUSD + nBTC * (1.0 - c_s) * p[t + 1];
      nBTC = 0.0;
    }
  }
  out.cash[T - 1] = nUSD;
  out.asset[T - 1] = nBTC;
  return out;
}

PredictionSeries preds_on(const Signal& price, std::vector<int> values) {
  PredictionSeries out;
  out.dates.assign(price.dates.begin(),
                   price.dates.begin() + static_cast<std::ptrdiff_t>(values.size()));
  out.values = std::move(values);
  return out;
}

void check_matches_oracle(const Ledger& ledger, const OracleResult& oracle) {
  REQUIRE(ledger.rows.size() == oracle.cr.size());
  for (std::size_t t = 0; t < oracle.cr.size(); ++t) {
    CHECK(ledger.rows[t].cr == oracle.cr[t]);
    CHECK(ledger.rows[t].cash == oracle.cash[t]);
    CHECK(ledger.rows[t].asset == oracle.asset[t]);
    CHECK(ledger.rows[t].profit_pct == (oracle.cr[t] - 1.0) * 100.0);
  }
}

struct RandomInstance {
  Signal price;
  PredictionSeries preds;
  std::vector<int> pred_values;
  CostModel costs;
  TradeMode mode;
};

RandomInstance random_instance(Rng& rng, bool allow_jumps) {
  const std::size_t T = 2 + static_cast<std::size_t>(rng.uniform_below(49));
  std::vector<double> p(T);
  p[0] = 50.0 + 100.0 * rng.uniform01();
  for (std::size_t t = 1; t < T; ++t) {
    double ratio = 0.85 + 0.3 * rng.uniform01();
    if (allow_jumps && rng.uniform_below(10) == 0) ratio = 1.9 + 0.3 * rng.uniform01();
    p[t] = p[t - 1] * ratio;
  }
  RandomInstance inst{make_series("p", "2013-01-01", p), {}, {}, {}, TradeMode::full};
  const std::size_t np = rng.uniform_below(2) == 0 ? T : T - 1;
  inst.pred_values.resize(np);
  for (auto& v : inst.pred_values) v = static_cast<int>(rng.uniform_below(3)) - 1;
  inst.preds = preds_on(inst.price, inst.pred_values);
  inst.costs = CostModel{0.05 * rng.uniform01(), 0.05 * rng.uniform01()};
  constexpr TradeMode kModes[] = {TradeMode::full, TradeMode::long_only, TradeMode::short_only,
                                  TradeMode::forced_close};
  inst.mode = kModes[rng.uniform_below(4)];
  return inst;
}

}  // namespace

TEST_SUITE("backtest") {
  TEST_CASE("buying before a 10% rally earns 10% at zero cost") {
    const Signal price = make_series("p", "2013-01-01", {100.0, 110.0});
    const auto ledger = run_backtest(price, preds_on(price, {1}), CostModel{});
    REQUIRE(ledger.rows.size() == 2);
    CHECK(ledger.rows[0].cr == 1.0);
    CHECK(ledger.rows[0].action == TradeAction::buy);
    CHECK(ledger.rows[0].asset == doctest::Approx(0.01).epsilon(1e-14));
    CHECK(ledger.rows[1].cr == doctest::Approx(1.1).epsilon(1e-14));
    CHECK(ledger.final_profit_pct() == doctest::Approx(10.0).epsilon(1e-12));
  }

  TEST_CASE("buying with fees pays on entry and on the mark") {
    const Signal price = make_series("p", "2013-01-01", {100.0, 110.0});
    const auto ledger = run_backtest(price, preds_on(price, {1}), CostModel::flat(0.0025));
    // 1.1 * (1 - 0.0025)^2 = 1.094506875, derived by hand
    CHECK(ledger.rows[1].cr == doctest::Approx(1.094506875).epsilon(1e-12));
  }

  TEST_CASE("a short position gains when the price falls") {
    const Signal price = make_series("p", "2013-01-01", {100.0, 90.0});
    const auto ledger = run_backtest(price, preds_on(price, {-1}), CostModel{});
    // sell 0.01 units at 100, buy back at 90: 1 + 1 - 0.9 = 1.1
    CHECK(ledger.rows[0].action == TradeAction::short_sale);
    CHECK(ledger.rows[1].cr == doctest::Approx(1.1).epsilon(1e-14));
    CHECK(ledger.rows[1].asset == 0.0);
  }

  TEST_CASE("holding throughout keeps capital flat") {
    const Signal price = make_series("p", "2013-01-01", {100.0, 150.0, 75.0, 120.0});
    const auto ledger = run_backtest(price, preds_on(price, {0, 0, 0}), CostModel::flat(0.003));
    for (const auto& row : ledger.rows) {
      CHECK(row.cr == 1.0);
      CHECK(row.profit_pct == 0.0);
      CHECK(row.action == TradeAction::hold);
    }
  }

  TEST_CASE("a round trip at flat prices loses the fees twice") {
    const Signal price = make_series("p", "2013-01-01", {100.0, 100.0, 100.0});
    const auto ledger = run_backtest(price, preds_on(price, {1, -1}), CostModel::flat(0.01));
    CHECK(ledger.rows[1].action == TradeAction::sell);
    // (1 - 0.01)^2 = 0.9801
    CHECK(ledger.rows[2].cr == doctest::Approx(0.9801).epsilon(1e-14));
  }

  TEST_CASE("predictions may cover all days or all but the last") {
    const Signal price = make_series("p", "2013-01-01", {100.0, 105.0, 95.0, 99.0});
    const auto full = run_backtest(price, preds_on(price, {1, -1, 1, -1}), CostModel{});
    const auto trimmed = run_backtest(price, preds_on(price, {1, -1, 1}), CostModel{});
    REQUIRE(full.rows.size() == trimmed.rows.size());
    for (std::size_t t = 0; t < full.rows.size(); ++t)
      CHECK(full.rows[t].cr == trimmed.rows[t].cr);

    CHECK_THROWS_AS(run_backtest(price, preds_on(price, {1, -1}), CostModel{}), DataError);
    PredictionSeries shifted;
    shifted.dates = make_dates("2013-01-02", 3);
    shifted.values = {1, 0, 0};
    CHECK_THROWS_AS(run_backtest(price, shifted, CostModel{}), DataError);
  }

  TEST_CASE("input validation") {
    const Signal one_day = make_series("p", "2013-01-01", {100.0});
    CHECK_THROWS_AS(run_backtest(one_day, preds_on(one_day, {}), CostModel{}), DataError);
    const Signal bad_price = make_series("p", "2013-01-01", {100.0, 0.0, 50.0});
    CHECK_THROWS_AS(run_backtest(bad_price, preds_on(bad_price, {0, 0}), CostModel{}), DataError);
    CHECK_THROWS_AS(Ledger{}.final_profit_pct(), DataError);
  }

  TEST_CASE("cost model bounds") {
    CHECK_NOTHROW(CostModel::flat(0.0).validate());
    CHECK_NOTHROW(CostModel::flat(0.05).validate());
    CHECK_THROWS_AS(CostModel::flat(0.0501).validate(), ConfigError);
    CHECK_THROWS_AS(CostModel::flat(-1e-9).validate(), ConfigError);
    CHECK_THROWS_AS((CostModel{0.01, 0.06}).validate(), ConfigError);
  }

  TEST_CASE("long-only suppresses shorts but still sells") {
    const Signal price = make_series("p", "2013-01-01", {100.0, 90.0, 80.0});
    const auto ledger = run_backtest(price, preds_on(price, {-1, -1}), CostModel{},
                                     TradeMode::long_only);
    for (const auto& row : ledger.rows) {
      CHECK(row.cr == 1.0);
      CHECK(row.action == TradeAction::hold);
    }

    const Signal price2 = make_series("p", "2013-01-01", {100.0, 110.0, 120.0});
    const auto sold =
        run_backtest(price2, preds_on(price2, {1, -1}), CostModel{}, TradeMode::long_only);
    CHECK(sold.rows[1].action == TradeAction::sell);
    CHECK(sold.rows[2].cr == doctest::Approx(1.1).epsilon(1e-14));
  }

  TEST_CASE("short-only suppresses buys") {
    const Signal price = make_series("p", "2013-01-01", {100.0, 150.0, 200.0});
    const auto ledger =
        run_backtest(price, preds_on(price, {1, 1}), CostModel{}, TradeMode::short_only);
    for (const auto& row : ledger.rows) CHECK(row.cr == 1.0);

    const Signal falling = make_series("p", "2013-01-01", {100.0, 90.0});
    const auto shorted =
        run_backtest(falling, preds_on(falling, {-1}), CostModel{}, TradeMode::short_only);
    CHECK(shorted.rows[1].cr == doctest::Approx(1.1).epsilon(1e-14));
  }

  TEST_CASE("forced close liquidates at each day's close") {
    const Signal price = make_series("p", "2013-01-01", {100.0, 110.0, 121.0});
    const auto forced =
        run_backtest(price, preds_on(price, {1, 0}), CostModel{}, TradeMode::forced_close);
    CHECK(forced.rows[1].cr == doctest::Approx(1.1).epsilon(1e-14));
    // position was closed at 110, so the second rally is missed
    CHECK(forced.rows[2].cr == doctest::Approx(1.1).epsilon(1e-14));
    CHECK(forced.rows[2].asset == 0.0);

    const auto held = run_backtest(price, preds_on(price, {1, 0}), CostModel{});
    CHECK(held.rows[2].cr == doctest::Approx(1.21).epsilon(1e-14));
  }

  TEST_CASE("full mode equals long-only when no short is ever opened") {
    const Signal price = make_series("p", "2013-01-01", {100.0, 104.0, 98.0, 95.0, 101.0, 99.0});
    const std::vector<int> preds{1, -1, 0, 1, -1};
    const auto full = run_backtest(price, preds_on(price, preds), CostModel::flat(0.002));
    const auto lo = run_backtest(price, preds_on(price, preds), CostModel::flat(0.002),
                                 TradeMode::long_only);
    REQUIRE(full.rows.size() == lo.rows.size());
    for (std::size_t t = 0; t < full.rows.size(); ++t) CHECK(full.rows[t].cr == lo.rows[t].cr);
  }

  TEST_CASE("a short into a doubling price goes bankrupt with a partial ledger") {
    const Signal price = make_series("p", "2013-01-01", {100.0, 201.0, 150.0});
    bool thrown = false;
    try {
      run_backtest(price, preds_on(price, {-1, 0}), CostModel{});
    } catch (const BankruptShortError& e) {
      thrown = true;
      REQUIRE(e.partial().rows.size() == 2);
      // 1 + 1 - 2.01 cash after settlement
      CHECK(e.partial().rows[1].cash == doctest::Approx(-0.01).epsilon(1e-9));
      CHECK(e.partial().rows[1].cr == doctest::Approx(-0.01).epsilon(1e-9));
      CHECK(e.kind() == ErrorKind::bankrupt_short);
    }
    CHECK(thrown);

    // just under the threshold survives with a deep loss
    const Signal near = make_series("p", "2013-01-01", {100.0, 199.0});
    const auto ledger = run_backtest(near, preds_on(near, {-1}), CostModel{});
    CHECK(ledger.rows[1].cr == doctest::Approx(0.01).epsilon(1e-9));
  }

  TEST_CASE("randomized agreement with the straight-line reference") {
    Rng rng(20240816);
    int bankrupts = 0;
    for (int rep = 0; rep < 300; ++rep) {
      const auto inst = random_instance(rng, rep >= 200);
      const auto oracle = oracle_backtest(inst.price.values, inst.pred_values, inst.costs.buy,
                                          inst.costs.sell, inst.mode);
      if (oracle.bankrupt) {
        ++bankrupts;
        try {
          run_backtest(inst.price, inst.preds, inst.costs, inst.mode);
          FAIL("expected bankrupt short on rep " << rep);
        } catch (const BankruptShortError& e) {
          check_matches_oracle(e.partial(), oracle);
        }
      } else {
        const auto ledger = run_backtest(inst.price, inst.preds, inst.costs, inst.mode);
        check_matches_oracle(ledger, oracle);
        REQUIRE(ledger.rows.size() == inst.price.size());
        for (std::size_t t = 0; t < ledger.rows.size(); ++t)
          CHECK(ledger.rows[t].date == inst.price.dates[t]);
        CHECK(ledger.rows.back().prediction == 0);
        CHECK(ledger.rows.back().action == TradeAction::hold);
      }
    }
    // the jump-prone block must actually exercise the bankrupt path
    CHECK(bankrupts > 0);
  }

  TEST_CASE("cost sweep is monotone non-increasing") {
    Rng rng(99);
    for (int rep = 0; rep < 20; ++rep) {
      const auto inst = random_instance(rng, false);
      const auto sweep = cost_sweep(inst.price, inst.preds, default_cost_grid(), inst.mode);
      REQUIRE(sweep.size() == 7);
      double prev = std::numeric_limits<double>::infinity();
      for (const auto& [c, profit] : sweep) {
        CHECK(profit <= prev + 1e-12);
        prev = profit;
      }
      CHECK(sweep.at(0.0) ==
            run_backtest(inst.price, inst.preds, CostModel{}, inst.mode).final_profit_pct());
    }
  }

  TEST_CASE("cost sweep validates its grid") {
    const Signal price = make_series("p", "2013-01-01", {100.0, 110.0});
    const auto preds = preds_on(price, {1});
    CHECK_THROWS_AS(cost_sweep(price, preds, {}, TradeMode::full), ConfigError);
    CHECK_THROWS_AS(cost_sweep(price, preds, {0.002, 0.001}, TradeMode::full), ConfigError);
    CHECK_THROWS_AS(cost_sweep(price, preds, {0.001, 0.001}, TradeMode::full), ConfigError);
  }

  TEST_CASE("default cost grid spans 0 to 0.3% in 5bp steps") {
    const std::vector<double> expected{0.0, 0.0005, 0.001, 0.0015, 0.002, 0.0025, 0.003};
    CHECK(default_cost_grid() == expected);
  }

  TEST_CASE("random trader ensemble is deterministic across thread counts") {
    const auto values = testutil::random_walk(60, 5);
    std::vector<double> prices(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) prices[i] = 100.0 * std::exp(values[i] / 20.0);
    const Signal price = make_series("p", "2013-01-01", prices);

    const auto a = monte_carlo_random(price, 25, CostModel::flat(0.001), 42, 1);
    const auto b = monte_carlo_random(price, 25, CostModel::flat(0.001), 42, 4);
    CHECK(a.mean_profit == b.mean_profit);
    CHECK(a.sd_profit == b.sd_profit);
    CHECK(a.final_profits == b.final_profits);
    CHECK(a.trader_mean_return == b.trader_mean_return);
    CHECK(a.trader_sd_return == b.trader_sd_return);

    const auto c = monte_carlo_random(price, 25, CostModel::flat(0.001), 43, 1);
    CHECK(a.final_profits != c.final_profits);
  }

  TEST_CASE("random trader summary matches per-trader recomputation") {
    const Signal price =
        make_series("p", "2013-01-01", {100.0, 102.0, 101.0, 104.0, 103.0, 106.0});
    const std::uint64_t seed = 7;
    const auto summary = monte_carlo_random(price, 10, CostModel::flat(0.002), seed, 2);
    REQUIRE(summary.n_traders == 10);
    REQUIRE(summary.dates == price.dates);
    REQUIRE(summary.final_profits.size() == 10);

    // trader i uses the i-th derived seed
    std::vector<std::vector<double>> profits;
    for (std::size_t i = 0; i < 10; ++i) {
      const auto preds = predict_random(price.dates, derive_seed(seed, i));
      const auto ledger = run_backtest(price, preds, CostModel::flat(0.002));
      profits.push_back(ledger.profit_pct());
      CHECK(summary.final_profits[i] == ledger.final_profit_pct());
      std::vector<double> r;
      const auto cr = ledger.cr();
      for (std::size_t t = 1; t < cr.size(); ++t) r.push_back((cr[t] - cr[t - 1]) / cr[t - 1]);
      CHECK(summary.trader_mean_return[i] == doctest::Approx(mean(r)).epsilon(1e-15));
      CHECK(summary.trader_sd_return[i] == doctest::Approx(sample_sd(r)).epsilon(1e-15));
    }
    for (std::size_t t = 0; t < price.size(); ++t) {
      std::vector<double> day;
      for (const auto& p : profits) day.push_back(p[t]);
      CHECK(summary.mean_profit[t] == doctest::Approx(mean(day)).epsilon(1e-12));
      CHECK(summary.sd_profit[t] == doctest::Approx(sample_sd(day)).epsilon(1e-12));
    }
    CHECK(summary.mean_profit[0] == 0.0);
    CHECK(summary.sd_profit[0] == 0.0);
  }

  TEST_CASE("random trader ensemble needs at least two traders") {
    const Signal price = make_series("p", "2013-01-01", {100.0, 101.0});
    CHECK_THROWS_AS(monte_carlo_random(price, 1, CostModel{}, 1), ConfigError);
    CHECK_THROWS_AS(monte_carlo_random(price, 0, CostModel{}, 1), ConfigError);
  }
}
