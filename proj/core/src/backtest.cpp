#include "sigtrade/backtest.hpp"

#include <cmath>

#include "sigtrade/parallel.hpp"
#include "sigtrade/rng.hpp"
#include "sigtrade/stats.hpp"

namespace sigtrade {

void CostModel::validate() const {
  if (!(buy >= 0.0 && buy <= 0.05) || !(sell >= 0.0 && sell <= 0.05))
    throw ConfigError(ErrorKind::bad_config, "cost fractions must lie in [0, 0.05]");
}

const char* to_string(TradeMode m) {
  switch (m) {
    case TradeMode::full: return "full";
    case TradeMode::long_only: return "long_only";
    case TradeMode::short_only: return "short_only";
    case TradeMode::forced_close: return "forced_close";
  }
  return "?";
}

TradeMode trade_mode_from_string(const std::string& s) {
  if (s == "full") return TradeMode::full;
  if (s == "long_only") return TradeMode::long_only;
  if (s == "short_only") return TradeMode::short_only;
  if (s == "forced_close") return TradeMode::forced_close;
  throw ConfigError(ErrorKind::bad_config, "unknown trade mode '" + s + "'");
}

const char* to_string(TradeAction a) {
  switch (a) {
    case TradeAction::buy: return "buy";
    case TradeAction::sell: return "sell";
    case TradeAction::short_sale: return "short";
    case TradeAction::hold: return "hold";
  }
  return "?";
}

std::vector<double> Ledger::cr() const {
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(r.cr);
  return out;
}

std::vector<double> Ledger::profit_pct() const {
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(r.profit_pct);
  return out;
}

double Ledger::final_profit_pct() const {
  if (rows.empty()) throw DataError(ErrorKind::empty_input, "empty ledger");
  return rows.back().profit_pct;
}

Ledger run_backtest(const Signal& price, const PredictionSeries& predictions, CostModel costs,
                    TradeMode mode) {
  price.validate();
  predictions.validate();
  costs.validate();
  const std::size_t T = price.size();
  if (T < 2) throw DataError(ErrorKind::too_short, "backtest needs at least 2 price days");
  for (std::size_t i = 0; i < T; ++i)
    if (price.values[i] <= 0.0)
      throw DataError(ErrorKind::nonpositive_price,
                      "price is not positive on " + price.dates[i].to_string());
  // Predictions must sit on the price dates: all T days (final value unused,
  // the loop stops at T-1) or exactly the first T-1.
  const std::size_t np = predictions.size();
  if (np != T && np != T - 1)
    throw DataError(ErrorKind::misaligned, "predictions must cover the price days (or all but "
                                           "the last); got " + std::to_string(np) + " of " +
                                               std::to_string(T));
  for (std::size_t i = 0; i < np; ++i)
    if (predictions.dates[i] != price.dates[i])
      throw DataError(ErrorKind::misaligned,
                      "prediction date " + predictions.dates[i].to_string() +
                          " does not match price date " + price.dates[i].to_string());

  const double c_b = costs.buy;
  const double c_s = costs.sell;
  const std::vector<double>& p = price.values;

  Ledger ledger;
  ledger.rows.resize(T);
  double nUSD = 1.0;
  double nBTC = 0.0;
  ledger.rows[0].date = price.dates[0];
  ledger.rows[0].cr = 1.0;
  ledger.rows[0].profit_pct = 0.0;

  for (std::size_t t = 0; t + 1 < T; ++t) {
    const int pred = t < np ? predictions.values[t] : 0;
    TradeAction action = TradeAction::hold;
    bool bankrupt = false;

    if (pred == 1 && nBTC == 0.0 && mode != TradeMode::short_only) {
      nBTC = nUSD * (1.0 - c_b) / p[t];
      nUSD = 0.0;
      action = TradeAction::buy;
    } else if (pred == -1 && nBTC > 0.0) {
      nUSD = nBTC * (1.0 - c_s) * p[t];
      nBTC = 0.0;
      action = TradeAction::sell;
    } else if (pred == -1 && nBTC == 0.0 &&
               (mode == TradeMode::full || mode == TradeMode::short_only ||
                mode == TradeMode::forced_close)) {
      // One-day short: open at p[t], settle at p[t+1] within this step.
      const double nBTCb = nUSD / p[t];
      nUSD = nUSD + nBTCb * (1.0 - c_s) * p[t] - nBTCb * p[t + 1] / (1.0 - c_b);
      action = TradeAction::short_sale;
      if (nUSD < 0.0) bankrupt = true;
    }

    const double cr = nUSD + nBTC * p[t + 1] * (1.0 - c_s);

    ledger.rows[t].prediction = pred;
    ledger.rows[t].action = action;
    ledger.rows[t].cash = nUSD;
    ledger.rows[t].asset = nBTC;

    ledger.rows[t + 1].date = price.dates[t + 1];
    ledger.rows[t + 1].cr = cr;
    ledger.rows[t + 1].profit_pct = (cr - 1.0) * 100.0;

    if (bankrupt) {
      ledger.rows.resize(t + 2);
      ledger.rows[t + 1].cash = nUSD;
      ledger.rows[t + 1].asset = nBTC;
      throw BankruptShortError("short settlement on " + price.dates[t].to_string() +
                                   " drove cash below zero",
                               std::move(ledger));
    }

    if (mode == TradeMode::forced_close && nBTC > 0.0) {
      // Liquidate at the close; realizes exactly the marked value.
      nUSD = nUSD + nBTC * (1.0 - c_s) * p[t + 1];
      nBTC = 0.0;
    }
  }

  ledger.rows[T - 1].prediction = 0;
  ledger.rows[T - 1].action = TradeAction::hold;
  ledger.rows[T - 1].cash = nUSD;
  ledger.rows[T - 1].asset = nBTC;
  return ledger;
}

std::vector<double> default_cost_grid() {
  return {0.0, 0.0005, 0.001, 0.0015, 0.002, 0.0025, 0.003};
}

std::map<double, double> cost_sweep(const Signal& price, const PredictionSeries& predictions,
                                    const std::vector<double>& costs, TradeMode mode) {
  if (costs.empty()) throw ConfigError(ErrorKind::bad_config, "cost grid is empty");
  for (std::size_t i = 1; i < costs.size(); ++i)
    if (!(costs[i - 1] < costs[i]))
      throw ConfigError(ErrorKind::bad_config, "cost grid must be sorted ascending");
  std::map<double, double> out;
  for (double c : costs)
    out[c] = run_backtest(price, predictions, CostModel::flat(c), mode).final_profit_pct();
  return out;
}

RandomTraderSummary monte_carlo_random(const Signal& price, int n_traders, CostModel costs,
                                       std::uint64_t seed, int threads) {
  if (n_traders < 2)
    throw ConfigError(ErrorKind::bad_config, "monte carlo needs at least 2 traders");
  const std::size_t T = price.size();

  std::vector<std::vector<double>> profits(static_cast<std::size_t>(n_traders));
  std::vector<double> finals(static_cast<std::size_t>(n_traders));
  std::vector<double> mu(static_cast<std::size_t>(n_traders));
  std::vector<double> sd(static_cast<std::size_t>(n_traders));

  parallel_for(static_cast<std::size_t>(n_traders), threads, [&](std::size_t i) {
    const auto preds = predict_random(price.dates, derive_seed(seed, i));
    const Ledger ledger = run_backtest(price, preds, costs, TradeMode::full);
    profits[i] = ledger.profit_pct();
    finals[i] = ledger.final_profit_pct();
    std::vector<double> r(ledger.rows.size() - 1);
    for (std::size_t t = 1; t < ledger.rows.size(); ++t)
      r[t - 1] = (ledger.rows[t].cr - ledger.rows[t - 1].cr) / ledger.rows[t - 1].cr;
    mu[i] = mean(r);
    sd[i] = r.size() >= 2 ? sample_sd(r) : 0.0;
  });

  RandomTraderSummary out;
  out.n_traders = n_traders;
  out.dates = price.dates;
  out.final_profits = std::move(finals);
  out.trader_mean_return = std::move(mu);
  out.trader_sd_return = std::move(sd);
  out.mean_profit.resize(T);
  out.sd_profit.resize(T);
  std::vector<double> day(static_cast<std::size_t>(n_traders));
  for (std::size_t t = 0; t < T; ++t) {
    for (std::size_t i = 0; i < static_cast<std::size_t>(n_traders); ++i) day[i] = profits[i][t];
    out.mean_profit[t] = mean(day);
    out.sd_profit[t] = sample_sd(day);
  }
  return out;
}

}  // namespace sigtrade
