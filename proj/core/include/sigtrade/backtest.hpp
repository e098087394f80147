#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "sigtrade/errors.hpp"
#include "sigtrade/signal.hpp"
#include "sigtrade/strategy.hpp"

namespace sigtrade {

// Proportional transaction costs as fractions of exchanged capital.
struct CostModel {
  double buy = 0.0;   // c_b
  double sell = 0.0;  // c_s

  static CostModel flat(double c) { return CostModel{c, c}; }
  void validate() const;  // both within [0, 0.05]
};

enum class TradeMode { full, long_only, short_only, forced_close };
const char* to_string(TradeMode m);
TradeMode trade_mode_from_string(const std::string& s);

enum class TradeAction { buy, sell, short_sale, hold };
const char* to_string(TradeAction a);

struct LedgerRow {
  Date date;
  int prediction = 0;       // as consumed on this day (0 on the last day)
  TradeAction action = TradeAction::hold;
  double cash = 0.0;        // nUSD after the day's trade
  double asset = 0.0;       // nBTC after the day's trade
  double cr = 1.0;          // cumulative capital C(t)/C(0), marked to market
  double profit_pct = 0.0;  // (cr - 1) * 100
};

struct Ledger {
  std::vector<LedgerRow> rows;

  std::vector<double> cr() const;
  std::vector<double> profit_pct() const;
  double final_profit_pct() const;
};

// Short settlement losing more cash than the trader holds. Carries the rows
// completed before the halt.
class BankruptShortError : public NumericError {
public:
  BankruptShortError(std::string message, Ledger partial)
      : NumericError(ErrorKind::bankrupt_short, std::move(message)),
        partial_(std::move(partial)) {}
  const Ledger& partial() const { return partial_; }

private:
  Ledger partial_;
};

// Trading simulation over daily prices. Day t in 1..T-1 consumes prediction(t):
//   +1 with no position  -> buy all-in at p(t) paying c_b;
//   -1 with a position   -> sell all at p(t) paying c_s;
//   -1 with no position  -> one-day short: sell nUSD/p(t) units at p(t) paying
//                           c_s, buy them back at p(t+1) grossed up by c_b;
//   otherwise            -> hold.
// After the trade, capital is marked to market: CR(t+1) = nUSD + nBTC p(t+1) (1-c_s).
// Modes: long_only suppresses the short branch, short_only the buy branch, and
// forced_close liquidates any open position at each day's close.
// Predictions must sit on the price dates, either all T days (the last value
// is ignored) or the first T-1.
Ledger run_backtest(const Signal& price, const PredictionSeries& predictions, CostModel costs,
                    TradeMode mode = TradeMode::full);

// One backtest per cost level c (c_b = c_s = c), identical predictions.
// Returns c -> final profit percent. Costs must be sorted ascending.
std::map<double, double> cost_sweep(const Signal& price, const PredictionSeries& predictions,
                                    const std::vector<double>& costs,
                                    TradeMode mode = TradeMode::full);

// Default sweep grid 0..0.3% in 0.05% steps.
std::vector<double> default_cost_grid();

struct RandomTraderSummary {
  std::vector<Date> dates;          // every ledger day
  std::vector<double> mean_profit;  // across traders, per day (percent)
  std::vector<double> sd_profit;    // sample sd across traders, per day
  std::vector<double> final_profits;
  std::vector<double> trader_mean_return;  // per trader: mean daily return
  std::vector<double> trader_sd_return;    // per trader: sample sd of daily returns
  int n_traders = 0;
};

// n_traders independent random-prediction backtests with per-trader derived
// seeds; deterministic for any thread count.
RandomTraderSummary monte_carlo_random(const Signal& price, int n_traders, CostModel costs,
                                       std::uint64_t seed, int threads = 0);

}  // namespace sigtrade
