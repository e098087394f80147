#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "sigtrade/date.hpp"
#include "sigtrade/signal.hpp"

namespace sigtrade {

// Daily position predictions: +1 long, -1 short/exit, 0 keep the previous
// position. Value at a date may use information up to that date only.
struct PredictionSeries {
  std::vector<Date> dates;
  std::vector<int> values;

  std::size_t size() const { return dates.size(); }
  void validate() const;  // values in {-1,0,+1}, dates strictly increasing
};

enum class StrategyKind { signal, combined, momentum, upd, rsi, random, buy_and_hold };
const char* to_string(StrategyKind k);
StrategyKind strategy_kind_from_string(const std::string& s);

// Declarative description of one predictor; `members` is used by the combined
// kind, the other fields by the kind they name.
struct StrategySpec {
  StrategyKind kind = StrategyKind::buy_and_hold;
  std::string signal_name;                // signal kind; price series for momentum/upd/rsi
  int sign = 1;                           // signal kind: s_Y
  std::vector<StrategySpec> members;      // combined kind, >= 1
  int window = 5;                         // rsi kind, >= 2
  double rsi_hi = 0.7;
  double rsi_lo = 0.3;
  std::uint64_t seed = 0;                 // random kind
  int extra_lag = 0;                      // signal kind: publication delay in days

  std::string name() const;
};

// Change-sign predictor: prediction(t) = sign(s * (y(t-L) - y(t-1-L))) with
// L = extra_lag; exact ties give 0. The signal must cover every evaluation
// date shifted back by L plus one day of history.
PredictionSeries predict_signal(const Signal& y, int sign, std::span<const Date> eval_dates,
                                int extra_lag = 0);

// Majority vote: sign of the member sum per day. Members must share dates.
PredictionSeries predict_combined(const std::vector<PredictionSeries>& members);

// prediction(t) = sign(p(t) - p(t-1)).
PredictionSeries predict_momentum(const Signal& price, std::span<const Date> eval_dates);

// Contrarian: the negation of the momentum prediction.
PredictionSeries predict_upd(const Signal& price, std::span<const Date> eval_dates);

// Reversal on the up-day fraction U(t) of the last `window` daily changes:
// -1 when U >= hi, +1 when U <= lo, else 0.
PredictionSeries predict_rsi(const Signal& price, std::span<const Date> eval_dates, int window = 5,
                             double hi = 0.7, double lo = 0.3);

// iid fair-coin positions, deterministic per seed.
PredictionSeries predict_random(std::span<const Date> dates, std::uint64_t seed);

// +1 on the first day, 0 afterwards.
PredictionSeries predict_buy_and_hold(std::span<const Date> dates);

// Dispatch on spec.kind; signal predictors read raw levels from the panel.
PredictionSeries predict(const StrategySpec& spec, const Panel& panel,
                         std::span<const Date> eval_dates);

}  // namespace sigtrade
