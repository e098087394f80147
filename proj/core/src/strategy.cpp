#include "sigtrade/strategy.hpp"

#include <algorithm>

#include "sigtrade/errors.hpp"
#include "sigtrade/rng.hpp"

namespace sigtrade {

namespace {

int sign_of(double v) { return v > 0.0 ? 1 : (v < 0.0 ? -1 : 0); }

// Index of `d` in y, throwing the history error when absent or when fewer
// than `need_before` observations precede it.
std::size_t history_index(const Signal& y, Date d, std::size_t need_before) {
  const auto idx = y.index_of(d);
  if (!idx)
    throw DataError(ErrorKind::insufficient_history,
                    "signal '" + y.name + "' has no value on " + d.to_string());
  if (*idx < need_before)
    throw DataError(ErrorKind::insufficient_history,
                    "signal '" + y.name + "' has fewer than " + std::to_string(need_before) +
                        " observations before " + d.to_string());
  return *idx;
}

}  // namespace

void PredictionSeries::validate() const {
  if (dates.size() != values.size())
    throw DataError(ErrorKind::misaligned, "prediction dates and values differ in length");
  for (std::size_t i = 0; i < dates.size(); ++i) {
    if (i > 0 && !(dates[i - 1] < dates[i]))
      throw DataError(ErrorKind::unsorted_dates, "prediction dates are not increasing");
    if (values[i] < -1 || values[i] > 1)
      throw DataError(ErrorKind::parse, "prediction values must be -1, 0, or +1");
  }
}

const char* to_string(StrategyKind k) {
  switch (k) {
    case StrategyKind::signal: return "signal";
    case StrategyKind::combined: return "combined";
    case StrategyKind::momentum: return "momentum";
    case StrategyKind::upd: return "upd";
    case StrategyKind::rsi: return "rsi";
    case StrategyKind::random: return "random";
    case StrategyKind::buy_and_hold: return "buy_and_hold";
  }
  return "?";
}

StrategyKind strategy_kind_from_string(const std::string& s) {
  if (s == "signal") return StrategyKind::signal;
  if (s == "combined") return StrategyKind::combined;
  if (s == "momentum") return StrategyKind::momentum;
  if (s == "upd") return StrategyKind::upd;
  if (s == "rsi") return StrategyKind::rsi;
  if (s == "random") return StrategyKind::random;
  if (s == "buy_and_hold") return StrategyKind::buy_and_hold;
  throw ConfigError(ErrorKind::bad_config, "unknown strategy kind '" + s + "'");
}

std::string StrategySpec::name() const {
  switch (kind) {
    case StrategyKind::signal:
      return signal_name + (sign >= 0 ? "_pos" : "_neg");
    case StrategyKind::combined:
      return "combined";
    default:
      return to_string(kind);
  }
}

PredictionSeries predict_signal(const Signal& y, int sign, std::span<const Date> eval_dates,
                                int extra_lag) {
  if (sign != 1 && sign != -1)
    throw ConfigError(ErrorKind::bad_config, "predictor sign must be +1 or -1");
  if (extra_lag < 0) throw ConfigError(ErrorKind::bad_config, "extra_lag must be nonnegative");
  PredictionSeries out;
  out.dates.assign(eval_dates.begin(), eval_dates.end());
  out.values.reserve(eval_dates.size());
  const auto lag = static_cast<std::size_t>(extra_lag);
  for (Date d : eval_dates) {
    const std::size_t t = history_index(y, d, lag + 1);
    const double change = y.values[t - lag] - y.values[t - lag - 1];
    out.values.push_back(sign_of(static_cast<double>(sign) * change));
  }
  return out;
}

PredictionSeries predict_combined(const std::vector<PredictionSeries>& members) {
  if (members.empty())
    throw ConfigError(ErrorKind::bad_config, "combined strategy needs at least one member");
  for (const auto& m : members)
    if (m.dates != members.front().dates)
      throw DataError(ErrorKind::misaligned, "combined members do not share dates");
  PredictionSeries out;
  out.dates = members.front().dates;
  out.values.reserve(out.dates.size());
  for (std::size_t i = 0; i < out.dates.size(); ++i) {
    int s = 0;
    for (const auto& m : members) s += m.values[i];
    out.values.push_back(sign_of(static_cast<double>(s)));
  }
  return out;
}

PredictionSeries predict_momentum(const Signal& price, std::span<const Date> eval_dates) {
  PredictionSeries out;
  out.dates.assign(eval_dates.begin(), eval_dates.end());
  out.values.reserve(eval_dates.size());
  for (Date d : eval_dates) {
    const std::size_t t = history_index(price, d, 1);
    out.values.push_back(sign_of(price.values[t] - price.values[t - 1]));
  }
  return out;
}

PredictionSeries predict_upd(const Signal& price, std::span<const Date> eval_dates) {
  PredictionSeries out = predict_momentum(price, eval_dates);
  for (int& v : out.values) v = -v;
  return out;
}

PredictionSeries predict_rsi(const Signal& price, std::span<const Date> eval_dates, int window,
                             double hi, double lo) {
  if (window < 2) throw ConfigError(ErrorKind::bad_config, "rsi window must be at least 2");
  if (!(lo <= hi)) throw ConfigError(ErrorKind::bad_config, "rsi thresholds must satisfy lo <= hi");
  PredictionSeries out;
  out.dates.assign(eval_dates.begin(), eval_dates.end());
  out.values.reserve(eval_dates.size());
  const auto w = static_cast<std::size_t>(window);
  for (Date d : eval_dates) {
    const std::size_t t = history_index(price, d, w);
    int ups = 0;
    for (std::size_t s = 0; s < w; ++s)
      if (price.values[t - s] > price.values[t - s - 1]) ++ups;
    const double u = static_cast<double>(ups) / static_cast<double>(window);
    out.values.push_back(u >= hi ? -1 : (u <= lo ? 1 : 0));
  }
  return out;
}

PredictionSeries predict_random(std::span<const Date> dates, std::uint64_t seed) {
  PredictionSeries out;
  out.dates.assign(dates.begin(), dates.end());
  out.values.reserve(dates.size());
  Rng rng(seed);
  for (std::size_t i = 0; i < dates.size(); ++i) out.values.push_back(rng.sign());
  return out;
}

PredictionSeries predict_buy_and_hold(std::span<const Date> dates) {
  PredictionSeries out;
  out.dates.assign(dates.begin(), dates.end());
  out.values.assign(dates.size(), 0);
  if (!out.values.empty()) out.values.front() = 1;
  return out;
}

PredictionSeries predict(const StrategySpec& spec, const Panel& panel,
                         std::span<const Date> eval_dates) {
  switch (spec.kind) {
    case StrategyKind::signal:
      return predict_signal(panel.signal(spec.signal_name), spec.sign, eval_dates, spec.extra_lag);
    case StrategyKind::combined: {
      std::vector<PredictionSeries> members;
      members.reserve(spec.members.size());
      for (const auto& m : spec.members) members.push_back(predict(m, panel, eval_dates));
      return predict_combined(members);
    }
    case StrategyKind::momentum:
      return predict_momentum(panel.signal(spec.signal_name), eval_dates);
    case StrategyKind::upd:
      return predict_upd(panel.signal(spec.signal_name), eval_dates);
    case StrategyKind::rsi:
      return predict_rsi(panel.signal(spec.signal_name), eval_dates, spec.window, spec.rsi_hi,
                         spec.rsi_lo);
    case StrategyKind::random:
      return predict_random(eval_dates, spec.seed);
    case StrategyKind::buy_and_hold:
      return predict_buy_and_hold(eval_dates);
  }
  throw ConfigError(ErrorKind::bad_config, "unhandled strategy kind");
}

}  // namespace sigtrade
