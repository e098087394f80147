#include "sigtrade/signal.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "sigtrade/errors.hpp"
#include "sigtrade/serialize.hpp"

namespace sigtrade {

GapPolicy gap_policy_from_string(const std::string& s) {
  if (s == "fail") return GapPolicy::fail;
  if (s == "forward_fill") return GapPolicy::forward_fill;
  if (s == "drop") return GapPolicy::drop;
  throw ConfigError(ErrorKind::bad_config, "unknown gap policy '" + s + "'");
}

const char* to_string(GapPolicy p) {
  switch (p) {
    case GapPolicy::fail: return "fail";
    case GapPolicy::forward_fill: return "forward_fill";
    case GapPolicy::drop: return "drop";
  }
  return "?";
}

Date Signal::first_date() const {
  if (empty()) throw DataError(ErrorKind::empty_input, "signal '" + name + "' is empty");
  return dates.front();
}

Date Signal::last_date() const {
  if (empty()) throw DataError(ErrorKind::empty_input, "signal '" + name + "' is empty");
  return dates.back();
}

std::optional<std::size_t> Signal::index_of(Date d) const {
  auto it = std::lower_bound(dates.begin(), dates.end(), d);
  if (it == dates.end() || *it != d) return std::nullopt;
  return static_cast<std::size_t>(it - dates.begin());
}

Signal Signal::slice(Date from, Date to) const {
  auto lo = std::lower_bound(dates.begin(), dates.end(), from);
  auto hi = std::upper_bound(dates.begin(), dates.end(), to);
  Signal out;
  out.name = name;
  out.transform_log = transform_log;
  out.dates.assign(lo, hi);
  out.values.assign(values.begin() + (lo - dates.begin()), values.begin() + (hi - dates.begin()));
  return out;
}

void Signal::validate() const {
  if (dates.size() != values.size())
    throw DataError(ErrorKind::misaligned,
                    "signal '" + name + "': dates and values differ in length");
  for (std::size_t i = 0; i < dates.size(); ++i) {
    if (i > 0 && !(dates[i - 1] < dates[i])) {
      const auto kind =
          dates[i - 1] == dates[i] ? ErrorKind::duplicate_date : ErrorKind::unsorted_dates;
      throw DataError(kind, "signal '" + name + "': date " + dates[i].to_string() +
                                " at row " + std::to_string(i) + " is not increasing");
    }
    if (!std::isfinite(values[i]))
      throw DataError(ErrorKind::non_finite, "signal '" + name + "': non-finite value on " +
                                                 dates[i].to_string());
  }
}

Signal make_signal(std::string name, std::vector<Date> dates, std::vector<double> values,
                   std::vector<std::string> transform_log) {
  Signal s{std::move(name), std::move(dates), std::move(values), std::move(transform_log)};
  s.validate();
  return s;
}

Signal load_signal_csv(const std::filesystem::path& path, const std::string& name) {
  std::ifstream in(path);
  if (!in) throw DataError(ErrorKind::io, "cannot open '" + path.string() + "'");
  Signal s;
  s.name = name;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (lineno == 1 && line.rfind("date", 0) == 0) continue;  // header
    const auto comma = line.find(',');
    if (comma == std::string::npos)
      throw DataError(ErrorKind::parse, path.string() + ":" + std::to_string(lineno) +
                                            ": expected 'date,value'");
    Date d = Date::parse(std::string_view(line).substr(0, comma));
    const std::string num = line.substr(comma + 1);
    char* end = nullptr;
    const double v = std::strtod(num.c_str(), &end);
    if (end == num.c_str() || *end != '\0')
      throw DataError(ErrorKind::parse,
                      path.string() + ":" + std::to_string(lineno) + ": bad value '" + num + "'");
    if (!std::isfinite(v))
      throw DataError(ErrorKind::non_finite,
                      path.string() + ":" + std::to_string(lineno) + ": non-finite value");
    if (!s.dates.empty() && !(s.dates.back() < d)) {
      const auto kind =
          s.dates.back() == d ? ErrorKind::duplicate_date : ErrorKind::unsorted_dates;
      throw DataError(kind, path.string() + ":" + std::to_string(lineno) +
                                ": date " + d.to_string() + " is not increasing");
    }
    s.dates.push_back(d);
    s.values.push_back(v);
  }
  if (s.empty()) throw DataError(ErrorKind::empty_input, path.string() + ": no data rows");
  return s;
}

void save_signal_csv(const Signal& signal, const std::filesystem::path& path) {
  std::ostringstream out;
  out << "date,value\n";
  for (std::size_t i = 0; i < signal.size(); ++i)
    out << signal.dates[i].to_string() << ',' << format_double(signal.values[i]) << '\n';
  write_file_atomic(path, out.str());
}

std::vector<Signal> align(const std::vector<Signal>& signals, GapPolicy policy) {
  if (signals.size() < 2)
    throw DataError(ErrorKind::precondition, "align requires at least 2 signals");
  for (const auto& s : signals) s.validate();

  Date start = signals.front().first_date();
  Date end = signals.front().last_date();
  for (const auto& s : signals) {
    start = std::max(start, s.first_date());
    end = std::min(end, s.last_date());
  }
  if (end < start)
    throw DataError(ErrorKind::empty_intersection, "signals share no common date window");

  std::vector<Date> axis;
  if (policy == GapPolicy::drop) {
    // Keep days present in every signal.
    for (Date d = start; d <= end; ++d) {
      bool everywhere = true;
      for (const auto& s : signals)
        if (!s.index_of(d)) {
          everywhere = false;
          break;
        }
      if (everywhere) axis.push_back(d);
    }
    if (axis.empty())
      throw DataError(ErrorKind::empty_intersection, "no day is present in every signal");
  } else {
    for (Date d = start; d <= end; ++d) axis.push_back(d);
  }

  std::vector<Signal> out;
  out.reserve(signals.size());
  for (const auto& s : signals) {
    Signal a;
    a.name = s.name;
    a.transform_log = s.transform_log;
    a.dates = axis;
    a.values.reserve(axis.size());
    std::size_t cursor = 0;  // s.dates is sorted and axis is increasing
    for (Date d : axis) {
      while (cursor < s.size() && s.dates[cursor] < d) ++cursor;
      if (cursor < s.size() && s.dates[cursor] == d) {
        a.values.push_back(s.values[cursor]);
      } else if (policy == GapPolicy::forward_fill) {
        // cursor > 0 because d >= start >= s.first_date().
        a.values.push_back(s.values[cursor - 1]);
      } else {
        throw DataError(ErrorKind::gap,
                        "signal '" + s.name + "' has no value on " + d.to_string());
      }
    }
    out.push_back(std::move(a));
  }
  return out;
}

Signal compute_returns(const Signal& price, const std::string& name) {
  price.validate();
  if (price.size() < 2)
    throw DataError(ErrorKind::too_short, "returns need at least 2 price observations");
  for (std::size_t i = 0; i < price.size(); ++i)
    if (price.values[i] <= 0.0)
      throw DataError(ErrorKind::nonpositive_price,
                      "price '" + price.name + "' is not positive on " +
                          price.dates[i].to_string());
  Signal r;
  r.name = name;
  r.transform_log = {"returns"};
  r.dates.assign(price.dates.begin() + 1, price.dates.end());
  r.values.resize(price.size() - 1);
  for (std::size_t i = 1; i < price.size(); ++i)
    r.values[i - 1] = (price.values[i] - price.values[i - 1]) / price.values[i - 1];
  return r;
}

Panel::Panel(std::vector<Signal> aligned, Date analysis_end, Date leave_out_end)
    : signals_(std::move(aligned)), analysis_end_(analysis_end), leave_out_end_(leave_out_end) {
  if (signals_.empty()) throw DataError(ErrorKind::empty_input, "panel has no signals");
  for (const auto& s : signals_) {
    s.validate();
    if (s.dates != signals_.front().dates)
      throw DataError(ErrorKind::misaligned,
                      "panel signal '" + s.name + "' is not on the shared date axis");
  }
  for (std::size_t i = 0; i < signals_.size(); ++i)
    for (std::size_t j = i + 1; j < signals_.size(); ++j)
      if (signals_[i].name == signals_[j].name)
        throw DataError(ErrorKind::duplicate_date,
                        "panel has two signals named '" + signals_[i].name + "'");
  const Date first = signals_.front().first_date();
  const Date last = signals_.front().last_date();
  if (!(first <= analysis_end_ && analysis_end_ < leave_out_end_ && leave_out_end_ <= last))
    throw ConfigError(ErrorKind::bad_config,
                      "split dates must satisfy first <= analysis_end < leave_out_end <= last "
                      "(have " + first.to_string() + " / " + analysis_end_.to_string() + " / " +
                          leave_out_end_.to_string() + " / " + last.to_string() + ")");
}

std::vector<std::string> Panel::names() const {
  std::vector<std::string> out;
  out.reserve(signals_.size());
  for (const auto& s : signals_) out.push_back(s.name);
  return out;
}

const Signal& Panel::signal(const std::string& name) const {
  for (const auto& s : signals_)
    if (s.name == name) return s;
  throw DataError(ErrorKind::unknown_variable, "panel has no signal '" + name + "'");
}

bool Panel::has(const std::string& name) const {
  for (const auto& s : signals_)
    if (s.name == name) return true;
  return false;
}

std::vector<Date> Panel::analysis_dates() const {
  std::vector<Date> out;
  for (Date d : dates())
    if (d <= analysis_end_) out.push_back(d);
  return out;
}

std::vector<Date> Panel::leave_out_dates() const {
  std::vector<Date> out;
  for (Date d : dates())
    if (analysis_end_ < d && d <= leave_out_end_) out.push_back(d);
  return out;
}

Eigen::MatrixXd Panel::matrix(const std::vector<std::string>& names, Date from, Date to) const {
  const auto& axis = dates();
  auto lo = std::lower_bound(axis.begin(), axis.end(), from);
  auto hi = std::upper_bound(axis.begin(), axis.end(), to);
  const auto rows = static_cast<Eigen::Index>(hi - lo);
  const auto offset = static_cast<std::size_t>(lo - axis.begin());
  Eigen::MatrixXd m(rows, static_cast<Eigen::Index>(names.size()));
  for (std::size_t j = 0; j < names.size(); ++j) {
    const Signal& s = signal(names[j]);
    for (Eigen::Index i = 0; i < rows; ++i)
      m(i, static_cast<Eigen::Index>(j)) = s.values[offset + static_cast<std::size_t>(i)];
  }
  return m;
}

}  // namespace sigtrade
