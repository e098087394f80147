#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "sigtrade/date.hpp"

namespace sigtrade {

// How align() treats calendar days missing from a signal inside the common window.
enum class GapPolicy { fail, forward_fill, drop };

GapPolicy gap_policy_from_string(const std::string& s);
const char* to_string(GapPolicy p);

// A named daily time series. Invariants (checked by validate()): dates strictly
// increasing, values finite, both vectors the same length.
struct Signal {
  std::string name;
  std::vector<Date> dates;
  std::vector<double> values;
  std::vector<std::string> transform_log;  // applied transforms, oldest first

  std::size_t size() const { return dates.size(); }
  bool empty() const { return dates.empty(); }
  Date first_date() const;
  Date last_date() const;

  // Index of d in dates, by binary search.
  std::optional<std::size_t> index_of(Date d) const;

  // Rows with from <= date <= to (inclusive). May be empty.
  Signal slice(Date from, Date to) const;

  void validate() const;
};

Signal make_signal(std::string name, std::vector<Date> dates, std::vector<double> values,
                   std::vector<std::string> transform_log = {});

// CSV with header "date,value"; dates ISO-8601 (datetimes truncated to the day).
// Values are written with 12 significant digits.
Signal load_signal_csv(const std::filesystem::path& path, const std::string& name);
void save_signal_csv(const Signal& signal, const std::filesystem::path& path);

// Restricts every signal to the intersection window [max first date, min last date]
// and reconciles missing days under the policy:
//   fail          error on any missing day,
//   forward_fill  carry the last observed value forward,
//   drop          keep only days present in every signal.
// The result is a set of signals sharing one date axis. Requires >= 2 signals.
std::vector<Signal> align(const std::vector<Signal>& signals, GapPolicy policy);

// Simple daily returns r_t = (p_t - p_{t-1}) / p_{t-1}; one row shorter than
// the price series. Prices must be strictly positive.
Signal compute_returns(const Signal& price, const std::string& name = "ret");

// Aligned signals plus the analysis/leave-out split. The analysis period is
// [first date, analysis_end]; the leave-out period is (analysis_end, leave_out_end].
class Panel {
public:
  Panel(std::vector<Signal> aligned, Date analysis_end, Date leave_out_end);

  const std::vector<Signal>& signals() const { return signals_; }
  const std::vector<Date>& dates() const { return signals_.front().dates; }
  std::size_t size() const { return signals_.front().size(); }
  std::size_t dim() const { return signals_.size(); }

  Date analysis_end() const { return analysis_end_; }
  Date leave_out_end() const { return leave_out_end_; }

  std::vector<std::string> names() const;
  const Signal& signal(const std::string& name) const;  // unknown_variable if absent
  bool has(const std::string& name) const;

  // Dates restricted to the analysis / leave-out period.
  std::vector<Date> analysis_dates() const;
  std::vector<Date> leave_out_dates() const;

  // Row-per-day matrix of the named variables (in the given order) over
  // [from, to]. Used as the estimation sample for model fitting.
  Eigen::MatrixXd matrix(const std::vector<std::string>& names, Date from, Date to) const;

private:
  std::vector<Signal> signals_;
  Date analysis_end_;
  Date leave_out_end_;
};

}  // namespace sigtrade
