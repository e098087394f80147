#include "sigtrade/date.hpp"

#include <cctype>
#include <charconv>
#include <chrono>

#include "sigtrade/errors.hpp"

namespace sigtrade {

namespace {

[[noreturn]] void bad_date(std::string_view text) {
  throw DataError(ErrorKind::parse, "invalid date: '" + std::string(text) + "'");
}

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s)
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  return true;
}

int to_int(std::string_view s) {
  int v = 0;
  std::from_chars(s.data(), s.data() + s.size(), v);
  return v;
}

}  // namespace

Date Date::from_ymd(int year, int month, int day) {
  using namespace std::chrono;
  year_month_day ymd{std::chrono::year(year), std::chrono::month(static_cast<unsigned>(month)),
                     std::chrono::day(static_cast<unsigned>(day))};
  if (!ymd.ok())
    throw DataError(ErrorKind::parse, "invalid calendar day: " + std::to_string(year) + "-" +
                                          std::to_string(month) + "-" + std::to_string(day));
  return Date(static_cast<std::int32_t>(sys_days(ymd).time_since_epoch().count()));
}

Date Date::parse(std::string_view text) {
  if (text.size() < 10) bad_date(text);
  if (text[4] != '-' || text[7] != '-') bad_date(text);
  std::string_view y = text.substr(0, 4), m = text.substr(5, 2), d = text.substr(8, 2);
  if (!all_digits(y) || !all_digits(m) || !all_digits(d)) bad_date(text);
  if (text.size() > 10) {
    // Only a time-of-day continuation is tolerated; it is truncated away.
    char sep = text[10];
    if (sep != 'T' && sep != 't' && sep != ' ') bad_date(text);
    if (text.size() == 11) bad_date(text);
  }
  return from_ymd(to_int(y), to_int(m), to_int(d));
}

std::string Date::to_string() const {
  using namespace std::chrono;
  year_month_day ymd{sys_days(std::chrono::days(days_))};
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
  return buf;
}

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::io: return "io";
    case ErrorKind::parse: return "parse";
    case ErrorKind::duplicate_date: return "duplicate_date";
    case ErrorKind::unsorted_dates: return "unsorted_dates";
    case ErrorKind::non_finite: return "non_finite";
    case ErrorKind::empty_input: return "empty_input";
    case ErrorKind::too_short: return "too_short";
    case ErrorKind::empty_intersection: return "empty_intersection";
    case ErrorKind::gap: return "gap";
    case ErrorKind::nonpositive_price: return "nonpositive_price";
    case ErrorKind::zero_variance: return "zero_variance";
    case ErrorKind::rank_deficient: return "rank_deficient";
    case ErrorKind::not_positive_definite: return "not_positive_definite";
    case ErrorKind::insufficient_data: return "insufficient_data";
    case ErrorKind::insufficient_history: return "insufficient_history";
    case ErrorKind::unknown_variable: return "unknown_variable";
    case ErrorKind::misaligned: return "misaligned";
    case ErrorKind::malformed_stem: return "malformed_stem";
    case ErrorKind::wrong_lexicon_kind: return "wrong_lexicon_kind";
    case ErrorKind::empty_day: return "empty_day";
    case ErrorKind::bankrupt_short: return "bankrupt_short";
    case ErrorKind::non_convergence: return "non_convergence";
    case ErrorKind::too_many_failures: return "too_many_failures";
    case ErrorKind::bad_config: return "bad_config";
    case ErrorKind::precondition: return "precondition";
  }
  return "unknown";
}

}  // namespace sigtrade
