#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace sigtrade {

// Calendar day stored as a count of days since 1970-01-01 (UTC). All series
// in this library are day-granular; datetimes are truncated to their day.
class Date {
public:
  Date() = default;
  constexpr explicit Date(std::int32_t days_since_epoch) : days_(days_since_epoch) {}

  static Date from_ymd(int year, int month, int day);

  // Accepts "YYYY-MM-DD" and ISO-8601 datetimes extending it ("YYYY-MM-DDTHH:MM:SS",
  // optional fraction and zone designator, or a space instead of 'T'). Throws
  // DataError(parse) on anything else.
  static Date parse(std::string_view text);

  constexpr std::int32_t days() const { return days_; }
  std::string to_string() const;

  Date operator+(int n) const { return Date(days_ + n); }
  Date operator-(int n) const { return Date(days_ - n); }
  std::int32_t operator-(Date other) const { return days_ - other.days_; }
  Date& operator++() { ++days_; return *this; }

  auto operator<=>(const Date&) const = default;

private:
  std::int32_t days_ = 0;
};

}  // namespace sigtrade
