#pragma once

#include <stdexcept>
#include <string>

namespace sigtrade {

// Machine-checkable failure cause. The category class decides the process
// exit code; the kind pins down which contract was violated.
enum class ErrorKind {
  io,
  parse,
  duplicate_date,
  unsorted_dates,
  non_finite,
  empty_input,
  too_short,
  empty_intersection,
  gap,
  nonpositive_price,
  zero_variance,
  rank_deficient,
  not_positive_definite,
  insufficient_data,
  insufficient_history,
  unknown_variable,
  misaligned,
  malformed_stem,
  wrong_lexicon_kind,
  empty_day,
  bankrupt_short,
  non_convergence,
  too_many_failures,
  bad_config,
  precondition,
};

const char* to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }
  virtual int exit_code() const noexcept { return 1; }

private:
  ErrorKind kind_;
};

// Bad configuration, bad CLI usage, malformed config files. Exit code 2.
class ConfigError : public Error {
public:
  using Error::Error;
  int exit_code() const noexcept override { return 2; }
};

// Malformed or contract-violating input data. Exit code 3.
class DataError : public Error {
public:
  using Error::Error;
  int exit_code() const noexcept override { return 3; }
};

// Numerical failure: rank deficiency, non-convergence, degenerate samples.
// Exit code 4.
class NumericError : public Error {
public:
  using Error::Error;
  int exit_code() const noexcept override { return 4; }
};

}  // namespace sigtrade
