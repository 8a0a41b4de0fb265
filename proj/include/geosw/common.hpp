#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace geosw {

/// Violated precondition or malformed input.
class InvalidInput : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Numerical breakdown inside an iterative solver; the message carries the
/// iteration index or the offending entry where known.
class NumericalError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Counters and notes attached to solver results.
struct Diagnostics {
  long floored_logs = 0;    // entries clamped before a log
  double cost_shift = 0.0;  // shift applied to make cost estimates nonnegative
  std::vector<std::string> notes;

  void merge(const Diagnostics& other) {
    floored_logs += other.floored_logs;
    if (other.cost_shift != 0.0) cost_shift = other.cost_shift;
    notes.insert(notes.end(), other.notes.begin(), other.notes.end());
  }
};

}  // namespace geosw
