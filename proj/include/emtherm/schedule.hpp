#pragma once

#include <vector>

#include "emtherm/types.hpp"

namespace emtherm {

// Piecewise-linear function of time. Between breakpoints the value is
// interpolated linearly; outside the breakpoint range the nearest endpoint
// value is held, so a single breakpoint behaves as a constant.
class Schedule {
 public:
  Schedule() = default;
  explicit Schedule(double constant);
  Schedule(std::vector<double> times, std::vector<double> values);

  double operator()(double time) const;

  bool valid() const { return !times_.empty(); }
  const std::vector<double>& times() const { return times_; }
  const std::vector<double>& values() const { return values_; }

  // Bounds over all breakpoints; piecewise-linear values never leave them.
  double min_value() const;
  double max_value() const;

  friend bool operator==(const Schedule&, const Schedule&) = default;

 private:
  std::vector<double> times_;
  std::vector<double> values_;
};

}  // namespace emtherm
