#pragma once

#include <string>
#include <vector>

#include "emtherm/types.hpp"

namespace emtherm {

// A sampled temperature history. Times in seconds, strictly increasing;
// values in degC.
struct Trace {
  std::vector<double> times;
  std::vector<double> values;

  void validate() const;

  bool operator==(const Trace&) const = default;
};

// Time at which the trace first covers 1 - 1/e of the gap between its
// first sample and the ambient level, i.e. the first crossing of
//   T(0) - (1 - 1/e) (T(0) - ambient),
// located by linear interpolation between samples. Works for cooling and
// heating. The first sample must differ from ambient by at least 0.5 degC,
// otherwise there is no meaningful gap to measure.
double time_constant(const Trace& trace, double ambient);

// |measured - simulated| / |measured|.
double relative_error(double measured, double simulated);

// Mean of traces recorded on identical time grids (sensor groups averaged
// before comparison). Grids must match exactly.
Trace sensor_group_mean(const std::vector<Trace>& traces);

// Piecewise-linear resampling onto the given times; times outside the
// source range hold the first / last value.
Trace resample(const Trace& trace, const std::vector<double>& times);

// |a - b| on the grid of a, with b resampled onto it.
Trace abs_error_trace(const Trace& a, const Trace& b);

// One measured-versus-simulated comparison. Times in seconds internally;
// the CSV reports minutes, which is how such cooldown constants are usually
// quoted.
struct ValidationRow {
  double initial_temperature = 0.0;  // degC
  std::string domain;
  double tau_measured_s = 0.0;
  double tau_simulated_s = 0.0;
  double relative_error_percent = 0.0;
};

// Header: initial_temperature_C,domain,tau_measured_min,tau_simulated_min,
// rel_error_percent. NaN fields print as empty cells, used when no measured
// counterpart exists for a row.
std::string validation_csv(const std::vector<ValidationRow>& rows);

}  // namespace emtherm
