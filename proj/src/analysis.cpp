#include "emtherm/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace emtherm {

void Trace::validate() const {
  if (times.size() != values.size()) throw ConfigError("trace times and values differ in length");
  if (times.empty()) throw ConfigError("trace is empty");
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (!std::isfinite(times[i]) || !std::isfinite(values[i]))
      throw ConfigError("trace contains a non-finite sample");
    if (i > 0 && !(times[i] > times[i - 1]))
      throw ConfigError("trace times must be strictly increasing");
  }
}

double time_constant(const Trace& trace, double ambient) {
  trace.validate();
  if (trace.times.size() < 2) throw ConfigError("time constant needs at least two samples");
  if (!std::isfinite(ambient)) throw ConfigError("ambient temperature must be finite");

  const double start = trace.values.front();
  if (std::abs(start - ambient) < 0.5)
    throw ConfigError("trace starts within 0.5 degC of ambient; the time constant is undefined");

  const double threshold = start - (1.0 - std::exp(-1.0)) * (start - ambient);
  const bool cooling = start > ambient;
  for (std::size_t i = 1; i < trace.values.size(); ++i) {
    const double v = trace.values[i];
    if (cooling ? v <= threshold : v >= threshold) {
      const double v0 = trace.values[i - 1];
      const double span = v - v0;
      const double s = span != 0.0 ? (threshold - v0) / span : 1.0;
      return trace.times[i - 1] + s * (trace.times[i] - trace.times[i - 1]);
    }
  }
  throw NumericalError("trace never covers 1 - 1/e of the gap to ambient");
}

double relative_error(double measured, double simulated) {
  if (!std::isfinite(measured) || measured == 0.0)
    throw ConfigError("relative error needs a non-zero measured value");
  return std::abs(measured - simulated) / std::abs(measured);
}

Trace sensor_group_mean(const std::vector<Trace>& traces) {
  if (traces.empty()) throw ConfigError("sensor group is empty");
  for (const Trace& t : traces) t.validate();
  const Trace& first = traces.front();
  for (const Trace& t : traces)
    if (t.times != first.times)
      throw ConfigError("sensor group traces are sampled on different time grids");

  Trace out;
  out.times = first.times;
  out.values.assign(first.values.size(), 0.0);
  for (const Trace& t : traces)
    for (std::size_t i = 0; i < out.values.size(); ++i) out.values[i] += t.values[i];
  for (double& v : out.values) v /= static_cast<double>(traces.size());
  return out;
}

Trace resample(const Trace& trace, const std::vector<double>& times) {
  trace.validate();
  Trace out;
  out.times = times;
  out.values.reserve(times.size());
  for (double t : times) {
    if (!std::isfinite(t)) throw ConfigError("resample target time must be finite");
    if (t <= trace.times.front()) {
      out.values.push_back(trace.values.front());
    } else if (t >= trace.times.back()) {
      out.values.push_back(trace.values.back());
    } else {
      const auto it = std::upper_bound(trace.times.begin(), trace.times.end(), t);
      const std::size_t i = static_cast<std::size_t>(it - trace.times.begin());
      const double t0 = trace.times[i - 1];
      const double t1 = trace.times[i];
      const double s = (t - t0) / (t1 - t0);
      out.values.push_back((1.0 - s) * trace.values[i - 1] + s * trace.values[i]);
    }
  }
  return out;
}

Trace abs_error_trace(const Trace& a, const Trace& b) {
  a.validate();
  const Trace b_on_a = resample(b, a.times);
  Trace out;
  out.times = a.times;
  out.values.reserve(a.values.size());
  for (std::size_t i = 0; i < a.values.size(); ++i)
    out.values.push_back(std::abs(a.values[i] - b_on_a.values[i]));
  return out;
}

std::string validation_csv(const std::vector<ValidationRow>& rows) {
  std::string out =
      "initial_temperature_C,domain,tau_measured_min,tau_simulated_min,"
      "rel_error_percent\n";
  char num[64];
  auto cell = [&num](double v) -> std::string {
    if (std::isnan(v)) return "";  // column not available for this row
    std::snprintf(num, sizeof num, "%.6g", v);
    return num;
  };
  for (const ValidationRow& r : rows) {
    out += cell(r.initial_temperature);
    out += ',';
    out += r.domain;
    out += ',';
    out += cell(r.tau_measured_s / 60.0);
    out += ',';
    out += cell(r.tau_simulated_s / 60.0);
    out += ',';
    out += cell(r.relative_error_percent);
    out += '\n';
  }
  return out;
}

}  // namespace emtherm
