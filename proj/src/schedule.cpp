#include "emtherm/schedule.hpp"

#include <algorithm>
#include <cmath>

namespace emtherm {

Schedule::Schedule(double constant) : times_{0.0}, values_{constant} {
  if (!std::isfinite(constant)) throw ConfigError("schedule value must be finite");
}

Schedule::Schedule(std::vector<double> times, std::vector<double> values)
    : times_(std::move(times)), values_(std::move(values)) {
  if (times_.empty()) throw ConfigError("schedule needs at least one breakpoint");
  if (times_.size() != values_.size())
    throw ConfigError("schedule breakpoint times and values differ in length");
  for (std::size_t i = 0; i < times_.size(); ++i) {
    if (!std::isfinite(times_[i]) || !std::isfinite(values_[i]))
      throw ConfigError("schedule breakpoints must be finite");
    if (i > 0 && times_[i] <= times_[i - 1])
      throw ConfigError("schedule breakpoint times must be strictly increasing");
  }
}

double Schedule::operator()(double time) const {
  if (times_.empty()) throw Error("evaluating an empty schedule");
  if (time <= times_.front()) return values_.front();
  if (time >= times_.back()) return values_.back();
  const auto it = std::upper_bound(times_.begin(), times_.end(), time);
  const std::size_t hi = static_cast<std::size_t>(it - times_.begin());
  const std::size_t lo = hi - 1;
  const double w = (time - times_[lo]) / (times_[hi] - times_[lo]);
  return values_[lo] + w * (values_[hi] - values_[lo]);
}

double Schedule::min_value() const {
  if (values_.empty()) throw Error("empty schedule");
  return *std::min_element(values_.begin(), values_.end());
}

double Schedule::max_value() const {
  if (values_.empty()) throw Error("empty schedule");
  return *std::max_element(values_.begin(), values_.end());
}

}  // namespace emtherm
