#pragma once

#include <cstdint>
#include <utility>

namespace srelab {

// Monte Carlo point estimate with its standard error.
struct Estimate {
  double value = 0.0;
  double std_error = 0.0;
  uint64_t reps = 0;

  std::pair<double, double> ci95() const {
    const double half = 1.959963984540054 * std_error;
    return {value - half, value + half};
  }
};

}  // namespace srelab
