#pragma once

#include <cstddef>
#include <vector>

namespace carmen {

/// Per-point log density ratios log p_model(x_i) / p_truth(x_i) over a
/// validation set, with their sum (log Z) and mean.
struct LogRatioEstimate {
  std::vector<double> per_point;
  double sum = 0.0;
  double mean = 0.0;
  std::size_t n = 0;

  /// Throws std::invalid_argument for an empty sequence.
  static LogRatioEstimate from_values(std::vector<double> values);

  /// Sample standard deviation (n - 1 divisor); 0 when n < 2.
  double sample_sd() const;
};

}  // namespace carmen
