#include "carmen/log_ratio.hpp"

#include <cmath>
#include <stdexcept>

namespace carmen {

LogRatioEstimate LogRatioEstimate::from_values(std::vector<double> values) {
  if (values.empty()) throw std::invalid_argument("LogRatioEstimate needs at least one value");
  LogRatioEstimate est;
  est.n = values.size();
  for (double v : values) est.sum += v;
  est.mean = est.sum / static_cast<double>(est.n);
  est.per_point = std::move(values);
  return est;
}

double LogRatioEstimate::sample_sd() const {
  if (n < 2) return 0.0;
  double ss = 0.0;
  for (double v : per_point) ss += (v - mean) * (v - mean);
  return std::sqrt(ss / static_cast<double>(n - 1));
}

}  // namespace carmen
