#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace carmen {

/// One datapoint. For regression data `value` is the response and
/// `covariate` the regressor; otherwise `covariate` is unused.
struct Observation {
  double value = 0.0;
  double covariate = 0.0;
};

/// Column-wise dataset. `covariates` is either empty or the same length as
/// `values`.
struct Dataset {
  std::vector<double> values;
  std::vector<double> covariates;

  std::size_t size() const noexcept { return values.size(); }
  bool empty() const noexcept { return values.empty(); }
  bool has_covariates() const noexcept { return !covariates.empty(); }

  Observation at(std::size_t i) const {
    return {values[i], has_covariates() ? covariates[i] : 0.0};
  }

  void push_back(const Observation& o, bool with_covariate) {
    values.push_back(o.value);
    if (with_covariate) covariates.push_back(o.covariate);
  }

  /// Rows [first, first + count).
  Dataset slice(std::size_t first, std::size_t count) const {
    if (first + count > size()) throw std::out_of_range("Dataset::slice out of range");
    Dataset out;
    out.values.assign(values.begin() + first, values.begin() + first + count);
    if (has_covariates()) {
      out.covariates.assign(covariates.begin() + first, covariates.begin() + first + count);
    }
    return out;
  }
};

}  // namespace carmen
