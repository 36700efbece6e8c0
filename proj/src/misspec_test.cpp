#include "carmen/misspec_test.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "carmen/special.hpp"

namespace carmen {

std::string_view method_name(TestMethod m) {
  return m == TestMethod::TTest ? "t-test" : "wilcoxon";
}

MisspecTestResult t_test_logz(const LogRatioEstimate& est) {
  if (est.n < 2 || est.per_point.size() != est.n) {
    throw std::invalid_argument("t_test_logz needs at least two per-point values");
  }
  MisspecTestResult r;
  r.method = TestMethod::TTest;
  r.df = est.n - 1;
  const double mean = est.mean;
  const double sd = est.sample_sd();
  if (sd == 0.0) {
    // Degenerate sample: no spread to scale by.
    r.statistic = mean == 0.0 ? 0.0 : std::copysign(std::numeric_limits<double>::infinity(), mean);
    r.p_value = mean < 0.0 ? 0.0 : 1.0;
    return r;
  }
  r.statistic = mean / (sd / std::sqrt(static_cast<double>(est.n)));
  r.p_value = student_t_cdf(r.statistic, static_cast<double>(r.df));
  return r;
}

MisspecTestResult wilcoxon_signed_rank(const LogRatioEstimate& est) {
  if (est.n < 10 || est.per_point.size() != est.n) {
    throw std::invalid_argument("wilcoxon_signed_rank needs at least ten per-point values");
  }
  std::vector<double> nonzero;
  nonzero.reserve(est.n);
  for (double v : est.per_point) {
    if (v != 0.0) nonzero.push_back(v);
  }
  MisspecTestResult r;
  r.method = TestMethod::Wilcoxon;
  r.df = nonzero.size();
  if (nonzero.empty()) {
    r.statistic = 0.0;
    r.p_value = 1.0;
    return r;
  }

  std::vector<std::size_t> order(nonzero.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::fabs(nonzero[a]) < std::fabs(nonzero[b]);
  });

  // Average ranks over ties; accumulate the tie correction sum(t^3 - t).
  double w_plus = 0.0;
  double tie_term = 0.0;
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && std::fabs(nonzero[order[j + 1]]) == std::fabs(nonzero[order[i]])) ++j;
    const double avg_rank = 0.5 * static_cast<double>(i + j) + 1.0;
    const double ties = static_cast<double>(j - i + 1);
    tie_term += ties * ties * ties - ties;
    for (std::size_t m = i; m <= j; ++m) {
      if (nonzero[order[m]] > 0.0) w_plus += avg_rank;
    }
    i = j + 1;
  }
  const double n = static_cast<double>(nonzero.size());
  const double expected = n * (n + 1.0) / 4.0;
  const double variance = n * (n + 1.0) * (2.0 * n + 1.0) / 24.0 - tie_term / 48.0;
  if (!(variance > 0.0)) {
    r.statistic = 0.0;
    r.p_value = 1.0;
    return r;
  }
  r.statistic = (w_plus - expected) / std::sqrt(variance);
  r.p_value = normal_cdf(r.statistic);
  return r;
}

}  // namespace carmen
