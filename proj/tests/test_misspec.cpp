#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "carmen/distributions.hpp"
#include "carmen/misspec_test.hpp"

using namespace carmen;

namespace {

// Two-sided asymptotic Kolmogorov-Smirnov p-value against U(0, 1).
double ks_uniform_pvalue(std::vector<double> p) {
  std::sort(p.begin(), p.end());
  const double n = static_cast<double>(p.size());
  double d = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    d = std::max({d, (i + 1) / n - p[i], p[i] - i / n});
  }
  const double lambda = (std::sqrt(n) + 0.12 + 0.11 / std::sqrt(n)) * d;
  double q = 0.0;
  for (int k = 1; k < 100; ++k) q += 2.0 * ((k % 2) ? 1.0 : -1.0) * std::exp(-2.0 * k * k * lambda * lambda);
  return std::clamp(q, 0.0, 1.0);
}

LogRatioEstimate normal_values(double mean, std::size_t n, RngStream& rng) {
  return LogRatioEstimate::from_values(dist::sample(dist::Normal{mean, 1.0}, rng, n));
}

}  // namespace

TEST_CASE("t-test p-values are uniform under the null") {
  RngStream rng(1, 0);
  std::vector<double> p;
  std::vector<double> w;
  for (int r = 0; r < 1000; ++r) {
    const auto e = normal_values(0.0, 50, rng);
    p.push_back(t_test_logz(e).p_value);
    w.push_back(wilcoxon_signed_rank(e).p_value);
  }
  CHECK(ks_uniform_pvalue(p) > 0.05);
  CHECK(ks_uniform_pvalue(w) > 0.05);
}

TEST_CASE("tests have power against a negative shift") {
  RngStream rng(2, 0);
  int t_rejects = 0;
  int w_rejects = 0;
  for (int r = 0; r < 200; ++r) {
    const auto e = normal_values(-0.5, 50, rng);
    t_rejects += t_test_logz(e).p_value < 0.05;
    w_rejects += wilcoxon_signed_rank(e).p_value < 0.05;
  }
  CHECK(t_rejects > 190);
  CHECK(w_rejects > 185);
}

TEST_CASE("one-tailed direction") {
  RngStream rng(3, 0);
  const auto pos = normal_values(0.8, 40, rng);
  CHECK(t_test_logz(pos).p_value > 0.99);
  CHECK(t_test_logz(pos).statistic > 0.0);
}

TEST_CASE("known t statistic") {
  const auto e = LogRatioEstimate::from_values({-1.0, -2.0, 0.0, -3.0, 1.0});
  const auto r = t_test_logz(e);
  CHECK(r.df == 4);
  CHECK(r.statistic == doctest::Approx(-1.0 / (std::sqrt(2.5) / std::sqrt(5.0))));
}

TEST_CASE("permutation invariance") {
  RngStream rng(4, 0);
  auto v = dist::sample(dist::Normal{-0.1, 1.0}, rng, 60);
  const auto a = LogRatioEstimate::from_values(v);
  std::reverse(v.begin(), v.end());
  std::rotate(v.begin(), v.begin() + 17, v.end());
  const auto b = LogRatioEstimate::from_values(v);
  CHECK(t_test_logz(a).p_value == doctest::Approx(t_test_logz(b).p_value).epsilon(1e-12));
  CHECK(wilcoxon_signed_rank(a).p_value == wilcoxon_signed_rank(b).p_value);
}

TEST_CASE("degenerate samples") {
  CHECK(t_test_logz(LogRatioEstimate::from_values({0.0, 0.0, 0.0})).p_value == 1.0);
  CHECK(t_test_logz(LogRatioEstimate::from_values({-1.0, -1.0})).p_value == 0.0);
  CHECK_THROWS_AS(t_test_logz(LogRatioEstimate::from_values({1.0})), std::invalid_argument);
  CHECK_THROWS_AS(wilcoxon_signed_rank(LogRatioEstimate::from_values({1, 2, 3})), std::invalid_argument);
  const auto zeros = LogRatioEstimate::from_values(std::vector<double>(12, 0.0));
  CHECK(wilcoxon_signed_rank(zeros).p_value == 1.0);
}

TEST_CASE("wilcoxon handles ties") {
  const auto e = LogRatioEstimate::from_values({-1, -1, -1, 1, -2, -2, 2, -3, -3, -3, 0, -4});
  const auto r = wilcoxon_signed_rank(e);
  CHECK(r.df == 11);
  CHECK(r.p_value < 0.05);
  CHECK(std::isfinite(r.statistic));
}
