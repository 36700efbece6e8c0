#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "carmen/distributions.hpp"
#include "carmen/log_ratio.hpp"
#include "carmen/ratio.hpp"
#include "carmen/truths.hpp"

using namespace carmen;

namespace {

Dataset normal_sample(double sd, std::size_t n, RngStream rng) {
  Dataset d;
  d.values = dist::sample(dist::Normal{0.0, sd}, rng, n);
  return d;
}

}  // namespace

TEST_CASE("log ratio aggregation") {
  const auto e = LogRatioEstimate::from_values({-0.5});
  CHECK(e.sum == -0.5);
  CHECK(e.mean == -0.5);
  CHECK(e.n == 1);
  CHECK(e.sample_sd() == 0.0);
  const auto f = LogRatioEstimate::from_values({1.0, 2.0, 3.0, 4.0});
  CHECK(f.sum == 10.0);
  CHECK(f.mean == 2.5);
  CHECK(f.sample_sd() == doctest::Approx(std::sqrt(5.0 / 3.0)));
  CHECK_THROWS_AS(LogRatioEstimate::from_values({}), std::invalid_argument);
}

TEST_CASE("identical distributions give log ratios near zero") {
  const FeatureMap fm({Transform::X, Transform::X2});
  const Dataset obs = normal_sample(1.0, 2000, RngStream(1, 0));
  const Dataset sim = normal_sample(1.0, 2000, RngStream(1, 1));
  const auto est = estimate_log_ratio_from_samples(obs, sim, fm, {}, RngStream(1, 2));
  CHECK(est.n == 2000);
  CHECK(std::fabs(est.mean) < 0.01);
}

TEST_CASE("gaussian KL oracle") {
  // model N(0, 1), truth N(0, 2^2)
  const double kl_forward = std::log(0.5) + 2.0 - 0.5;
  const double kl_reverse = std::log(2.0) + 1.0 / 8.0 - 0.5;
  const FeatureMap fm({Transform::X, Transform::X2});
  const Dataset obs = normal_sample(2.0, 2000, RngStream(2, 0));
  const Dataset sim = normal_sample(1.0, 2000, RngStream(2, 1));
  const auto fwd = estimate_log_ratio_from_samples(obs, sim, fm, {}, RngStream(2, 2));
  const auto rev = estimate_reverse_log_ratio_from_samples(obs, sim, fm, {}, RngStream(2, 2));
  CHECK(-fwd.mean == doctest::Approx(kl_forward).epsilon(0.3));
  CHECK(-rev.mean == doctest::Approx(kl_reverse).epsilon(0.3));
}

TEST_CASE("class prior correction for unequal sizes") {
  const FeatureMap fm({Transform::X, Transform::X2});
  const Dataset obs = normal_sample(1.0, 1000, RngStream(3, 0));
  const Dataset sim = normal_sample(1.0, 3000, RngStream(3, 1));
  const auto est = estimate_log_ratio_from_samples(obs, sim, fm, {}, RngStream(3, 2));
  CHECK(std::fabs(est.mean) < 0.02);
}

TEST_CASE("simulation uses the validation covariates") {
  const auto post = prior_of(NigRegressionModel{});
  RngStream rng(4, 0);
  const Dataset v = truth_sample(RegressionTNoiseTruth{}, rng, 50);
  RngStream sim_rng(4, 1);
  const Dataset s = simulate_for_validation(post, v, 200, sim_rng);
  CHECK(s.size() == 200);
  REQUIRE(s.has_covariates());
  for (double x : s.covariates) {
    CHECK(std::find(v.covariates.begin(), v.covariates.end(), x) != v.covariates.end());
  }
}

TEST_CASE("estimators are deterministic given the stream") {
  RngStream rng(6, 0);
  const Dataset v = truth_sample(LaplaceTruth{}, rng, 300);
  const auto post = prior_of(GaussianKnownVarModel{});
  RatioOptions opt;
  opt.features = FeatureMap({Transform::X, Transform::X2, Transform::LogAbsX});
  const auto a = estimate_log_ratio(post, v, opt, RngStream(6, 1));
  const auto b = estimate_log_ratio(post, v, opt, RngStream(6, 1));
  CHECK(a.per_point == b.per_point);
  const auto c = estimate_log_ratio(post, v, opt, RngStream(6, 2));
  CHECK(a.per_point != c.per_point);
}

TEST_CASE("too few simulated points for the folds is an error") {
  const FeatureMap fm({Transform::X});
  const Dataset obs = normal_sample(1.0, 100, RngStream(7, 0));
  const Dataset sim = normal_sample(1.0, 1, RngStream(7, 1));
  CHECK_THROWS_AS(estimate_reverse_log_ratio_from_samples(obs, sim, fm, {}, RngStream(7, 2)),
                  std::invalid_argument);
}
