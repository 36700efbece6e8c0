#include <doctest.h>

#include <array>
#include <cmath>
#include <stdexcept>

#include "carmen/conjugate.hpp"
#include "carmen/special.hpp"
#include "carmen/truths.hpp"
#include "oracle.hpp"

using namespace carmen;

namespace {

Dataset gaussian_data(std::size_t n, std::uint64_t seed) {
  RngStream rng(seed, 0);
  return truth_sample(GaussianTruth{0.0, 3.01}, rng, n);
}

Dataset count_data(std::size_t n, std::uint64_t seed) {
  RngStream rng(seed, 0);
  return truth_sample(NegBinomialTruth{}, rng, n);
}

Dataset regression_data(std::size_t n, std::uint64_t seed) {
  RngStream rng(seed, 0);
  return truth_sample(RegressionTNoiseTruth{}, rng, n);
}

}  // namespace

TEST_CASE("gaussian posterior matches quadrature") {
  const GaussianKnownVarModel model{};
  const Dataset d = gaussian_data(20, 5);
  for (double t : {0.0, 1e-3, 1.0}) {
    const auto ref = oracle::normalize_1d(model, d, t);
    const TemperedPosterior post = temper_update(model, SufficientStats::from(d), t);
    const double w = (ref.support.hi - ref.support.lo) / 20.0;
    for (int k = -2; k <= 2; ++k) {
      const double mu = ref.support.mode + k * w;
      const std::array<double, 1> theta{mu};
      CHECK(std::fabs(std::expm1(posterior_logpdf(post, theta) - ref.log_density(mu))) < 1e-6);
    }
  }
}

TEST_CASE("poisson-gamma posterior matches quadrature") {
  const PoissonGammaModel model{};
  const Dataset d = count_data(20, 6);
  for (double t : {0.0, 1e-3, 1.0}) {
    const auto ref = oracle::normalize_1d(model, d, t);
    const TemperedPosterior post = temper_update(model, SufficientStats::from(d), t);
    const double w = std::min((ref.support.hi - ref.support.lo) / 20.0, ref.support.mode / 3.0);
    for (int k = -2; k <= 2; ++k) {
      const double lambda = ref.support.mode + k * w;
      const std::array<double, 1> theta{lambda};
      CHECK(std::fabs(std::expm1(posterior_logpdf(post, theta) - ref.log_density(lambda))) < 1e-6);
    }
  }
}

TEST_CASE("nig posterior matches 2-d quadrature") {
  const NigRegressionModel model{};
  const Dataset d = regression_data(20, 7);
  for (double t : {0.0, 1e-3, 1.0}) {
    const auto ref = oracle::normalize_nig(model, d, t);
    const TemperedPosterior post = temper_update(model, SufficientStats::from(d), t);
    const double s_mode = ref.outer.mode;
    for (int k = -2; k <= 2; ++k) {
      const double sigma2 = std::exp(s_mode + 0.5 * k);
      const double theta = 0.3 * k;
      const std::array<double, 2> p{theta, sigma2};
      CHECK(std::fabs(std::expm1(posterior_logpdf(post, p) - ref.log_density(theta, sigma2))) < 1e-6);
    }
  }
}

TEST_CASE("t = 0 returns the prior and t = 1 the full update") {
  const Dataset d = gaussian_data(50, 1);
  const auto stats = SufficientStats::from(d);
  const GaussianKnownVarModel model{};
  const auto prior = std::get<GaussianPosterior>(temper_update(model, stats, 0.0).params);
  CHECK(prior.mean == 0.0);
  CHECK(prior.precision == doctest::Approx(1.0 / (9.9 * 9.9)));
  const auto full = std::get<GaussianPosterior>(temper_update(model, stats, 1.0).params);
  CHECK(full.precision == doctest::Approx(1.0 / (9.9 * 9.9) + 50.0 / 0.01));

  const auto gamma = std::get<GammaPosterior>(prior_of(PoissonGammaModel{}).params);
  CHECK(gamma.shape == 3.0);
  CHECK(gamma.rate == 0.05);
}

TEST_CASE("posterior precision grows with t") {
  const Dataset d = regression_data(100, 2);
  const auto stats = SufficientStats::from(d);
  double prev_g = 0.0;
  double prev_l = 0.0;
  double prev_a = 0.0;
  for (double t : {0.0, 1e-6, 1e-3, 0.1, 0.5, 1.0}) {
    const auto g = std::get<GaussianPosterior>(temper_update(GaussianKnownVarModel{}, SufficientStats::from(gaussian_data(100, 2)), t).params);
    const auto n = std::get<NigPosterior>(temper_update(NigRegressionModel{}, stats, t).params);
    CHECK(g.precision >= prev_g);
    CHECK(n.precision_scale >= prev_l);
    CHECK(n.shape >= prev_a);
    prev_g = g.precision;
    prev_l = n.precision_scale;
    prev_a = n.shape;
  }
}

TEST_CASE("gaussian posterior sd at n = 1000") {
  const Dataset d = gaussian_data(1000, 3);
  const auto post = std::get<GaussianPosterior>(temper_update(GaussianKnownVarModel{}, SufficientStats::from(d), 1.0).params);
  CHECK(1.0 / std::sqrt(post.precision) == doctest::Approx(0.0031622774988441564).epsilon(1e-12));
}

TEST_CASE("prior predictive density") {
  const auto prior = prior_of(GaussianKnownVarModel{});
  CHECK(predictive_logpdf(prior, {0.0, 0.0}) == doctest::Approx(-3.2115243029453735).epsilon(1e-13));
}

TEST_CASE("predictive densities match quadrature over the posterior") {
  const Dataset gd = gaussian_data(20, 11);
  const Dataset cd = count_data(20, 12);
  for (double t : {1e-3, 1.0}) {
    const auto gp = temper_update(GaussianKnownVarModel{}, SufficientStats::from(gd), t);
    const auto ref = oracle::normalize_1d(GaussianKnownVarModel{}, gd, t);
    for (double x : {-3.0, 0.0, 2.5}) {
      oracle::LogFn f = [&](double mu) {
        return ref.log_density(mu) + normal_logpdf(x, mu, 0.1);
      };
      const double q = oracle::log_integral(f, ref.support.mode, 0.001, -1e6, 1e6);
      CHECK(predictive_logpdf(gp, {x, 0.0}) == doctest::Approx(q).epsilon(1e-7));
    }
    const auto pp = temper_update(PoissonGammaModel{}, SufficientStats::from(cd), t);
    const auto pref = oracle::normalize_1d(PoissonGammaModel{}, cd, t);
    for (double k : {0.0, 30.0, 61.0, 140.0}) {
      oracle::LogFn f = [&](double lambda) {
        return pref.log_density(lambda) + k * std::log(lambda) - lambda - std::lgamma(k + 1.0);
      };
      const double q = oracle::log_integral(f, pref.support.mode, 0.01, 1e-300, 1e6);
      CHECK(predictive_logpdf(pp, {k, 0.0}) == doctest::Approx(q).epsilon(1e-7));
    }
  }
  const Dataset rd = regression_data(20, 13);
  const auto rp = temper_update(NigRegressionModel{}, SufficientStats::from(rd), 1.0);
  const auto rref = oracle::normalize_nig(NigRegressionModel{}, rd, 1.0);
  for (const Observation o : {Observation{0.4, 0.5}, Observation{-2.0, -0.9}}) {
    oracle::LogFn g = [&](double s) {
      const double sigma2 = std::exp(s);
      oracle::LogFn inner = [&](double theta) {
        return rref.log_density(theta, sigma2) + normal_logpdf(o.value, theta * o.covariate, std::sqrt(sigma2));
      };
      return oracle::log_integral(inner, 0.0, 0.01 * std::sqrt(sigma2), -1e6, 1e6) + s;
    };
    const auto sup = oracle::locate(g, 0.0, 0.05, -200.0, 200.0);
    const double q = oracle::log_simpson(g, sup.lo, sup.hi, sup.fmax, 1000);
    CHECK(predictive_logpdf(rp, o) == doctest::Approx(q).epsilon(1e-6));
  }
}

TEST_CASE("predictive samples follow the predictive moments") {
  const Dataset d = count_data(200, 4);
  const auto post = temper_update(PoissonGammaModel{}, SufficientStats::from(d), 1e-3);
  const auto g = std::get<GammaPosterior>(post.params);
  RngStream rng(5, 0);
  const Dataset s = predictive_sample(post, rng, 200000);
  double m = 0.0;
  for (double v : s.values) m += v;
  m /= static_cast<double>(s.size());
  const double mean = g.shape / g.rate;
  const double var = mean + g.shape / (g.rate * g.rate);
  CHECK(std::fabs(m - mean) < 5.0 * std::sqrt(var / 200000.0));
}

TEST_CASE("log tempered predictive sums per-point densities") {
  const Dataset d = gaussian_data(40, 9);
  const Dataset u = d.slice(0, 20);
  const Dataset v = d.slice(20, 20);
  const auto post = temper_update(GaussianKnownVarModel{}, SufficientStats::from(u), 0.01);
  double s = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) s += predictive_logpdf(post, v.at(i));
  CHECK(log_tempered_predictive(GaussianKnownVarModel{}, u, v, 0.01) == doctest::Approx(s).epsilon(1e-14));
}

TEST_CASE("invalid inputs are rejected") {
  const auto stats = SufficientStats::from(gaussian_data(5, 1));
  CHECK_THROWS_AS(temper_update(GaussianKnownVarModel{}, stats, -0.1), std::domain_error);
  CHECK_THROWS_AS(temper_update(GaussianKnownVarModel{}, stats, 1.5), std::domain_error);
  const auto prior = prior_of(PoissonGammaModel{});
  CHECK_THROWS_AS(predictive_logpdf(prior, {1.5, 0.0}), std::domain_error);
  CHECK_THROWS_AS(predictive_logpdf(prior, {-1.0, 0.0}), std::domain_error);
  RngStream rng(1, 1);
  CHECK_THROWS_AS(predictive_sample(prior_of(NigRegressionModel{}), rng, 3), std::invalid_argument);
  CHECK_THROWS(validate(Model{GaussianKnownVarModel{-1.0, 0.0, 1.0}}));
}
