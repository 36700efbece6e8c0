#include <doctest.h>

#include <cmath>
#include <set>
#include <stdexcept>

#include "carmen/distributions.hpp"
#include "carmen/rng.hpp"
#include "carmen/special.hpp"

using namespace carmen;

namespace {

double rel_err(double got, double want) { return std::fabs(got - want) / std::max(1e-300, std::fabs(want)); }

}  // namespace

TEST_CASE("log_gamma against high-precision values") {
  CHECK(rel_err(log_gamma(0.5), 0.5723649429247001) < 1e-13);
  CHECK(rel_err(log_gamma(10.0), 12.801827480081469) < 1e-13);
  CHECK(rel_err(log_gamma(1e-3), 6.907178885383853) < 1e-13);
  CHECK(rel_err(log_gamma(1e6), 12815504.569147612) < 1e-13);
  CHECK(rel_err(log_gamma(3.7), 1.4280723266653879) < 1e-13);
  CHECK(log_gamma(1.0) == 0.0);
  CHECK(log_gamma(2.0) == 0.0);
  CHECK_THROWS_AS(log_gamma(0.0), std::domain_error);
  CHECK_THROWS_AS(log_gamma(-1.5), std::domain_error);
  CHECK_THROWS_AS(log_gamma(NAN), std::domain_error);
}

TEST_CASE("log_gamma recurrence") {
  for (double x : {0.01, 0.3, 1.7, 4.2, 25.5, 300.25}) {
    CHECK(log_gamma(x + 1.0) == doctest::Approx(log_gamma(x) + std::log(x)).epsilon(1e-13));
  }
}

TEST_CASE("incomplete beta against high-precision values") {
  CHECK(rel_err(reg_incomplete_beta(2.0, 3.0, 0.4), 0.5248) < 1e-12);
  CHECK(rel_err(reg_incomplete_beta(0.5, 7.5, 0.2), 0.9281204024988001) < 1e-12);
  CHECK(rel_err(reg_incomplete_beta(30.0, 40.0, 0.45), 0.6447480085585680) < 1e-12);
  CHECK(reg_incomplete_beta(2.0, 3.0, 0.0) == 0.0);
  CHECK(reg_incomplete_beta(2.0, 3.0, 1.0) == 1.0);
  CHECK_THROWS_AS(reg_incomplete_beta(0.0, 1.0, 0.5), std::domain_error);
  CHECK_THROWS_AS(reg_incomplete_beta(1.0, 1.0, 1.5), std::domain_error);
}

TEST_CASE("incomplete beta symmetry and monotonicity") {
  for (double a : {0.3, 1.0, 4.5, 60.0}) {
    for (double b : {0.7, 2.0, 33.0}) {
      double prev = 0.0;
      for (double x = 0.05; x < 1.0; x += 0.05) {
        const double v = reg_incomplete_beta(a, b, x);
        CHECK(v >= prev);
        CHECK(v + reg_incomplete_beta(b, a, 1.0 - x) == doctest::Approx(1.0).epsilon(1e-12));
        prev = v;
      }
    }
  }
}

TEST_CASE("student t cdf") {
  CHECK(rel_err(student_t_cdf(1.0, 99.0), 0.8401257629303493) < 1e-12);
  CHECK(rel_err(student_t_cdf(-2.0, 10.0), 0.03669401738537018) < 1e-12);
  CHECK(rel_err(student_t_cdf(2.5, 3.0), 0.9561466764959672) < 1e-12);
  CHECK(student_t_cdf(0.0, 7.0) == 0.5);
  for (double x : {0.1, 1.3, 4.0, 12.0}) {
    CHECK(student_t_cdf(x, 5.0) + student_t_cdf(-x, 5.0) == doctest::Approx(1.0).epsilon(1e-14));
  }
  // Large df approaches the normal.
  CHECK(student_t_cdf(1.0, 1e7) == doctest::Approx(normal_cdf(1.0)).epsilon(1e-7));
}

TEST_CASE("normal cdf and densities") {
  CHECK(rel_err(normal_cdf(1.0), 0.8413447460685429) < 1e-14);
  CHECK(rel_err(normal_cdf(-3.0), 0.0013498980316300946) < 1e-13);
  CHECK(normal_logpdf(0.0, 0.0, 1.0) == doctest::Approx(-0.5 * std::log(2.0 * M_PI)));
  // t density integrates to one.
  double s = 0.0;
  const double h = 0.01;
  for (double x = -400.0; x <= 400.0; x += h) s += std::exp(student_t_logpdf(x, 3.0, 0.5, 1.22)) * h;
  CHECK(s == doctest::Approx(1.0).epsilon(1e-4));
}

TEST_CASE("rng streams are reproducible and independent") {
  RngStream a(42, 7);
  RngStream b(42, 7);
  RngStream c(42, 8);
  bool differs = false;
  for (int i = 0; i < 100; ++i) {
    const auto va = a.next_u64();
    CHECK(va == b.next_u64());
    differs = differs || va != c.next_u64();
  }
  CHECK(differs);

  RngStream fresh(42, 7);
  const RngStream s1 = fresh.substream(3);
  fresh.next_u64();
  RngStream s2 = fresh.substream(3);
  RngStream s1c = s1;
  CHECK(s1c.next_u64() == s2.next_u64());
  CHECK(fresh.substream(3).next_u64() != fresh.substream(4).next_u64());
}

TEST_CASE("rng uniform ranges") {
  RngStream rng(1, 0);
  std::set<std::uint64_t> seen;
  for (int i = 0; i < 10000; ++i) {
    const double u = rng.uniform();
    CHECK((u >= 0.0 && u < 1.0));
    const double v = rng.uniform_open();
    CHECK((v > 0.0 && v < 1.0));
    const auto k = rng.uniform_index(7);
    CHECK(k < 7);
    seen.insert(k);
  }
  CHECK(seen.size() == 7);
}

TEST_CASE("sample moments match the distribution") {
  using namespace carmen::dist;
  const std::vector<Distribution> cases{
      Normal{1.0, 2.0},          Laplace{0.0, 2.13},        Gamma{3.0, 0.05},
      Gamma{0.3, 2.0},           Poisson{4.5},              Poisson{60.0},
      NegativeBinomial{63.0, 0.488}, Beta{41.75, 78.25},    BetaBinomial{41.75, 78.25, 80},
      StudentT{5.0, 1.0, 1.22},  Uniform{-1.0, 1.0},
  };
  RngStream rng(2024, 0);
  const std::size_t n = 200000;
  for (const auto& d : cases) {
    const auto xs = sample(d, rng, n);
    double m = 0.0;
    for (double x : xs) m += x;
    m /= static_cast<double>(n);
    double v = 0.0;
    for (double x : xs) v += (x - m) * (x - m);
    v /= static_cast<double>(n - 1);
    const double se = std::sqrt(variance(d) / static_cast<double>(n));
    CHECK(std::fabs(m - mean(d)) < 5.0 * se);
    CHECK(v == doctest::Approx(variance(d)).epsilon(0.05));
  }
}

TEST_CASE("pmfs sum to one") {
  double nb = 0.0;
  for (int k = 0; k < 2000; ++k) nb += std::exp(dist::negative_binomial_logpmf(k, 63.0, 0.488));
  CHECK(nb == doctest::Approx(1.0).epsilon(1e-12));
  double bb = 0.0;
  for (int k = 0; k <= 80; ++k) bb += std::exp(dist::beta_binomial_logpmf(k, 41.75, 78.25, 80));
  CHECK(bb == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::isinf(dist::beta_binomial_logpmf(81, 41.75, 78.25, 80)));
  CHECK(std::isinf(dist::negative_binomial_logpmf(-1, 63.0, 0.488)));
}

TEST_CASE("invalid distribution parameters throw") {
  RngStream rng(0, 0);
  CHECK_THROWS(dist::sample(dist::Normal{0.0, -1.0}, rng, 3));
  CHECK_THROWS(dist::sample(dist::Gamma{0.0, 1.0}, rng, 3));
  CHECK_THROWS(dist::sample(dist::NegativeBinomial{1.0, 1.0}, rng, 3));
  CHECK_THROWS(dist::sample(dist::Normal{}, rng, 0));
}
