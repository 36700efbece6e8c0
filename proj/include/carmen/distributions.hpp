#pragma once

#include <cstddef>
#include <variant>
#include <vector>

#include "carmen/rng.hpp"

namespace carmen::dist {

struct Normal {
  double mean = 0.0;
  double sd = 1.0;
};

struct Laplace {
  double loc = 0.0;
  double scale = 1.0;
};

struct Gamma {
  double shape = 1.0;
  double rate = 1.0;
};

struct Poisson {
  double rate = 1.0;
};

/// Counts of the `p`-probability event before the r-th complementary event:
/// pmf(x) = Gamma(x + r) / (Gamma(r) x!) * (1 - p)^r * p^x, mean r p / (1 - p).
struct NegativeBinomial {
  double r = 1.0;
  double p = 0.5;
};

struct Beta {
  double a = 1.0;
  double b = 1.0;
};

struct BetaBinomial {
  double a = 1.0;
  double b = 1.0;
  long trials = 1;
};

struct StudentT {
  double df = 1.0;
  double loc = 0.0;
  double scale = 1.0;
};

struct Uniform {
  double lo = 0.0;
  double hi = 1.0;
};

using Distribution =
    std::variant<Normal, Laplace, Gamma, Poisson, NegativeBinomial, Beta, BetaBinomial, StudentT, Uniform>;

/// Throws std::domain_error if the parameters are invalid for the family.
void validate(const Distribution& d);

double mean(const Distribution& d);
double variance(const Distribution& d);

/// Single draws. Parameters are assumed valid; `sample` checks them.
double draw(const Normal& d, RngStream& rng);
double draw(const Laplace& d, RngStream& rng);
double draw(const Gamma& d, RngStream& rng);
double draw(const Poisson& d, RngStream& rng);
double draw(const NegativeBinomial& d, RngStream& rng);
double draw(const Beta& d, RngStream& rng);
double draw(const BetaBinomial& d, RngStream& rng);
double draw(const StudentT& d, RngStream& rng);
double draw(const Uniform& d, RngStream& rng);

double draw_binomial(long trials, double p, RngStream& rng);
double draw_inverse_gamma(double shape, double scale, RngStream& rng);

/// n i.i.d. draws. Throws std::domain_error for invalid parameters or n == 0.
std::vector<double> sample(const Distribution& d, RngStream& rng, std::size_t n);

double laplace_logpdf(double x, double loc, double scale);
/// -inf for x outside the non-negative integers.
double negative_binomial_logpmf(double x, double r, double p);
/// -inf for x outside {0, ..., trials}.
double beta_binomial_logpmf(double x, double a, double b, long trials);

}  // namespace carmen::dist
