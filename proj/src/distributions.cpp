#include "carmen/distributions.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include "carmen/special.hpp"

namespace carmen::dist {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

bool positive(double v) { return std::isfinite(v) && v > 0.0; }

void require(bool ok, const char* what) {
  if (!ok) throw std::domain_error(std::string("invalid distribution parameters: ") + what);
}

bool is_count(double x) { return x >= 0.0 && std::floor(x) == x && std::isfinite(x); }

// Multiplication method; fine for small rates.
double poisson_small(double rate, RngStream& rng) {
  const double limit = std::exp(-rate);
  double prod = rng.uniform();
  double k = 0.0;
  while (prod > limit) {
    prod *= rng.uniform();
    k += 1.0;
  }
  return k;
}

// Transformed rejection with squeeze (Hoermann 1993), rate >= 10.
double poisson_ptrs(double rate, RngStream& rng) {
  const double slam = std::sqrt(rate);
  const double loglam = std::log(rate);
  const double b = 0.931 + 2.53 * slam;
  const double a = -0.059 + 0.02483 * b;
  const double invalpha = 1.1239 + 1.1328 / (b - 3.4);
  const double vr = 0.9277 - 3.6224 / (b - 2.0);
  for (;;) {
    const double u = rng.uniform() - 0.5;
    const double v = rng.uniform_open();
    const double us = 0.5 - std::fabs(u);
    const double k = std::floor((2.0 * a / us + b) * u + rate + 0.43);
    if (us >= 0.07 && v <= vr) return k;
    if (k < 0.0 || (us < 0.013 && v > us)) continue;
    if (std::log(v) + std::log(invalpha) - std::log(a / (us * us) + b) <=
        -rate + k * loglam - log_gamma(k + 1.0)) {
      return k;
    }
  }
}

}  // namespace

void validate(const Distribution& d) {
  std::visit(overloaded{
                 [](const Normal& n) { require(std::isfinite(n.mean) && positive(n.sd), "normal"); },
                 [](const Laplace& l) { require(std::isfinite(l.loc) && positive(l.scale), "laplace"); },
                 [](const Gamma& g) { require(positive(g.shape) && positive(g.rate), "gamma"); },
                 [](const Poisson& p) { require(positive(p.rate), "poisson"); },
                 [](const NegativeBinomial& nb) {
                   require(positive(nb.r) && nb.p > 0.0 && nb.p < 1.0, "negative binomial");
                 },
                 [](const Beta& b) { require(positive(b.a) && positive(b.b), "beta"); },
                 [](const BetaBinomial& bb) {
                   require(positive(bb.a) && positive(bb.b) && bb.trials >= 1, "beta-binomial");
                 },
                 [](const StudentT& t) {
                   require(positive(t.df) && std::isfinite(t.loc) && positive(t.scale), "student-t");
                 },
                 [](const Uniform& u) {
                   require(std::isfinite(u.lo) && std::isfinite(u.hi) && u.lo < u.hi, "uniform");
                 },
             },
             d);
}

double mean(const Distribution& d) {
  return std::visit(overloaded{
                        [](const Normal& n) { return n.mean; },
                        [](const Laplace& l) { return l.loc; },
                        [](const Gamma& g) { return g.shape / g.rate; },
                        [](const Poisson& p) { return p.rate; },
                        [](const NegativeBinomial& nb) { return nb.r * nb.p / (1.0 - nb.p); },
                        [](const Beta& b) { return b.a / (b.a + b.b); },
                        [](const BetaBinomial& bb) { return bb.trials * bb.a / (bb.a + bb.b); },
                        [](const StudentT& t) {
                          return t.df > 1.0 ? t.loc : std::numeric_limits<double>::quiet_NaN();
                        },
                        [](const Uniform& u) { return 0.5 * (u.lo + u.hi); },
                    },
                    d);
}

double variance(const Distribution& d) {
  return std::visit(
      overloaded{
          [](const Normal& n) { return n.sd * n.sd; },
          [](const Laplace& l) { return 2.0 * l.scale * l.scale; },
          [](const Gamma& g) { return g.shape / (g.rate * g.rate); },
          [](const Poisson& p) { return p.rate; },
          [](const NegativeBinomial& nb) { return nb.r * nb.p / ((1.0 - nb.p) * (1.0 - nb.p)); },
          [](const Beta& b) {
            const double s = b.a + b.b;
            return b.a * b.b / (s * s * (s + 1.0));
          },
          [](const BetaBinomial& bb) {
            const double s = bb.a + bb.b;
            const double n = static_cast<double>(bb.trials);
            return n * bb.a * bb.b * (s + n) / (s * s * (s + 1.0));
          },
          [](const StudentT& t) {
            return t.df > 2.0 ? t.scale * t.scale * t.df / (t.df - 2.0)
                              : std::numeric_limits<double>::infinity();
          },
          [](const Uniform& u) { return (u.hi - u.lo) * (u.hi - u.lo) / 12.0; },
      },
      d);
}

double draw(const Normal& d, RngStream& rng) {
  // Marsaglia polar method; the second variate is discarded so that a draw
  // consumes state independently of call history.
  for (;;) {
    const double u = 2.0 * rng.uniform() - 1.0;
    const double v = 2.0 * rng.uniform() - 1.0;
    const double s = u * u + v * v;
    if (s > 0.0 && s < 1.0) {
      return d.mean + d.sd * u * std::sqrt(-2.0 * std::log(s) / s);
    }
  }
}

double draw(const Laplace& d, RngStream& rng) {
  const double u = rng.uniform_open() - 0.5;
  const double mag = -std::log1p(-2.0 * std::fabs(u));
  return d.loc + (u < 0.0 ? -d.scale * mag : d.scale * mag);
}

double draw(const Gamma& d, RngStream& rng) {
  // Marsaglia & Tsang; shape < 1 boosted through Gamma(shape + 1) * U^(1/shape).
  if (d.shape < 1.0) {
    const double g = draw(Gamma{d.shape + 1.0, d.rate}, rng);
    return g * std::pow(rng.uniform_open(), 1.0 / d.shape);
  }
  const double dd = d.shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * dd);
  for (;;) {
    double x = 0.0;
    double v = 0.0;
    do {
      x = draw(Normal{}, rng);
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = rng.uniform_open();
    const double x2 = x * x;
    if (u < 1.0 - 0.0331 * x2 * x2) return dd * v / d.rate;
    if (std::log(u) < 0.5 * x2 + dd * (1.0 - v + std::log(v))) return dd * v / d.rate;
  }
}

double draw(const Poisson& d, RngStream& rng) {
  return d.rate < 10.0 ? poisson_small(d.rate, rng) : poisson_ptrs(d.rate, rng);
}

double draw(const NegativeBinomial& d, RngStream& rng) {
  const double lambda = draw(Gamma{d.r, (1.0 - d.p) / d.p}, rng);
  if (lambda <= 0.0) return 0.0;
  return draw(Poisson{lambda}, rng);
}

double draw(const Beta& d, RngStream& rng) {
  const double x = draw(Gamma{d.a, 1.0}, rng);
  const double y = draw(Gamma{d.b, 1.0}, rng);
  return x / (x + y);
}

double draw_binomial(long trials, double p, RngStream& rng) {
  long hits = 0;
  for (long i = 0; i < trials; ++i) {
    if (rng.uniform() < p) ++hits;
  }
  return static_cast<double>(hits);
}

double draw(const BetaBinomial& d, RngStream& rng) {
  return draw_binomial(d.trials, draw(Beta{d.a, d.b}, rng), rng);
}

double draw(const StudentT& d, RngStream& rng) {
  const double z = draw(Normal{}, rng);
  const double chi2 = 2.0 * draw(Gamma{0.5 * d.df, 1.0}, rng);
  return d.loc + d.scale * z / std::sqrt(chi2 / d.df);
}

double draw(const Uniform& d, RngStream& rng) {
  return d.lo + (d.hi - d.lo) * rng.uniform();
}

double draw_inverse_gamma(double shape, double scale, RngStream& rng) {
  return 1.0 / draw(Gamma{shape, scale}, rng);
}

std::vector<double> sample(const Distribution& d, RngStream& rng, std::size_t n) {
  if (n == 0) throw std::domain_error("sample: n must be at least 1");
  validate(d);
  std::vector<double> out;
  out.reserve(n);
  std::visit(
      [&](const auto& concrete) {
        for (std::size_t i = 0; i < n; ++i) out.push_back(draw(concrete, rng));
      },
      d);
  return out;
}

double laplace_logpdf(double x, double loc, double scale) {
  return -std::log(2.0 * scale) - std::fabs(x - loc) / scale;
}

double negative_binomial_logpmf(double x, double r, double p) {
  if (!is_count(x)) return -std::numeric_limits<double>::infinity();
  return log_gamma(x + r) - log_gamma(r) - log_gamma(x + 1.0) + r * std::log1p(-p) +
         x * std::log(p);
}

double beta_binomial_logpmf(double x, double a, double b, long trials) {
  const double n = static_cast<double>(trials);
  if (!is_count(x) || x > n) return -std::numeric_limits<double>::infinity();
  return log_gamma(n + 1.0) - log_gamma(x + 1.0) - log_gamma(n - x + 1.0) +
         log_beta(x + a, n - x + b) - log_beta(a, b);
}

}  // namespace carmen::dist
