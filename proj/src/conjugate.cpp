#include "carmen/conjugate.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "carmen/distributions.hpp"
#include "carmen/special.hpp"

namespace carmen {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

bool positive(double v) { return std::isfinite(v) && v > 0.0; }

void check_stats(const SufficientStats& s) {
  const bool finite = std::isfinite(s.sum_x) && std::isfinite(s.sum_xx) &&
                      std::isfinite(s.sum_xy) && std::isfinite(s.sum_y) &&
                      std::isfinite(s.sum_yy);
  if (!finite || s.sum_xx < 0.0 || s.sum_yy < 0.0) {
    throw std::domain_error("sufficient statistics must be finite with non-negative sums of squares");
  }
  if (s.n > 0) {
    const double floor = s.sum_x * s.sum_x / static_cast<double>(s.n);
    if (s.sum_xx < floor - 1e-9 * (1.0 + floor)) {
      throw std::domain_error("sufficient statistics violate sum_xx >= sum_x^2 / n");
    }
  } else if (s.sum_x != 0.0 || s.sum_xx != 0.0 || s.sum_xy != 0.0 || s.sum_yy != 0.0) {
    throw std::domain_error("sufficient statistics with n = 0 must have zero sums");
  }
}

}  // namespace

void validate(const Model& model) {
  std::visit(overloaded{
                 [](const GaussianKnownVarModel& m) {
                   if (!positive(m.sigma0) || !positive(m.prior_sd) || !std::isfinite(m.prior_mean)) {
                     throw std::domain_error("gaussian model needs sigma0 > 0 and prior_sd > 0");
                   }
                 },
                 [](const PoissonGammaModel& m) {
                   if (!positive(m.shape) || !positive(m.rate)) {
                     throw std::domain_error("poisson-gamma model needs shape > 0 and rate > 0");
                   }
                 },
                 [](const NigRegressionModel& m) {
                   if (!positive(m.precision_scale) || !positive(m.shape) || !positive(m.scale) ||
                       !std::isfinite(m.coef_mean)) {
                     throw std::domain_error("NIG regression model needs n0, a0, b0 > 0");
                   }
                 },
             },
             model);
}

bool is_regression(const Model& model) { return std::holds_alternative<NigRegressionModel>(model); }

SufficientStats SufficientStats::from(const Dataset& data) {
  SufficientStats s;
  s.n = data.size();
  if (data.has_covariates()) {
    for (std::size_t i = 0; i < data.size(); ++i) {
      const double x = data.covariates[i];
      const double y = data.values[i];
      s.sum_x += x;
      s.sum_xx += x * x;
      s.sum_xy += x * y;
      s.sum_y += y;
      s.sum_yy += y * y;
    }
  } else {
    for (double x : data.values) {
      s.sum_x += x;
      s.sum_xx += x * x;
    }
  }
  return s;
}

TemperedPosterior temper_update(const Model& model, const SufficientStats& stats, double t) {
  if (!(t >= 0.0 && t <= 1.0)) {
    std::ostringstream msg;
    msg << "temper_update: tempering must lie in [0, 1], got " << t;
    throw std::domain_error(msg.str());
  }
  validate(model);
  check_stats(stats);
  const double n = static_cast<double>(stats.n);

  TemperedPosterior post;
  post.t = t;
  std::visit(
      overloaded{
          [&](const GaussianKnownVarModel& m) {
            const double prior_prec = 1.0 / (m.prior_sd * m.prior_sd);
            const double lik_prec = 1.0 / (m.sigma0 * m.sigma0);
            GaussianPosterior p;
            p.sigma0 = m.sigma0;
            p.precision = prior_prec + t * n * lik_prec;
            p.mean = (m.prior_mean * prior_prec + t * stats.sum_x * lik_prec) / p.precision;
            post.params = p;
          },
          [&](const PoissonGammaModel& m) {
            if (stats.sum_x < 0.0) throw std::domain_error("poisson counts must be non-negative");
            post.params = GammaPosterior{m.shape + t * stats.sum_x, m.rate + t * n};
          },
          [&](const NigRegressionModel& m) {
            NigPosterior p;
            p.precision_scale = m.precision_scale + t * stats.sum_xx;
            p.coef_mean = (m.precision_scale * m.coef_mean + t * stats.sum_xy) / p.precision_scale;
            p.shape = m.shape + 0.5 * t * n;
            p.scale = m.scale + 0.5 * (t * stats.sum_yy + m.precision_scale * m.coef_mean * m.coef_mean -
                                       p.precision_scale * p.coef_mean * p.coef_mean);
            if (!(p.scale > 0.0) || !std::isfinite(p.scale)) {
              throw std::runtime_error("temper_update: non-positive inverse-gamma scale");
            }
            post.params = p;
          },
      },
      model);
  return post;
}

double posterior_logpdf(const TemperedPosterior& post, std::span<const double> theta) {
  return std::visit(
      overloaded{
          [&](const GaussianPosterior& p) {
            if (theta.size() != 1) throw std::invalid_argument("gaussian posterior takes one parameter");
            return normal_logpdf(theta[0], p.mean, 1.0 / std::sqrt(p.precision));
          },
          [&](const GammaPosterior& p) {
            if (theta.size() != 1) throw std::invalid_argument("gamma posterior takes one parameter");
            const double lambda = theta[0];
            if (!(lambda > 0.0)) return -std::numeric_limits<double>::infinity();
            return p.shape * std::log(p.rate) - log_gamma(p.shape) + (p.shape - 1.0) * std::log(lambda) -
                   p.rate * lambda;
          },
          [&](const NigPosterior& p) {
            if (theta.size() != 2) throw std::invalid_argument("NIG posterior takes (theta, sigma^2)");
            const double s2 = theta[1];
            if (!(s2 > 0.0)) return -std::numeric_limits<double>::infinity();
            return normal_logpdf(theta[0], p.coef_mean, std::sqrt(s2 / p.precision_scale)) +
                   p.shape * std::log(p.scale) - log_gamma(p.shape) - (p.shape + 1.0) * std::log(s2) -
                   p.scale / s2;
          },
      },
      post.params);
}

double predictive_logpdf(const TemperedPosterior& post, const Observation& obs) {
  return std::visit(
      overloaded{
          [&](const GaussianPosterior& p) {
            return normal_logpdf(obs.value, p.mean, std::sqrt(p.sigma0 * p.sigma0 + 1.0 / p.precision));
          },
          [&](const GammaPosterior& p) {
            const double x = obs.value;
            if (!(x >= 0.0) || std::floor(x) != x) {
              std::ostringstream msg;
              msg << "predictive_logpdf: count data must be a non-negative integer, got " << x;
              throw std::domain_error(msg.str());
            }
            return dist::negative_binomial_logpmf(x, p.shape, 1.0 / (1.0 + p.rate));
          },
          [&](const NigPosterior& p) {
            const double x = obs.covariate;
            const double scale =
                std::sqrt(p.scale / p.shape * (1.0 + x * x / p.precision_scale));
            return student_t_logpdf(obs.value, 2.0 * p.shape, p.coef_mean * x, scale);
          },
      },
      post.params);
}

Dataset predictive_sample(const TemperedPosterior& post, RngStream& rng, std::size_t n,
                          std::span<const double> covariates) {
  Dataset out;
  out.values.reserve(n);
  std::visit(overloaded{
                 [&](const GaussianPosterior& p) {
                   const double post_sd = 1.0 / std::sqrt(p.precision);
                   for (std::size_t i = 0; i < n; ++i) {
                     const double mu = dist::draw(dist::Normal{p.mean, post_sd}, rng);
                     out.values.push_back(dist::draw(dist::Normal{mu, p.sigma0}, rng));
                   }
                 },
                 [&](const GammaPosterior& p) {
                   for (std::size_t i = 0; i < n; ++i) {
                     const double lambda = dist::draw(dist::Gamma{p.shape, p.rate}, rng);
                     out.values.push_back(lambda > 0.0 ? dist::draw(dist::Poisson{lambda}, rng) : 0.0);
                   }
                 },
                 [&](const NigPosterior& p) {
                   if (covariates.size() != n) {
                     throw std::invalid_argument(
                         "predictive_sample: regression posterior needs one covariate per draw");
                   }
                   out.covariates.assign(covariates.begin(), covariates.end());
                   for (std::size_t i = 0; i < n; ++i) {
                     const double s2 = dist::draw_inverse_gamma(p.shape, p.scale, rng);
                     const double sd = std::sqrt(s2);
                     const double theta =
                         dist::draw(dist::Normal{p.coef_mean, sd / std::sqrt(p.precision_scale)}, rng);
                     out.values.push_back(dist::draw(dist::Normal{theta * covariates[i], sd}, rng));
                   }
                 },
             },
             post.params);
  return out;
}

double log_tempered_predictive(const Model& model, const SufficientStats& update_stats,
                               const Dataset& validate, double t) {
  if (validate.empty()) throw std::invalid_argument("log_tempered_predictive: empty validation set");
  const TemperedPosterior post = temper_update(model, update_stats, t);
  double total = 0.0;
  for (std::size_t i = 0; i < validate.size(); ++i) total += predictive_logpdf(post, validate.at(i));
  return total;
}

double log_tempered_predictive(const Model& model, const Dataset& update, const Dataset& validate,
                               double t) {
  if (update.empty()) throw std::invalid_argument("log_tempered_predictive: empty update set");
  if (is_regression(model) && (!update.has_covariates() || !validate.has_covariates())) {
    throw std::invalid_argument("log_tempered_predictive: regression data needs covariates");
  }
  return log_tempered_predictive(model, SufficientStats::from(update), validate, t);
}

}  // namespace carmen
