#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "carmen/dataset.hpp"
#include "carmen/rng.hpp"

namespace carmen {

/// x ~ N(mu, sigma0^2), mu ~ N(prior_mean, prior_sd^2).
struct GaussianKnownVarModel {
  double sigma0 = 0.1;
  double prior_mean = 0.0;
  double prior_sd = 9.9;
};

/// x ~ Poisson(lambda), lambda ~ Gamma(shape, rate).
struct PoissonGammaModel {
  double shape = 3.0;
  double rate = 0.05;
};

/// y ~ N(theta x, sigma^2), theta | sigma^2 ~ N(coef_mean, sigma^2 / precision_scale),
/// sigma^2 ~ InvGamma(shape, scale). Single coefficient, no intercept.
struct NigRegressionModel {
  double coef_mean = 0.0;
  double precision_scale = 1.0;
  double shape = 2.0;
  double scale = 2.0;
};

using Model = std::variant<GaussianKnownVarModel, PoissonGammaModel, NigRegressionModel>;

void validate(const Model& model);
bool is_regression(const Model& model);

/// For regression data x is the covariate and y the response; for
/// univariate data x is the value and the y sums stay zero.
struct SufficientStats {
  std::size_t n = 0;
  double sum_x = 0.0;
  double sum_xx = 0.0;
  double sum_xy = 0.0;
  double sum_y = 0.0;
  double sum_yy = 0.0;

  static SufficientStats from(const Dataset& data);
};

struct GaussianPosterior {
  double sigma0 = 1.0;
  double mean = 0.0;
  double precision = 1.0;
};

struct GammaPosterior {
  double shape = 1.0;
  double rate = 1.0;
};

struct NigPosterior {
  double coef_mean = 0.0;
  double precision_scale = 1.0;
  double shape = 1.0;
  double scale = 1.0;
};

/// Conjugate posterior after raising the likelihood to the power t.
struct TemperedPosterior {
  std::variant<GaussianPosterior, GammaPosterior, NigPosterior> params;
  double t = 0.0;

  bool is_regression() const noexcept { return std::holds_alternative<NigPosterior>(params); }
};

/// Closed-form tempered update. Throws std::domain_error for t outside
/// [0, 1] or inconsistent statistics.
TemperedPosterior temper_update(const Model& model, const SufficientStats& stats, double t);

inline TemperedPosterior prior_of(const Model& model) {
  return temper_update(model, SufficientStats{}, 0.0);
}

/// Posterior log density at a parameter point: mu (Gaussian), lambda
/// (Poisson-Gamma) or (theta, sigma^2) (regression).
double posterior_logpdf(const TemperedPosterior& post, std::span<const double> theta);

/// Log predictive density / mass of one observation. Negative or
/// non-integer counts for the Poisson-Gamma family throw std::domain_error.
double predictive_logpdf(const TemperedPosterior& post, const Observation& obs);

/// Ancestral sampling from the predictive: parameters from the posterior, then
/// data from the likelihood, independently per draw. Regression needs
/// `covariates` of length n (std::invalid_argument otherwise).
Dataset predictive_sample(const TemperedPosterior& post, RngStream& rng, std::size_t n,
                          std::span<const double> covariates = {});

/// Sum of one-point predictive log densities of `validate` under the
/// posterior tempered on `update`.
double log_tempered_predictive(const Model& model, const Dataset& update, const Dataset& validate,
                               double t);

/// Same, reusing precomputed update statistics.
double log_tempered_predictive(const Model& model, const SufficientStats& update_stats,
                               const Dataset& validate, double t);

}  // namespace carmen
