#pragma once

#include <cstddef>
#include <string>
#include <variant>

#include "carmen/conjugate.hpp"
#include "carmen/dataset.hpp"
#include "carmen/log_ratio.hpp"
#include "carmen/rng.hpp"

namespace carmen {

struct GaussianTruth {
  double mean = 0.0;
  double sd = 3.01;
};

struct LaplaceTruth {
  double loc = 0.0;
  double scale = 2.13;
};

/// Same convention as dist::NegativeBinomial: mean r p / (1 - p).
struct NegBinomialTruth {
  double r = 63.0;
  double p = 0.488;
};

struct BetaBinomialTruth {
  double a = 41.75;
  double b = 78.25;
  long trials = 80;
};

/// x ~ U(covariate_lo, covariate_hi), y ~ slope x + scale * T(df).
struct RegressionTNoiseTruth {
  double slope = 1.0;
  double scale = 1.22;
  double df = 3.0;
  double covariate_lo = -1.0;
  double covariate_hi = 1.0;
};

/// x ~ U(covariate_lo, covariate_hi),
/// y ~ N(amplitude (Phi(steepness x) - 1/2), noise_sd^2).
struct RegressionSigmoidTruth {
  double amplitude = 5.0;
  double steepness = 10.0;
  double noise_sd = 0.1;
  double covariate_lo = -1.0;
  double covariate_hi = 1.0;
};

using TruthSpec = std::variant<GaussianTruth, LaplaceTruth, NegBinomialTruth, BetaBinomialTruth,
                               RegressionTNoiseTruth, RegressionSigmoidTruth>;

/// Throws std::domain_error on invalid parameters.
void validate(const TruthSpec& spec);

bool is_regression(const TruthSpec& spec);

/// Family tag as used in config files: gaussian, laplace, neg-binomial,
/// beta-binomial, regression-t-noise, regression-sigmoid.
std::string family_name(const TruthSpec& spec);

/// n i.i.d. draws. Regression families draw all covariates first, then the
/// responses.
Dataset truth_sample(const TruthSpec& spec, RngStream& rng, std::size_t n);

/// Exact log density (conditional on the covariate for regression); -inf
/// outside the support.
double truth_logpdf(const TruthSpec& spec, const Observation& obs);

/// Exact per-point log ratios predictive_logpdf - truth_logpdf.
LogRatioEstimate true_log_ratio(const TemperedPosterior& predictive, const TruthSpec& spec,
                                const Dataset& validate);

}  // namespace carmen
