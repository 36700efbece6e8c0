#pragma once

#include <cstddef>

#include "carmen/conjugate.hpp"
#include "carmen/dataset.hpp"
#include "carmen/discriminator.hpp"
#include "carmen/log_ratio.hpp"
#include "carmen/rng.hpp"

namespace carmen {

struct RatioOptions {
  FeatureMap features;
  CvOptions cv;
  /// Simulated sample size; 0 means "same as the validation set".
  std::size_t n_sim = 0;
};

/// Classifier-based per-point log ratios log p_model / p_truth on the
/// observed points: out-of-fold log-odds plus ln(n_obs / n_sim). The negated
/// mean estimates KL(truth || model) as seen through the classifier.
LogRatioEstimate estimate_log_ratio_from_samples(const Dataset& observed, const Dataset& simulated,
                                                 const FeatureMap& fm, const CvOptions& cv,
                                                 RngStream rng);

/// Reverse direction: out-of-fold log-odds on the simulated points, corrected
/// for class sizes and negated, so the mean estimates -KL(model || truth).
LogRatioEstimate estimate_reverse_log_ratio_from_samples(const Dataset& observed,
                                                         const Dataset& simulated,
                                                         const FeatureMap& fm, const CvOptions& cv,
                                                         RngStream rng);

/// Draws the simulated class from the predictive of `post` (regression
/// covariates resampled with replacement from `validate`) and runs the
/// forward estimator.
LogRatioEstimate estimate_log_ratio(const TemperedPosterior& post, const Dataset& validate,
                                    const RatioOptions& options, RngStream rng);

LogRatioEstimate estimate_reverse_log_ratio(const TemperedPosterior& post, const Dataset& validate,
                                            const RatioOptions& options, RngStream rng);

/// The simulated class used by the two estimators above.
Dataset simulate_for_validation(const TemperedPosterior& post, const Dataset& validate,
                                std::size_t n_sim, RngStream& rng);

}  // namespace carmen
