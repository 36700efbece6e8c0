#include "carmen/ratio.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace carmen {

namespace {

constexpr std::uint64_t kSimulateStream = 1;
constexpr std::uint64_t kClassifierStream = 2;

double class_offset(std::size_t n_obs, std::size_t n_sim) {
  return std::log(static_cast<double>(n_obs) / static_cast<double>(n_sim));
}

}  // namespace

Dataset simulate_for_validation(const TemperedPosterior& post, const Dataset& validate,
                                std::size_t n_sim, RngStream& rng) {
  if (validate.empty()) throw std::invalid_argument("simulate_for_validation: empty validation set");
  if (!post.is_regression()) return predictive_sample(post, rng, n_sim);
  if (!validate.has_covariates()) {
    throw std::invalid_argument("regression validation data must carry covariates");
  }
  std::vector<double> covariates(n_sim);
  for (double& c : covariates) {
    c = validate.covariates[static_cast<std::size_t>(rng.uniform_index(validate.size()))];
  }
  return predictive_sample(post, rng, n_sim, covariates);
}

LogRatioEstimate estimate_log_ratio_from_samples(const Dataset& observed, const Dataset& simulated,
                                                 const FeatureMap& fm, const CvOptions& cv,
                                                 RngStream rng) {
  std::vector<double> values = cv_log_odds(observed, simulated, fm, cv, std::move(rng));
  const double offset = class_offset(observed.size(), simulated.size());
  for (double& v : values) v += offset;
  return LogRatioEstimate::from_values(std::move(values));
}

LogRatioEstimate estimate_reverse_log_ratio_from_samples(const Dataset& observed,
                                                         const Dataset& simulated,
                                                         const FeatureMap& fm, const CvOptions& cv,
                                                         RngStream rng) {
  std::vector<double> values = cv_out_of_fold(observed, simulated, fm, cv, std::move(rng)).simulated;
  const double offset = class_offset(observed.size(), simulated.size());
  for (double& v : values) v = -(v + offset);
  return LogRatioEstimate::from_values(std::move(values));
}

LogRatioEstimate estimate_log_ratio(const TemperedPosterior& post, const Dataset& validate,
                                    const RatioOptions& options, RngStream rng) {
  const std::size_t n_sim = options.n_sim == 0 ? validate.size() : options.n_sim;
  RngStream sim_rng = rng.substream(kSimulateStream);
  const Dataset simulated = simulate_for_validation(post, validate, n_sim, sim_rng);
  return estimate_log_ratio_from_samples(validate, simulated, options.features, options.cv,
                                         rng.substream(kClassifierStream));
}

LogRatioEstimate estimate_reverse_log_ratio(const TemperedPosterior& post, const Dataset& validate,
                                            const RatioOptions& options, RngStream rng) {
  const std::size_t n_sim = options.n_sim == 0 ? validate.size() : options.n_sim;
  RngStream sim_rng = rng.substream(kSimulateStream);
  const Dataset simulated = simulate_for_validation(post, validate, n_sim, sim_rng);
  return estimate_reverse_log_ratio_from_samples(validate, simulated, options.features, options.cv,
                                                 rng.substream(kClassifierStream));
}

}  // namespace carmen
