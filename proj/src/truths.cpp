#include "carmen/truths.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "carmen/distributions.hpp"
#include "carmen/special.hpp"

namespace carmen {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

double sigmoid_mean(const RegressionSigmoidTruth& s, double x) {
  return s.amplitude * (normal_cdf(s.steepness * x) - 0.5);
}

}  // namespace

void validate(const TruthSpec& spec) {
  std::visit(
      overloaded{
          [](const GaussianTruth& g) { dist::validate(dist::Normal{g.mean, g.sd}); },
          [](const LaplaceTruth& l) { dist::validate(dist::Laplace{l.loc, l.scale}); },
          [](const NegBinomialTruth& nb) { dist::validate(dist::NegativeBinomial{nb.r, nb.p}); },
          [](const BetaBinomialTruth& bb) { dist::validate(dist::BetaBinomial{bb.a, bb.b, bb.trials}); },
          [](const RegressionTNoiseTruth& r) {
            dist::validate(dist::StudentT{r.df, 0.0, r.scale});
            dist::validate(dist::Uniform{r.covariate_lo, r.covariate_hi});
            if (!std::isfinite(r.slope)) throw std::domain_error("regression slope must be finite");
          },
          [](const RegressionSigmoidTruth& r) {
            dist::validate(dist::Normal{0.0, r.noise_sd});
            dist::validate(dist::Uniform{r.covariate_lo, r.covariate_hi});
            if (!std::isfinite(r.amplitude) || !std::isfinite(r.steepness)) {
              throw std::domain_error("sigmoid amplitude and steepness must be finite");
            }
          },
      },
      spec);
}

bool is_regression(const TruthSpec& spec) {
  return std::holds_alternative<RegressionTNoiseTruth>(spec) ||
         std::holds_alternative<RegressionSigmoidTruth>(spec);
}

std::string family_name(const TruthSpec& spec) {
  return std::visit(overloaded{
                        [](const GaussianTruth&) { return std::string("gaussian"); },
                        [](const LaplaceTruth&) { return std::string("laplace"); },
                        [](const NegBinomialTruth&) { return std::string("neg-binomial"); },
                        [](const BetaBinomialTruth&) { return std::string("beta-binomial"); },
                        [](const RegressionTNoiseTruth&) { return std::string("regression-t-noise"); },
                        [](const RegressionSigmoidTruth&) { return std::string("regression-sigmoid"); },
                    },
                    spec);
}

Dataset truth_sample(const TruthSpec& spec, RngStream& rng, std::size_t n) {
  if (n == 0) throw std::domain_error("truth_sample: n must be at least 1");
  validate(spec);
  Dataset out;
  std::visit(
      overloaded{
          [&](const GaussianTruth& g) { out.values = dist::sample(dist::Normal{g.mean, g.sd}, rng, n); },
          [&](const LaplaceTruth& l) { out.values = dist::sample(dist::Laplace{l.loc, l.scale}, rng, n); },
          [&](const NegBinomialTruth& nb) {
            out.values = dist::sample(dist::NegativeBinomial{nb.r, nb.p}, rng, n);
          },
          [&](const BetaBinomialTruth& bb) {
            out.values = dist::sample(dist::BetaBinomial{bb.a, bb.b, bb.trials}, rng, n);
          },
          [&](const RegressionTNoiseTruth& r) {
            out.covariates = dist::sample(dist::Uniform{r.covariate_lo, r.covariate_hi}, rng, n);
            out.values.reserve(n);
            for (double x : out.covariates) {
              out.values.push_back(dist::draw(dist::StudentT{r.df, r.slope * x, r.scale}, rng));
            }
          },
          [&](const RegressionSigmoidTruth& r) {
            out.covariates = dist::sample(dist::Uniform{r.covariate_lo, r.covariate_hi}, rng, n);
            out.values.reserve(n);
            for (double x : out.covariates) {
              out.values.push_back(dist::draw(dist::Normal{sigmoid_mean(r, x), r.noise_sd}, rng));
            }
          },
      },
      spec);
  return out;
}

double truth_logpdf(const TruthSpec& spec, const Observation& obs) {
  return std::visit(
      overloaded{
          [&](const GaussianTruth& g) { return normal_logpdf(obs.value, g.mean, g.sd); },
          [&](const LaplaceTruth& l) { return dist::laplace_logpdf(obs.value, l.loc, l.scale); },
          [&](const NegBinomialTruth& nb) { return dist::negative_binomial_logpmf(obs.value, nb.r, nb.p); },
          [&](const BetaBinomialTruth& bb) {
            return dist::beta_binomial_logpmf(obs.value, bb.a, bb.b, bb.trials);
          },
          [&](const RegressionTNoiseTruth& r) {
            return student_t_logpdf(obs.value, r.df, r.slope * obs.covariate, r.scale);
          },
          [&](const RegressionSigmoidTruth& r) {
            return normal_logpdf(obs.value, sigmoid_mean(r, obs.covariate), r.noise_sd);
          },
      },
      spec);
}

LogRatioEstimate true_log_ratio(const TemperedPosterior& predictive, const TruthSpec& spec,
                                const Dataset& validate) {
  if (validate.empty()) throw std::invalid_argument("true_log_ratio: empty validation set");
  std::vector<double> values;
  values.reserve(validate.size());
  for (std::size_t i = 0; i < validate.size(); ++i) {
    const Observation obs = validate.at(i);
    values.push_back(predictive_logpdf(predictive, obs) - truth_logpdf(spec, obs));
  }
  return LogRatioEstimate::from_values(std::move(values));
}

}  // namespace carmen
