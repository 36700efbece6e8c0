#include "carmen/discriminator.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <utility>

#include "carmen/kernels.hpp"

namespace carmen {

namespace {

struct TransformInfo {
  Transform transform;
  std::string_view canonical;
  std::array<std::string_view, 3> aliases;
};

constexpr std::array<TransformInfo, 13> kTransforms{{
    {Transform::X, "x", {"X", "", ""}},
    {Transform::AbsX, "abs_x", {"|x|", "absx", ""}},
    {Transform::X2, "x2", {"x^2", "x**2", ""}},
    {Transform::X3, "x3", {"x^3", "x**3", ""}},
    {Transform::X4, "x4", {"x^4", "x**4", ""}},
    {Transform::LogAbsX, "ln_abs_x", {"ln|x|", "log_abs_x", "lnabsx"}},
    {Transform::Y, "y", {"Y", "", ""}},
    {Transform::AbsY, "abs_y", {"|y|", "absy", ""}},
    {Transform::Y2, "y2", {"y^2", "y**2", ""}},
    {Transform::LogAbsY, "ln_abs_y", {"ln|y|", "log_abs_y", "lnabsy"}},
    {Transform::YX, "yx", {"y*x", "y.x", "xy"}},
    {Transform::AbsYX, "abs_yx", {"|y*x|", "|yx|", "absyx"}},
    {Transform::YX2, "yx2", {"(y*x)^2", "(yx)^2", "yx^2"}},
}};

double log_abs(double v) { return std::log(std::max(std::fabs(v), kLogAbsFloor)); }

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

double softplus(double eta) {
  return eta > 0.0 ? eta + std::log1p(std::exp(-eta)) : std::log1p(std::exp(eta));
}

double sigmoid(double eta) {
  if (eta >= 0.0) return 1.0 / (1.0 + std::exp(-eta));
  const double e = std::exp(eta);
  return e / (1.0 + e);
}

double penalized_loglik(std::span<const double> eta, std::span<const double> labels,
                        std::span<const double> weights, double ridge) {
  double ll = 0.0;
  for (std::size_t i = 0; i < eta.size(); ++i) ll += labels[i] * eta[i] - softplus(eta[i]);
  double sq = 0.0;
  for (double w : weights) sq += w * w;
  return ll - 0.5 * ridge * sq;
}

bool regression_pair(const Dataset& observed, const Dataset& simulated) {
  if (observed.has_covariates() != simulated.has_covariates()) {
    throw std::invalid_argument("observed and simulated data must both carry covariates or neither");
  }
  return observed.has_covariates();
}

FeatureMatrix stack_features(const FeatureMap& fm, const Dataset& observed, const Dataset& simulated) {
  const bool regression = regression_pair(observed, simulated);
  const std::size_t n_obs = observed.size();
  FeatureMatrix m(n_obs + simulated.size(), fm.size());
  for (std::size_t c = 0; c < fm.size(); ++c) {
    const Transform t = fm.transforms()[c];
    for (std::size_t i = 0; i < n_obs; ++i) m.at(i, c) = apply_transform(t, observed.at(i), regression);
    for (std::size_t i = 0; i < simulated.size(); ++i) {
      m.at(n_obs + i, c) = apply_transform(t, simulated.at(i), regression);
    }
  }
  return m;
}

FeatureMatrix standardized_rows(const FeatureMatrix& raw, const Standardizer& st,
                                std::span<const std::size_t> rows) {
  FeatureMatrix z(rows.size(), raw.cols);
  for (std::size_t c = 0; c < raw.cols; ++c) {
    for (std::size_t r = 0; r < rows.size(); ++r) z.at(r, c) = st.apply(c, raw.at(rows[r], c));
  }
  return z;
}

// Fisher-Yates with the library RNG so fold layouts are platform independent.
void shuffle(std::vector<std::size_t>& v, RngStream& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng.uniform_index(i));
    std::swap(v[i - 1], v[j]);
  }
}

}  // namespace

std::string_view transform_name(Transform t) {
  for (const auto& info : kTransforms) {
    if (info.transform == t) return info.canonical;
  }
  return "?";
}

Transform parse_transform(std::string_view name) {
  name = trim(name);
  for (const auto& info : kTransforms) {
    if (name == info.canonical) return info.transform;
    for (std::string_view alias : info.aliases) {
      if (!alias.empty() && name == alias) return info.transform;
    }
  }
  throw std::invalid_argument("unknown feature transform '" + std::string(name) + "'");
}

bool uses_response(Transform t) {
  switch (t) {
    case Transform::Y:
    case Transform::AbsY:
    case Transform::Y2:
    case Transform::LogAbsY:
    case Transform::YX:
    case Transform::AbsYX:
    case Transform::YX2:
      return true;
    default:
      return false;
  }
}

double apply_transform(Transform t, const Observation& obs, bool regression) {
  if (uses_response(t) && !regression) {
    throw std::invalid_argument("transform '" + std::string(transform_name(t)) +
                                "' needs regression data");
  }
  const double x = regression ? obs.covariate : obs.value;
  const double y = obs.value;
  switch (t) {
    case Transform::X: return x;
    case Transform::AbsX: return std::fabs(x);
    case Transform::X2: return x * x;
    case Transform::X3: return x * x * x;
    case Transform::X4: return (x * x) * (x * x);
    case Transform::LogAbsX: return log_abs(x);
    case Transform::Y: return y;
    case Transform::AbsY: return std::fabs(y);
    case Transform::Y2: return y * y;
    case Transform::LogAbsY: return log_abs(y);
    case Transform::YX: return y * x;
    case Transform::AbsYX: return std::fabs(y * x);
    case Transform::YX2: return (y * x) * (y * x);
  }
  return 0.0;
}

FeatureMap::FeatureMap(std::vector<Transform> transforms) : transforms_(std::move(transforms)) {
  if (transforms_.empty()) throw std::invalid_argument("feature map needs at least one transform");
}

FeatureMap FeatureMap::parse(std::string_view list) {
  std::vector<Transform> out;
  while (!list.empty()) {
    const auto comma = list.find(',');
    const std::string_view item = trim(list.substr(0, comma));
    if (!item.empty()) out.push_back(parse_transform(item));
    if (comma == std::string_view::npos) break;
    list.remove_prefix(comma + 1);
  }
  return FeatureMap(std::move(out));
}

std::string FeatureMap::to_string() const {
  std::string out;
  for (std::size_t i = 0; i < transforms_.size(); ++i) {
    if (i > 0) out += ',';
    out += transform_name(transforms_[i]);
  }
  return out;
}

std::vector<double> FeatureMap::row(const Observation& obs, bool regression) const {
  std::vector<double> out;
  out.reserve(transforms_.size());
  for (Transform t : transforms_) out.push_back(apply_transform(t, obs, regression));
  return out;
}

std::vector<double> FeatureMatrix::row(std::size_t r) const {
  std::vector<double> out(cols);
  for (std::size_t c = 0; c < cols; ++c) out[c] = at(r, c);
  return out;
}

FeatureMatrix evaluate_features(const FeatureMap& fm, const Dataset& data) {
  const bool regression = data.has_covariates();
  FeatureMatrix m(data.size(), fm.size());
  for (std::size_t c = 0; c < fm.size(); ++c) {
    for (std::size_t i = 0; i < data.size(); ++i) {
      m.at(i, c) = apply_transform(fm.transforms()[c], data.at(i), regression);
    }
  }
  return m;
}

Standardizer Standardizer::fit(const FeatureMatrix& raw, std::span<const std::size_t> rows) {
  Standardizer st;
  st.mean.assign(raw.cols, 0.0);
  st.sd.assign(raw.cols, 1.0);
  const std::size_t n = rows.empty() ? raw.rows : rows.size();
  if (n == 0) return st;
  const auto row_at = [&](std::size_t k) { return rows.empty() ? k : rows[k]; };
  for (std::size_t c = 0; c < raw.cols; ++c) {
    double sum = 0.0;
    for (std::size_t k = 0; k < n; ++k) sum += raw.at(row_at(k), c);
    const double mu = sum / static_cast<double>(n);
    double ss = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      const double d = raw.at(row_at(k), c) - mu;
      ss += d * d;
    }
    const double sd = std::sqrt(ss / static_cast<double>(n));
    st.mean[c] = mu;
    st.sd[c] = (sd > 0.0 && std::isfinite(sd)) ? sd : 1.0;
  }
  return st;
}

LabeledDesign build_design(const Dataset& observed, const Dataset& simulated, const FeatureMap& fm) {
  if (observed.empty() || simulated.empty()) {
    throw std::invalid_argument("build_design: both datasets must be non-empty");
  }
  LabeledDesign design;
  design.features = stack_features(fm, observed, simulated);
  design.labels.assign(observed.size(), 0.0);
  design.labels.resize(observed.size() + simulated.size(), 1.0);
  design.standardizer = Standardizer::fit(design.features);
  return design;
}

LogisticFit fit_logistic_standardized(const FeatureMatrix& z, std::span<const double> labels,
                                      const LogisticOptions& options) {
  if (labels.size() != z.rows) throw std::invalid_argument("fit_logistic: label count mismatch");
  if (!(options.ridge >= 0.0)) throw std::invalid_argument("fit_logistic: ridge must be non-negative");
  const bool has_zero = std::any_of(labels.begin(), labels.end(), [](double y) { return y == 0.0; });
  const bool has_one = std::any_of(labels.begin(), labels.end(), [](double y) { return y == 1.0; });
  if (!has_zero || !has_one) throw std::invalid_argument("fit_logistic: both classes must be present");

  const std::size_t n = z.rows;
  const std::size_t p = z.cols;
  const auto& k = kernels::active();

  LogisticFit fit;
  fit.weights.assign(p, 0.0);
  fit.ridge = options.ridge;

  std::vector<double> eta(n, 0.0);
  std::vector<double> wt(n);
  std::vector<double> resid(n);
  std::vector<double> dir_eta(n);
  std::vector<double> trial_eta(n);
  std::vector<double> trial_w(p);

  double objective = penalized_loglik(eta, labels, fit.weights, fit.ridge);
  fit.objective_trace.push_back(objective);
  int escalations = 0;

  Eigen::MatrixXd hess(p + 1, p + 1);
  Eigen::VectorXd grad(p + 1);

  while (fit.iterations < options.max_iter) {
    double sum_w = 0.0;
    double sum_r = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double prob = sigmoid(eta[i]);
      wt[i] = prob * (1.0 - prob);
      resid[i] = labels[i] - prob;
      sum_w += wt[i];
      sum_r += resid[i];
    }
    hess(0, 0) = sum_w;
    grad(0) = sum_r;
    for (std::size_t j = 0; j < p; ++j) {
      const double* zj = z.col(j).data();
      hess(0, j + 1) = hess(j + 1, 0) = k.dot(wt.data(), zj, n);
      grad(j + 1) = k.dot(resid.data(), zj, n) - fit.ridge * fit.weights[j];
      for (std::size_t l = 0; l <= j; ++l) {
        const double v = k.weighted_dot(wt.data(), zj, z.col(l).data(), n);
        hess(j + 1, l + 1) = hess(l + 1, j + 1) = v;
      }
      hess(j + 1, j + 1) += fit.ridge;
    }

    Eigen::LLT<Eigen::MatrixXd> llt(hess);
    const bool singular = llt.info() != Eigen::Success || !(llt.rcond() > 1e-14);
    if (singular) {
      if (escalations == 3) break;
      ++escalations;
      fit.ridge = fit.ridge > 0.0 ? fit.ridge * 10.0 : 1e-6;
      objective = penalized_loglik(eta, labels, fit.weights, fit.ridge);
      continue;
    }
    const Eigen::VectorXd delta = llt.solve(grad);
    if (!delta.allFinite()) break;

    std::fill(dir_eta.begin(), dir_eta.end(), delta(0));
    for (std::size_t j = 0; j < p; ++j) k.axpy(delta(j + 1), z.col(j).data(), dir_eta.data(), n);

    double step = 1.0;
    double trial_objective = objective;
    bool accepted = false;
    for (int halving = 0; halving < 40; ++halving, step *= 0.5) {
      for (std::size_t i = 0; i < n; ++i) trial_eta[i] = eta[i] + step * dir_eta[i];
      for (std::size_t j = 0; j < p; ++j) trial_w[j] = fit.weights[j] + step * delta(j + 1);
      trial_objective = penalized_loglik(trial_eta, labels, trial_w, fit.ridge);
      if (trial_objective >= objective) {
        accepted = true;
        break;
      }
    }
    ++fit.iterations;
    if (!accepted) {
      // No ascent left at floating-point resolution.
      fit.converged = step * delta.cwiseAbs().maxCoeff() < options.tol;
      break;
    }
    fit.intercept += step * delta(0);
    fit.weights = trial_w;
    eta.swap(trial_eta);
    objective = trial_objective;
    fit.objective_trace.push_back(objective);
    if (step * delta.cwiseAbs().maxCoeff() < options.tol) {
      fit.converged = true;
      break;
    }
  }
  return fit;
}

LogisticFit fit_logistic(const LabeledDesign& design, const LogisticOptions& options) {
  std::vector<std::size_t> all(design.features.rows);
  std::iota(all.begin(), all.end(), std::size_t{0});
  const FeatureMatrix z = standardized_rows(design.features, design.standardizer, all);
  LogisticFit fit = fit_logistic_standardized(z, design.labels, options);
  fit.standardizer = design.standardizer;
  return fit;
}

double log_odds(const LogisticFit& fit, std::span<const double> raw_row) {
  if (raw_row.size() != fit.weights.size()) {
    std::ostringstream msg;
    msg << "log_odds: feature row has " << raw_row.size() << " entries, fit expects "
        << fit.weights.size();
    throw std::invalid_argument(msg.str());
  }
  double eta = fit.intercept;
  const bool standardized = fit.standardizer.mean.size() == fit.weights.size();
  for (std::size_t j = 0; j < raw_row.size(); ++j) {
    const double v = standardized ? fit.standardizer.apply(j, raw_row[j]) : raw_row[j];
    eta += fit.weights[j] * v;
  }
  return eta;
}

OutOfFoldLogOdds cv_out_of_fold(const Dataset& observed, const Dataset& simulated,
                                const FeatureMap& fm, const CvOptions& options, RngStream rng) {
  const std::size_t k = options.folds;
  if (k < 2) throw std::invalid_argument("cross-validation needs at least 2 folds");
  if (observed.size() < k || simulated.size() < k) {
    std::ostringstream msg;
    msg << "cross-validation with " << k << " folds needs at least " << k
        << " points per class (observed " << observed.size() << ", simulated " << simulated.size()
        << ")";
    throw std::invalid_argument(msg.str());
  }
  const std::size_t n_obs = observed.size();
  const std::size_t n_sim = simulated.size();
  const FeatureMatrix raw = stack_features(fm, observed, simulated);

  // Stratified assignment: shuffle each class, then deal rows round-robin.
  std::vector<std::size_t> fold_of(n_obs + n_sim);
  RngStream fold_rng = rng.substream(0x666f6c64ULL);
  for (const auto& [first, count] : {std::pair{std::size_t{0}, n_obs}, std::pair{n_obs, n_sim}}) {
    std::vector<std::size_t> order(count);
    std::iota(order.begin(), order.end(), first);
    shuffle(order, fold_rng);
    for (std::size_t pos = 0; pos < count; ++pos) fold_of[order[pos]] = pos % k;
  }

  std::vector<double> labels_all(n_obs + n_sim, 0.0);
  std::fill(labels_all.begin() + static_cast<std::ptrdiff_t>(n_obs), labels_all.end(), 1.0);

  OutOfFoldLogOdds out;
  out.observed.assign(n_obs, 0.0);
  out.simulated.assign(n_sim, 0.0);
  std::vector<std::size_t> train;
  std::vector<double> train_labels;
  for (std::size_t f = 0; f < k; ++f) {
    train.clear();
    train_labels.clear();
    for (std::size_t r = 0; r < fold_of.size(); ++r) {
      if (fold_of[r] != f) {
        train.push_back(r);
        train_labels.push_back(labels_all[r]);
      }
    }
    LogisticFit fit;
    fit.standardizer = Standardizer::fit(raw, train);
    const FeatureMatrix z = standardized_rows(raw, fit.standardizer, train);
    {
      LogisticFit solved = fit_logistic_standardized(z, train_labels, options.logistic);
      solved.standardizer = std::move(fit.standardizer);
      fit = std::move(solved);
    }
    if (!fit.converged) ++out.nonconverged_fits;
    for (std::size_t r = 0; r < fold_of.size(); ++r) {
      if (fold_of[r] != f) continue;
      const double value = log_odds(fit, raw.row(r));
      if (r < n_obs) {
        out.observed[r] = value;
      } else {
        out.simulated[r - n_obs] = value;
      }
    }
  }
  return out;
}

std::vector<double> cv_log_odds(const Dataset& observed, const Dataset& simulated,
                                const FeatureMap& fm, const CvOptions& options, RngStream rng) {
  return cv_out_of_fold(observed, simulated, fm, options, std::move(rng)).observed;
}

}  // namespace carmen
