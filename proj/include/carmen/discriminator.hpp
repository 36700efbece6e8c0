#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "carmen/dataset.hpp"
#include "carmen/rng.hpp"

namespace carmen {

/// Summary-statistic transforms. For regression data `x` is the covariate and
/// `y` the response; otherwise `x` is the datapoint and y-transforms are
/// unavailable.
enum class Transform { X, AbsX, X2, X3, X4, LogAbsX, Y, AbsY, Y2, LogAbsY, YX, AbsYX, YX2 };

/// |v| is clamped to this before taking ln|v|.
inline constexpr double kLogAbsFloor = 1e-12;

/// Canonical config name: x, abs_x, x2, x3, x4, ln_abs_x, y, abs_y, y2,
/// ln_abs_y, yx, abs_yx, yx2.
std::string_view transform_name(Transform t);

/// Accepts canonical names and the symbolic spellings |x|, x^2, ln|x|, y*x, ...
/// Throws std::invalid_argument for unknown names.
Transform parse_transform(std::string_view name);

bool uses_response(Transform t);

double apply_transform(Transform t, const Observation& obs, bool regression);

class FeatureMap {
 public:
  FeatureMap() = default;
  /// Throws std::invalid_argument when empty.
  explicit FeatureMap(std::vector<Transform> transforms);

  /// Comma-separated transform names.
  static FeatureMap parse(std::string_view list);

  const std::vector<Transform>& transforms() const noexcept { return transforms_; }
  std::size_t size() const noexcept { return transforms_.size(); }
  std::string to_string() const;

  std::vector<double> row(const Observation& obs, bool regression) const;

 private:
  std::vector<Transform> transforms_;
};

/// Dense column-major matrix.
struct FeatureMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  FeatureMatrix() = default;
  FeatureMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

  double& at(std::size_t r, std::size_t c) { return data[c * rows + r]; }
  double at(std::size_t r, std::size_t c) const { return data[c * rows + r]; }
  std::span<double> col(std::size_t c) { return {data.data() + c * rows, rows}; }
  std::span<const double> col(std::size_t c) const { return {data.data() + c * rows, rows}; }
  std::vector<double> row(std::size_t r) const;
};

/// Raw features of every point in `data`.
FeatureMatrix evaluate_features(const FeatureMap& fm, const Dataset& data);

/// Per-column centering and scaling. Constant columns get unit scale.
struct Standardizer {
  std::vector<double> mean;
  std::vector<double> sd;

  /// Fits on the listed rows (all rows when `rows` is empty).
  static Standardizer fit(const FeatureMatrix& raw, std::span<const std::size_t> rows = {});
  double apply(std::size_t col, double raw) const { return (raw - mean[col]) / sd[col]; }
};

/// Raw features and labels (1 = simulated, 0 = observed).
struct LabeledDesign {
  FeatureMatrix features;
  std::vector<double> labels;
  Standardizer standardizer;
};

/// Rows are the observed points followed by the simulated points; the
/// standardizer is fitted on the union.
LabeledDesign build_design(const Dataset& observed, const Dataset& simulated, const FeatureMap& fm);

struct LogisticOptions {
  double ridge = 1e-6;
  std::size_t max_iter = 100;
  double tol = 1e-8;
};

struct LogisticFit {
  double intercept = 0.0;
  std::vector<double> weights;
  /// Penalty actually used; larger than requested if the solver had to
  /// escalate it.
  double ridge = 0.0;
  bool converged = false;
  std::size_t iterations = 0;
  Standardizer standardizer;
  /// Penalized log likelihood after each accepted step (index 0 = start).
  std::vector<double> objective_trace;
};

/// Ridge-penalized logistic regression by IRLS (Newton) with step halving.
/// The intercept is not penalized. Throws std::invalid_argument unless both
/// labels are present.
LogisticFit fit_logistic(const LabeledDesign& design, const LogisticOptions& options = {});

/// Same, on an already standardized column-major matrix.
LogisticFit fit_logistic_standardized(const FeatureMatrix& z, std::span<const double> labels,
                                      const LogisticOptions& options);

/// ln P(simulated | x) / P(observed | x) for a raw feature row.
double log_odds(const LogisticFit& fit, std::span<const double> raw_row);

struct CvOptions {
  std::size_t folds = 10;
  LogisticOptions logistic;
};

struct OutOfFoldLogOdds {
  std::vector<double> observed;
  std::vector<double> simulated;
  std::size_t nonconverged_fits = 0;
};

/// Stratified k-fold cross-validation: every point of both classes receives
/// exactly one out-of-fold log-odds. Throws std::invalid_argument when a
/// class has fewer than k points or k < 2.
OutOfFoldLogOdds cv_out_of_fold(const Dataset& observed, const Dataset& simulated,
                                const FeatureMap& fm, const CvOptions& options, RngStream rng);

/// Out-of-fold log-odds of the observed points only.
std::vector<double> cv_log_odds(const Dataset& observed, const Dataset& simulated,
                                const FeatureMap& fm, const CvOptions& options, RngStream rng);

}  // namespace carmen
