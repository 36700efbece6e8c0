#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "carmen/conjugate.hpp"
#include "carmen/dataset.hpp"
#include "carmen/log_ratio.hpp"
#include "carmen/misspec_test.hpp"
#include "carmen/ratio.hpp"
#include "carmen/rng.hpp"
#include "carmen/truths.hpp"

namespace carmen {

class TemperingGrid {
 public:
  enum class Spacing { LogUniform, Explicit };

  /// `count` points log-uniform on [lo, hi], 0 < lo <= hi <= 1.
  static TemperingGrid log_uniform(double lo, double hi, std::size_t count);
  /// Throws std::invalid_argument unless strictly increasing within (0, 1].
  static TemperingGrid explicit_values(std::vector<double> values);
  /// "lo:hi:count".
  static TemperingGrid parse(std::string_view spec);

  const std::vector<double>& values() const noexcept { return values_; }
  Spacing spacing() const noexcept { return spacing_; }
  std::size_t size() const noexcept { return values_.size(); }
  /// Round-trippable form: "lo:hi:count" or a comma-separated list.
  std::string to_string() const;

 private:
  std::vector<double> values_;
  Spacing spacing_ = Spacing::Explicit;
};

struct TStarSearch {
  double t_star = 1.0;
  double log_predictive = 0.0;
  bool at_boundary = false;
  std::size_t best_grid_index = 0;
  std::vector<double> grid_log_predictive;
};

/// Grid scan of log_tempered_predictive, then golden-section refinement over
/// log10(t) inside the bracket around the best grid point. A maximum on the
/// edge of the grid is returned exactly and flagged.
TStarSearch optimize_t(const Model& model, const Dataset& update, const Dataset& validate,
                       const TemperingGrid& grid);

struct CurvePoint {
  double t = 0.0;
  std::optional<double> log_predictive;
  std::optional<double> logz_approx_sum;
  std::optional<double> logz_true_sum;
  std::optional<double> t_stat;
  std::optional<double> p_value;
};

/// Classifier diagnostics at the selected tempering.
struct TStarDiagnostics {
  double t = 1.0;
  LogRatioEstimate approx;
  MisspecTestResult test;
  std::optional<MisspecTestResult> wilcoxon;
  std::optional<LogRatioEstimate> truth;
  std::optional<LogRatioEstimate> reverse;
};

struct TemperingCurve {
  std::vector<CurvePoint> points;
  double t_star = 1.0;
  /// "golden-section" or "grid-boundary".
  std::string method;
  double log_predictive_at_t_star = 0.0;
  TStarDiagnostics at_t_star;
};

struct CurveOptions {
  RatioOptions ratio;
  /// Run the classifier (and the t-test) at every grid point, not only at t*.
  bool classifier_on_grid = false;
  bool reverse_kl = false;
  /// Worker threads for grid points; 0 picks hardware concurrency.
  std::size_t threads = 0;
};

/// Full diagnostic sweep. Per-grid-point failures leave that point's fields
/// empty instead of aborting. Grid point i uses rng.substream(1000 + i).
TemperingCurve curve(const Model& model, const std::optional<TruthSpec>& truth, const Dataset& update,
                     const Dataset& validate, const TemperingGrid& grid, const CurveOptions& options,
                     RngStream rng);

}  // namespace carmen
