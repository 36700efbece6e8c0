#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "carmen/conjugate.hpp"
#include "carmen/discriminator.hpp"
#include "carmen/misspec_test.hpp"
#include "carmen/tempering.hpp"
#include "carmen/truths.hpp"

namespace carmen {

inline constexpr std::string_view kVersion = "1.0.0";

struct ScenarioConfig {
  std::string scenario = "custom";
  std::size_t n_update = 1000;
  std::size_t n_validate = 1000;
  std::uint64_t seed = 0;
  std::size_t folds = 10;
  double ridge = 1e-6;
  std::string grid = "1e-08:1:50";
  bool full_curve = false;
  bool reverse_kl = false;
  std::string out;

  Model model = GaussianKnownVarModel{};
  TruthSpec truth = GaussianTruth{};
  FeatureMap features = FeatureMap({Transform::X, Transform::X2});

  /// Throws std::invalid_argument when the config cannot be run.
  void validate() const;
};

struct NamedScenario {
  std::string_view name;
  std::string_view description;
};

const std::vector<NamedScenario>& named_scenarios();

/// Config with the model, truth and features bound for a named scenario.
/// Throws std::invalid_argument for unknown names.
ScenarioConfig named_config(std::string_view name);

/// Flat `key = value` config file; `#` starts a comment. A `scenario` key
/// naming a built-in scenario loads its bindings first, later keys override.
ScenarioConfig parse_config(std::string_view text);
ScenarioConfig load_config_file(const std::filesystem::path& path);

/// Applies one `key = value` setting. Throws std::invalid_argument for
/// unknown keys or malformed values.
void apply_setting(ScenarioConfig& cfg, std::string_view key, std::string_view value);

std::string model_family_name(const Model& model);

struct EstimateSummary {
  double sum = 0.0;
  double mean = 0.0;
  double sd = 0.0;
  std::size_t n = 0;

  static EstimateSummary of(const LogRatioEstimate& est);
};

struct ScenarioResult {
  ScenarioConfig config;
  double t_star = 1.0;
  std::string t_star_method;
  bool t_star_at_boundary = false;
  double log_predictive_at_t_star = 0.0;
  EstimateSummary logz;
  MisspecTestResult test;
  std::optional<MisspecTestResult> wilcoxon;
  std::optional<EstimateSummary> true_logz;
  std::optional<EstimateSummary> reverse_logz;
  std::vector<CurvePoint> curve;
  std::string kernel_variant;
  std::string version;
};

/// Samples the observed data from the truth, splits it (first n_update points
/// update, the rest validate), selects t* and runs the classifier
/// diagnostics. Deterministic given the config.
ScenarioResult run_scenario(const ScenarioConfig& cfg);

nlohmann::ordered_json config_to_json(const ScenarioConfig& cfg);
ScenarioConfig config_from_json(const nlohmann::ordered_json& j);
nlohmann::ordered_json result_to_json(const ScenarioResult& result);
ScenarioResult result_from_json(const nlohmann::ordered_json& j);

/// Curve rows as CSV with 10 significant digits, sorted by t.
std::string curve_csv(const std::vector<CurvePoint>& points);

struct OutputPaths {
  std::filesystem::path summary_json;
  std::filesystem::path curve_csv;
};

/// Writes summary.json and curve.csv under `dir` (created if missing).
/// Throws std::runtime_error naming the path on I/O failure.
OutputPaths emit_outputs(const ScenarioResult& result, const std::filesystem::path& dir);

}  // namespace carmen
