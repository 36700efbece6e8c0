#include "carmen/scenario.hpp"

#include <charconv>
#include <cmath>
#include <limits>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <system_error>

#include "carmen/kernels.hpp"

namespace carmen {

namespace {

using json = nlohmann::ordered_json;

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

constexpr std::uint64_t kTruthStream = 1;
constexpr std::uint64_t kCurveStream = 2;

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

[[noreturn]] void bad_value(std::string_view key, std::string_view value) {
  throw std::invalid_argument("invalid value '" + std::string(value) + "' for '" + std::string(key) + "'");
}

double to_double(std::string_view key, std::string_view value) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
  if (ec != std::errc() || ptr != value.data() + value.size()) bad_value(key, value);
  return v;
}

std::uint64_t to_u64(std::string_view key, std::string_view value) {
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
  if (ec != std::errc() || ptr != value.data() + value.size()) bad_value(key, value);
  return v;
}

bool to_bool(std::string_view key, std::string_view value) {
  if (value == "true" || value == "1" || value == "yes" || value == "on") return true;
  if (value == "false" || value == "0" || value == "no" || value == "off") return false;
  bad_value(key, value);
}

Model model_for_family(std::string_view family) {
  if (family == "gaussian") return GaussianKnownVarModel{};
  if (family == "poisson-gamma") return PoissonGammaModel{};
  if (family == "nig-regression") return NigRegressionModel{};
  throw std::invalid_argument("unknown model family '" + std::string(family) + "'");
}

TruthSpec truth_for_family(std::string_view family) {
  if (family == "gaussian") return GaussianTruth{};
  if (family == "laplace") return LaplaceTruth{};
  if (family == "neg-binomial") return NegBinomialTruth{};
  if (family == "beta-binomial") return BetaBinomialTruth{};
  if (family == "regression-t-noise") return RegressionTNoiseTruth{};
  if (family == "regression-sigmoid") return RegressionSigmoidTruth{};
  throw std::invalid_argument("unknown truth family '" + std::string(family) + "'");
}

// Parameter tables shared by the config-file reader and the JSON echo.
template <class F>
void for_each_model_param(Model& model, F&& f) {
  std::visit(overloaded{
                 [&](GaussianKnownVarModel& m) {
                   f("sigma0", m.sigma0);
                   f("prior_mean", m.prior_mean);
                   f("prior_sd", m.prior_sd);
                 },
                 [&](PoissonGammaModel& m) {
                   f("shape", m.shape);
                   f("rate", m.rate);
                 },
                 [&](NigRegressionModel& m) {
                   f("coef_mean", m.coef_mean);
                   f("precision_scale", m.precision_scale);
                   f("shape", m.shape);
                   f("scale", m.scale);
                 },
             },
             model);
}

template <class F>
void for_each_truth_param(TruthSpec& truth, F&& f) {
  std::visit(overloaded{
                 [&](GaussianTruth& t) {
                   f("mean", t.mean);
                   f("sd", t.sd);
                 },
                 [&](LaplaceTruth& t) {
                   f("loc", t.loc);
                   f("scale", t.scale);
                 },
                 [&](NegBinomialTruth& t) {
                   f("r", t.r);
                   f("p", t.p);
                 },
                 [&](BetaBinomialTruth& t) {
                   f("a", t.a);
                   f("b", t.b);
                   f("trials", t.trials);
                 },
                 [&](RegressionTNoiseTruth& t) {
                   f("slope", t.slope);
                   f("scale", t.scale);
                   f("df", t.df);
                   f("covariate_lo", t.covariate_lo);
                   f("covariate_hi", t.covariate_hi);
                 },
                 [&](RegressionSigmoidTruth& t) {
                   f("amplitude", t.amplitude);
                   f("steepness", t.steepness);
                   f("noise_sd", t.noise_sd);
                   f("covariate_lo", t.covariate_lo);
                   f("covariate_hi", t.covariate_hi);
                 },
             },
             truth);
}

json estimate_to_json(const EstimateSummary& s) {
  return json{{"sum", s.sum}, {"mean", s.mean}, {"sd", s.sd}, {"n", s.n}};
}

EstimateSummary estimate_from_json(const json& j) {
  return {j.at("sum").get<double>(), j.at("mean").get<double>(), j.at("sd").get<double>(),
          j.at("n").get<std::size_t>()};
}

json test_to_json(const MisspecTestResult& r) {
  return json{{"method", method_name(r.method)},
              {"statistic", std::isfinite(r.statistic) ? json(r.statistic) : json(nullptr)},
              {"df", r.df},
              {"p_value", r.p_value}};
}

MisspecTestResult test_from_json(const json& j) {
  MisspecTestResult r;
  r.method = j.at("method").get<std::string>() == "wilcoxon" ? TestMethod::Wilcoxon : TestMethod::TTest;
  r.df = j.at("df").get<std::size_t>();
  r.p_value = j.at("p_value").get<double>();
  // Infinite statistics serialize as null; the sign follows from the p-value.
  const double inf = std::numeric_limits<double>::infinity();
  r.statistic = j.at("statistic").is_null() ? (r.p_value == 0.0 ? -inf : inf) : j.at("statistic").get<double>();
  return r;
}

json optional_number(const std::optional<double>& v) {
  return v && std::isfinite(*v) ? json(*v) : json(nullptr);
}

std::optional<double> number_or_empty(const json& j) {
  if (j.is_null()) return std::nullopt;
  return j.get<double>();
}

std::string csv_field(const std::optional<double>& v) {
  if (!v || !std::isfinite(*v)) return {};
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", *v);
  return buf;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  os << content;
  os.flush();
  if (!os) throw std::runtime_error("failed writing '" + path.string() + "'");
}

}  // namespace

void ScenarioConfig::validate() const {
  carmen::validate(model);
  carmen::validate(truth);
  if (folds < 2) throw std::invalid_argument("folds must be at least 2");
  if (n_update < 2 * folds || n_validate < 2 * folds) {
    throw std::invalid_argument("n-update and n-validate must each be at least 2 * folds");
  }
  if (!(ridge >= 0.0)) throw std::invalid_argument("ridge must be non-negative");
  if (is_regression(model) != is_regression(truth)) {
    throw std::invalid_argument("regression models need a regression truth and vice versa");
  }
  const bool regression = is_regression(model);
  for (Transform t : features.transforms()) {
    if (uses_response(t) && !regression) {
      throw std::invalid_argument("feature '" + std::string(transform_name(t)) +
                                  "' needs a regression scenario");
    }
  }
  (void)TemperingGrid::parse(grid);
}

const std::vector<NamedScenario>& named_scenarios() {
  static const std::vector<NamedScenario> list{
      {"gauss-gauss",
       "model N(mu, 0.1^2), mu ~ N(0, 9.9^2); truth N(0, 3.01^2); features x, x2"},
      {"gauss-laplace",
       "model N(mu, 0.1^2), mu ~ N(0, 9.9^2); truth Laplace(0, 2.13); features x, x2, ln_abs_x"},
      {"poisson-nb",
       "model Poisson(lambda), lambda ~ Gamma(3, rate 0.05); truth NB(r=63, p=0.488), mean 60; "
       "features x, x2, x3, x4"},
      {"poisson-betabinom",
       "model Poisson(lambda), lambda ~ Gamma(3, rate 0.05); truth BetaBinomial(41.75, 78.25, 80); "
       "features x, x2, x3, x4"},
      {"reg-tnoise",
       "model y ~ N(theta x, s^2), NIG(0, 1, 2, 2); truth y = x + 1.22 T(3), x ~ U(-1, 1); "
       "features abs_y, y2, ln_abs_y, yx"},
      {"reg-sigmoid",
       "model y ~ N(theta x, s^2), NIG(0, 1, 2, 2); truth y ~ N(5 (Phi(10 x) - 0.5), 0.1^2), "
       "x ~ U(-1, 1); features y, abs_y, y2, yx, abs_yx, yx2"},
  };
  return list;
}

ScenarioConfig named_config(std::string_view name) {
  ScenarioConfig cfg;
  cfg.scenario = std::string(name);
  const GaussianKnownVarModel gauss{0.1, 0.0, 9.9};
  const PoissonGammaModel poisson{3.0, 0.05};
  const NigRegressionModel regression{0.0, 1.0, 2.0, 2.0};
  using T = Transform;
  if (name == "gauss-gauss") {
    cfg.model = gauss;
    cfg.truth = GaussianTruth{0.0, 3.01};
    cfg.features = FeatureMap({T::X, T::X2});
  } else if (name == "gauss-laplace") {
    cfg.model = gauss;
    cfg.truth = LaplaceTruth{0.0, 2.13};
    cfg.features = FeatureMap({T::X, T::X2, T::LogAbsX});
  } else if (name == "poisson-nb") {
    cfg.model = poisson;
    cfg.truth = NegBinomialTruth{63.0, 0.488};
    cfg.features = FeatureMap({T::X, T::X2, T::X3, T::X4});
  } else if (name == "poisson-betabinom") {
    cfg.model = poisson;
    cfg.truth = BetaBinomialTruth{41.75, 78.25, 80};
    cfg.features = FeatureMap({T::X, T::X2, T::X3, T::X4});
  } else if (name == "reg-tnoise") {
    cfg.model = regression;
    cfg.truth = RegressionTNoiseTruth{1.0, 1.22, 3.0, -1.0, 1.0};
    cfg.features = FeatureMap({T::AbsY, T::Y2, T::LogAbsY, T::YX});
  } else if (name == "reg-sigmoid") {
    cfg.model = regression;
    cfg.truth = RegressionSigmoidTruth{5.0, 10.0, 0.1, -1.0, 1.0};
    cfg.features = FeatureMap({T::Y, T::AbsY, T::Y2, T::YX, T::AbsYX, T::YX2});
  } else if (name != "custom") {
    throw std::invalid_argument("unknown scenario '" + std::string(name) + "' (try `carmen list`)");
  }
  return cfg;
}

std::string model_family_name(const Model& model) {
  return std::visit(overloaded{
                        [](const GaussianKnownVarModel&) { return std::string("gaussian"); },
                        [](const PoissonGammaModel&) { return std::string("poisson-gamma"); },
                        [](const NigRegressionModel&) { return std::string("nig-regression"); },
                    },
                    model);
}

void apply_setting(ScenarioConfig& cfg, std::string_view key, std::string_view value) {
  key = trim(key);
  value = trim(value);
  if (key == "scenario") {
    const ScenarioConfig named = named_config(value);
    cfg.scenario = named.scenario;
    cfg.model = named.model;
    cfg.truth = named.truth;
    cfg.features = named.features;
  } else if (key == "n_update" || key == "n-update") {
    cfg.n_update = static_cast<std::size_t>(to_u64(key, value));
  } else if (key == "n_validate" || key == "n-validate") {
    cfg.n_validate = static_cast<std::size_t>(to_u64(key, value));
  } else if (key == "seed") {
    cfg.seed = to_u64(key, value);
  } else if (key == "folds") {
    cfg.folds = static_cast<std::size_t>(to_u64(key, value));
  } else if (key == "ridge") {
    cfg.ridge = to_double(key, value);
  } else if (key == "grid") {
    (void)TemperingGrid::parse(value);
    cfg.grid = std::string(value);
  } else if (key == "full_curve" || key == "full-curve") {
    cfg.full_curve = to_bool(key, value);
  } else if (key == "reverse_kl" || key == "reverse-kl") {
    cfg.reverse_kl = to_bool(key, value);
  } else if (key == "out") {
    cfg.out = std::string(value);
  } else if (key == "features") {
    cfg.features = FeatureMap::parse(value);
  } else if (key == "model") {
    cfg.model = model_for_family(value);
  } else if (key == "truth") {
    cfg.truth = truth_for_family(value);
  } else if (key.starts_with("model.")) {
    const std::string_view param = key.substr(6);
    bool found = false;
    for_each_model_param(cfg.model, [&](std::string_view name, double& slot) {
      if (name == param) {
        slot = to_double(key, value);
        found = true;
      }
    });
    if (!found) {
      throw std::invalid_argument("model family '" + model_family_name(cfg.model) +
                                  "' has no parameter '" + std::string(param) + "'");
    }
  } else if (key.starts_with("truth.")) {
    const std::string_view param = key.substr(6);
    bool found = false;
    for_each_truth_param(cfg.truth, [&](std::string_view name, auto& slot) {
      if (name != param) return;
      found = true;
      if constexpr (std::is_same_v<std::decay_t<decltype(slot)>, long>) {
        slot = static_cast<long>(to_u64(key, value));
      } else {
        slot = to_double(key, value);
      }
    });
    if (!found) {
      throw std::invalid_argument("truth family '" + family_name(cfg.truth) + "' has no parameter '" +
                                  std::string(param) + "'");
    }
  } else {
    throw std::invalid_argument("unknown config key '" + std::string(key) + "'");
  }
}

ScenarioConfig parse_config(std::string_view text) {
  ScenarioConfig cfg = named_config("custom");
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw std::invalid_argument("config line " + std::to_string(line_no) + ": expected key = value");
    }
    try {
      apply_setting(cfg, line.substr(0, eq), line.substr(eq + 1));
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument("config line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return cfg;
}

ScenarioConfig load_config_file(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot read config file '" + path.string() + "'");
  std::ostringstream ss;
  ss << is.rdbuf();
  return parse_config(ss.str());
}

EstimateSummary EstimateSummary::of(const LogRatioEstimate& est) {
  return {est.sum, est.mean, est.sample_sd(), est.n};
}

ScenarioResult run_scenario(const ScenarioConfig& cfg) {
  cfg.validate();
  const RngStream root(cfg.seed, 0);
  RngStream truth_rng = root.substream(kTruthStream);
  const Dataset observed = truth_sample(cfg.truth, truth_rng, cfg.n_update + cfg.n_validate);
  const Dataset update = observed.slice(0, cfg.n_update);
  const Dataset validate = observed.slice(cfg.n_update, cfg.n_validate);

  CurveOptions options;
  options.ratio.features = cfg.features;
  options.ratio.cv.folds = cfg.folds;
  options.ratio.cv.logistic.ridge = cfg.ridge;
  options.classifier_on_grid = cfg.full_curve;
  options.reverse_kl = cfg.reverse_kl;

  const TemperingGrid grid = TemperingGrid::parse(cfg.grid);
  const TemperingCurve tc =
      curve(cfg.model, cfg.truth, update, validate, grid, options, root.substream(kCurveStream));

  ScenarioResult r;
  r.config = cfg;
  r.t_star = tc.t_star;
  r.t_star_method = tc.method;
  r.t_star_at_boundary = tc.method == "grid-boundary";
  r.log_predictive_at_t_star = tc.log_predictive_at_t_star;
  r.logz = EstimateSummary::of(tc.at_t_star.approx);
  r.test = tc.at_t_star.test;
  r.wilcoxon = tc.at_t_star.wilcoxon;
  if (tc.at_t_star.truth) r.true_logz = EstimateSummary::of(*tc.at_t_star.truth);
  if (tc.at_t_star.reverse) r.reverse_logz = EstimateSummary::of(*tc.at_t_star.reverse);
  r.curve = tc.points;
  r.kernel_variant = std::string(kernels::active().name);
  r.version = std::string(kVersion);
  return r;
}

json config_to_json(const ScenarioConfig& cfg) {
  json model{{"family", model_family_name(cfg.model)}};
  Model m = cfg.model;
  for_each_model_param(m, [&](std::string_view name, double& v) { model[std::string(name)] = v; });
  json truth{{"family", family_name(cfg.truth)}};
  TruthSpec t = cfg.truth;
  for_each_truth_param(t, [&](std::string_view name, auto& v) { truth[std::string(name)] = v; });
  return json{{"scenario", cfg.scenario},
              {"n_update", cfg.n_update},
              {"n_validate", cfg.n_validate},
              {"seed", cfg.seed},
              {"folds", cfg.folds},
              {"ridge", cfg.ridge},
              {"grid", cfg.grid},
              {"full_curve", cfg.full_curve},
              {"reverse_kl", cfg.reverse_kl},
              {"out", cfg.out},
              {"model", model},
              {"truth", truth},
              {"features", cfg.features.to_string()}};
}

ScenarioConfig config_from_json(const json& j) {
  ScenarioConfig cfg;
  cfg.scenario = j.at("scenario").get<std::string>();
  cfg.n_update = j.at("n_update").get<std::size_t>();
  cfg.n_validate = j.at("n_validate").get<std::size_t>();
  cfg.seed = j.at("seed").get<std::uint64_t>();
  cfg.folds = j.at("folds").get<std::size_t>();
  cfg.ridge = j.at("ridge").get<double>();
  cfg.grid = j.at("grid").get<std::string>();
  cfg.full_curve = j.at("full_curve").get<bool>();
  cfg.reverse_kl = j.at("reverse_kl").get<bool>();
  cfg.out = j.at("out").get<std::string>();
  const json& model = j.at("model");
  cfg.model = model_for_family(model.at("family").get<std::string>());
  for_each_model_param(cfg.model, [&](std::string_view name, double& v) {
    v = model.at(std::string(name)).get<double>();
  });
  const json& truth = j.at("truth");
  cfg.truth = truth_for_family(truth.at("family").get<std::string>());
  for_each_truth_param(cfg.truth, [&](std::string_view name, auto& v) {
    v = truth.at(std::string(name)).get<std::decay_t<decltype(v)>>();
  });
  cfg.features = FeatureMap::parse(j.at("features").get<std::string>());
  return cfg;
}

json result_to_json(const ScenarioResult& r) {
  json curve = json::array();
  for (const CurvePoint& p : r.curve) {
    curve.push_back(json{{"t", p.t},
                         {"log_predictive", optional_number(p.log_predictive)},
                         {"logZ_approx_sum", optional_number(p.logz_approx_sum)},
                         {"logZ_true_sum", optional_number(p.logz_true_sum)},
                         {"t_stat", optional_number(p.t_stat)},
                         {"p_value", optional_number(p.p_value)}});
  }
  json out{{"version", r.version},
           {"kernel_variant", r.kernel_variant},
           {"config", config_to_json(r.config)},
           {"t_star", r.t_star},
           {"t_star_method", r.t_star_method},
           {"t_star_at_boundary", r.t_star_at_boundary},
           {"log_predictive_at_t_star", r.log_predictive_at_t_star},
           {"logZ", estimate_to_json(r.logz)},
           {"test", test_to_json(r.test)},
           {"p_value_note", "raw per-grid p-values are diagnostic only; no multiple-testing correction"}};
  out["wilcoxon"] = r.wilcoxon ? test_to_json(*r.wilcoxon) : json(nullptr);
  out["true_logZ"] = r.true_logz ? estimate_to_json(*r.true_logz) : json(nullptr);
  out["reverse_logZ"] = r.reverse_logz ? estimate_to_json(*r.reverse_logz) : json(nullptr);
  out["curve"] = std::move(curve);
  return out;
}

ScenarioResult result_from_json(const json& j) {
  ScenarioResult r;
  r.version = j.at("version").get<std::string>();
  r.kernel_variant = j.at("kernel_variant").get<std::string>();
  r.config = config_from_json(j.at("config"));
  r.t_star = j.at("t_star").get<double>();
  r.t_star_method = j.at("t_star_method").get<std::string>();
  r.t_star_at_boundary = j.at("t_star_at_boundary").get<bool>();
  r.log_predictive_at_t_star = j.at("log_predictive_at_t_star").get<double>();
  r.logz = estimate_from_json(j.at("logZ"));
  r.test = test_from_json(j.at("test"));
  if (!j.at("wilcoxon").is_null()) r.wilcoxon = test_from_json(j.at("wilcoxon"));
  if (!j.at("true_logZ").is_null()) r.true_logz = estimate_from_json(j.at("true_logZ"));
  if (!j.at("reverse_logZ").is_null()) r.reverse_logz = estimate_from_json(j.at("reverse_logZ"));
  for (const json& p : j.at("curve")) {
    CurvePoint pt;
    pt.t = p.at("t").get<double>();
    pt.log_predictive = number_or_empty(p.at("log_predictive"));
    pt.logz_approx_sum = number_or_empty(p.at("logZ_approx_sum"));
    pt.logz_true_sum = number_or_empty(p.at("logZ_true_sum"));
    pt.t_stat = number_or_empty(p.at("t_stat"));
    pt.p_value = number_or_empty(p.at("p_value"));
    r.curve.push_back(pt);
  }
  return r;
}

std::string curve_csv(const std::vector<CurvePoint>& points) {
  std::vector<CurvePoint> sorted = points;
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const CurvePoint& a, const CurvePoint& b) { return a.t < b.t; });
  std::string out = "t,log_predictive,logZ_approx_sum,logZ_true_sum,t_stat,p_value\n";
  for (const CurvePoint& p : sorted) {
    out += csv_field(p.t);
    out += ',';
    out += csv_field(p.log_predictive);
    out += ',';
    out += csv_field(p.logz_approx_sum);
    out += ',';
    out += csv_field(p.logz_true_sum);
    out += ',';
    out += csv_field(p.t_stat);
    out += ',';
    out += csv_field(p.p_value);
    out += '\n';
  }
  return out;
}

OutputPaths emit_outputs(const ScenarioResult& result, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create output directory '" + dir.string() + "': " + ec.message());
  OutputPaths paths{dir / "summary.json", dir / "curve.csv"};
  write_file(paths.summary_json, result_to_json(result).dump(2) + "\n");
  write_file(paths.curve_csv, curve_csv(result.curve));
  return paths;
}

}  // namespace carmen
