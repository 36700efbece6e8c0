#include <chrono>
#include <cstdio>
#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "carmen/kernels.hpp"
#include "carmen/scenario.hpp"

namespace {

int cmd_list() {
  for (const auto& s : carmen::named_scenarios()) {
    std::cout << s.name << "\n    " << s.description << "\n";
  }
  return 0;
}

struct RunArgs {
  std::string scenario;
  std::string config;
  std::uint64_t seed = 0;
  std::size_t n_update = 0;
  std::size_t n_validate = 0;
  std::size_t folds = 0;
  std::string grid;
  double ridge = 0.0;
  bool full_curve = false;
  bool reverse_kl = false;
  std::string out;
};

int cmd_run(const RunArgs& a, const CLI::App& run) {
  carmen::ScenarioConfig cfg;
  if (!a.config.empty()) cfg = carmen::load_config_file(a.config);
  if (run.count("--scenario") > 0) carmen::apply_setting(cfg, "scenario", a.scenario);
  if (a.config.empty() && run.count("--scenario") == 0) {
    throw std::invalid_argument("either --scenario or --config is required");
  }
  if (run.count("--seed") > 0) cfg.seed = a.seed;
  if (run.count("--n-update") > 0) cfg.n_update = a.n_update;
  if (run.count("--n-validate") > 0) cfg.n_validate = a.n_validate;
  if (run.count("--folds") > 0) cfg.folds = a.folds;
  if (run.count("--grid") > 0) carmen::apply_setting(cfg, "grid", a.grid);
  if (run.count("--ridge") > 0) cfg.ridge = a.ridge;
  if (a.full_curve) cfg.full_curve = true;
  if (a.reverse_kl) cfg.reverse_kl = true;
  if (run.count("--out") > 0) cfg.out = a.out;
  if (cfg.out.empty()) throw std::invalid_argument("--out is required");

  const auto start = std::chrono::steady_clock::now();
  const carmen::ScenarioResult result = carmen::run_scenario(cfg);
  const auto paths = carmen::emit_outputs(result, cfg.out);
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  std::printf("scenario   %s (seed %llu, kernels %s)\n", cfg.scenario.c_str(),
              static_cast<unsigned long long>(cfg.seed), result.kernel_variant.c_str());
  std::printf("t*         %.6g (%s)\n", result.t_star, result.t_star_method.c_str());
  std::printf("logZ       sum %.6g, mean %.6g\n", result.logz.sum, result.logz.mean);
  std::printf("t-test     t = %.6g, p = %.6g\n", result.test.statistic, result.test.p_value);
  if (result.wilcoxon) std::printf("wilcoxon   z = %.6g, p = %.6g\n", result.wilcoxon->statistic, result.wilcoxon->p_value);
  if (result.true_logz) std::printf("true logZ  sum %.6g, mean %.6g\n", result.true_logz->sum, result.true_logz->mean);
  if (result.reverse_logz) std::printf("reverse    sum %.6g, mean %.6g\n", result.reverse_logz->sum, result.reverse_logz->mean);
  std::printf("wrote      %s\n           %s\n", paths.summary_json.string().c_str(), paths.curve_csv.string().c_str());
  std::fprintf(stderr, "elapsed %.2f s\n", seconds);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"carmen: classifier-based misspecification diagnostics and likelihood tempering"};
  app.set_version_flag("--version", std::string(carmen::kVersion));
  app.require_subcommand(1);

  app.add_subcommand("list", "List the built-in scenarios");

  RunArgs args;
  CLI::App* run = app.add_subcommand("run", "Run a scenario and write summary.json and curve.csv");
  run->add_option("--scenario", args.scenario, "Built-in scenario name");
  run->add_option("--config", args.config, "key = value config file")->check(CLI::ExistingFile);
  run->add_option("--seed", args.seed, "Random seed");
  run->add_option("--n-update", args.n_update, "Points used for the update");
  run->add_option("--n-validate", args.n_validate, "Points used for validation");
  run->add_option("--folds", args.folds, "Cross-validation folds");
  run->add_option("--grid", args.grid, "Tempering grid, lo:hi:count or a comma list");
  run->add_option("--ridge", args.ridge, "Logistic ridge penalty");
  run->add_flag("--full-curve", args.full_curve, "Run the classifier at every grid point");
  run->add_flag("--reverse-kl", args.reverse_kl, "Also estimate the reverse direction");
  run->add_option("--out", args.out, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "carmen: " << e.what() << "\n";
    return 2;
  }

  try {
    if (app.got_subcommand("list")) return cmd_list();
    return cmd_run(args, *run);
  } catch (const std::logic_error& e) {
    std::cerr << "carmen: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "carmen: " << e.what() << "\n";
    return 1;
  }
}
