#include "carmen/tempering.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <functional>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace carmen {

namespace {

constexpr std::uint64_t kTStarStream = 1;
constexpr std::uint64_t kGridStreamBase = 1000;
constexpr double kLog10RelTol = 1e-3;

struct GoldenResult {
  double x;
  double fx;
};

GoldenResult golden_section_maximize(const std::function<double(double)>& f, double lo, double hi,
                                     double rel_tol) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo;
  double b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c);
  double fd = f(d);
  for (int iter = 0; iter < 200; ++iter) {
    const double scale = std::max(1.0, std::fabs(0.5 * (a + b)));
    if (b - a <= rel_tol * scale) break;
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  return fc >= fd ? GoldenResult{c, fc} : GoldenResult{d, fd};
}

double parse_double(std::string_view s, std::string_view what) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw std::invalid_argument("invalid " + std::string(what) + " '" + std::string(s) + "'");
  }
  return v;
}

std::string format_g17(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

// Runs body(i) for i in [0, n) on up to `threads` workers. Each index is
// processed exactly once; results must be written per index.
void parallel_for(std::size_t n, std::size_t threads, const std::function<void(std::size_t)>& body) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, n);
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (std::size_t w = 0; w < threads; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
        try {
          body(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace

TemperingGrid TemperingGrid::log_uniform(double lo, double hi, std::size_t count) {
  if (count == 0) throw std::invalid_argument("tempering grid needs at least one point");
  if (!(lo > 0.0) || !(hi <= 1.0) || !(lo <= hi)) {
    throw std::invalid_argument("tempering grid bounds must satisfy 0 < lo <= hi <= 1");
  }
  if (count > 1 && lo == hi) throw std::invalid_argument("tempering grid with lo == hi must have one point");
  TemperingGrid g;
  g.spacing_ = Spacing::LogUniform;
  g.values_.resize(count);
  const double llo = std::log10(lo);
  const double lhi = std::log10(hi);
  for (std::size_t i = 0; i < count; ++i) {
    g.values_[i] = count == 1 ? hi
                              : std::pow(10.0, llo + (lhi - llo) * static_cast<double>(i) /
                                                         static_cast<double>(count - 1));
  }
  g.values_.front() = count == 1 ? hi : lo;
  g.values_.back() = hi;
  return g;
}

TemperingGrid TemperingGrid::explicit_values(std::vector<double> values) {
  if (values.empty()) throw std::invalid_argument("tempering grid needs at least one point");
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!(values[i] > 0.0 && values[i] <= 1.0)) {
      throw std::invalid_argument("tempering values must lie in (0, 1]");
    }
    if (i > 0 && !(values[i] > values[i - 1])) {
      throw std::invalid_argument("tempering values must be strictly increasing");
    }
  }
  TemperingGrid g;
  g.spacing_ = Spacing::Explicit;
  g.values_ = std::move(values);
  return g;
}

TemperingGrid TemperingGrid::parse(std::string_view spec) {
  const auto first = spec.find(':');
  const auto second = first == std::string_view::npos ? first : spec.find(':', first + 1);
  if (second != std::string_view::npos) {
    const double lo = parse_double(spec.substr(0, first), "grid lower bound");
    const double hi = parse_double(spec.substr(first + 1, second - first - 1), "grid upper bound");
    const double count = parse_double(spec.substr(second + 1), "grid point count");
    if (!(count >= 1.0) || std::floor(count) != count) {
      throw std::invalid_argument("grid point count must be a positive integer");
    }
    return log_uniform(lo, hi, static_cast<std::size_t>(count));
  }
  std::vector<double> values;
  while (!spec.empty()) {
    const auto comma = spec.find(',');
    values.push_back(parse_double(spec.substr(0, comma), "tempering value"));
    if (comma == std::string_view::npos) break;
    spec.remove_prefix(comma + 1);
  }
  return explicit_values(std::move(values));
}

std::string TemperingGrid::to_string() const {
  if (spacing_ == Spacing::LogUniform) {
    return format_g17(values_.front()) + ":" + format_g17(values_.back()) + ":" +
           std::to_string(values_.size());
  }
  std::string out;
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (i > 0) out += ',';
    out += format_g17(values_[i]);
  }
  return out;
}

TStarSearch optimize_t(const Model& model, const Dataset& update, const Dataset& validate,
                       const TemperingGrid& grid) {
  if (update.empty() || validate.empty()) {
    throw std::invalid_argument("optimize_t: update and validation partitions must be non-empty");
  }
  if (grid.size() == 0) throw std::invalid_argument("optimize_t: empty grid");
  const SufficientStats stats = SufficientStats::from(update);
  const auto objective = [&](double t) { return log_tempered_predictive(model, stats, validate, t); };

  TStarSearch out;
  const auto& ts = grid.values();
  out.grid_log_predictive.reserve(ts.size());
  for (double t : ts) out.grid_log_predictive.push_back(objective(t));
  const auto best = std::max_element(out.grid_log_predictive.begin(), out.grid_log_predictive.end());
  out.best_grid_index = static_cast<std::size_t>(best - out.grid_log_predictive.begin());
  out.t_star = ts[out.best_grid_index];
  out.log_predictive = *best;

  if (ts.size() == 1) {
    out.at_boundary = true;
    return out;
  }

  const std::size_t i = out.best_grid_index;
  const std::size_t lo_idx = i == 0 ? 0 : i - 1;
  const std::size_t hi_idx = std::min(i + 1, ts.size() - 1);
  const double lo = std::log10(ts[lo_idx]);
  const double hi = std::log10(ts[hi_idx]);
  const GoldenResult refined = golden_section_maximize(
      [&](double u) { return objective(std::min(1.0, std::pow(10.0, u))); }, lo, hi, kLog10RelTol);

  const bool edge = i == 0 || i + 1 == ts.size();
  const double tol = kLog10RelTol * std::max(1.0, std::fabs(refined.x));
  const bool touches_edge =
      edge && std::fabs(refined.x - std::log10(ts[i])) <= tol;
  if (refined.fx > out.log_predictive && !touches_edge) {
    out.t_star = std::min(1.0, std::pow(10.0, refined.x));
    out.log_predictive = refined.fx;
    out.at_boundary = false;
  } else {
    out.at_boundary = edge;
  }
  return out;
}

TemperingCurve curve(const Model& model, const std::optional<TruthSpec>& truth, const Dataset& update,
                     const Dataset& validate, const TemperingGrid& grid, const CurveOptions& options,
                     RngStream rng) {
  const TStarSearch search = optimize_t(model, update, validate, grid);
  const SufficientStats stats = SufficientStats::from(update);

  TemperingCurve out;
  out.t_star = search.t_star;
  out.method = search.at_boundary ? "grid-boundary" : "golden-section";
  out.log_predictive_at_t_star = search.log_predictive;

  const auto& ts = grid.values();
  out.points.resize(ts.size());
  parallel_for(ts.size(), options.threads, [&](std::size_t i) {
    CurvePoint& pt = out.points[i];
    pt.t = ts[i];
    try {
      const TemperedPosterior post = temper_update(model, stats, ts[i]);
      pt.log_predictive = search.grid_log_predictive[i];
      if (truth) pt.logz_true_sum = true_log_ratio(post, *truth, validate).sum;
      if (options.classifier_on_grid) {
        const LogRatioEstimate est =
            estimate_log_ratio(post, validate, options.ratio, rng.substream(kGridStreamBase + i));
        pt.logz_approx_sum = est.sum;
        const MisspecTestResult test = t_test_logz(est);
        pt.t_stat = test.statistic;
        pt.p_value = test.p_value;
      }
    } catch (const std::exception&) {
      // Recorded as missing; the remaining grid is still usable.
    }
  });

  TStarDiagnostics& diag = out.at_t_star;
  diag.t = search.t_star;
  const TemperedPosterior post = temper_update(model, stats, search.t_star);
  const RngStream headline_rng = rng.substream(kTStarStream);
  diag.approx = estimate_log_ratio(post, validate, options.ratio, headline_rng);
  diag.test = t_test_logz(diag.approx);
  if (diag.approx.n >= 10) diag.wilcoxon = wilcoxon_signed_rank(diag.approx);
  if (truth) diag.truth = true_log_ratio(post, *truth, validate);
  if (options.reverse_kl) diag.reverse = estimate_reverse_log_ratio(post, validate, options.ratio, headline_rng);
  return out;
}

}  // namespace carmen
