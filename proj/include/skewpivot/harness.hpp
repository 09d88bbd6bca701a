#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <limits>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "skewpivot/datagen.hpp"
#include "skewpivot/error.hpp"
#include "skewpivot/intervals.hpp"
#include "skewpivot/multivariate.hpp"
#include "skewpivot/pivots.hpp"
#include "skewpivot/rng.hpp"
#include "skewpivot/weights.hpp"
#include "skewpivot/window_solver.hpp"

namespace skewpivot {

enum class Method { method_1, method_2, method_1_1, method_1_2, classical_t, bootstrap_t };
enum class ExperimentKind { univariate, bootstrap_comparison, bivariate };

inline std::string_view method_name(Method m) {
  switch (m) {
    case Method::method_1: return "I";
    case Method::method_2: return "II";
    case Method::method_1_1: return "I.1";
    case Method::method_1_2: return "I.2";
    case Method::classical_t: return "classical-t";
    case Method::bootstrap_t: return "bootstrap-t";
  }
  return "?";
}

inline Method parse_method(std::string_view text) {
  const std::string s = lowercase(trim(text));
  for (Method m : {Method::method_1, Method::method_2, Method::method_1_1, Method::method_1_2, Method::classical_t,
                   Method::bootstrap_t})
    if (s == lowercase(std::string(method_name(m)))) return m;
  fail(ErrorKind::config_error, "unknown method '" + s + "'");
}

inline bool is_randomized(Method m) { return m != Method::classical_t && m != Method::bootstrap_t; }

inline std::string_view kind_name(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::univariate: return "univariate";
    case ExperimentKind::bootstrap_comparison: return "bootstrap";
    case ExperimentKind::bivariate: return "bivariate";
  }
  return "?";
}

inline ExperimentKind parse_kind(std::string_view text) {
  const std::string s = lowercase(trim(text));
  if (s == "univariate") return ExperimentKind::univariate;
  if (s == "bootstrap" || s == "bootstrap-compare") return ExperimentKind::bootstrap_comparison;
  if (s == "bivariate") return ExperimentKind::bivariate;
  fail(ErrorKind::config_error, "unknown experiment kind '" + s + "'");
}

// theta given directly, solved from a target SRF, or (method II) the weight mean.
struct ThetaSpec {
  enum class Mode { automatic, fixed, solve };
  Mode mode = Mode::automatic;
  double value = 0.0;  // theta for fixed, delta for solve
  Side side = Side::above_mean;

  static ThetaSpec fixed(double theta) { return {Mode::fixed, theta, Side::above_mean}; }
  static ThetaSpec solve(double delta, Side side = Side::above_mean) { return {Mode::solve, delta, side}; }

  std::string descriptor() const {
    switch (mode) {
      case Mode::automatic: return "auto";
      case Mode::fixed: return format_real(value);
      case Mode::solve:
        return "solve(" + format_real(value) + (side == Side::below_mean ? ",below)" : ")");
    }
    return "?";
  }
};

inline ThetaSpec parse_theta(std::string_view text) {
  const std::string s = lowercase(trim(text));
  if (s == "auto" || s == "mean") return {};
  if (s.rfind("solve", 0) == 0) {
    const Descriptor d = parse_descriptor(s);
    if (d.args.empty() || d.args.size() > 2) fail(ErrorKind::config_error, "theta = solve(delta[, above|below])");
    Side side = Side::above_mean;
    if (d.args.size() == 2) {
      if (d.args[1] == "below") side = Side::below_mean;
      else if (d.args[1] != "above") fail(ErrorKind::config_error, "side must be above or below");
    }
    return ThetaSpec::solve(parse_real(d.args[0]), side);
  }
  return ThetaSpec::fixed(parse_real(s));
}

struct ExperimentSpec {
  std::string id = "experiment";
  ExperimentKind kind = ExperimentKind::univariate;
  DataLaw data_law = DataLaw::exponential();
  std::optional<WeightScheme> weight_scheme;
  Method method = Method::classical_t;
  ThetaSpec theta;
  std::size_t n = 30;
  std::size_t replications = 1000;
  double alpha = 0.05;
  std::size_t bootstrap_resamples = 1000;
  std::uint64_t seed = 1;
  DenominatorMode denominator_mode = DenominatorMode::expected;
  ResamplePolicy resample_policy = ResamplePolicy::propagate_infinite;
  bool keep_lengths = false;
};

struct ExperimentResult {
  std::string arm;
  std::size_t replications = 0;
  double coverage = 0.0;
  double mean_length = 0.0;  // lengths are areas for bivariate experiments
  double median_length = 0.0;
  double trimmed_mean_length = 0.0;  // 5% trimmed from each end
  std::size_t infinite_count = 0;
  std::vector<double> lengths;  // filled only with keep_lengths
};

struct ExperimentReport {
  ExperimentSpec spec;
  double theta = 0.0;  // resolved window constant (NaN without weights)
  std::vector<ExperimentResult> arms;

  const ExperimentResult& arm(std::string_view name) const {
    for (const auto& a : arms)
      if (a.arm == name) return a;
    fail(ErrorKind::invalid_argument, "no arm named '" + std::string(name) + "'");
  }
};

struct RunOptions {
  unsigned workers = 0;  // 0: SKEWPIVOT_THREADS or hardware concurrency
};

inline unsigned default_worker_count() {
  if (const char* env = std::getenv("SKEWPIVOT_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v > 0) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

// fn(i) for i in [0, count); fn must only write to slot i of its outputs.
template <class F>
void parallel_for(std::size_t count, unsigned workers, F&& fn) {
  if (workers == 0) workers = default_worker_count();
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, std::max<std::size_t>(count, 1)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < workers; ++t)
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= count) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
          next.store(count);
          return;
        }
      }
    });
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

inline double pairwise_sum(std::span<const double> x) {
  if (x.size() <= 8) {
    double s = 0.0;
    for (double v : x) s += v;
    return s;
  }
  const std::size_t half = x.size() / 2;
  return pairwise_sum(x.first(half)) + pairwise_sum(x.subspan(half));
}

inline ExperimentResult summarize(std::string arm, std::span<const unsigned char> covered,
                                  std::span<const double> lengths, bool keep) {
  ExperimentResult r;
  r.arm = std::move(arm);
  r.replications = covered.size();
  std::size_t hits = 0;
  for (unsigned char c : covered) hits += c;
  r.coverage = static_cast<double>(hits) / static_cast<double>(covered.size());

  std::vector<double> sorted(lengths.begin(), lengths.end());
  std::sort(sorted.begin(), sorted.end());
  const std::size_t n = sorted.size();
  r.infinite_count = static_cast<std::size_t>(std::count_if(sorted.begin(), sorted.end(),
                                                            [](double v) { return std::isinf(v); }));
  r.mean_length = pairwise_sum(lengths) / static_cast<double>(n);
  r.median_length = n % 2 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
  const std::size_t cut = n / 20;
  r.trimmed_mean_length =
      pairwise_sum(std::span<const double>(sorted).subspan(cut, n - 2 * cut)) / static_cast<double>(n - 2 * cut);
  if (keep) r.lengths.assign(lengths.begin(), lengths.end());
  return r;
}

inline void validate(const ExperimentSpec& s) {
  auto bad = [](const std::string& msg) { fail(ErrorKind::config_error, msg); };
  if (s.replications < 1) bad("replications must be at least 1");
  if (s.n < 2) bad("n must be at least 2");
  if (!(s.alpha > 0.0 && s.alpha < 1.0)) bad("alpha must lie in (0, 1)");

  const bool bivariate = s.kind == ExperimentKind::bivariate;
  if (bivariate && s.data_law.dimension() != 2) bad("bivariate experiments need a bivariate data law");
  if (!bivariate && s.data_law.dimension() != 1) bad(s.data_law.descriptor() + " is bivariate");
  if (bivariate && s.n < 3) bad("bivariate experiments need n >= 3");

  if (s.kind == ExperimentKind::bootstrap_comparison) {
    if (!is_randomized(s.method)) bad("the bootstrap comparison pairs a randomized method with bootstrap-t");
    if (s.bootstrap_resamples < 100) bad("B must be at least 100");
  }
  if (s.method == Method::bootstrap_t && s.bootstrap_resamples < 100) bad("B must be at least 100");
  if (bivariate && !is_randomized(s.method)) bad("bivariate experiments need a randomized method");

  if (!is_randomized(s.method)) return;
  if (!s.weight_scheme) bad("method " + std::string(method_name(s.method)) + " needs a weight scheme");
  const WeightScheme& w = *s.weight_scheme;
  if (w.kind == WeightKind::custom_moments) bad("moment-only weight schemes cannot be sampled");
  switch (s.method) {
    case Method::method_1:
      if (w.triangular()) bad("method I needs fixed weights; use I.1 or I.2 for multinomial-sym");
      if (s.theta.mode == ThetaSpec::Mode::automatic) bad("method I needs theta = <value> or theta = solve(delta)");
      break;
    case Method::method_2:
      if (w.triangular()) bad("method II needs fixed weights");
      if (!w.symmetric()) bad("method II needs a symmetric weight scheme");
      if (s.theta.mode == ThetaSpec::Mode::solve) bad("method II fixes theta at the weight mean");
      break;
    case Method::method_1_1:
    case Method::method_1_2:
      if (!w.triangular()) bad("methods I.1 and I.2 need multinomial-sym weights");
      if (s.theta.mode == ThetaSpec::Mode::automatic) bad("methods I.1/I.2 need theta = <value> or solve(delta)");
      break;
    default: break;
  }
}

inline double resolve_theta(const ExperimentSpec& s) {
  if (!is_randomized(s.method)) return std::numeric_limits<double>::quiet_NaN();
  const WeightScheme& w = *s.weight_scheme;
  if (s.method == Method::method_2) {
    const double mean = weight_mean(w);
    if (s.theta.mode == ThetaSpec::Mode::fixed && s.theta.value != mean)
      fail(ErrorKind::config_error, "method II needs theta equal to the weight mean");
    return solve_method2(w).theta;
  }
  if (s.theta.mode == ThetaSpec::Mode::fixed) {
    const double mean = weight_mean(w, s.n);
    if (std::abs(s.theta.value - mean) < exclusion_gap(mean))
      fail(ErrorKind::config_error, "theta must stay away from the weight mean");
    return s.theta.value;
  }
  SolverOptions opt;
  opt.side = s.theta.side;
  switch (s.method) {
    case Method::method_1: return solve_method1(w, s.theta.value, opt).theta;
    case Method::method_1_1: return solve_method1_1(s.theta.value, opt).theta;
    case Method::method_1_2: return solve_method1_2(s.n, s.theta.value, opt).theta;
    default: break;
  }
  fail(ErrorKind::config_error, "cannot resolve theta");
}

namespace detail {

// Zero-variance samples collapse every interval to the sample mean.
template <class Build>
ConfidenceInterval interval_or_point(std::span<const double> x, Build&& build) {
  try {
    return build();
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::zero_variance) throw;
    const double m = sample_mean(x);
    return {m, m, false, 0.0};
  }
}

struct Arm {
  std::string name;
  std::vector<unsigned char> covered;
  std::vector<double> lengths;

  Arm(std::string n, std::size_t reps) : name(std::move(n)), covered(reps, 0), lengths(reps, 0.0) {}
  void record(std::size_t r, bool hit, double len) {
    covered[r] = hit ? 1 : 0;
    lengths[r] = len;
  }
  ExperimentResult finish(bool keep) const { return summarize(name, covered, lengths, keep); }
};

inline ConfidenceInterval randomized_arm_interval(const ExperimentSpec& s, const UnivariateSample& sample,
                                                  std::span<const double> w, double theta,
                                                  const CenteredMoments& m) {
  return interval_or_point(sample.data, [&] {
    if (s.method == Method::method_1_1 || s.method == Method::method_1_2)
      return multinomial_interval(sample, w, theta, m, s.alpha);
    return randomized_interval(sample, w, theta, m, s.alpha, s.denominator_mode);
  });
}

}  // namespace detail

inline ExperimentReport run_univariate(const ExperimentSpec& spec, const RunOptions& opt = {}) {
  validate(spec);
  if (spec.kind != ExperimentKind::univariate) fail(ErrorKind::config_error, "spec is not univariate");
  ExperimentReport report{spec, resolve_theta(spec), {}};
  const double theta = report.theta;
  const bool randomized = is_randomized(spec.method);
  const CenteredMoments moments =
      randomized ? centered_moments(*spec.weight_scheme, theta, spec.n) : CenteredMoments{1.0, 0.0, 1.0};
  const double mu = true_mean(spec.data_law)[0];
  const std::size_t reps = spec.replications;

  detail::Arm primary(std::string(method_name(spec.method)), reps);
  detail::Arm classical("classical-t", reps);

  parallel_for(reps, opt.workers, [&](std::size_t r) {
    Stream data_rng = Stream::for_replicate(spec.seed, r, Purpose::data);
    const std::vector<double> x = sample_values(spec.data_law, spec.n, data_rng);
    const UnivariateSample sample{x, mu};
    const ConfidenceInterval ct =
        detail::interval_or_point(x, [&] { return classical_t_interval(sample, spec.alpha); });
    classical.record(r, ct.contains(mu), ct.length);
    if (randomized) {
      Stream weight_rng = Stream::for_replicate(spec.seed, r, Purpose::weights);
      const std::vector<double> w = sample_weights(*spec.weight_scheme, spec.n, weight_rng);
      const ConfidenceInterval ci = detail::randomized_arm_interval(spec, sample, w, theta, moments);
      primary.record(r, ci.contains(mu), ci.length);
    } else if (spec.method == Method::bootstrap_t) {
      Stream boot_rng = Stream::for_replicate(spec.seed, r, Purpose::bootstrap);
      const ConfidenceInterval bi =
          bootstrap_t_interval(sample, spec.bootstrap_resamples, spec.alpha, boot_rng, spec.resample_policy);
      primary.record(r, bi.contains(mu), bi.length);
    }
  });

  if (spec.method != Method::classical_t) report.arms.push_back(primary.finish(spec.keep_lengths));
  report.arms.push_back(classical.finish(spec.keep_lengths));
  return report;
}

inline ExperimentReport run_bootstrap_comparison(const ExperimentSpec& spec, const RunOptions& opt = {}) {
  validate(spec);
  if (spec.kind != ExperimentKind::bootstrap_comparison) fail(ErrorKind::config_error, "spec is not a bootstrap run");
  ExperimentReport report{spec, resolve_theta(spec), {}};
  const double theta = report.theta;
  const CenteredMoments moments = centered_moments(*spec.weight_scheme, theta, spec.n);
  const double mu = true_mean(spec.data_law)[0];
  const std::size_t reps = spec.replications;

  detail::Arm randomized(std::string(method_name(spec.method)), reps);
  detail::Arm boot("bootstrap-t", reps);

  parallel_for(reps, opt.workers, [&](std::size_t r) {
    Stream data_rng = Stream::for_replicate(spec.seed, r, Purpose::data);
    const std::vector<double> x = sample_values(spec.data_law, spec.n, data_rng);
    const UnivariateSample sample{x, mu};
    Stream weight_rng = Stream::for_replicate(spec.seed, r, Purpose::weights);
    const std::vector<double> w = sample_weights(*spec.weight_scheme, spec.n, weight_rng);
    const ConfidenceInterval ci = detail::randomized_arm_interval(spec, sample, w, theta, moments);
    randomized.record(r, ci.contains(mu), ci.length);
    Stream boot_rng = Stream::for_replicate(spec.seed, r, Purpose::bootstrap);
    const ConfidenceInterval bi =
        bootstrap_t_interval(sample, spec.bootstrap_resamples, spec.alpha, boot_rng, spec.resample_policy);
    boot.record(r, bi.contains(mu), bi.length);
  });

  report.arms.push_back(randomized.finish(spec.keep_lengths));
  report.arms.push_back(boot.finish(spec.keep_lengths));
  return report;
}

// Coverage is the pivot event: every coordinate of the standardized pivot vector in
// [-z*, z*]. Lengths are the areas of the bounding rectangles of those regions.
inline ExperimentReport run_bivariate(const ExperimentSpec& spec, const RunOptions& opt = {}) {
  validate(spec);
  if (spec.kind != ExperimentKind::bivariate) fail(ErrorKind::config_error, "spec is not bivariate");
  ExperimentReport report{spec, resolve_theta(spec), {}};
  const double theta = report.theta;
  const CenteredMoments moments = centered_moments(*spec.weight_scheme, theta, spec.n);
  const std::vector<double> mean = true_mean(spec.data_law);
  const Eigen::VectorXd mu = Eigen::Map<const Eigen::VectorXd>(mean.data(), 2);
  const double zstar = rectangle_cutoff(spec.alpha, 2);
  const std::size_t reps = spec.replications;

  detail::Arm randomized(std::string(method_name(spec.method)), reps);
  detail::Arm classical("classical", reps);
  constexpr double inf = std::numeric_limits<double>::infinity();

  parallel_for(reps, opt.workers, [&](std::size_t r) {
    Stream data_rng = Stream::for_replicate(spec.seed, r, Purpose::data);
    const MultivariateSample sample{skewpivot::sample(spec.data_law, spec.n, data_rng), mu};
    const CovarianceOps cov = sample_covariance(sample);
    const Eigen::VectorXd t = t_multivariate(sample, cov);
    classical.record(r, t.cwiseAbs().maxCoeff() <= zstar, classical_rectangle(sample, cov, spec.alpha).area);

    Stream weight_rng = Stream::for_replicate(spec.seed, r, Purpose::weights);
    const std::vector<double> w = sample_weights(*spec.weight_scheme, spec.n, weight_rng);
    const Eigen::VectorXd g = g_multivariate(sample, w, theta, moments, cov, spec.denominator_mode);
    double area = inf;
    if (!weights_degenerate(w, theta))
      area = randomized_rectangle(sample, w, theta, moments, cov, spec.alpha, spec.denominator_mode).area;
    randomized.record(r, g.cwiseAbs().maxCoeff() <= zstar, area);
  });

  report.arms.push_back(randomized.finish(spec.keep_lengths));
  report.arms.push_back(classical.finish(spec.keep_lengths));
  return report;
}

inline ExperimentReport run_experiment(const ExperimentSpec& spec, const RunOptions& opt = {}) {
  switch (spec.kind) {
    case ExperimentKind::univariate: return run_univariate(spec, opt);
    case ExperimentKind::bootstrap_comparison: return run_bootstrap_comparison(spec, opt);
    case ExperimentKind::bivariate: return run_bivariate(spec, opt);
  }
  fail(ErrorKind::config_error, "unknown experiment kind");
}

// ---- figure diagnostics ----

enum class FigureKind { pearson_histogram, mardia };

inline FigureKind parse_figure_kind(std::string_view text) {
  const std::string s = lowercase(trim(text));
  if (s == "pearson-histogram" || s == "pearson") return FigureKind::pearson_histogram;
  if (s == "mardia") return FigureKind::mardia;
  fail(ErrorKind::config_error, "unknown figure kind '" + s + "'");
}

struct HistogramPanel {
  std::string label;
  std::string statistic_name;  // "skewness" or "mardia"
  double statistic = 0.0;
  double lo = 0.0;
  double hi = 0.0;
  std::vector<std::size_t> counts;
};

struct DiagnosticRecord {
  FigureKind kind = FigureKind::pearson_histogram;
  std::size_t n = 0;
  std::uint64_t seed = 0;
  std::vector<HistogramPanel> panels;
};

struct FigureOptions {
  std::size_t n = 0;  // 0: 10^4 for the histogram figure, 2 * 10^4 for the Mardia figure
  std::uint64_t seed = 1;
  std::size_t bins = 40;
};

inline std::vector<std::size_t> histogram(std::span<const double> x, std::size_t bins, double& lo, double& hi) {
  lo = *std::min_element(x.begin(), x.end());
  hi = *std::max_element(x.begin(), x.end());
  std::vector<std::size_t> counts(bins, 0);
  const double width = (hi - lo) / static_cast<double>(bins);
  for (double v : x) {
    auto b = width > 0.0 ? static_cast<std::size_t>((v - lo) / width) : 0;
    counts[std::min(b, bins - 1)]++;
  }
  return counts;
}

inline DiagnosticRecord run_figure_diagnostics(FigureKind kind, const FigureOptions& fo = {}) {
  DiagnosticRecord rec;
  rec.kind = kind;
  rec.seed = fo.seed;
  if (fo.bins < 1) fail(ErrorKind::config_error, "need at least one bin");
  const WeightScheme chi = WeightScheme::chi_square(7);
  const WeightScheme bern = WeightScheme::bernoulli(1.0 / 3.0);

  if (kind == FigureKind::pearson_histogram) {
    rec.n = fo.n ? fo.n : 10000;
    Stream data_rng = Stream::for_replicate(fo.seed, 0, Purpose::data);
    const std::vector<double> x = sample_values(DataLaw::exponential(), rec.n, data_rng);
    std::vector<double> centered(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) centered[i] = x[i] - 1.0;

    auto panel = [&](std::string label, std::span<const double> v) {
      HistogramPanel p{std::move(label), "skewness", empirical_skewness(v), 0.0, 0.0, {}};
      p.counts = histogram(v, fo.bins, p.lo, p.hi);
      rec.panels.push_back(std::move(p));
    };
    panel("X-1, X~Exponential(1)", centered);
    std::uint64_t stream = 1;
    for (const auto& [scheme, theta] : {std::pair{chi, 9.3}, std::pair{bern, 0.58}}) {
      Stream weight_rng = Stream::for_replicate(fo.seed, stream++, Purpose::weights);
      const std::vector<double> w = sample_weights(scheme, rec.n, weight_rng);
      std::vector<double> y(x.size());
      for (std::size_t i = 0; i < x.size(); ++i) y[i] = (w[i] - theta) * centered[i];
      panel("(w-" + format_real(theta) + ")(X-1), w~" + scheme.descriptor(), y);
    }
    return rec;
  }

  rec.n = fo.n ? fo.n : 20000;
  Stream data_rng = Stream::for_replicate(fo.seed, 0, Purpose::data);
  const Eigen::MatrixXd x = sample(DataLaw::xx2(BaseLaw::normal), rec.n, data_rng);
  auto panel = [&](std::string label, const Eigen::MatrixXd& m) {
    HistogramPanel p{std::move(label), "mardia", mardia_skewness(m), 0.0, 0.0, {}};
    const std::vector<double> first(m.col(0).data(), m.col(0).data() + m.rows());
    p.counts = histogram(first, fo.bins, p.lo, p.hi);
    rec.panels.push_back(std::move(p));
  };
  panel("(Z, Z^2), Z~Normal(0,1)", x);
  Stream weight_rng = Stream::for_replicate(fo.seed, 1, Purpose::weights);
  const std::vector<double> w = sample_weights(chi, rec.n, weight_rng);
  Eigen::MatrixXd y(x.rows(), 2);
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    y(i, 0) = (w[i] - 9.3) * x(i, 0);
    y(i, 1) = (w[i] - 9.3) * (x(i, 1) - 1.0);
  }
  panel("(w-9.3)((Z, Z^2) - (0, 1)), w~chisq(7)", y);
  return rec;
}

}  // namespace skewpivot
