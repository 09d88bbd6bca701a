#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <iterator>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "skewpivot/skewpivot.hpp"

namespace skewpivot::cli {

enum Exit : int { ok = 0, runtime_failure = 1, config_failure = 2 };

// Errors that mean "the request was wrong" rather than "the computation failed".
inline bool is_config_kind(ErrorKind k) {
  switch (k) {
    case ErrorKind::config_error:
    case ErrorKind::invalid_argument:
    case ErrorKind::missing_sample_size:
    case ErrorKind::non_positive_variance:
    case ErrorKind::not_symmetric:
    case ErrorKind::dimension_mismatch:
    case ErrorKind::constraint_violated: return true;
    default: return false;
  }
}

struct Common {
  std::string out_path;
  std::string format = "csv";
  std::size_t reps = 1000;
  std::uint64_t seed = 1;
  unsigned threads = 0;
};

// Flags shared by the experiment subcommands when no spec file is given.
struct ExperimentFlags {
  std::string spec_file;
  std::string data;
  std::string weights;
  std::string method;
  std::string theta = "auto";
  std::string side;
  std::size_t n = 30;
  double alpha = 0.05;
  std::size_t b = 1000;
  std::string denominator = "expected";
  std::string policy = "propagate-infinite";
};

inline std::vector<double> parse_values(const std::string& text) {
  std::vector<double> v;
  std::string cur;
  auto flush = [&] {
    if (!trim(cur).empty()) v.push_back(parse_real(cur));
    cur.clear();
  };
  for (char c : text) {
    if (c == ',' || c == '\n' || c == ' ' || c == '\t' || c == '\r') flush();
    else cur += c;
  }
  flush();
  return v;
}

inline std::vector<double> parse_grid(const std::string& text) {
  std::vector<std::string> parts;
  std::string cur;
  for (char c : text) {
    if (c == ':') {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  parts.push_back(cur);
  if (parts.size() == 1) return {parse_real(parts[0])};
  if (parts.size() != 3) fail(ErrorKind::config_error, "grid must be t or lo:hi:step");
  const double lo = parse_real(parts[0]), hi = parse_real(parts[1]), step = parse_real(parts[2]);
  if (!(step > 0.0) || hi < lo) fail(ErrorKind::config_error, "grid needs lo <= hi and step > 0");
  const auto count = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9)) + 1;
  if (count > 1000000) fail(ErrorKind::config_error, "grid too large");
  std::vector<double> t(count);
  for (std::size_t i = 0; i < count; ++i) t[i] = lo + step * static_cast<double>(i);
  return t;
}

inline Side parse_side(const std::string& s) {
  const std::string v = lowercase(trim(s));
  if (v == "above") return Side::above_mean;
  if (v == "below") return Side::below_mean;
  fail(ErrorKind::config_error, "side must be above or below");
}

inline void write_rows(std::ostream& os, const std::string& format, const std::vector<std::vector<std::string>>& rows) {
  if (format == "table") {
    detail::write_aligned(os, rows);
    return;
  }
  for (const auto& r : rows) {
    for (std::size_t c = 0; c < r.size(); ++c) os << (c ? "," : "") << r[c];
    os << '\n';
  }
}

inline std::vector<ExperimentSpec> specs_from_flags(const ExperimentFlags& f, const Common& c, ExperimentKind kind,
                                                    const std::string& id, const std::string& default_method,
                                                    const CLI::App* sub) {
  if (!f.spec_file.empty()) {
    std::ifstream in(f.spec_file);
    if (!in) fail(ErrorKind::config_error, "cannot open spec file '" + f.spec_file + "'");
    std::vector<ExperimentSpec> specs = parse_spec_stream(in);
    for (auto& s : specs) {
      if (sub->count("--reps")) s.replications = c.reps;
      if (sub->count("--seed")) s.seed = c.seed;
      if (kind == ExperimentKind::bootstrap_comparison && s.kind == ExperimentKind::univariate) s.kind = kind;
      validate(s);
    }
    return specs;
  }
  std::ostringstream text;
  text << '[' << id << "]\nkind = " << kind_name(kind) << '\n';
  if (f.data.empty()) fail(ErrorKind::config_error, "--data is required without --spec");
  text << "data = " << f.data << '\n';
  if (!f.weights.empty()) text << "weights = " << f.weights << '\n';
  text << "method = " << (f.method.empty() ? default_method : f.method) << '\n';
  text << "theta = " << f.theta << '\n';
  if (!f.side.empty()) text << "side = " << f.side << '\n';
  text << "n = " << f.n << "\nreps = " << c.reps << "\nalpha = " << format_real(f.alpha) << "\nB = " << f.b
       << "\nseed = " << c.seed << "\ndenominator = " << f.denominator << "\nbootstrap-policy = " << f.policy << '\n';
  return parse_spec_text(text.str());
}

inline void add_experiment_flags(CLI::App* sub, ExperimentFlags& f, bool bootstrap) {
  sub->add_option("--spec", f.spec_file, "spec file with [experiment] sections");
  sub->add_option("--data", f.data, "data law, e.g. lognormal(0,1)");
  sub->add_option("--weights", f.weights, "weight scheme, e.g. chisq(7)");
  sub->add_option("--method", f.method, "I, II, I.1, I.2, classical-t, bootstrap-t");
  sub->add_option("--theta", f.theta, "value, auto, or solve(delta[,below])");
  sub->add_option("--side", f.side, "above or below, for theta = solve(...)");
  sub->add_option("--n", f.n, "sample size");
  sub->add_option("--alpha", f.alpha, "nominal level is 1 - alpha");
  sub->add_option("--denominator", f.denominator, "expected or empirical");
  if (bootstrap) {
    sub->add_option("--B", f.b, "bootstrap resamples");
    sub->add_option("--policy", f.policy, "propagate-infinite or redraw");
  }
}

inline void run_specs(const std::vector<ExperimentSpec>& specs, const Common& c, std::ostream& out,
                      std::ostream& err, const std::string& title = {}) {
  RunOptions ro;
  ro.workers = c.threads;
  std::vector<ExperimentReport> reports;
  for (const auto& s : specs) {
    validate(s);
    err << format_spec(s);
    const double theta = resolve_theta(s);
    if (std::isfinite(theta)) err << "# resolved theta = " << format_real(theta) << '\n';
  }
  for (const auto& s : specs) reports.push_back(run_experiment(s, ro));
  if (c.format == "table") write_table(out, reports, title);
  else write_csv(out, reports);
}

inline int dispatch(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Randomized Student-t pivots with controllable skewness", "skewpivot"};
  app.require_subcommand(1);
  Common c;
  auto add_common = [&](CLI::App* sub, bool experiments) {
    sub->add_option("--out", c.out_path, "write results to this file");
    sub->add_option("--format", c.format, "csv or table")->check(CLI::IsMember({"csv", "table"}));
    sub->add_option("--seed", c.seed, "master seed");
    if (experiments) {
      sub->add_option("--reps", c.reps, "Monte Carlo replications");
      sub->add_option("--threads", c.threads, "worker threads (0: SKEWPIVOT_THREADS or all cores)");
    }
  };

  // srf
  std::string srf_weights, srf_theta_text;
  std::size_t srf_n = 0;
  auto* srf_cmd = app.add_subcommand("srf", "skewness-reducing factor of a weight scheme at theta");
  srf_cmd->add_option("--weights", srf_weights, "weight scheme")->required();
  srf_cmd->add_option("--theta", srf_theta_text, "theta")->required();
  srf_cmd->add_option("--n", srf_n, "sample size (multinomial-sym only)");
  add_common(srf_cmd, false);

  // solve-theta
  std::string st_weights, st_side = "above", st_root = "closest";
  double st_delta = 0.0;
  std::size_t st_n = 0;
  auto* st_cmd = app.add_subcommand("solve-theta", "theta with SRF(theta) = delta");
  st_cmd->add_option("--weights", st_weights, "weight scheme")->required();
  st_cmd->add_option("--delta", st_delta, "target SRF");
  st_cmd->add_option("--side", st_side, "above or below the weight mean");
  st_cmd->add_option("--n", st_n, "finite n for multinomial-sym; omit for the n -> infinity limit");
  st_cmd->add_option("--root", st_root, "closest or farthest from the mean")
      ->check(CLI::IsMember({"closest", "farthest"}));
  add_common(st_cmd, false);

  // interval
  std::string iv_values, iv_file, iv_weights, iv_method = "I", iv_theta = "auto", iv_side, iv_den = "expected";
  std::string iv_policy = "propagate-infinite";
  double iv_alpha = 0.05;
  std::size_t iv_b = 1000;
  auto* iv_cmd = app.add_subcommand("interval", "confidence interval for the mean of one sample");
  iv_cmd->add_option("--values", iv_values, "comma separated observations");
  iv_cmd->add_option("--data-file", iv_file, "file of whitespace separated observations");
  iv_cmd->add_option("--weights", iv_weights, "weight scheme");
  iv_cmd->add_option("--method", iv_method, "I, II, I.1, I.2, classical-t, bootstrap-t");
  iv_cmd->add_option("--theta", iv_theta, "value, auto, or solve(delta[,below])");
  iv_cmd->add_option("--side", iv_side, "above or below, for theta = solve(...)");
  iv_cmd->add_option("--alpha", iv_alpha, "nominal level is 1 - alpha");
  iv_cmd->add_option("--denominator", iv_den, "expected or empirical");
  iv_cmd->add_option("--B", iv_b, "bootstrap resamples");
  iv_cmd->add_option("--policy", iv_policy, "propagate-infinite or redraw");
  add_common(iv_cmd, false);

  ExperimentFlags sim_f, boot_f, biv_f;
  auto* sim_cmd = app.add_subcommand("simulate", "coverage study for a univariate method");
  add_experiment_flags(sim_cmd, sim_f, true);
  add_common(sim_cmd, true);
  auto* boot_cmd = app.add_subcommand("bootstrap-compare", "randomized method against bootstrap-t");
  add_experiment_flags(boot_cmd, boot_f, true);
  add_common(boot_cmd, true);
  auto* biv_cmd = app.add_subcommand("bivariate", "coverage and area of confidence rectangles");
  add_experiment_flags(biv_cmd, biv_f, false);
  add_common(biv_cmd, true);

  // edgeworth
  ExpansionInputs ew;
  std::string ew_grid = "-3:3:0.5";
  auto* ew_cmd = app.add_subcommand("edgeworth", "one- and two-term Edgeworth approximations");
  ew_cmd->add_option("--gamma", ew.gamma, "data skewness");
  ew_cmd->add_option("--kappa", ew.kappa, "data kurtosis");
  ew_cmd->add_option("--srf", ew.srf, "skewness-reducing factor");
  ew_cmd->add_option("--weight-kurtosis", ew.weight_kurtosis_ratio, "weight kurtosis ratio");
  ew_cmd->add_option("--n", ew.n, "sample size");
  ew_cmd->add_option("--t", ew_grid, "t or lo:hi:step");
  add_common(ew_cmd, false);

  // figures
  std::string fig_kind = "pearson";
  FigureOptions fo;
  auto* fig_cmd = app.add_subcommand("figures", "histogram and skewness diagnostics");
  fig_cmd->add_option("--kind", fig_kind, "pearson or mardia");
  fig_cmd->add_option("--n", fo.n, "sample size (0: figure default)");
  fig_cmd->add_option("--bins", fo.bins, "histogram bins");
  add_common(fig_cmd, false);

  // table
  int table_id = 0;
  auto* tab_cmd = app.add_subcommand("table", "regenerate one of the preset coverage tables");
  tab_cmd->add_option("--id", table_id, "table number 1..12")->required();
  add_common(tab_cmd, true);

  try {
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? ok : config_failure;
  }

  try {
    std::ofstream file;
    if (!c.out_path.empty()) {
      file.open(c.out_path);
      if (!file) fail(ErrorKind::config_error, "cannot write '" + c.out_path + "'");
    }
    std::ostream& os = c.out_path.empty() ? out : file;
    const std::string seed_line = "# seed = " + std::to_string(c.seed) + '\n';

    if (srf_cmd->parsed()) {
      const WeightScheme w = parse_weight_scheme(srf_weights);
      const double theta = parse_real(srf_theta_text);
      std::optional<std::size_t> n;
      if (srf_n) n = srf_n;
      err << "# srf weights = " << w.descriptor() << " theta = " << format_real(theta)
          << (n ? " n = " + std::to_string(*n) : std::string()) << '\n'
          << seed_line;
      const double r = srf(w, theta, n);
      write_rows(os, c.format, {{"weights", "theta", "srf"}, {w.descriptor(), format_real(theta), format_real(r)}});
    } else if (st_cmd->parsed()) {
      const WeightScheme w = parse_weight_scheme(st_weights);
      SolverOptions opt;
      opt.side = parse_side(st_side);
      opt.preference = st_root == "closest" ? RootPreference::closest_to_mean : RootPreference::farthest_from_mean;
      err << "# solve-theta weights = " << w.descriptor() << " delta = " << format_real(st_delta)
          << " side = " << st_side << " root = " << st_root
          << (st_n ? " n = " + std::to_string(st_n) : std::string()) << '\n'
          << seed_line;
      WindowSolution s;
      if (w.triangular()) s = st_n ? solve_method1_2(st_n, st_delta, opt) : solve_method1_1(st_delta, opt);
      else s = solve_method1(w, st_delta, opt);
      write_rows(os, c.format,
                 {{"weights", "delta", "theta", "achieved_srf", "bracket_lo", "bracket_hi", "iterations"},
                  {w.descriptor(), format_real(st_delta), format_real(s.theta), format_real(s.achieved_delta),
                   format_real(s.bracket_lo), format_real(s.bracket_hi), std::to_string(s.iterations)}});
    } else if (iv_cmd->parsed()) {
      std::vector<double> x;
      if (!iv_file.empty()) {
        std::ifstream in(iv_file);
        if (!in) fail(ErrorKind::config_error, "cannot open '" + iv_file + "'");
        x = parse_values(std::string(std::istreambuf_iterator<char>(in), {}));
      } else {
        x = parse_values(iv_values);
      }
      if (x.size() < 2) fail(ErrorKind::config_error, "need at least two observations");
      ExperimentSpec s;
      s.id = "interval";
      s.kind = ExperimentKind::univariate;
      s.data_law = DataLaw::normal();  // placeholder; only n and the weight settings matter here
      if (!iv_weights.empty()) s.weight_scheme = parse_weight_scheme(iv_weights);
      s.method = parse_method(iv_method);
      s.theta = parse_theta(iv_theta);
      if (!iv_side.empty()) s.theta.side = parse_side(iv_side);
      s.n = x.size();
      s.replications = 1;
      s.alpha = iv_alpha;
      s.bootstrap_resamples = iv_b;
      s.seed = c.seed;
      if (lowercase(iv_den) == "empirical") s.denominator_mode = DenominatorMode::empirical;
      else if (lowercase(iv_den) != "expected") fail(ErrorKind::config_error, "denominator must be expected or empirical");
      if (lowercase(iv_policy) == "redraw") s.resample_policy = ResamplePolicy::redraw;
      else if (lowercase(iv_policy) != "propagate-infinite") fail(ErrorKind::config_error, "unknown policy");
      validate(s);
      const double theta = resolve_theta(s);
      err << "# interval n = " << x.size() << " method = " << method_name(s.method)
          << (s.weight_scheme ? " weights = " + s.weight_scheme->descriptor() : std::string())
          << (std::isfinite(theta) ? " theta = " + format_real(theta) : std::string())
          << " alpha = " << format_real(s.alpha) << '\n'
          << seed_line;
      const UnivariateSample sample{x, 0.0};
      ConfidenceInterval ci;
      if (s.method == Method::classical_t) {
        ci = classical_t_interval(sample, s.alpha);
      } else if (s.method == Method::bootstrap_t) {
        Stream rng = Stream::for_replicate(s.seed, 0, Purpose::bootstrap);
        ci = bootstrap_t_interval(sample, s.bootstrap_resamples, s.alpha, rng, s.resample_policy);
      } else {
        Stream rng = Stream::for_replicate(s.seed, 0, Purpose::weights);
        const std::vector<double> w = sample_weights(*s.weight_scheme, x.size(), rng);
        ci = detail::randomized_arm_interval(s, sample, w, theta, centered_moments(*s.weight_scheme, theta, s.n));
      }
      write_rows(os, c.format,
                 {{"method", "n", "lo", "hi", "length", "degenerate"},
                  {std::string(method_name(s.method)), std::to_string(x.size()), format_real(ci.lo), format_real(ci.hi),
                   format_real(ci.length), ci.degenerate ? "1" : "0"}});
    } else if (sim_cmd->parsed()) {
      run_specs(specs_from_flags(sim_f, c, ExperimentKind::univariate, "simulate", "classical-t", sim_cmd), c, os, err);
    } else if (boot_cmd->parsed()) {
      run_specs(specs_from_flags(boot_f, c, ExperimentKind::bootstrap_comparison, "bootstrap-compare", "I.1", boot_cmd), c, os,
                err);
    } else if (biv_cmd->parsed()) {
      run_specs(specs_from_flags(biv_f, c, ExperimentKind::bivariate, "bivariate", "I", biv_cmd), c, os, err);
    } else if (ew_cmd->parsed()) {
      ew.validate();
      const std::vector<double> t = parse_grid(ew_grid);
      err << "# edgeworth gamma = " << format_real(ew.gamma) << " kappa = " << format_real(ew.kappa)
          << " srf = " << format_real(ew.srf) << " weight-kurtosis = " << format_real(ew.weight_kurtosis_ratio)
          << " n = " << format_real(ew.n) << " t = " << ew_grid << '\n'
          << seed_line;
      std::vector<std::vector<std::string>> rows{{"t", "normal", "one_term", "two_term"}};
      for (double v : t)
        rows.push_back({format_real(v), format_real(normal_cdf(v)), format_real(one_term_cdf(v, ew)),
                        format_real(two_term_cdf(v, ew))});
      write_rows(os, c.format, rows);
    } else if (fig_cmd->parsed()) {
      fo.seed = c.seed;
      const FigureKind kind = parse_figure_kind(fig_kind);
      err << "# figures kind = " << fig_kind << " n = " << fo.n << " bins = " << fo.bins << '\n' << seed_line;
      const DiagnosticRecord rec = run_figure_diagnostics(kind, fo);
      if (c.format == "table") write_diagnostics_table(os, rec);
      else write_diagnostics_csv(os, rec);
    } else if (tab_cmd->parsed()) {
      const std::string title = "Table " + std::to_string(table_id) + ": " + preset_title(table_id);
      run_specs(preset_table(table_id, c.reps, c.seed), c, os, err, title);
    }
    return ok;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return is_config_kind(e.kind()) ? config_failure : runtime_failure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return runtime_failure;
  }
}

}  // namespace skewpivot::cli
