// Runs the ten acceptance checks and prints one PASS/FAIL line for each.
// Exit status is the number of failed checks.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "skewpivot/skewpivot.hpp"

using namespace skewpivot;

namespace {

constexpr std::uint64_t kSeed = 1;

struct Outcome {
  bool pass = true;
  std::string detail;

  void check(bool ok, const std::string& what) {
    if (!detail.empty()) detail += "; ";
    detail += what + (ok ? "" : " [miss]");
    pass = pass && ok;
  }
};

std::string num(double v, int digits = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

// bands are inclusive; the slack absorbs rounding in got - want
bool near(double got, double want, double tol) { return std::abs(got - want) <= tol + 1e-12; }

std::string band(double got, double want, double tol) {
  return num(got) + " (want " + num(want) + " +- " + num(tol) + ")";
}

const ExperimentReport* find(const std::vector<ExperimentReport>& reps, const std::string& id) {
  for (const auto& r : reps)
    if (r.spec.id == id) return &r;
  fail(ErrorKind::invalid_argument, "no experiment " + id);
}

std::vector<ExperimentReport> run_all(const std::vector<ExperimentSpec>& specs, unsigned workers = 0) {
  std::vector<ExperimentReport> out;
  RunOptions ro;
  ro.workers = workers;
  for (const auto& s : specs) out.push_back(run_experiment(s, ro));
  return out;
}

// ---- 1 ----
Outcome srf_exactness() {
  Outcome o;
  const double chi = srf(WeightScheme::chi_square(7), 9.3);
  const double bern = srf(WeightScheme::bernoulli(1.0 / 3.0), 0.58);
  const double norm = srf(WeightScheme::normal(0.0, 1.0), 0.0);
  o.check(near(chi, -0.6228, 5e-4), "chisq(7)@9.3 " + band(chi, -0.6228, 5e-4));
  o.check(near(bern, -0.6997, 5e-4), "bernoulli(1/3)@0.58 " + band(bern, -0.6997, 5e-4));
  o.check(norm == 0.0, "normal(0,1)@0 = " + num(norm, 17));
  return o;
}

// ---- 2 ----
Outcome solver_round_trips() {
  Outcome o;
  const double t10 = solve_method1_2(10, 1e-4).theta;
  const double t20 = solve_method1_2(20, 1e-4).theta;
  const double tinf = solve_method1_1(1e-4).theta;
  o.check(near(t10, 1.2601, 5e-4), "n=10 " + band(t10, 1.2601, 5e-4));
  o.check(near(t20, 1.29129, 5e-4), "n=20 " + band(t20, 1.29129, 5e-4));
  o.check(near(tinf, 1.32215, 5e-4), "limit " + band(tinf, 1.32215, 5e-4));
  return o;
}

// ---- 3 ----
double brute_force_multinomial_srf(double theta, int n) {
  const double p = 1.0 / n;
  double m2 = 0.0, m3 = 0.0;
  for (int k = 0; k <= n; ++k) {
    const double logpmf = std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0) +
                          k * std::log(p) + (n - k) * std::log1p(-p);
    const double pmf = std::exp(logpmf);
    const double d = k - theta;
    m2 += pmf * d * d;
    m3 += pmf * d * d * d;
  }
  return m3 / std::pow(m2, 1.5);
}

Outcome multinomial_oracle() {
  Outcome o;
  double worst = 0.0;
  for (int n : {2, 3, 10, 50})
    for (double theta : {-1.0, 0.0, 0.5, 1.3, 2.0})
      worst = std::max(worst, std::abs(srf_multinomial_finite(theta, n) - brute_force_multinomial_srf(theta, n)));
  o.check(worst <= 1e-12, "max |closed form - enumeration| = " + num(worst, 3) + " over 20 points (tol 1e-12)");
  return o;
}

// ---- 4 ----
Outcome table1_reproduction() {
  Outcome o;
  const auto reps = run_all(preset_table(1, 1000, kSeed));
  const auto* ex = find(reps, "table1-exponential-n30");
  const auto* ln = find(reps, "table1-lognormal-n30");
  o.check(near(ex->arm("I").coverage, 0.940, 0.02), "exp n30 I " + band(ex->arm("I").coverage, 0.940, 0.02));
  o.check(near(ex->arm("classical-t").coverage, 0.920, 0.02),
          "exp n30 t " + band(ex->arm("classical-t").coverage, 0.920, 0.02));
  o.check(near(ln->arm("I").coverage, 0.930, 0.025), "lognormal n30 I " + band(ln->arm("I").coverage, 0.930, 0.025));
  o.check(near(ln->arm("classical-t").coverage, 0.875, 0.025),
          "lognormal n30 t " + band(ln->arm("classical-t").coverage, 0.875, 0.025));

  const auto big = run_all(preset_table(1, 10000, kSeed));
  std::size_t ordered = 0;
  std::string worst;
  double worst_gap = 1.0;
  for (const auto& r : big) {
    const double gap = r.arm("I").coverage - r.arm("classical-t").coverage;
    if (gap >= 0.0) ++ordered;
    if (gap < worst_gap) {
      worst_gap = gap;
      worst = r.spec.id;
    }
  }
  o.check(ordered == big.size(), "10^4 reps: randomized >= classical in " + std::to_string(ordered) + "/" +
                                     std::to_string(big.size()) + " rows, smallest gap " + num(worst_gap, 3) +
                                     " (" + worst + ")");
  return o;
}

// ---- 5 ----
Outcome method2_behaviour() {
  Outcome o;
  const auto t3 = run_all(preset_table(3, 1000, kSeed));
  const auto& ii100 = find(t3, "table3-lognormal-n100")->arm("II");
  const auto& ii10 = find(t3, "table3-lognormal-n10")->arm("II");
  o.check(near(ii100.coverage, 0.947, 0.02), "II lognormal n100 coverage " + band(ii100.coverage, 0.947, 0.02));
  const double ratio2 = ii100.median_length / ii10.median_length;
  o.check(ratio2 <= 3.0 && ratio2 >= 1.0 / 3.0, "II median n100/n10 = " + num(ratio2, 4) + " (want within 3x)");

  const auto t1 = run_all(preset_table(1, 1000, kSeed));
  const double ratio1 =
      find(t1, "table1-lognormal-n30")->arm("I").median_length / find(t1, "table1-lognormal-n10")->arm("I").median_length;
  o.check(ratio1 < 0.5, "I median n30/n10 = " + num(ratio1, 4) + " (want < 0.5)");
  return o;
}

// ---- 6 ----
Outcome bootstrap_comparison() {
  Outcome o;
  const auto t4 = run_all(preset_table(4, 1000, kSeed));
  const auto* ex = find(t4, "table4-exponential-n20");
  o.check(near(ex->arm("I.1").coverage, 0.952, 0.02), "exp n20 I.1 " + band(ex->arm("I.1").coverage, 0.952, 0.02));
  o.check(near(ex->arm("bootstrap-t").coverage, 0.941, 0.02),
          "exp n20 bootstrap-t " + band(ex->arm("bootstrap-t").coverage, 0.941, 0.02));
  const std::size_t inf = find(t4, "table4-binomial-n13")->arm("bootstrap-t").infinite_count;
  o.check(inf >= 1, "binomial n13 bootstrap infinite lengths = " + std::to_string(inf));
  return o;
}

// ---- 7 ----
Outcome bivariate_rectangles() {
  Outcome o;
  const double cut = rectangle_cutoff(0.05, 2);
  o.check(near(cut, 2.2365, 5e-4), "cutoff " + band(cut, 2.2365, 5e-4));
  for (int id : {7, 11}) {
    const auto reps = run_all(preset_table(id, 1000, kSeed));
    const auto* r = find(reps, "table" + std::to_string(id) + "-xx2-normal-n100");
    const std::string arm = id == 7 ? "I" : "I.1";
    const double rc = r->arm(arm).coverage, cc = r->arm("classical").coverage;
    o.check(rc >= 0.945 - 0.02 - 1e-12 && rc <= 0.950 + 0.02 + 1e-12,
            "preset " + std::to_string(id) + " randomized " + num(rc) + " (want [0.925, 0.970])");
    o.check(cc >= 0.917 - 0.02 - 1e-12 && cc <= 0.921 + 0.02 + 1e-12,
            "preset " + std::to_string(id) + " classical " + num(cc) + " (want [0.897, 0.941])");
  }
  return o;
}

// ---- 8 ----
Outcome edgeworth_properties() {
  Outcome o;
  ExpansionInputs in{2.0, 9.0, 0.7, 1.3, 25.0};
  o.check(one_term_cdf(1.0, in) == normal_cdf(1.0), "one-term at t=1 equals Phi(1)");

  in.srf = 0.0;
  bool one_ok = true;
  double two_err = 0.0;
  for (double t = -3.0; t <= 3.0; t += 0.25) {
    one_ok = one_ok && one_term_cdf(t, in) == normal_cdf(t);
    const double h2 = t * t * t - 3.0 * t;
    const double want = normal_cdf(t) - normal_pdf(t) * h2 / (24.0 * in.n) * (in.weight_kurtosis_ratio * in.kappa - 3.0);
    two_err = std::max(two_err, std::abs(two_term_cdf(t, in) - want));
  }
  o.check(one_ok, "srf=0: one-term is Phi on the grid");
  o.check(two_err <= 1e-15, "srf=0: two-term keeps only the kurtosis term (max err " + num(two_err, 3) + ")");

  // Z_n = sqrt(n)(mean - 1) for Exponential(1), n = 50, 10^6 replicates
  constexpr std::size_t reps = 1000000, n = 50;
  std::vector<double> z(reps);
  parallel_for(reps, 0, [&](std::size_t r) {
    Stream rng = Stream::for_replicate(kSeed, r, Purpose::auxiliary);
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += rng.exponential();
    z[r] = std::sqrt(static_cast<double>(n)) * (s / n - 1.0);
  });
  std::sort(z.begin(), z.end());
  const ExpansionInputs ex{2.0, 9.0, 1.0, 1.0, static_cast<double>(n)};
  double gap_phi = 0.0, gap_two = 0.0;
  for (std::size_t i = 0; i < reps; ++i) {
    const double lo = static_cast<double>(i) / reps, hi = static_cast<double>(i + 1) / reps;
    const double f = normal_cdf(z[i]), g = two_term_cdf(z[i], ex);
    gap_phi = std::max({gap_phi, std::abs(f - lo), std::abs(f - hi)});
    gap_two = std::max({gap_two, std::abs(g - lo), std::abs(g - hi)});
  }
  o.check(gap_two < gap_phi, "exp n50 sup-gap two-term " + num(gap_two, 4) + " vs Phi " + num(gap_phi, 4));
  return o;
}

// ---- 9 ----
Outcome mardia() {
  Outcome o;
  const DataLaw law = DataLaw::xx2(BaseLaw::normal);
  const double beta = population_mardia(law);
  o.check(near(beta, 14.0, 1e-12), "population beta(Z,Z^2) = " + num(beta, 10));

  const DiagnosticRecord rec = run_figure_diagnostics(FigureKind::mardia, FigureOptions{20000, kSeed, 40});
  const double b = rec.panels.at(0).statistic;
  o.check(b >= 12.5 && b <= 14.5, "n=20000 estimate " + num(b) + " (want [12.5, 14.5])");

  // averaged U-statistics, raw against (w - 9.3)(X - mu)
  constexpr std::size_t reps = 200, n = 20000;
  const WeightScheme chi = WeightScheme::chi_square(7);
  std::vector<double> raw(reps), rnd(reps);
  parallel_for(reps, 0, [&](std::size_t r) {
    Stream data_rng = Stream::for_replicate(kSeed, r, Purpose::data);
    Stream weight_rng = Stream::for_replicate(kSeed, r, Purpose::weights);
    const Eigen::MatrixXd x = sample(law, n, data_rng);
    const std::vector<double> w = sample_weights(chi, n, weight_rng);
    Eigen::MatrixXd y(n, 2);
    for (std::size_t i = 0; i < n; ++i) {
      y(i, 0) = (w[i] - 9.3) * x(i, 0);
      y(i, 1) = (w[i] - 9.3) * (x(i, 1) - 1.0);
    }
    raw[r] = mardia_skewness(x, MardiaEstimator::u_statistic);
    rnd[r] = mardia_skewness(y, MardiaEstimator::u_statistic);
  });
  const double ratio = pairwise_sum(rnd) / pairwise_sum(raw);
  const double target = std::pow(srf(chi, 9.3), 2);
  o.check(std::abs(ratio / target - 1.0) <= 0.15,
          "randomized/raw = " + num(ratio, 4) + " vs SRF^2 " + num(target, 4) + " (want within 15%)");
  return o;
}

// ---- 10 ----
Outcome determinism() {
  Outcome o;
  std::vector<ExperimentSpec> specs;
  auto pick = [&](int table, const std::string& id) {
    for (auto& s : preset_table(table, 300, kSeed))
      if (s.id == id) specs.push_back(s);
  };
  pick(1, "table1-lognormal-n10");
  pick(3, "table3-poisson-n20");
  pick(4, "table4-binomial-n13");
  pick(5, "table5-lognormal-n10");
  pick(7, "table7-xx2-exponential-n100");
  pick(12, "table12-ma1-exp-n30");
  if (specs.size() != 6) fail(ErrorKind::invalid_argument, "missing determinism specs");

  std::vector<std::string> csv;
  for (unsigned workers : {1u, 2u, 3u, 8u}) {
    std::ostringstream os;
    write_csv(os, run_all(specs, workers));
    csv.push_back(os.str());
  }
  const bool same = std::all_of(csv.begin(), csv.end(), [&](const std::string& s) { return s == csv.front(); });
  o.check(same, "CSV identical across 1/2/3/8 workers for " + std::to_string(specs.size()) + " experiments (" +
                    std::to_string(csv.front().size()) + " bytes)");
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> checks{
      {"srf exactness", srf_exactness},
      {"window solver round trips", solver_round_trips},
      {"multinomial srf vs enumeration", multinomial_oracle},
      {"preset 1 coverage", table1_reproduction},
      {"method II length behaviour", method2_behaviour},
      {"bootstrap-t comparison", bootstrap_comparison},
      {"bivariate rectangles", bivariate_rectangles},
      {"edgeworth properties", edgeworth_properties},
      {"mardia skewness", mardia},
      {"determinism", determinism},
  };
  int failed = 0;
  for (std::size_t i = 0; i < checks.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = checks[i].second();
    } catch (const std::exception& e) {
      out = {false, std::string("threw: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!out.pass) ++failed;
    std::cout << (out.pass ? "PASS" : "FAIL") << " criterion " << (i + 1) << " (" << checks[i].first << ", "
              << num(secs, 3) << "s): " << out.detail << std::endl;
  }
  std::cout << (checks.size() - failed) << "/" << checks.size() << " criteria passed" << std::endl;
  return failed;
}
