#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <string>

#include "skewpivot/error.hpp"
#include "skewpivot/weights.hpp"

namespace skewpivot {

enum class Side { below_mean, above_mean };
enum class RootPreference { closest_to_mean, farthest_from_mean };
enum class SolveMethod { method_1, method_2, method_1_1, method_1_2 };

struct WindowSolution {
  double theta = 0.0;
  double achieved_delta = 0.0;
  SolveMethod method = SolveMethod::method_1;
  std::size_t n = 0;  // only for method_1_2
  double bracket_lo = 0.0;
  double bracket_hi = 0.0;
  int iterations = 0;
};

struct SolverOptions {
  Side side = Side::above_mean;
  RootPreference preference = RootPreference::closest_to_mean;
  double theta_tolerance = 1e-12;
  int max_iterations = 200;
  int grid_points = 4000;
  double window_sds = 50.0;
};

inline double exclusion_gap(double mean) { return 1e-6 * std::max(1.0, std::abs(mean)); }

namespace detail {

struct Root {
  double theta;
  double lo;
  double hi;
  int iterations;
};

// Scan a log-spaced grid from the mean outward on one side, pick a sign change
// of f - delta, then polish with Newton steps kept inside the bracket.
inline Root find_srf_root(const std::function<double(double)>& f, const std::function<double(double)>& df,
                          double mean, double sd, double delta, const SolverOptions& opt) {
  const double gap = exclusion_gap(mean);
  const double far = std::max(opt.window_sds * sd, 10.0 * gap);
  const double dir = opt.side == Side::above_mean ? 1.0 : -1.0;
  auto g = [&](double theta) { return f(theta) - delta; };
  auto at = [&](int k) {
    const double t = static_cast<double>(k) / opt.grid_points;
    return mean + dir * gap * std::pow(far / gap, t);
  };

  const int last = opt.grid_points;
  double a = 0.0, b = 0.0;
  bool found = false;
  if (opt.preference == RootPreference::closest_to_mean) {
    double prev_x = at(0), prev_g = g(prev_x);
    if (prev_g == 0.0) return {prev_x, prev_x, prev_x, 0};
    for (int k = 1; k <= last && !found; ++k) {
      const double x = at(k), gx = g(x);
      if (gx == 0.0) return {x, x, x, 0};
      if ((gx < 0.0) != (prev_g < 0.0)) {
        a = prev_x;
        b = x;
        found = true;
      }
      prev_x = x;
      prev_g = gx;
    }
  } else {
    double prev_x = at(last), prev_g = g(prev_x);
    if (prev_g == 0.0) return {prev_x, prev_x, prev_x, 0};
    for (int k = last - 1; k >= 0 && !found; --k) {
      const double x = at(k), gx = g(x);
      if (gx == 0.0) return {x, x, x, 0};
      if ((gx < 0.0) != (prev_g < 0.0)) {
        a = x;
        b = prev_x;
        found = true;
      }
      prev_x = x;
      prev_g = gx;
    }
  }

  if (!found) {
    if (std::abs(f(mean) - delta) <= 1e-10)
      fail(ErrorKind::exclusion_violation, "the only SRF root is the weight mean itself");
    fail(ErrorKind::no_root_in_bracket, "target SRF " + format_real(delta) + " not attained on the requested side");
  }

  double lo = std::min(a, b), hi = std::max(a, b);
  double glo = g(lo);
  const double bracket_lo = lo, bracket_hi = hi;
  double x = 0.5 * (lo + hi);
  int it = 0;
  for (; it < opt.max_iterations; ++it) {
    const double gx = g(x);
    if (gx == 0.0) break;
    if ((gx < 0.0) == (glo < 0.0)) {
      lo = x;
      glo = gx;
    } else {
      hi = x;
    }
    const double slope = df(x);
    double next = x - gx / slope;
    if (!(next > lo && next < hi) || !std::isfinite(next)) next = 0.5 * (lo + hi);
    const double step = std::abs(next - x);
    x = next;
    if (step <= opt.theta_tolerance * std::max(1.0, std::abs(x)) || hi - lo <= opt.theta_tolerance) break;
  }
  return {x, bracket_lo, bracket_hi, it + 1};
}

}  // namespace detail

inline WindowSolution solve_method1(const WeightScheme& scheme, double delta, const SolverOptions& opt = {}) {
  if (scheme.triangular()) fail(ErrorKind::invalid_argument, "method I needs a fixed (non-triangular) weight law");
  const LawMoments m = law_moments(scheme);
  auto f = [&](double t) { return srf(scheme, t); };
  auto df = [&](double t) { return srf_derivative_from_law(m, t); };
  const auto r = detail::find_srf_root(f, df, m.mean, std::sqrt(m.c2), delta, opt);
  return {r.theta, srf(scheme, r.theta), SolveMethod::method_1, 0, r.lo, r.hi, r.iterations};
}

inline WindowSolution solve_method1(const WeightScheme& scheme, double delta, Side side) {
  SolverOptions opt;
  opt.side = side;
  return solve_method1(scheme, delta, opt);
}

inline WindowSolution solve_method2(const WeightScheme& scheme) {
  if (!scheme.symmetric()) fail(ErrorKind::not_symmetric, "method II needs a weight law symmetric about its mean");
  const double mean = weight_mean(scheme);
  return {mean, 0.0, SolveMethod::method_2, 0, mean, mean, 0};
}

inline WindowSolution solve_method1_1(double delta, const SolverOptions& opt = {}) {
  const LawMoments& m = poisson_one_moments;
  auto f = [](double t) { return srf_multinomial_limit(t); };
  auto df = [&](double t) { return srf_derivative_from_law(m, t); };
  const auto r = detail::find_srf_root(f, df, m.mean, 1.0, delta, opt);
  return {r.theta, srf_multinomial_limit(r.theta), SolveMethod::method_1_1, 0, r.lo, r.hi, r.iterations};
}

inline WindowSolution solve_method1_2(std::size_t n, double delta, const SolverOptions& opt = {}) {
  const LawMoments m = multinomial_marginal_moments(n);
  auto f = [n](double t) { return srf_multinomial_finite(t, n); };
  auto df = [&](double t) { return srf_derivative_from_law(m, t); };
  const auto r = detail::find_srf_root(f, df, m.mean, std::sqrt(m.c2), delta, opt);
  return {r.theta, srf_multinomial_finite(r.theta, n), SolveMethod::method_1_2, n, r.lo, r.hi, r.iterations};
}

}  // namespace skewpivot
