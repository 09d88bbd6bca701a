#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <utility>
#include <vector>

#include "skewpivot/error.hpp"
#include "skewpivot/normal.hpp"
#include "skewpivot/pivots.hpp"
#include "skewpivot/rng.hpp"
#include "skewpivot/weights.hpp"

namespace skewpivot {

struct ConfidenceInterval {
  double lo = 0.0;
  double hi = 0.0;
  bool degenerate = false;
  double length = 0.0;

  static ConfidenceInterval between(double a, double b) {
    const double lo = std::min(a, b), hi = std::max(a, b);
    const double len = hi - lo;
    if (!std::isfinite(len)) return {lo, hi, true, std::numeric_limits<double>::infinity()};
    return {lo, hi, false, len};
  }
  static ConfidenceInterval whole_line() {
    constexpr double inf = std::numeric_limits<double>::infinity();
    return {-inf, inf, true, inf};
  }

  bool contains(double mu) const { return lo <= mu && mu <= hi; }
};

// |sum (w_i - theta)| below this fraction of sum |w_i - theta| counts as zero.
inline constexpr double degenerate_weight_tolerance = 1e-12;

inline bool weights_degenerate(std::span<const double> w, double theta) {
  double s = 0.0, a = 0.0;
  for (double x : w) {
    s += x - theta;
    a += std::abs(x - theta);
  }
  return std::abs(s) <= degenerate_weight_tolerance * a;
}

inline ConfidenceInterval randomized_interval(const UnivariateSample& s, std::span<const double> w, double theta,
                                              const CenteredMoments& m, double alpha,
                                              DenominatorMode mode = DenominatorMode::expected) {
  detail::check_weights(s, w);
  const double z = two_sided_z(alpha);
  const double sd = sample_sd_n(s.data);
  if (weights_degenerate(w, theta)) return ConfidenceInterval::whole_line();
  const double scale = detail::weight_scale(w, theta, mode, m);
  double wsum = 0.0, wx = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    wsum += w[i] - theta;
    wx += (w[i] - theta) * s.data[i];
  }
  const double big_m = (-z * sd * scale - wx) / (-wsum);
  const double big_n = (z * sd * scale - wx) / (-wsum);
  return ConfidenceInterval::between(big_m, big_n);
}

inline double interval_length(const UnivariateSample& s, std::span<const double> w, double theta,
                              const CenteredMoments& m, double alpha,
                              DenominatorMode mode = DenominatorMode::expected) {
  detail::check_weights(s, w);
  if (weights_degenerate(w, theta)) fail(ErrorKind::degenerate_weights, "sum of (w_i - theta) is zero");
  double wsum = 0.0;
  for (double x : w) wsum += x - theta;
  const double sd = sample_sd_n(s.data);
  return 2.0 * two_sided_z(alpha) * sd / (std::abs(wsum) / detail::weight_scale(w, theta, mode, m));
}

inline ConfidenceInterval classical_t_interval(const UnivariateSample& s, double alpha) {
  const double sd = sample_sd_n(s.data);
  const double half = two_sided_z(alpha) * sd / std::sqrt(static_cast<double>(s.data.size()));
  const double xbar = sample_mean(s.data);
  return ConfidenceInterval::between(xbar - half, xbar + half);
}

// Closed form under the multinomial constraint sum w_i = n, so sum (w_i - theta*) = n (1 - theta*).
inline ConfidenceInterval multinomial_interval_closed_form(const UnivariateSample& s, std::span<const double> w,
                                                           double theta_star, const CenteredMoments& m,
                                                           double alpha) {
  const double nn = static_cast<double>(s.data.size());
  const double z = two_sided_z(alpha);
  const double sd = sample_sd_n(s.data);
  double wx = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) wx += (w[i] - theta_star) * s.data[i];
  const double half = z * sd * std::sqrt(nn * m.mu_k2);
  const double denom = (1.0 - theta_star) * nn;
  return ConfidenceInterval::between((wx - half) / denom, (wx + half) / denom);
}

inline ConfidenceInterval multinomial_interval(const UnivariateSample& s, std::span<const double> w,
                                               double theta_star, const CenteredMoments& m, double alpha) {
  detail::check_weights(s, w);
  if (theta_star == 1.0) fail(ErrorKind::invalid_argument, "theta* = 1 is the multinomial weight mean");
  double total = 0.0;
  for (double x : w) total += x;
  const double nn = static_cast<double>(w.size());
  if (std::abs(total - nn) > 1e-9 * nn) fail(ErrorKind::constraint_violated, "multinomial weights must sum to n");
  return randomized_interval(s, w, theta_star, m, alpha, DenominatorMode::expected);
}

// l = ceil(B alpha / 2), u = floor(B (1 - alpha / 2)), both 1-based
inline std::pair<std::size_t, std::size_t> bootstrap_order_indices(std::size_t b, double alpha) {
  const double bb = static_cast<double>(b);
  const auto l = static_cast<std::size_t>(std::ceil(bb * alpha / 2.0 - 1e-9));
  const auto u = static_cast<std::size_t>(std::floor(bb * (1.0 - alpha / 2.0) + 1e-9));
  return {std::max<std::size_t>(l, 1), std::min(u, b)};
}

// What to do with a resample whose standard deviation is zero.
//   propagate_infinite: t* = +-Inf by the sign of the mean shift (0 when unshifted),
//                       so a heavy share of such resamples yields infinite endpoints.
//   redraw: draw again; after 100 consecutive failures return the whole line.
enum class ResamplePolicy { propagate_infinite, redraw };

inline ConfidenceInterval bootstrap_t_interval(const UnivariateSample& s, std::size_t b, double alpha, Stream& rng,
                                               ResamplePolicy policy = ResamplePolicy::propagate_infinite) {
  if (b < 100) fail(ErrorKind::invalid_argument, "bootstrap needs B >= 100");
  const std::size_t n = s.data.size();
  double sd = 0.0;
  try {
    sd = sample_sd_n(s.data);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::zero_variance) throw;
    return ConfidenceInterval::whole_line();
  }
  const double xbar = sample_mean(s.data);
  const double rootn = std::sqrt(static_cast<double>(n));
  constexpr double inf = std::numeric_limits<double>::infinity();
  constexpr double eps = std::numeric_limits<double>::epsilon();

  std::vector<double> tstar(b), resample(n);
  for (std::size_t k = 0; k < b; ++k) {
    int failures = 0;
    for (;;) {
      for (auto& x : resample) x = s.data[rng.index(n)];
      const double m = sample_mean(resample);
      double ss = 0.0, scale = 0.0;
      for (double x : resample) {
        ss += (x - m) * (x - m);
        scale = std::max(scale, x * x);
      }
      if (ss > 16.0 * eps * eps * scale * static_cast<double>(n)) {
        tstar[k] = rootn * (m - xbar) / std::sqrt(ss / static_cast<double>(n));
        break;
      }
      if (policy == ResamplePolicy::propagate_infinite) {
        tstar[k] = m > xbar ? inf : (m < xbar ? -inf : 0.0);
        break;
      }
      if (++failures >= 100) return ConfidenceInterval::whole_line();
    }
  }
  std::sort(tstar.begin(), tstar.end());
  const auto [l, u] = bootstrap_order_indices(b, alpha);
  const double lo = xbar - tstar[u - 1] * sd / rootn;
  const double hi = xbar - tstar[l - 1] * sd / rootn;
  return ConfidenceInterval::between(lo, hi);
}

}  // namespace skewpivot
