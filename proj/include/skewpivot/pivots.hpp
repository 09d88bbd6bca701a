#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <span>

#include "skewpivot/error.hpp"
#include "skewpivot/weights.hpp"

namespace skewpivot {

// Non-owning view; the caller keeps the data alive.
struct UnivariateSample {
  std::span<const double> data;
  double mu = 0.0;
};

enum class DenominatorMode { expected, empirical };

struct PivotValue {
  double value;
  DenominatorMode denominator_mode;
};

inline double sample_mean(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v;
  return s / static_cast<double>(x.size());
}

// S_n with divisor n; throws ZeroVariance for (numerically) constant data.
inline double sample_sd_n(std::span<const double> x) {
  if (x.size() < 2) fail(ErrorKind::invalid_argument, "need at least two observations");
  const double m = sample_mean(x);
  double ss = 0.0, scale = 0.0;
  for (double v : x) {
    ss += (v - m) * (v - m);
    scale = std::max(scale, v * v);
  }
  const double var = ss / static_cast<double>(x.size());
  constexpr double eps = std::numeric_limits<double>::epsilon();
  if (!(var > 16.0 * eps * eps * scale)) fail(ErrorKind::zero_variance, "all observations are equal");
  return std::sqrt(var);
}

inline double t_statistic(const UnivariateSample& s) {
  const double sd = sample_sd_n(s.data);
  double acc = 0.0;
  for (double v : s.data) acc += v - s.mu;
  return acc / (sd * std::sqrt(static_cast<double>(s.data.size())));
}

namespace detail {

inline void check_weights(const UnivariateSample& s, std::span<const double> w) {
  if (w.size() != s.data.size()) fail(ErrorKind::dimension_mismatch, "weights and data differ in length");
}

inline double weighted_centered_sum(const UnivariateSample& s, std::span<const double> w, double theta) {
  double acc = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) acc += (w[i] - theta) * (s.data[i] - s.mu);
  return acc;
}

// sqrt(n E_w(w-theta)^2) or sqrt(sum (w_j-theta)^2)
inline double weight_scale(std::span<const double> w, double theta, DenominatorMode mode,
                           const CenteredMoments& m) {
  if (mode == DenominatorMode::expected) {
    if (!(m.mu_k2 > 0.0)) fail(ErrorKind::non_positive_variance, "E_w(w-theta)^2 must be positive");
    return std::sqrt(static_cast<double>(w.size()) * m.mu_k2);
  }
  double ss = 0.0;
  for (double x : w) ss += (x - theta) * (x - theta);
  if (!(ss > 0.0)) fail(ErrorKind::degenerate_weights, "sum of (w_j - theta)^2 is zero");
  return std::sqrt(ss);
}

}  // namespace detail

inline PivotValue g_statistic(const UnivariateSample& s, std::span<const double> w, double theta,
                              DenominatorMode mode, const CenteredMoments& m) {
  detail::check_weights(s, w);
  const double sd = sample_sd_n(s.data);
  const double scale = detail::weight_scale(w, theta, mode, m);
  return {detail::weighted_centered_sum(s, w, theta) / (sd * scale), mode};
}

inline double z_statistic(const UnivariateSample& s, double sigma) {
  if (!(sigma > 0.0)) fail(ErrorKind::invalid_argument, "sigma must be positive");
  double acc = 0.0;
  for (double v : s.data) acc += v - s.mu;
  return acc / (sigma * std::sqrt(static_cast<double>(s.data.size())));
}

inline double z_w_statistic(const UnivariateSample& s, std::span<const double> w, double theta, double sigma,
                            const CenteredMoments& m) {
  if (!(sigma > 0.0)) fail(ErrorKind::invalid_argument, "sigma must be positive");
  detail::check_weights(s, w);
  const double scale = detail::weight_scale(w, theta, DenominatorMode::expected, m);
  return detail::weighted_centered_sum(s, w, theta) / (sigma * scale);
}

}  // namespace skewpivot
