#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "skewpivot/descriptor.hpp"
#include "skewpivot/error.hpp"
#include "skewpivot/rng.hpp"

namespace skewpivot {

enum class WeightKind { chi_square, bernoulli, normal, multinomial_symmetric, custom_moments };

struct WeightScheme {
  WeightKind kind = WeightKind::chi_square;
  // chi_square: a = degrees of freedom; bernoulli: a = p; normal: a = mean, b = variance
  double a = 1.0;
  double b = 0.0;
  std::array<double, 4> raw{};  // custom_moments: E w, E w^2, E w^3, E w^4

  static WeightScheme chi_square(int k) {
    if (k < 1) fail(ErrorKind::invalid_argument, "chi-square degrees of freedom must be positive");
    return {WeightKind::chi_square, static_cast<double>(k), 0.0, {}};
  }
  static WeightScheme bernoulli(double p) {
    if (!(p > 0.0 && p < 1.0)) fail(ErrorKind::invalid_argument, "Bernoulli p must lie in (0, 1)");
    return {WeightKind::bernoulli, p, 0.0, {}};
  }
  static WeightScheme normal(double mean, double variance) {
    if (!(variance > 0.0)) fail(ErrorKind::invalid_argument, "normal weight variance must be positive");
    return {WeightKind::normal, mean, variance, {}};
  }
  static WeightScheme multinomial_symmetric() { return {WeightKind::multinomial_symmetric, 0.0, 0.0, {}}; }
  static WeightScheme custom(double m1, double m2, double m3, double m4) {
    return {WeightKind::custom_moments, 0.0, 0.0, {m1, m2, m3, m4}};
  }

  bool triangular() const { return kind == WeightKind::multinomial_symmetric; }
  bool symmetric() const;
  std::string descriptor() const;
};

// Mean and central moments of a law.
struct LawMoments {
  double mean;
  double c2;
  double c3;
  double c4;
};

inline LawMoments custom_law_moments(double m1, double m2, double m3, double m4) {
  return {m1, m2 - m1 * m1, m3 - 3.0 * m1 * m2 + 2.0 * m1 * m1 * m1,
          m4 - 4.0 * m1 * m3 + 6.0 * m1 * m1 * m2 - 3.0 * m1 * m1 * m1 * m1};
}

// Binomial(n, 1/n), the marginal of a symmetric Multinomial(n; 1/n, ..., 1/n) vector.
inline LawMoments multinomial_marginal_moments(std::size_t n) {
  if (n < 2) fail(ErrorKind::invalid_argument, "symmetric multinomial weights need n >= 2");
  const double nn = static_cast<double>(n);
  const double p = 1.0 / nn;
  const double q = 1.0 - p;
  return {1.0, q, q * (q - p), q * (1.0 + 3.0 * (nn - 2.0) * q / nn)};
}

// n -> infinity limit of the above: Poisson(1).
inline constexpr LawMoments poisson_one_moments{1.0, 1.0, 1.0, 4.0};

inline LawMoments law_moments(const WeightScheme& s, std::optional<std::size_t> n = std::nullopt) {
  switch (s.kind) {
    case WeightKind::chi_square: {
      const double k = s.a;
      return {k, 2.0 * k, 8.0 * k, 12.0 * k * k + 48.0 * k};
    }
    case WeightKind::bernoulli: {
      const double p = s.a, q = 1.0 - p;
      return {p, p * q, p * q * (q - p), p * q * (1.0 - 3.0 * p * q)};
    }
    case WeightKind::normal:
      return {s.a, s.b, 0.0, 3.0 * s.b * s.b};
    case WeightKind::multinomial_symmetric:
      if (!n) fail(ErrorKind::missing_sample_size, "symmetric multinomial weights depend on n");
      return multinomial_marginal_moments(*n);
    case WeightKind::custom_moments: {
      const LawMoments m = custom_law_moments(s.raw[0], s.raw[1], s.raw[2], s.raw[3]);
      if (!(m.c2 > 0.0)) fail(ErrorKind::non_positive_variance, "custom weight moments give variance <= 0");
      if (m.c4 < m.c2 * m.c2) fail(ErrorKind::non_positive_variance, "custom fourth central moment below variance^2");
      return m;
    }
  }
  fail(ErrorKind::invalid_argument, "unknown weight kind");
}

inline double weight_mean(const WeightScheme& s, std::optional<std::size_t> n = std::nullopt) {
  return law_moments(s, n).mean;
}

inline bool WeightScheme::symmetric() const {
  switch (kind) {
    case WeightKind::normal: return true;
    case WeightKind::bernoulli: return a == 0.5;
    case WeightKind::custom_moments: return law_moments(*this).c3 == 0.0;
    default: return false;
  }
}

inline std::string WeightScheme::descriptor() const {
  switch (kind) {
    case WeightKind::chi_square: return "chisq(" + format_real(a) + ")";
    case WeightKind::bernoulli: return "bernoulli(" + format_real(a) + ")";
    case WeightKind::normal: return "normal(" + format_real(a) + "," + format_real(b) + ")";
    case WeightKind::multinomial_symmetric: return "multinomial-sym";
    case WeightKind::custom_moments:
      return "custom(" + format_real(raw[0]) + "," + format_real(raw[1]) + "," + format_real(raw[2]) + "," +
             format_real(raw[3]) + ")";
  }
  return "?";
}

inline WeightScheme parse_weight_scheme(std::string_view text) {
  const Descriptor d = parse_descriptor(text);
  auto want = [&](std::size_t count) {
    if (d.args.size() != count)
      fail(ErrorKind::config_error, "weight scheme '" + d.name + "' takes " + std::to_string(count) + " argument(s)");
  };
  try {
    if (d.name == "chisq" || d.name == "chi-square") {
      want(1);
      return WeightScheme::chi_square(static_cast<int>(parse_integer(d.args[0])));
    }
    if (d.name == "bernoulli") {
      want(1);
      return WeightScheme::bernoulli(parse_real(d.args[0]));
    }
    if (d.name == "normal") {
      want(2);
      return WeightScheme::normal(parse_real(d.args[0]), parse_real(d.args[1]));
    }
    if (d.name == "multinomial-sym" || d.name == "multinomial") {
      want(0);
      return WeightScheme::multinomial_symmetric();
    }
    if (d.name == "custom") {
      want(4);
      return WeightScheme::custom(parse_real(d.args[0]), parse_real(d.args[1]), parse_real(d.args[2]),
                                  parse_real(d.args[3]));
    }
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::config_error) throw;
    fail(ErrorKind::config_error, e.what());
  }
  fail(ErrorKind::config_error, "unknown weight scheme '" + d.name + "'");
}

// E_w (w - theta)^k for k = 2, 3, 4.
struct CenteredMoments {
  double mu_k2;
  double mu_k3;
  double mu_k4;
};

inline CenteredMoments shift_moments(const LawMoments& m, double theta) {
  const double d = m.mean - theta;
  const double d2 = d * d;
  return {m.c2 + d2, m.c3 + 3.0 * m.c2 * d + d2 * d, m.c4 + 4.0 * m.c3 * d + 6.0 * m.c2 * d2 + d2 * d2};
}

inline CenteredMoments centered_moments(const WeightScheme& s, double theta,
                                        std::optional<std::size_t> n = std::nullopt) {
  return shift_moments(law_moments(s, n), theta);
}

inline double srf_from_law(const LawMoments& m, double theta) {
  const CenteredMoments c = shift_moments(m, theta);
  return c.mu_k3 / std::pow(c.mu_k2, 1.5);
}

// d/dtheta of the SRF; uses d mu2/dtheta = -2 (mean - theta) and d mu3/dtheta = -3 mu2.
inline double srf_derivative_from_law(const LawMoments& m, double theta) {
  const CenteredMoments c = shift_moments(m, theta);
  const double d = m.mean - theta;
  return -3.0 / std::sqrt(c.mu_k2) + 3.0 * d * c.mu_k3 / std::pow(c.mu_k2, 2.5);
}

inline double srf(const WeightScheme& s, double theta, std::optional<std::size_t> n = std::nullopt) {
  const LawMoments m = law_moments(s, n);
  if (s.symmetric() && theta == m.mean) return 0.0;
  return srf_from_law(m, theta);
}

inline double srf_multinomial_finite(double theta, std::size_t n) {
  if (n < 2) fail(ErrorKind::invalid_argument, "finite multinomial SRF needs n >= 2");
  const double nn = static_cast<double>(n);
  const double q = nn * (nn - 1.0) / (nn * nn);
  const double num = -theta * theta * theta + 3.0 * theta * theta - 3.0 * theta * (q + 1.0) +
                     nn * (nn - 1.0) * (nn - 2.0) / (nn * nn * nn) + 3.0 * q + 1.0;
  return num / std::pow(theta * theta - 2.0 * theta + q + 1.0, 1.5);
}

inline double srf_multinomial_limit(double theta) {
  const double num = -theta * theta * theta + 3.0 * theta * theta - 6.0 * theta + 5.0;
  return num / std::pow(theta * theta - 2.0 * theta + 2.0, 1.5);
}

inline std::vector<double> sample_weights(const WeightScheme& s, std::size_t n, Stream& rng) {
  if (n < 1) fail(ErrorKind::invalid_argument, "need at least one weight");
  std::vector<double> w(n, 0.0);
  switch (s.kind) {
    case WeightKind::chi_square: {
      const int k = static_cast<int>(s.a);
      for (auto& x : w) {
        double acc = 0.0;
        for (int j = 0; j < k; ++j) {
          const double z = rng.normal();
          acc += z * z;
        }
        x = acc;
      }
      break;
    }
    case WeightKind::bernoulli:
      for (auto& x : w) x = rng.uniform() < s.a ? 1.0 : 0.0;
      break;
    case WeightKind::normal: {
      const double sd = std::sqrt(s.b);
      for (auto& x : w) x = s.a + sd * rng.normal();
      break;
    }
    case WeightKind::multinomial_symmetric:
      for (std::size_t i = 0; i < n; ++i) w[rng.index(n)] += 1.0;
      break;
    case WeightKind::custom_moments:
      fail(ErrorKind::invalid_argument, "moment-only weight schemes cannot be sampled");
  }
  return w;
}

// max_i (w_i - theta)^2 / n
inline double max_negligibility_stat(std::span<const double> w, double theta) {
  if (w.empty()) fail(ErrorKind::invalid_argument, "empty weight vector");
  double m = 0.0;
  for (double x : w) m = std::max(m, (x - theta) * (x - theta));
  return m / static_cast<double>(w.size());
}

}  // namespace skewpivot
