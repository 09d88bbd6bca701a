#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "skewpivot/descriptor.hpp"
#include "skewpivot/error.hpp"
#include "skewpivot/multivariate.hpp"
#include "skewpivot/rng.hpp"
#include "skewpivot/tensor.hpp"

namespace skewpivot {

enum class LawKind {
  binomial_10_01,
  poisson_1,
  lognormal_0_1,
  exponential_1,
  chi_square_1,
  beta_5_1,
  normal_0_1,
  xx2,       // (X, X^2)
  ma1_pair,  // (zeta_1 + 0.2 zeta_0, zeta_2 + 0.2 zeta_1)
};

// Base of (X, X^2) or innovation of the moving-average pair.
// For ma1_pair, `exponential` means the centered Exponential(1) - 1.
enum class BaseLaw { normal, exponential };

struct DataLaw {
  LawKind kind = LawKind::exponential_1;
  BaseLaw base = BaseLaw::normal;

  static DataLaw binomial() { return {LawKind::binomial_10_01}; }
  static DataLaw poisson() { return {LawKind::poisson_1}; }
  static DataLaw lognormal() { return {LawKind::lognormal_0_1}; }
  static DataLaw exponential() { return {LawKind::exponential_1}; }
  static DataLaw chi_square() { return {LawKind::chi_square_1}; }
  static DataLaw beta() { return {LawKind::beta_5_1}; }
  static DataLaw normal() { return {LawKind::normal_0_1}; }
  static DataLaw xx2(BaseLaw b) { return {LawKind::xx2, b}; }
  static DataLaw ma1_pair(BaseLaw b) { return {LawKind::ma1_pair, b}; }

  int dimension() const { return kind == LawKind::xx2 || kind == LawKind::ma1_pair ? 2 : 1; }
  std::string descriptor() const;
  std::string label() const;
};

inline std::string DataLaw::descriptor() const {
  switch (kind) {
    case LawKind::binomial_10_01: return "binomial(10,0.1)";
    case LawKind::poisson_1: return "poisson(1)";
    case LawKind::lognormal_0_1: return "lognormal(0,1)";
    case LawKind::exponential_1: return "exponential(1)";
    case LawKind::chi_square_1: return "chisq(1)";
    case LawKind::beta_5_1: return "beta(5,1)";
    case LawKind::normal_0_1: return "normal(0,1)";
    case LawKind::xx2: return base == BaseLaw::normal ? "xx2(normal)" : "xx2(exponential)";
    case LawKind::ma1_pair: return base == BaseLaw::normal ? "ma1pair(normal)" : "ma1pair(exp-centered)";
  }
  return "?";
}

inline std::string DataLaw::label() const {
  switch (kind) {
    case LawKind::binomial_10_01: return "Binomial(10,0.1)";
    case LawKind::poisson_1: return "Poisson(1)";
    case LawKind::lognormal_0_1: return "Lognormal(0,1)";
    case LawKind::exponential_1: return "Exponential(1)";
    case LawKind::chi_square_1: return "ChiSquare(1)";
    case LawKind::beta_5_1: return "Beta(5,1)";
    case LawKind::normal_0_1: return "Normal(0,1)";
    case LawKind::xx2: return base == BaseLaw::normal ? "(X,X^2) X~Normal(0,1)" : "(X,X^2) X~Exponential(1)";
    case LawKind::ma1_pair:
      return base == BaseLaw::normal ? "MA1 pair, Normal(0,1) noise" : "MA1 pair, centered Exponential(1) noise";
  }
  return "?";
}

inline DataLaw parse_data_law(std::string_view text) {
  const Descriptor d = parse_descriptor(text);
  auto args_are = [&](const std::vector<double>& expect) {
    if (d.args.empty()) return true;
    if (d.args.size() != expect.size()) return false;
    std::size_t i = 0;
    for (double e : expect)
      if (std::abs(parse_real(d.args[i++]) - e) > 1e-12) return false;
    return true;
  };
  auto base_of = [&](bool centered_exp) {
    if (d.args.size() != 1) fail(ErrorKind::config_error, "'" + d.name + "' takes one base law");
    const std::string& b = d.args[0];
    if (b == "normal" || b == "normal(0,1)") return BaseLaw::normal;
    if (centered_exp ? (b == "exp-centered" || b == "exponential-centered")
                     : (b == "exponential" || b == "exp" || b == "exponential(1)"))
      return BaseLaw::exponential;
    fail(ErrorKind::config_error, "unsupported base law '" + b + "'");
  };
  struct Fixed {
    const char* name;
    LawKind kind;
    std::vector<double> args;
  };
  static const Fixed fixed[] = {
      {"binomial", LawKind::binomial_10_01, {10, 0.1}}, {"poisson", LawKind::poisson_1, {1}},
      {"lognormal", LawKind::lognormal_0_1, {0, 1}},    {"exponential", LawKind::exponential_1, {1}},
      {"chisq", LawKind::chi_square_1, {1}},            {"beta", LawKind::beta_5_1, {5, 1}},
      {"normal", LawKind::normal_0_1, {0, 1}},
  };
  for (const auto& f : fixed) {
    if (d.name != f.name) continue;
    if (!args_are(f.args)) fail(ErrorKind::config_error, "only " + DataLaw{f.kind}.descriptor() + " is supported");
    return {f.kind};
  }
  if (d.name == "xx2") return DataLaw::xx2(base_of(false));
  if (d.name == "ma1pair" || d.name == "ma1") return DataLaw::ma1_pair(base_of(true));
  fail(ErrorKind::config_error, "unknown data law '" + std::string(text) + "'");
}

inline std::vector<double> true_mean(const DataLaw& law) {
  switch (law.kind) {
    case LawKind::binomial_10_01:
    case LawKind::poisson_1:
    case LawKind::exponential_1:
    case LawKind::chi_square_1: return {1.0};
    case LawKind::lognormal_0_1: return {std::exp(0.5)};
    case LawKind::beta_5_1: return {5.0 / 6.0};
    case LawKind::normal_0_1: return {0.0};
    case LawKind::xx2: return law.base == BaseLaw::normal ? std::vector{0.0, 1.0} : std::vector{1.0, 2.0};
    case LawKind::ma1_pair: return {0.0, 0.0};
  }
  return {};
}

namespace detail {

inline double binomial_10_01(Stream& rng) {
  constexpr int n = 10;
  constexpr double p = 0.1;
  const double u = rng.uniform();
  double pmf = std::pow(1.0 - p, n), cdf = pmf;
  int k = 0;
  while (u > cdf && k < n) {
    pmf *= (n - k) / (k + 1.0) * p / (1.0 - p);
    ++k;
    cdf += pmf;
  }
  return k;
}

inline double poisson_1(Stream& rng) {
  const double u = rng.uniform();
  double pmf = std::exp(-1.0), cdf = pmf;
  int k = 0;
  while (u > cdf && k < 100) {
    ++k;
    pmf /= k;
    cdf += pmf;
  }
  return k;
}

inline double draw_base(BaseLaw b, bool centered, Stream& rng) {
  if (b == BaseLaw::normal) return rng.normal();
  return centered ? rng.exponential() - 1.0 : rng.exponential();
}

}  // namespace detail

inline double draw_univariate(const DataLaw& law, Stream& rng) {
  switch (law.kind) {
    case LawKind::binomial_10_01: return detail::binomial_10_01(rng);
    case LawKind::poisson_1: return detail::poisson_1(rng);
    case LawKind::lognormal_0_1: return std::exp(rng.normal());
    case LawKind::exponential_1: return rng.exponential();
    case LawKind::chi_square_1: {
      const double z = rng.normal();
      return z * z;
    }
    case LawKind::beta_5_1: return std::pow(rng.uniform(), 0.2);
    case LawKind::normal_0_1: return rng.normal();
    default: fail(ErrorKind::dimension_mismatch, "bivariate law drawn as univariate");
  }
}

inline std::vector<double> sample_values(const DataLaw& law, std::size_t n, Stream& rng) {
  if (law.dimension() != 1) fail(ErrorKind::dimension_mismatch, law.descriptor() + " is bivariate");
  std::vector<double> x(n);
  for (auto& v : x) v = draw_univariate(law, rng);
  return x;
}

// n x dimension, rows i.i.d.
inline Eigen::MatrixXd sample(const DataLaw& law, std::size_t n, Stream& rng) {
  if (n < 1) fail(ErrorKind::invalid_argument, "need at least one row");
  const auto rows = static_cast<Eigen::Index>(n);
  Eigen::MatrixXd out(rows, law.dimension());
  for (Eigen::Index i = 0; i < rows; ++i) {
    switch (law.kind) {
      case LawKind::xx2: {
        const double x = detail::draw_base(law.base, false, rng);
        out(i, 0) = x;
        out(i, 1) = x * x;
        break;
      }
      case LawKind::ma1_pair: {
        const double z0 = detail::draw_base(law.base, true, rng);
        const double z1 = detail::draw_base(law.base, true, rng);
        const double z2 = detail::draw_base(law.base, true, rng);
        out(i, 0) = z1 + 0.2 * z0;
        out(i, 1) = z2 + 0.2 * z1;
        break;
      }
      default: out(i, 0) = draw_univariate(law, rng);
    }
  }
  return out;
}

struct SkewKurt {
  double gamma;
  double kappa;
};

inline double data_variance(const DataLaw& law) {
  const double e = std::numbers::e;
  switch (law.kind) {
    case LawKind::binomial_10_01: return 0.9;
    case LawKind::poisson_1:
    case LawKind::exponential_1:
    case LawKind::normal_0_1: return 1.0;
    case LawKind::lognormal_0_1: return (e - 1.0) * e;
    case LawKind::chi_square_1: return 2.0;
    case LawKind::beta_5_1: return 5.0 / (36.0 * 7.0);
    default: fail(ErrorKind::no_closed_form, "variance of a bivariate law is a matrix");
  }
}

inline SkewKurt data_skewness_kurtosis(const DataLaw& law) {
  const double e = std::numbers::e;
  switch (law.kind) {
    case LawKind::binomial_10_01: {
      const double npq = 10.0 * 0.1 * 0.9;
      return {(1.0 - 2.0 * 0.1) / std::sqrt(npq), 3.0 + (1.0 - 6.0 * 0.1 * 0.9) / npq};
    }
    case LawKind::poisson_1: return {1.0, 4.0};
    case LawKind::lognormal_0_1: return {(e + 2.0) * std::sqrt(e - 1.0), e * e * e * e + 2.0 * e * e * e + 3.0 * e * e - 3.0};
    case LawKind::exponential_1: return {2.0, 9.0};
    case LawKind::chi_square_1: return {std::sqrt(8.0), 15.0};
    case LawKind::beta_5_1: return {-2.0 * 4.0 * std::sqrt(7.0) / (8.0 * std::sqrt(5.0)), 4.2};
    case LawKind::normal_0_1: return {0.0, 3.0};
    default: fail(ErrorKind::no_closed_form, "skewness/kurtosis of " + law.descriptor() + " is not a scalar pair");
  }
}

namespace detail {

// E X^k for the base law (uncentered exponential for (X, X^2))
inline double base_raw_moment(BaseLaw b, int k) {
  double m = 1.0;
  if (b == BaseLaw::exponential) {
    for (int i = 2; i <= k; ++i) m *= i;
    return m;
  }
  if (k % 2) return 0.0;
  for (int i = k - 1; i > 1; i -= 2) m *= i;
  return m;
}

// E (X - m1)^a (X^2 - m2)^b by binomial expansion
inline double xx2_central(BaseLaw base, int a, int b) {
  const double m1 = base_raw_moment(base, 1), m2 = base_raw_moment(base, 2);
  auto choose = [](int n, int k) {
    double c = 1.0;
    for (int i = 1; i <= k; ++i) c = c * (n - k + i) / i;
    return c;
  };
  double acc = 0.0;
  for (int i = 0; i <= a; ++i)
    for (int j = 0; j <= b; ++j)
      acc += choose(a, i) * std::pow(-m1, a - i) * choose(b, j) * std::pow(-m2, b - j) *
             base_raw_moment(base, i + 2 * j);
  return acc;
}

}  // namespace detail

// Population covariance and central third moments of a bivariate law.
inline std::pair<Eigen::MatrixXd, ThirdMomentTensor> population_moments(const DataLaw& law) {
  if (law.dimension() != 2) fail(ErrorKind::no_closed_form, "population tensor is defined for bivariate laws");
  Eigen::MatrixXd sigma(2, 2);
  ThirdMomentTensor c(2);
  if (law.kind == LawKind::xx2) {
    sigma << detail::xx2_central(law.base, 2, 0), detail::xx2_central(law.base, 1, 1),
        detail::xx2_central(law.base, 1, 1), detail::xx2_central(law.base, 0, 2);
    c.set(0, 0, 0, detail::xx2_central(law.base, 3, 0));
    c.set(0, 0, 1, detail::xx2_central(law.base, 2, 1));
    c.set(0, 1, 1, detail::xx2_central(law.base, 1, 2));
    c.set(1, 1, 1, detail::xx2_central(law.base, 0, 3));
  } else {
    // unit-variance innovations with third cumulant k3; coordinates share zeta_1
    const double k3 = law.base == BaseLaw::normal ? 0.0 : 2.0;
    constexpr double b = 0.2;
    sigma << 1.0 + b * b, b, b, 1.0 + b * b;
    c.set(0, 0, 0, k3 * (1.0 + b * b * b));
    c.set(0, 0, 1, k3 * b);
    c.set(0, 1, 1, k3 * b * b);
    c.set(1, 1, 1, k3 * (1.0 + b * b * b));
  }
  return {sigma, c};
}

inline ThirdMomentTensor population_standardized_tensor(const DataLaw& law) {
  const auto [sigma, c] = population_moments(law);
  return standardize_tensor(sigma, c);
}

inline double population_mardia(const DataLaw& law) { return population_standardized_tensor(law).sum_of_squares(); }

// Skewness and kurtosis of one coordinate of a bivariate law.
inline SkewKurt marginal_skewness_kurtosis(const DataLaw& law, int coordinate) {
  if (law.dimension() == 1) return data_skewness_kurtosis(law);
  if (coordinate < 0 || coordinate > 1) fail(ErrorKind::dimension_mismatch, "coordinate must be 0 or 1");
  if (law.kind == LawKind::xx2) {
    const int a = coordinate == 0 ? 1 : 0, b = 1 - a;
    const double v = detail::xx2_central(law.base, 2 * a, 2 * b);
    return {detail::xx2_central(law.base, 3 * a, 3 * b) / std::pow(v, 1.5),
            detail::xx2_central(law.base, 4 * a, 4 * b) / (v * v)};
  }
  // zeta_1 + 0.2 zeta_0: cumulants add with weights 1 and 0.2^r
  const double k3 = law.base == BaseLaw::normal ? 0.0 : 2.0;
  const double k4 = law.base == BaseLaw::normal ? 0.0 : 6.0;
  const double v = 1.04;
  return {k3 * 1.008 / std::pow(v, 1.5), 3.0 + k4 * 1.0016 / (v * v)};
}

}  // namespace skewpivot
