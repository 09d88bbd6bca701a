#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "skewpivot/error.hpp"
#include "skewpivot/normal.hpp"
#include "skewpivot/tensor.hpp"

namespace skewpivot {

struct ExpansionInputs {
  double gamma = 0.0;                  // E(X-mu)^3 / sigma^3
  double kappa = 3.0;                  // E(X-mu)^4 / sigma^4
  double srf = 1.0;                    // 1 for the classical statistic
  double weight_kurtosis_ratio = 1.0;  // E_w(w-theta)^4 / (E_w(w-theta)^2)^2, 1 classically
  double n = 1.0;

  void validate() const {
    if (!(n >= 1.0)) fail(ErrorKind::invalid_argument, "n must be at least 1");
    if (kappa < 1.0 + gamma * gamma - 1e-12) fail(ErrorKind::invalid_argument, "kappa must be >= 1 + gamma^2");
    if (weight_kurtosis_ratio < 1.0 - 1e-12) fail(ErrorKind::invalid_argument, "weight kurtosis ratio must be >= 1");
  }
};

inline double hermite(double t, int order) {
  switch (order) {
    case 1: return t * t - 1.0;
    case 2: return t * t * t - 3.0 * t;
    case 3: {
      const double t2 = t * t;
      return t * (t2 * t2 - 10.0 * t2 + 15.0);
    }
    default: fail(ErrorKind::invalid_argument, "hermite order must be 1, 2 or 3");
  }
}

inline double one_term_cdf(double t, const ExpansionInputs& in) {
  in.validate();
  return normal_cdf(t) - normal_pdf(t) * hermite(t, 1) / (6.0 * std::sqrt(in.n)) * in.srf * in.gamma;
}

inline double two_term_cdf(double t, const ExpansionInputs& in) {
  in.validate();
  const double correction = hermite(t, 1) / (6.0 * std::sqrt(in.n)) * in.srf * in.gamma +
                            hermite(t, 2) / (24.0 * in.n) * (in.weight_kurtosis_ratio * in.kappa - 3.0) +
                            hermite(t, 3) / (72.0 * in.n) * in.srf * in.srf * in.gamma * in.gamma;
  return normal_cdf(t) - normal_pdf(t) * correction;
}

// I_k(t) = integral over (-inf, t] of u^k phi(u) du
struct PartialMoments {
  double i0, i1, i2, i3;
};

inline PartialMoments gaussian_partial_moments(double t) {
  if (std::isinf(t)) return t > 0 ? PartialMoments{1.0, 0.0, 1.0, 0.0} : PartialMoments{0.0, 0.0, 0.0, 0.0};
  const double phi = normal_pdf(t), cdf = normal_cdf(t);
  return {cdf, -phi, cdf - t * phi, -(t * t + 2.0) * phi};
}

// One-term expansion of P(Y_n <= t) for a standardized p-variate sum, with the
// Hermite-form density correction (1/6) sum_{jkl} E(Y_j Y_k Y_l) h_{jkl}(t), integrated
// coordinate by coordinate. The whole 1/sqrt(n) term is scaled by srf.
inline double multivariate_one_term_cdf(std::span<const double> t, const ThirdMomentTensor& tensor, double srf,
                                        double n) {
  const std::size_t p = tensor.dimension();
  if (t.size() != p) fail(ErrorKind::dimension_mismatch, "point and tensor dimensions differ");
  if (!(n >= 1.0)) fail(ErrorKind::invalid_argument, "n must be at least 1");
  std::vector<PartialMoments> pm(p);
  for (std::size_t s = 0; s < p; ++s) pm[s] = gaussian_partial_moments(t[s]);

  // product of I0 over coordinates outside {a, b, c}
  auto rest = [&](std::size_t a, std::size_t b, std::size_t c) {
    double r = 1.0;
    for (std::size_t s = 0; s < p; ++s)
      if (s != a && s != b && s != c) r *= pm[s].i0;
    return r;
  };

  double base = 1.0;
  for (const auto& m : pm) base *= m.i0;

  double corr = 0.0;
  for (std::size_t j = 0; j < p; ++j) {
    // t^3 - 3t
    corr += tensor(j, j, j) / 6.0 * (pm[j].i3 - 3.0 * pm[j].i1) * rest(j, j, j);
    for (std::size_t k = 0; k < p; ++k) {
      if (k == j) continue;
      // t_j^2 t_k - t_k, three index placements
      corr += tensor(j, j, k) / 2.0 * (pm[j].i2 - pm[j].i0) * pm[k].i1 * rest(j, k, k);
      for (std::size_t l = 0; l < p; ++l) {
        if (l == j || l == k) continue;
        corr += tensor(j, k, l) / 6.0 * pm[j].i1 * pm[k].i1 * pm[l].i1 * rest(j, k, l);
      }
    }
  }
  return base + srf / std::sqrt(n) * corr;
}

}  // namespace skewpivot
