#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "skewpivot/error.hpp"
#include "skewpivot/intervals.hpp"
#include "skewpivot/normal.hpp"
#include "skewpivot/pivots.hpp"
#include "skewpivot/tensor.hpp"
#include "skewpivot/weights.hpp"

namespace skewpivot {

// rows of data are observations
struct MultivariateSample {
  Eigen::MatrixXd data;
  Eigen::VectorXd mu;
};

enum class Regularization { none, ridge, identity_fallback };

struct CovarianceOptions {
  Regularization fallback = Regularization::ridge;
  double condition_floor = 1e-10;  // regularize when lambda_min < floor * lambda_max
  double ridge_scale = 1e-8;       // ridge l_n = ridge_scale * trace / p
};

struct CovarianceOps {
  Eigen::MatrixXd S;
  Eigen::MatrixXd inv_sqrt;
  Eigen::MatrixXd sqrt;  // inverse of inv_sqrt
  Eigen::VectorXd mean;
  Regularization regularization = Regularization::none;
  double ridge = 0.0;
};

struct SymmetricRoots {
  Eigen::MatrixXd inv_sqrt;
  Eigen::MatrixXd sqrt;
  Regularization regularization = Regularization::none;
  double ridge = 0.0;
};

inline bool is_ill_conditioned(const Eigen::VectorXd& eig, double floor) {
  const double top = eig.maxCoeff();
  return !(top > 0.0) || eig.minCoeff() < floor * top;
}

inline SymmetricRoots symmetric_roots(const Eigen::MatrixXd& s, const CovarianceOptions& opt = {}) {
  const auto p = s.rows();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s);
  if (es.info() != Eigen::Success) fail(ErrorKind::singular_covariance, "eigendecomposition failed");
  Eigen::VectorXd lambda = es.eigenvalues();
  SymmetricRoots r;
  if (is_ill_conditioned(lambda, opt.condition_floor)) {
    const double trace = s.trace();
    if (opt.fallback == Regularization::identity_fallback || !(trace > 0.0)) {
      r.inv_sqrt = Eigen::MatrixXd::Identity(p, p);
      r.sqrt = Eigen::MatrixXd::Identity(p, p);
      r.regularization = Regularization::identity_fallback;
      return r;
    }
    r.ridge = opt.ridge_scale * trace / static_cast<double>(p);
    r.regularization = Regularization::ridge;
    lambda = lambda.cwiseMax(0.0).array() + r.ridge;
  }
  const Eigen::MatrixXd& v = es.eigenvectors();
  r.inv_sqrt = v * lambda.cwiseSqrt().cwiseInverse().asDiagonal() * v.transpose();
  r.sqrt = v * lambda.cwiseSqrt().asDiagonal() * v.transpose();
  return r;
}

inline CovarianceOps sample_covariance(const MultivariateSample& sample, const CovarianceOptions& opt = {}) {
  const auto n = sample.data.rows();
  if (n < 2) fail(ErrorKind::invalid_argument, "covariance needs at least two observations");
  CovarianceOps c;
  c.mean = sample.data.colwise().mean().transpose();
  const Eigen::MatrixXd centered = sample.data.rowwise() - c.mean.transpose();
  c.S = (centered.transpose() * centered) / static_cast<double>(n - 1);
  auto roots = symmetric_roots(c.S, opt);
  c.inv_sqrt = std::move(roots.inv_sqrt);
  c.sqrt = std::move(roots.sqrt);
  c.regularization = roots.regularization;
  c.ridge = roots.ridge;
  return c;
}

namespace detail {

inline void check_dims(const MultivariateSample& s) {
  if (s.mu.size() != s.data.cols()) fail(ErrorKind::dimension_mismatch, "mu length differs from data columns");
}

inline void check_row_weights(const MultivariateSample& s, std::span<const double> w) {
  if (static_cast<Eigen::Index>(w.size()) != s.data.rows())
    fail(ErrorKind::dimension_mismatch, "one weight per observation required");
}

}  // namespace detail

inline Eigen::VectorXd t_multivariate(const MultivariateSample& sample, const CovarianceOps& cov) {
  detail::check_dims(sample);
  const auto n = static_cast<double>(sample.data.rows());
  const Eigen::VectorXd sum = sample.data.colwise().sum().transpose() - n * sample.mu;
  return cov.inv_sqrt * sum / std::sqrt(n);
}

inline Eigen::VectorXd g_multivariate(const MultivariateSample& sample, std::span<const double> w, double theta,
                                      const CenteredMoments& m, const CovarianceOps& cov,
                                      DenominatorMode mode = DenominatorMode::expected) {
  detail::check_dims(sample);
  detail::check_row_weights(sample, w);
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(sample.data.cols());
  for (Eigen::Index i = 0; i < sample.data.rows(); ++i)
    sum += (w[i] - theta) * (sample.data.row(i).transpose() - sample.mu);
  return cov.inv_sqrt * sum / detail::weight_scale(w, theta, mode, m);
}

// z with (2 Phi(z) - 1)^p = 1 - alpha
inline double rectangle_cutoff(double alpha, int p) {
  if (!(alpha > 0.0 && alpha < 1.0)) fail(ErrorKind::invalid_argument, "alpha must lie in (0, 1)");
  if (p < 1) fail(ErrorKind::invalid_argument, "dimension must be positive");
  return normal_quantile(0.5 * (1.0 + std::pow(1.0 - alpha, 1.0 / p)));
}

struct ConfidenceRectangle {
  std::vector<ConfidenceInterval> sides;
  double area = 0.0;

  bool contains(const Eigen::VectorXd& mu) const {
    for (std::size_t k = 0; k < sides.size(); ++k)
      if (!sides[k].contains(mu[static_cast<Eigen::Index>(k)])) return false;
    return true;
  }
};

namespace detail {

// Bounding box of {mu : |A (center - mu)| <= radius componentwise}, with A^-1 = root.
inline ConfidenceRectangle box_around(const Eigen::VectorXd& center, const Eigen::MatrixXd& root, double radius) {
  ConfidenceRectangle r;
  r.area = 1.0;
  for (Eigen::Index k = 0; k < center.size(); ++k) {
    const double half = radius * root.row(k).cwiseAbs().sum();
    r.sides.push_back(ConfidenceInterval::between(center[k] - half, center[k] + half));
    r.area *= r.sides.back().length;
  }
  return r;
}

inline void check_standardizer(const CovarianceOps& cov) {
  const double det = cov.inv_sqrt.determinant();
  if (!(std::abs(det) > 0.0) || !std::isfinite(det)) fail(ErrorKind::singular_standardizer, "standardizer is singular");
}

}  // namespace detail

inline ConfidenceRectangle classical_rectangle(const MultivariateSample& sample, const CovarianceOps& cov,
                                               double alpha) {
  detail::check_dims(sample);
  detail::check_standardizer(cov);
  const auto n = static_cast<double>(sample.data.rows());
  const double z = rectangle_cutoff(alpha, static_cast<int>(sample.data.cols()));
  return detail::box_around(cov.mean, cov.sqrt, z / std::sqrt(n));
}

inline ConfidenceRectangle randomized_rectangle(const MultivariateSample& sample, std::span<const double> w,
                                                double theta, const CenteredMoments& m, const CovarianceOps& cov,
                                                double alpha, DenominatorMode mode = DenominatorMode::expected) {
  detail::check_dims(sample);
  detail::check_row_weights(sample, w);
  detail::check_standardizer(cov);
  if (weights_degenerate(w, theta)) fail(ErrorKind::degenerate_weights, "sum of (w_i - theta) is zero");
  double wsum = 0.0;
  Eigen::VectorXd wx = Eigen::VectorXd::Zero(sample.data.cols());
  for (Eigen::Index i = 0; i < sample.data.rows(); ++i) {
    wsum += w[i] - theta;
    wx += (w[i] - theta) * sample.data.row(i).transpose();
  }
  const double z = rectangle_cutoff(alpha, static_cast<int>(sample.data.cols()));
  const double radius = z * detail::weight_scale(w, theta, mode, m) / std::abs(wsum);
  return detail::box_around(wx / wsum, cov.sqrt, radius);
}

// Two-dimensional area in terms of S^{-1/2} = [[a, b], [b, c]]:
// (2z)^2 (|b| + c)(|b| + a) / (ac - b^2)^2 * scale^2, with scale = 1/sqrt(n) classically
// and sqrt(n E_w(w-theta)^2) / |sum (w_i - theta)| for the randomized rectangle.
inline double rectangle_area_2d(const Eigen::Matrix2d& inv_sqrt, double z, double scale) {
  const double a = inv_sqrt(0, 0), b = std::abs(inv_sqrt(0, 1)), c = inv_sqrt(1, 1);
  const double det = a * c - b * b;
  if (det == 0.0) fail(ErrorKind::singular_standardizer, "a c = b^2");
  return 4.0 * z * z * (b + c) * (b + a) / (det * det) * scale * scale;
}

// Standardized third moments of the rows, using the divisor-n covariance.
inline ThirdMomentTensor standardized_third_moments(const Eigen::MatrixXd& data) {
  const auto n = data.rows();
  const auto p = data.cols();
  if (n <= p) fail(ErrorKind::invalid_argument, "need more observations than dimensions");
  const Eigen::RowVectorXd mean = data.colwise().mean();
  const Eigen::MatrixXd centered = data.rowwise() - mean;
  const Eigen::MatrixXd s = (centered.transpose() * centered) / static_cast<double>(n);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s);
  const Eigen::VectorXd lambda = es.eigenvalues();
  if (es.info() != Eigen::Success || is_ill_conditioned(lambda, 1e-10))
    fail(ErrorKind::singular_covariance, "sample covariance is singular");
  const Eigen::MatrixXd a = es.eigenvectors() * lambda.cwiseSqrt().cwiseInverse().asDiagonal() *
                            es.eigenvectors().transpose();
  const Eigen::MatrixXd y = centered * a;

  ThirdMomentTensor t(static_cast<std::size_t>(p));
  for (Eigen::Index j = 0; j < p; ++j)
    for (Eigen::Index k = j; k < p; ++k)
      for (Eigen::Index l = k; l < p; ++l) {
        double acc = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) acc += y(i, j) * y(i, k) * y(i, l);
        t.set(j, k, l, acc / static_cast<double>(n));
      }
  return t;
}

// Transform central third moments C and covariance Sigma into standardized moments of Sigma^{-1/2}(X - mu).
inline ThirdMomentTensor standardize_tensor(const Eigen::MatrixXd& sigma, const ThirdMomentTensor& central) {
  const auto p = static_cast<Eigen::Index>(central.dimension());
  if (sigma.rows() != p || sigma.cols() != p) fail(ErrorKind::dimension_mismatch, "covariance and tensor differ");
  const Eigen::MatrixXd a = symmetric_roots(sigma).inv_sqrt;
  ThirdMomentTensor t(central.dimension());
  for (Eigen::Index j = 0; j < p; ++j)
    for (Eigen::Index k = j; k < p; ++k)
      for (Eigen::Index l = k; l < p; ++l) {
        double acc = 0.0;
        for (Eigen::Index x = 0; x < p; ++x)
          for (Eigen::Index y = 0; y < p; ++y)
            for (Eigen::Index z = 0; z < p; ++z) acc += a(j, x) * a(k, y) * a(l, z) * central(x, y, z);
        t.set(j, k, l, acc);
      }
  return t;
}

// v_statistic: (1/n^2) sum_i sum_j (y_i' y_j)^3, the usual b_{1,p}.
// u_statistic: the same average over i != j only; drops the diagonal terms that bias
//              the V-statistic upward for heavy-tailed rows.
enum class MardiaEstimator { v_statistic, u_statistic };

inline double mardia_skewness(const Eigen::MatrixXd& data, MardiaEstimator est = MardiaEstimator::v_statistic) {
  const double v = standardized_third_moments(data).sum_of_squares();
  if (est == MardiaEstimator::v_statistic) return v;

  const auto n = data.rows();
  const Eigen::RowVectorXd mean = data.colwise().mean();
  const Eigen::MatrixXd centered = data.rowwise() - mean;
  const Eigen::MatrixXd s = (centered.transpose() * centered) / static_cast<double>(n);
  const Eigen::MatrixXd s_inv = s.inverse();
  double diag = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double r2 = centered.row(i) * s_inv * centered.row(i).transpose();
    diag += r2 * r2 * r2;
  }
  const double nn = static_cast<double>(n);
  return (nn * nn * v - diag) / (nn * (nn - 1.0));
}

inline double mardia_theoretical_scaling(double srf, double beta) { return srf * srf * beta; }

// m3 / m2^{3/2} with divisor-n central moments
inline double empirical_skewness(std::span<const double> x) {
  if (x.size() < 3) fail(ErrorKind::invalid_argument, "skewness needs at least three values");
  const double m = sample_mean(x);
  double m2 = 0.0, m3 = 0.0, scale = 0.0;
  for (double v : x) {
    const double d = v - m;
    m2 += d * d;
    m3 += d * d * d;
    scale = std::max(scale, v * v);
  }
  const double nn = static_cast<double>(x.size());
  m2 /= nn;
  m3 /= nn;
  constexpr double eps = std::numeric_limits<double>::epsilon();
  if (!(m2 > 16.0 * eps * eps * scale)) fail(ErrorKind::zero_variance, "all values are equal");
  return m3 / std::pow(m2, 1.5);
}

}  // namespace skewpivot
