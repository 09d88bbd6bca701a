#include <catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "skewpivot/datagen.hpp"
#include "skewpivot/multivariate.hpp"

using namespace skewpivot;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

auto kind_is(ErrorKind k) {
  return Catch::Matchers::Predicate<const Error&>([k](const Error& e) { return e.kind() == k; });
}

Eigen::MatrixXd draw(const DataLaw& law, std::size_t n, std::uint64_t seed) {
  Stream rng(seed, 0);
  return sample(law, n, rng);
}

// (1/n^2) sum_i sum_j (y_i' S^-1 y_j)^3 with divisor-n S, straight from the definition
double mardia_double_sum(const Eigen::MatrixXd& x, bool drop_diagonal) {
  const auto n = x.rows();
  const Eigen::RowVectorXd mean = x.colwise().mean();
  const Eigen::MatrixXd c = x.rowwise() - mean;
  const Eigen::MatrixXd s_inv = ((c.transpose() * c) / static_cast<double>(n)).inverse();
  double acc = 0.0;
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      if (drop_diagonal && i == j) continue;
      const double g = c.row(i) * s_inv * c.row(j).transpose();
      acc += g * g * g;
    }
  const double nn = static_cast<double>(n);
  return drop_diagonal ? acc / (nn * (nn - 1.0)) : acc / (nn * nn);
}

}  // namespace

TEST_CASE("covariance roots", "[multivariate]") {
  const Eigen::MatrixXd x = draw(DataLaw::xx2(BaseLaw::exponential), 200, 3);
  const auto cov = sample_covariance({x, Eigen::Vector2d(1.0, 2.0)});
  const Eigen::RowVectorXd mean = x.colwise().mean();
  const Eigen::MatrixXd c = x.rowwise() - mean;
  CHECK((cov.S - c.transpose() * c / 199.0).norm() < 1e-10);
  CHECK((cov.inv_sqrt * cov.S * cov.inv_sqrt - Eigen::Matrix2d::Identity()).norm() < 1e-10);
  CHECK((cov.sqrt * cov.inv_sqrt - Eigen::Matrix2d::Identity()).norm() < 1e-10);
  CHECK((cov.inv_sqrt - cov.inv_sqrt.transpose()).norm() < 1e-12);
  CHECK(cov.regularization == Regularization::none);
}

TEST_CASE("ill-conditioned covariance is regularized", "[multivariate]") {
  Eigen::MatrixXd x(5, 2);
  x << 1, 2, 2, 4, 3, 6, 4, 8, 5, 10;  // rank one
  const auto ridge = sample_covariance({x, Eigen::Vector2d::Zero()});
  CHECK(ridge.regularization == Regularization::ridge);
  CHECK_THAT(ridge.ridge, WithinRel(1e-8 * ridge.S.trace() / 2.0, 1e-12));
  CHECK(ridge.inv_sqrt.allFinite());

  CovarianceOptions opt;
  opt.fallback = Regularization::identity_fallback;
  const auto ident = sample_covariance({x, Eigen::Vector2d::Zero()}, opt);
  CHECK(ident.regularization == Regularization::identity_fallback);
  CHECK(ident.inv_sqrt.isIdentity());

  const Eigen::MatrixXd flat = Eigen::MatrixXd::Constant(4, 2, 3.0);
  CHECK(sample_covariance({flat, Eigen::Vector2d::Zero()}).regularization == Regularization::identity_fallback);
}

TEST_CASE("rectangle cutoff", "[multivariate]") {
  CHECK_THAT(rectangle_cutoff(0.05, 2), WithinAbs(2.2365, 5e-4));
  CHECK_THAT(rectangle_cutoff(0.05, 1), WithinAbs(1.959963984540054, 1e-12));
  for (int p : {1, 2, 3, 5})
    for (double a : {0.01, 0.05, 0.1})
      CHECK_THAT(std::pow(2.0 * normal_cdf(rectangle_cutoff(a, p)) - 1.0, p), WithinAbs(1.0 - a, 1e-12));
}

TEST_CASE("rectangle areas agree with the closed form", "[multivariate]") {
  const DataLaw law = DataLaw::xx2(BaseLaw::normal);
  const WeightScheme ws = WeightScheme::chi_square(7);
  const CenteredMoments m = centered_moments(ws, 9.3);
  const double z = rectangle_cutoff(0.05, 2);
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const Eigen::MatrixXd x = draw(law, 40, seed);
    const MultivariateSample s{x, Eigen::Vector2d(0.0, 1.0)};
    const auto cov = sample_covariance(s);
    const Eigen::Matrix2d a = cov.inv_sqrt;
    const auto classical = classical_rectangle(s, cov, 0.05);
    CHECK_THAT(classical.area, WithinRel(rectangle_area_2d(a, z, 1.0 / std::sqrt(40.0)), 1e-9));

    Stream r(seed, 1);
    const auto w = sample_weights(ws, 40, r);
    double wsum = 0.0;
    for (double v : w) wsum += v - 9.3;
    const auto rnd = randomized_rectangle(s, w, 9.3, m, cov, 0.05);
    CHECK_THAT(rnd.area, WithinRel(rectangle_area_2d(a, z, std::sqrt(40.0 * m.mu_k2) / std::abs(wsum)), 1e-9));
  }
}

TEST_CASE("randomized rectangle encloses the pivot region", "[multivariate][property]") {
  const WeightScheme ws = WeightScheme::bernoulli(1.0 / 3.0);
  const CenteredMoments m = centered_moments(ws, 0.58);
  const double z = rectangle_cutoff(0.05, 2);
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const Eigen::MatrixXd x = draw(DataLaw::ma1_pair(BaseLaw::exponential), 30, seed);
    Stream r(seed, 1);
    const auto w = sample_weights(ws, 30, r);
    const auto cov = sample_covariance({x, Eigen::Vector2d::Zero()});
    const auto rect = randomized_rectangle({x, Eigen::Vector2d::Zero()}, w, 0.58, m, cov, 0.05);
    Stream probe(seed, 2);
    for (int k = 0; k < 200; ++k) {
      Eigen::Vector2d mu;
      mu << rect.sides[0].lo + probe.uniform() * rect.sides[0].length * 1.4 - 0.2 * rect.sides[0].length,
          rect.sides[1].lo + probe.uniform() * rect.sides[1].length * 1.4 - 0.2 * rect.sides[1].length;
      const Eigen::VectorXd g = g_multivariate({x, mu}, w, 0.58, m, cov);
      if (g.cwiseAbs().maxCoeff() <= z) CHECK(rect.contains(mu));
    }
  }
}

TEST_CASE("diagonal standardizer makes box and cube coincide", "[multivariate]") {
  const Eigen::MatrixXd x = draw(DataLaw::xx2(BaseLaw::normal), 30, 9);
  CovarianceOps cov;
  cov.mean = x.colwise().mean().transpose();
  cov.S = Eigen::Vector2d(1.0, 2.0).asDiagonal();
  cov.inv_sqrt = Eigen::Vector2d(1.0, 1.0 / std::sqrt(2.0)).asDiagonal();
  cov.sqrt = Eigen::Vector2d(1.0, std::sqrt(2.0)).asDiagonal();
  const auto rect = classical_rectangle({x, Eigen::Vector2d::Zero()}, cov, 0.05);
  const double z = rectangle_cutoff(0.05, 2);
  Stream probe(1, 1);
  for (int k = 0; k < 500; ++k) {
    const Eigen::Vector2d mu(probe.normal() * 0.6, 1.0 + probe.normal() * 0.8);
    const Eigen::VectorXd t = t_multivariate({x, mu}, cov);
    CHECK(rect.contains(mu) == (t.cwiseAbs().maxCoeff() <= z));
  }
}

TEST_CASE("multivariate errors", "[multivariate]") {
  const Eigen::MatrixXd x = draw(DataLaw::xx2(BaseLaw::normal), 10, 2);
  const auto cov = sample_covariance({x, Eigen::Vector2d::Zero()});
  const CenteredMoments m{1.0, 0.0, 1.0};
  CHECK_THROWS_MATCHES(t_multivariate({x, Eigen::Vector3d::Zero()}, cov), Error,
                       kind_is(ErrorKind::dimension_mismatch));
  std::vector<double> w{1, 3, 2, 2, 2, 2, 2, 2, 2, 2};  // sum (w - 2) = 0
  CHECK_THROWS_MATCHES(randomized_rectangle({x, Eigen::Vector2d::Zero()}, w, 2.0, m, cov, 0.05), Error,
                       kind_is(ErrorKind::degenerate_weights));
  CovarianceOps singular = cov;
  singular.inv_sqrt.setZero();
  CHECK_THROWS_MATCHES(classical_rectangle({x, Eigen::Vector2d::Zero()}, singular, 0.05), Error,
                       kind_is(ErrorKind::singular_standardizer));
}

TEST_CASE("Mardia skewness equals the double-sum definition", "[multivariate][mardia]") {
  for (const auto& law : {DataLaw::xx2(BaseLaw::normal), DataLaw::ma1_pair(BaseLaw::exponential)}) {
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
      const Eigen::MatrixXd x = draw(law, 150, seed);
      CHECK_THAT(mardia_skewness(x), WithinRel(mardia_double_sum(x, false), 1e-10));
      CHECK_THAT(mardia_skewness(x, MardiaEstimator::u_statistic), WithinRel(mardia_double_sum(x, true), 1e-9));
    }
  }
  // affine invariance
  const Eigen::MatrixXd x = draw(DataLaw::xx2(BaseLaw::exponential), 100, 4);
  Eigen::Matrix2d a;
  a << 2.0, 0.5, -1.0, 3.0;
  const Eigen::MatrixXd y = (x * a.transpose()).rowwise() + Eigen::RowVector2d(5.0, -7.0);
  CHECK_THAT(mardia_skewness(y), WithinRel(mardia_skewness(x), 1e-9));
}

TEST_CASE("population tensors from quadrature", "[multivariate][mardia]") {
  for (auto base : {BaseLaw::normal, BaseLaw::exponential}) {
    const auto [sigma, c] = population_moments(DataLaw::xx2(base));
    const double m1 = base == BaseLaw::normal ? 0.0 : 1.0, m2 = base == BaseLaw::normal ? 1.0 : 2.0;
    auto moment = [&](int a, int b) {
      auto f = [&](double x) {
        const double dens = base == BaseLaw::normal ? oracle::phi(x) : std::exp(-x);
        return std::pow(x - m1, a) * std::pow(x * x - m2, b) * dens;
      };
      return base == BaseLaw::normal ? oracle::integrate(f, -14.0, 0.0) + oracle::integrate(f, 0.0, 14.0)
                                     : oracle::integrate(f, 0.0, 10.0) + oracle::integrate(f, 10.0, 120.0);
    };
    CHECK_THAT(sigma(0, 0), WithinAbs(moment(2, 0), 1e-8));
    CHECK_THAT(sigma(0, 1), WithinAbs(moment(1, 1), 1e-8));
    CHECK_THAT(sigma(1, 1), WithinAbs(moment(0, 2), 1e-7));
    CHECK_THAT(c(0, 0, 0), WithinAbs(moment(3, 0), 1e-8));
    CHECK_THAT(c(0, 0, 1), WithinAbs(moment(2, 1), 1e-7));
    CHECK_THAT(c(1, 0, 1), WithinAbs(moment(1, 2), 1e-6));
    CHECK_THAT(c(1, 1, 1), WithinAbs(moment(0, 3), 1e-5));
  }
  // Sigma = diag(1, 2), C112 = 2, C222 = 8: beta = 3 * 2 + 8 = 14
  CHECK_THAT(population_mardia(DataLaw::xx2(BaseLaw::normal)), WithinAbs(14.0, 1e-12));
}

TEST_CASE("MA(1) tensors from the linear representation", "[multivariate][mardia]") {
  // X = A (z0, z1, z2) with independent unit-variance z, third cumulant k3
  Eigen::Matrix<double, 2, 3> a;
  a << 0.2, 1.0, 0.0, 0.0, 0.2, 1.0;
  for (auto base : {BaseLaw::normal, BaseLaw::exponential}) {
    const double k3 = base == BaseLaw::normal ? 0.0 : 2.0;
    const auto [sigma, c] = population_moments(DataLaw::ma1_pair(base));
    CHECK((sigma - a * a.transpose()).norm() < 1e-14);
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k)
        for (int l = 0; l < 2; ++l) {
          double want = 0.0;
          for (int s = 0; s < 3; ++s) want += a(j, s) * a(k, s) * a(l, s) * k3;
          CHECK_THAT(c(j, k, l), WithinAbs(want, 1e-14));
        }
  }
  CHECK(population_mardia(DataLaw::ma1_pair(BaseLaw::normal)) == 0.0);
}

TEST_CASE("sample skewness tensor converges to the population one", "[multivariate][mardia]") {
  const DataLaw law = DataLaw::ma1_pair(BaseLaw::exponential);
  const auto pop = population_standardized_tensor(law);
  const auto est = standardized_third_moments(draw(law, 400000, 5));
  for (int j = 0; j < 2; ++j)
    for (int k = 0; k < 2; ++k)
      for (int l = 0; l < 2; ++l) CHECK_THAT(est(j, k, l), WithinAbs(pop(j, k, l), 0.05));
}

TEST_CASE("tensor storage", "[multivariate]") {
  ThirdMomentTensor t(3);
  CHECK(t.stored_entries() == 10);
  t.set(2, 0, 1, 1.5);
  CHECK(t(0, 1, 2) == 1.5);
  CHECK(t(1, 2, 0) == 1.5);
  CHECK(t.sum_of_squares() == 6.0 * 1.5 * 1.5);
  t.set(1, 1, 1, -2.0);
  CHECK(t.max_abs() == 2.0);
}

TEST_CASE("univariate empirical skewness", "[multivariate]") {
  const std::vector<double> x{0.0, 0.0, 3.0};
  // mean 1, m2 = 2, m3 = 2
  CHECK_THAT(empirical_skewness(x), WithinAbs(2.0 / std::pow(2.0, 1.5), 1e-14));
}
