#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "skewpivot/datagen.hpp"
#include "skewpivot/error.hpp"
#include "skewpivot/harness.hpp"
#include "skewpivot/weights.hpp"

namespace skewpivot {

inline constexpr int preset_table_count = 12;

inline std::string preset_title(int id) {
  switch (id) {
    case 1: return "Method I, w ~ chisq(7), theta = 9.3";
    case 2: return "Method I, w ~ Bernoulli(1/3), theta = 0.58";
    case 3: return "Method II, w ~ Normal(0,1), theta = 0";
    case 4: return "Method I.1 multinomial weights, theta* = 1.32215, vs bootstrap-t (B = 1000)";
    case 5: return "Method I.2, n = 10, theta solved for SRF = 1e-4";
    case 6: return "Method I.2, n = 20, theta solved for SRF = 1e-4";
    case 7: return "(X, X^2), w ~ chisq(7), theta = 9.3";
    case 8: return "(X, X^2), w ~ Bernoulli(1/3), theta = 0.58";
    case 9: return "MA(1) pair, w ~ chisq(7), theta = 9.3";
    case 10: return "MA(1) pair, w ~ Bernoulli(1/3), theta = 0.58";
    case 11: return "(X, X^2), multinomial weights, theta* = 1.32215";
    case 12: return "MA(1) pair, multinomial weights, theta* = 1.32215";
    default: fail(ErrorKind::config_error, "table id must be 1.." + std::to_string(preset_table_count));
  }
}

namespace detail {

inline std::string law_slug(const DataLaw& law) {
  switch (law.kind) {
    case LawKind::binomial_10_01: return "binomial";
    case LawKind::poisson_1: return "poisson";
    case LawKind::lognormal_0_1: return "lognormal";
    case LawKind::exponential_1: return "exponential";
    case LawKind::chi_square_1: return "chisq1";
    case LawKind::beta_5_1: return "beta";
    case LawKind::normal_0_1: return "normal";
    case LawKind::xx2: return law.base == BaseLaw::normal ? "xx2-normal" : "xx2-exponential";
    case LawKind::ma1_pair: return law.base == BaseLaw::normal ? "ma1-normal" : "ma1-exp";
  }
  return "law";
}

inline std::vector<DataLaw> univariate_laws() {
  return {DataLaw::binomial(), DataLaw::poisson(),    DataLaw::lognormal(),
          DataLaw::exponential(), DataLaw::chi_square(), DataLaw::beta()};
}

}  // namespace detail

// The experiments behind table `id`, each run with `reps` replications and `seed`.
inline std::vector<ExperimentSpec> preset_table(int id, std::size_t reps, std::uint64_t seed) {
  preset_title(id);
  std::vector<ExperimentSpec> out;
  auto add = [&](ExperimentKind kind, const DataLaw& law, std::size_t n, Method method, WeightScheme w,
                 ThetaSpec theta) {
    ExperimentSpec s;
    s.id = "table" + std::to_string(id) + "-" + detail::law_slug(law) + "-n" + std::to_string(n);
    s.kind = kind;
    s.data_law = law;
    s.weight_scheme = w;
    s.method = method;
    s.theta = theta;
    s.n = n;
    s.replications = reps;
    s.seed = seed;
    out.push_back(std::move(s));
  };

  const WeightScheme chi = WeightScheme::chi_square(7);
  const WeightScheme bern = WeightScheme::bernoulli(1.0 / 3.0);
  const WeightScheme multi = WeightScheme::multinomial_symmetric();
  const ThetaSpec star = ThetaSpec::fixed(1.32215);

  switch (id) {
    case 1:
    case 2:
      for (const auto& law : detail::univariate_laws())
        for (std::size_t n : {10, 20, 30})
          add(ExperimentKind::univariate, law, n, Method::method_1, id == 1 ? chi : bern,
              ThetaSpec::fixed(id == 1 ? 9.3 : 0.58));
      break;
    case 3:
      for (const auto& law : detail::univariate_laws())
        for (std::size_t n : {10, 20, 100})
          add(ExperimentKind::univariate, law, n, Method::method_2, WeightScheme::normal(0.0, 1.0), ThetaSpec{});
      break;
    case 4:
      for (const auto& law : detail::univariate_laws()) {
        const bool discrete = law.kind == LawKind::binomial_10_01 || law.kind == LawKind::poisson_1;
        for (std::size_t n : {discrete ? 13 : 10, 20, 30})
          add(ExperimentKind::bootstrap_comparison, law, n, Method::method_1_1, multi, star);
      }
      break;
    case 5:
    case 6:
      add(ExperimentKind::univariate, DataLaw::lognormal(), id == 5 ? 10 : 20, Method::method_1_2, multi,
          ThetaSpec::solve(1e-4));
      break;
    case 7:
    case 8:
    case 11: {
      const WeightScheme w = id == 7 ? chi : (id == 8 ? bern : multi);
      const Method m = id == 11 ? Method::method_1_1 : Method::method_1;
      const ThetaSpec th = id == 7 ? ThetaSpec::fixed(9.3) : (id == 8 ? ThetaSpec::fixed(0.58) : star);
      for (std::size_t n : {30, 50, 100}) add(ExperimentKind::bivariate, DataLaw::xx2(BaseLaw::normal), n, m, w, th);
      for (std::size_t n : {100, 300, 400})
        add(ExperimentKind::bivariate, DataLaw::xx2(BaseLaw::exponential), n, m, w, th);
      break;
    }
    case 9:
    case 10:
    case 12: {
      const WeightScheme w = id == 9 ? chi : (id == 10 ? bern : multi);
      const Method m = id == 12 ? Method::method_1_1 : Method::method_1;
      const ThetaSpec th = id == 9 ? ThetaSpec::fixed(9.3) : (id == 10 ? ThetaSpec::fixed(0.58) : star);
      for (std::size_t n : {10, 20}) add(ExperimentKind::bivariate, DataLaw::ma1_pair(BaseLaw::normal), n, m, w, th);
      for (std::size_t n : {30, 50})
        add(ExperimentKind::bivariate, DataLaw::ma1_pair(BaseLaw::exponential), n, m, w, th);
      break;
    }
    default: break;
  }
  return out;
}

}  // namespace skewpivot
