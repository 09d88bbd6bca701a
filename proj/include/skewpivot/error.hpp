#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace skewpivot {

enum class ErrorKind {
  invalid_argument,
  missing_sample_size,
  non_positive_variance,
  no_root_in_bracket,
  exclusion_violation,
  not_symmetric,
  zero_variance,
  degenerate_weights,
  constraint_violated,
  degenerate_resample,
  singular_standardizer,
  singular_covariance,
  dimension_mismatch,
  no_closed_form,
  config_error,
};

constexpr std::string_view to_string(ErrorKind k) {
  switch (k) {
    case ErrorKind::invalid_argument: return "InvalidArgument";
    case ErrorKind::missing_sample_size: return "MissingSampleSize";
    case ErrorKind::non_positive_variance: return "NonPositiveVariance";
    case ErrorKind::no_root_in_bracket: return "NoRootInBracket";
    case ErrorKind::exclusion_violation: return "ExclusionViolation";
    case ErrorKind::not_symmetric: return "NotSymmetric";
    case ErrorKind::zero_variance: return "ZeroVariance";
    case ErrorKind::degenerate_weights: return "DegenerateWeights";
    case ErrorKind::constraint_violated: return "ConstraintViolated";
    case ErrorKind::degenerate_resample: return "DegenerateResample";
    case ErrorKind::singular_standardizer: return "SingularStandardizer";
    case ErrorKind::singular_covariance: return "SingularCovariance";
    case ErrorKind::dimension_mismatch: return "DimensionMismatch";
    case ErrorKind::no_closed_form: return "NoClosedForm";
    case ErrorKind::config_error: return "ConfigError";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace skewpivot
