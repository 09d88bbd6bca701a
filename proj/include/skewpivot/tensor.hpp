#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <vector>

#include "skewpivot/error.hpp"

namespace skewpivot {

// Fully symmetric third-order tensor E(Y_j Y_k Y_l), stored once per j <= k <= l.
class ThirdMomentTensor {
 public:
  ThirdMomentTensor() = default;

  explicit ThirdMomentTensor(std::size_t p) : p_(p) {
    if (p < 1) fail(ErrorKind::invalid_argument, "tensor dimension must be positive");
    slot_.assign(p * p * p, 0);
    std::size_t next = 0;
    for (std::size_t j = 0; j < p; ++j)
      for (std::size_t k = j; k < p; ++k)
        for (std::size_t l = k; l < p; ++l) {
          const std::array<std::size_t, 3> idx{j, k, l};
          std::array<std::size_t, 3> perm = idx;
          do {
            slot_[(perm[0] * p + perm[1]) * p + perm[2]] = next;
          } while (std::next_permutation(perm.begin(), perm.end()));
          ++next;
        }
    values_.assign(next, 0.0);
  }

  std::size_t dimension() const { return p_; }
  std::size_t stored_entries() const { return values_.size(); }

  double operator()(std::size_t j, std::size_t k, std::size_t l) const { return values_[slot(j, k, l)]; }

  void set(std::size_t j, std::size_t k, std::size_t l, double v) { values_[slot(j, k, l)] = v; }

  double max_abs() const {
    double m = 0.0;
    for (double v : values_) m = std::max(m, v < 0 ? -v : v);
    return m;
  }

  // sum over all ordered (j, k, l) of entry^2; for standardized moments this is Mardia's beta
  double sum_of_squares() const {
    double s = 0.0;
    for (std::size_t j = 0; j < p_; ++j)
      for (std::size_t k = 0; k < p_; ++k)
        for (std::size_t l = 0; l < p_; ++l) {
          const double v = (*this)(j, k, l);
          s += v * v;
        }
    return s;
  }

 private:
  std::size_t slot(std::size_t j, std::size_t k, std::size_t l) const {
    if (j >= p_ || k >= p_ || l >= p_) fail(ErrorKind::dimension_mismatch, "tensor index out of range");
    return slot_[(j * p_ + k) * p_ + l];
  }

  std::size_t p_ = 0;
  std::vector<std::size_t> slot_;
  std::vector<double> values_;
};

}  // namespace skewpivot
