#pragma once

#include <cstdint>

#include "llt/lattice_pmf.hpp"

namespace llt {

/// Centered Gaussian reference with variance sigma_sq per step.
class GaussianRef {
 public:
  explicit GaussianRef(long double sigma_sq);
  /// The limiting constant 2 (ln 2)^2.
  static GaussianRef limit();

  long double sigma_sq() const { return sigma_sq_; }
  /// exp(-x^2 / (2 n sigma^2)) / sqrt(2 pi sigma^2), the target of sqrt(n) P(S_n = x).
  long double scaled_density(long double x, std::int64_t n) const;

 private:
  long double sigma_sq_;
};

/// sup |sqrt(n) p(x) - scaled_density(x, n)| over the support of p and the integers within
/// 10 sqrt(n sigma^2) of the origin.
long double sup_gaussian_distance(const FloatPmf& p, std::int64_t n, const GaussianRef& g);
long double sup_gaussian_distance(const AnyPmf& p, std::int64_t n, const GaussianRef& g);

/// Integer law proportional to exp(-x^2 / (2 variance)), truncated where the weight drops
/// below 2^-80 relative to the center.
FloatPmf discrete_gaussian(long double variance);

}  // namespace llt
