#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "llt/errors.hpp"
#include "llt/lattice_pmf.hpp"

namespace llt {

using Complex = std::complex<long double>;
using CharFunction = std::function<Complex(long double)>;

Complex char_fn(const FloatPmf& p, long double t);
/// Evaluated from the exact masses rounded once to long double.
Complex char_fn(const ExactPmf& p, long double t);
Complex char_fn(const AnyPmf& p, long double t);

/// Samples of a characteristic function on an increasing t-grid in [-pi, pi].
struct CharGrid {
  std::int64_t n_label = 1;
  std::vector<long double> t;
  std::vector<Complex> value;
};

CharGrid sample_char(const CharFunction& phi, std::span<const long double> ts, std::int64_t n_label);
/// m equispaced points on [-pi, pi] inclusive, m >= 2.
std::vector<long double> uniform_t_grid(std::size_t m);

struct Inversion {
  FloatPmf law;
  long double renormalization_delta = 0.0L;  // sum of clipped masses minus one
  long double most_negative = 0.0L;          // smallest raw mass seen (<= 0)
  std::size_t grid_size = 0;
};

/// Negative masses of size up to this are round-off and get clipped.
inline constexpr long double kClipThreshold = 0x1p-35L;

/// Recovers a lattice law supported in [-bound, bound] from its characteristic function.
/// Throws LawError if a mass below -kClipThreshold appears.
Inversion invert_to_pmf(const CharFunction& phi, std::int64_t support_bound,
                        std::size_t cap = kDefaultSupportCap);

}  // namespace llt
