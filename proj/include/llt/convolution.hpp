#pragma once

#include <cstddef>

#include "llt/errors.hpp"
#include "llt/lattice_pmf.hpp"

namespace llt {

/// Law of A + B for independent A ~ a, B ~ b.
ExactPmf convolve(const ExactPmf& a, const ExactPmf& b, std::size_t cap = kDefaultSupportCap);
FloatPmf convolve(const FloatPmf& a, const FloatPmf& b, std::size_t cap = kDefaultSupportCap);
/// Throws ModeError when the two laws carry different modes.
AnyPmf convolve(const AnyPmf& a, const AnyPmf& b, std::size_t cap = kDefaultSupportCap);

/// m-fold convolution power by binary exponentiation, m >= 1.
ExactPmf convolve_power(const ExactPmf& p, std::int64_t m, std::size_t cap = kDefaultSupportCap);
FloatPmf convolve_power(const FloatPmf& p, std::int64_t m, std::size_t cap = kDefaultSupportCap);
AnyPmf convolve_power(const AnyPmf& p, std::int64_t m, std::size_t cap = kDefaultSupportCap);

namespace detail {
/// Integer polynomial product of nonnegative coefficient vectors.
std::vector<mpz_class> multiply_nonnegative(const std::vector<mpz_class>& a,
                                            const std::vector<mpz_class>& b);
}  // namespace detail

}  // namespace llt
