#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>

#include <gmpxx.h>

namespace llt::detail {

// num/den correctly truncated to the 64-bit long double significand.
inline long double ratio_to_long_double(const mpz_class& num, const mpz_class& den) {
  if (num == 0) return 0.0L;
  const bool negative = sgn(num) < 0;
  mpz_class a = abs(num);
  const auto bits_n = static_cast<long>(mpz_sizeinbase(a.get_mpz_t(), 2));
  const auto bits_d = static_cast<long>(mpz_sizeinbase(den.get_mpz_t(), 2));
  const long shift = 66 - (bits_n - bits_d);
  mpz_class q;
  if (shift >= 0) {
    mpz_class scaled = a << static_cast<mp_bitcnt_t>(shift);
    mpz_tdiv_q(q.get_mpz_t(), scaled.get_mpz_t(), den.get_mpz_t());
  } else {
    mpz_class scaled = den << static_cast<mp_bitcnt_t>(-shift);
    mpz_tdiv_q(q.get_mpz_t(), a.get_mpz_t(), scaled.get_mpz_t());
  }
  const auto qbits = static_cast<long>(mpz_sizeinbase(q.get_mpz_t(), 2));
  long drop = qbits > 64 ? qbits - 64 : 0;
  if (drop > 0) q >>= static_cast<mp_bitcnt_t>(drop);
  const long double mant = static_cast<long double>(mpz_get_ui(q.get_mpz_t()));
  const long double v = std::ldexp(mant, static_cast<int>(drop - shift));
  return negative ? -v : v;
}

inline long double to_long_double(const mpq_class& q) {
  return ratio_to_long_double(q.get_num(), q.get_den());
}

// Exact dyadic rational equal to a finite long double.
inline mpq_class from_long_double(long double v) {
  if (!std::isfinite(v)) throw std::domain_error("from_long_double: non-finite value");
  if (v == 0.0L) return mpq_class(0);
  int exp = 0;
  const long double frac = std::frexp(v, &exp);  // v = frac * 2^exp, 0.5 <= |frac| < 1
  const long double scaled = std::ldexp(std::fabs(frac), 64);
  const auto mant = static_cast<std::uint64_t>(scaled);
  mpz_class m;
  mpz_import(m.get_mpz_t(), 1, -1, sizeof(mant), 0, 0, &mant);
  if (v < 0) m = -m;
  mpq_class q(m);
  const int e = exp - 64;
  if (e >= 0) {
    mpq_mul_2exp(q.get_mpq_t(), q.get_mpq_t(), static_cast<mp_bitcnt_t>(e));
  } else {
    mpq_div_2exp(q.get_mpq_t(), q.get_mpq_t(), static_cast<mp_bitcnt_t>(-e));
  }
  return q;
}

}  // namespace llt::detail
