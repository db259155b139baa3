#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "llt/construction.hpp"
#include "llt/detail/gmp_util.hpp"

namespace llt {

namespace {
constexpr std::int64_t kMaxK = 62;

bool is_power_of_two(std::int64_t k) { return k > 0 && (k & (k - 1)) == 0; }

int log2_exact(std::int64_t k) {
  int m = 0;
  while ((std::int64_t{1} << m) < k) ++m;
  return m;
}
}  // namespace

std::int64_t p_of(std::int64_t k) {
  if (k < 1 || k > kMaxK) throw std::out_of_range("p_k: k out of range " + std::to_string(k));
  return k % 2 == 0 ? (std::int64_t{1} << k) : (std::int64_t{1} << (k - 1)) + 1;
}

long double alpha_sq_value(std::int64_t k) {
  if (k <= 1) throw std::domain_error("alpha undefined: log2(k) = 0 at k = 1");
  const auto p = static_cast<long double>(p_of(k));
  return 1.0L / (p * p * static_cast<long double>(k) * std::log2(static_cast<long double>(k)));
}

bool ConstructionParams::d_exceeds(std::int64_t n) const { return d > n; }

std::optional<std::int64_t> ConstructionParams::d_small() const {
  if (k * k >= 63) return std::nullopt;
  return std::int64_t{1} << (k * k);
}

ConstructionParams params(std::int64_t k) {
  if (k <= 1) throw std::domain_error("alpha undefined: log2(k) = 0 at k = 1");
  if (k > kMaxK) throw std::out_of_range("params: k above " + std::to_string(kMaxK));
  ConstructionParams out;
  out.k = k;
  out.p = p_of(k);
  mpz_ui_pow_ui(out.d.get_mpz_t(), 2, static_cast<unsigned long>(k * k));
  AlphaSq& a = out.alpha_sq;
  a.k = k;
  a.p_sq_factor = out.p;
  a.value = alpha_sq_value(k);
  if (is_power_of_two(k)) {
    mpz_class den = out.p;
    den *= out.p;
    den *= k;
    den *= log2_exact(k);
    a.exact = mpq_class(1, den);
    a.exact.canonicalize();
    a.rational = true;
  } else {
    a.exact = detail::from_long_double(a.value);
    a.rational = false;
  }
  if (a.value > 1.0L) throw std::logic_error("params: alpha^2 exceeds one");
  return out;
}

std::vector<std::int64_t> index_I(std::int64_t n) {
  if (n < 2) throw std::invalid_argument("index_I: n must be >= 2");
  std::vector<std::int64_t> out;
  for (std::int64_t k = 2; k < 63 && (std::int64_t{1} << k) < n; k += 2) {
    if (k * k >= 63 || n < (std::int64_t{1} << (k * k))) out.push_back(k);
  }
  return out;
}

std::vector<std::int64_t> index_J(std::int64_t n) {
  if (n < 2) throw std::invalid_argument("index_J: n must be >= 2");
  std::vector<std::int64_t> out;
  __int128 sixteen_k = 16;
  for (std::int64_t k = 1; 81 * sixteen_k <= n; ++k, sixteen_k *= 16) {
    if (k * k >= 63 || (std::int64_t{1} << (k * k)) > n) out.push_back(k);
  }
  return out;
}

}  // namespace llt
