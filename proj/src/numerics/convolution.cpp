#include "llt/convolution.hpp"

#include <algorithm>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>

namespace llt {

namespace {

std::size_t sum_support(std::size_t la, std::size_t lb, std::size_t cap, const char* what) {
  const std::size_t points = la + lb - 1;
  check_support_cap(points, cap, what);
  return points;
}

std::vector<mpz_class> schoolbook(const std::vector<mpz_class>& a, const std::vector<mpz_class>& b) {
  std::vector<mpz_class> out(a.size() + b.size() - 1);
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == 0) continue;
    for (std::size_t j = 0; j < b.size(); ++j) {
      if (b[j] == 0) continue;
      mpz_addmul(out[i + j].get_mpz_t(), a[i].get_mpz_t(), b[j].get_mpz_t());
    }
  }
  return out;
}

std::size_t max_bits(const std::vector<mpz_class>& v) {
  std::size_t bits = 1;
  for (const auto& x : v) bits = std::max(bits, mpz_sizeinbase(x.get_mpz_t(), 2));
  return bits;
}

// Pack coefficients into fixed-width limb slots of one big integer.
mpz_class pack(const std::vector<mpz_class>& v, std::size_t slot_limbs) {
  std::vector<std::uint64_t> limbs(v.size() * slot_limbs, 0);
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (v[i] == 0) continue;
    std::size_t count = 0;
    mpz_export(limbs.data() + i * slot_limbs, &count, -1, sizeof(std::uint64_t), 0, 0,
               v[i].get_mpz_t());
  }
  mpz_class out;
  mpz_import(out.get_mpz_t(), limbs.size(), -1, sizeof(std::uint64_t), 0, 0, limbs.data());
  return out;
}

std::vector<mpz_class> kronecker(const std::vector<mpz_class>& a, const std::vector<mpz_class>& b) {
  const std::size_t len = a.size() + b.size() - 1;
  std::size_t guard = 1;
  while ((std::size_t{1} << guard) < std::min(a.size(), b.size())) ++guard;
  const std::size_t bits = max_bits(a) + max_bits(b) + guard + 1;
  const std::size_t slot = (bits + 63) / 64;
  const mpz_class pa = pack(a, slot);
  const mpz_class pb = pack(b, slot);
  const mpz_class prod = pa * pb;
  std::vector<std::uint64_t> limbs(len * slot + 1, 0);
  std::size_t count = 0;
  mpz_export(limbs.data(), &count, -1, sizeof(std::uint64_t), 0, 0, prod.get_mpz_t());
  std::vector<mpz_class> out(len);
  for (std::size_t i = 0; i < len; ++i) {
    mpz_import(out[i].get_mpz_t(), slot, -1, sizeof(std::uint64_t), 0, 0,
               limbs.data() + i * slot);
  }
  return out;
}

}  // namespace

namespace detail {

std::vector<mpz_class> multiply_nonnegative(const std::vector<mpz_class>& a,
                                            const std::vector<mpz_class>& b) {
  if (a.empty() || b.empty()) return {};
  if (std::min(a.size(), b.size()) <= 16 || a.size() * b.size() <= 4096) return schoolbook(a, b);
  return kronecker(a, b);
}

}  // namespace detail

ExactPmf convolve(const ExactPmf& a, const ExactPmf& b, std::size_t cap) {
  sum_support(a.size(), b.size(), cap, "convolve");
  auto num = detail::multiply_nonnegative(a.numerators(), b.numerators());
  return ExactPmf(a.offset() + b.offset(), std::move(num), a.denominator() * b.denominator());
}

FloatPmf convolve(const FloatPmf& a, const FloatPmf& b, std::size_t cap) {
  const std::size_t len = sum_support(a.size(), b.size(), cap, "convolve");
  const auto ma = a.masses();
  const auto mb = b.masses();
  std::vector<std::size_t> nz_a;
  std::vector<std::size_t> nz_b;
  for (std::size_t i = 0; i < ma.size(); ++i)
    if (ma[i] != 0.0L) nz_a.push_back(i);
  for (std::size_t j = 0; j < mb.size(); ++j)
    if (mb[j] != 0.0L) nz_b.push_back(j);
  // Sweep the operand with fewer nonzeros in the outer loop.
  const bool swap = nz_a.size() < nz_b.size();
  const auto& outer = swap ? nz_a : nz_b;
  const auto& mo = swap ? ma : mb;
  const auto& mi = swap ? mb : ma;
  std::vector<long double> out(len, 0.0L);
  for (std::size_t j : outer) {
    const long double w = mo[j];
    long double* dst = out.data() + j;
    for (std::size_t i = 0; i < mi.size(); ++i) dst[i] += w * mi[i];
  }
  return FloatPmf(a.offset() + b.offset(), std::move(out));
}

AnyPmf convolve(const AnyPmf& a, const AnyPmf& b, std::size_t cap) {
  if (mode_of(a) != mode_of(b)) throw ModeError("convolve: exact and float laws mixed");
  if (mode_of(a) == Mode::exact) return convolve(std::get<ExactPmf>(a), std::get<ExactPmf>(b), cap);
  return convolve(std::get<FloatPmf>(a), std::get<FloatPmf>(b), cap);
}

namespace {

template <class Pmf>
Pmf power_impl(const Pmf& p, std::int64_t m, std::size_t cap) {
  if (m < 1) throw std::invalid_argument("convolve_power: exponent must be >= 1");
  const auto span = static_cast<std::size_t>(p.size() - 1);
  if (span > 0 && static_cast<std::uint64_t>(m) > (cap - 1) / span) {
    check_support_cap(std::numeric_limits<std::size_t>::max(), cap, "convolve_power");
  }
  std::optional<Pmf> acc;
  Pmf base = p;
  auto e = static_cast<std::uint64_t>(m);
  while (true) {
    if (e & 1U) acc = acc ? convolve(*acc, base, cap) : base;
    e >>= 1U;
    if (e == 0) break;
    base = convolve(base, base, cap);
  }
  return *acc;
}

}  // namespace

ExactPmf convolve_power(const ExactPmf& p, std::int64_t m, std::size_t cap) {
  return power_impl(p, m, cap);
}

FloatPmf convolve_power(const FloatPmf& p, std::int64_t m, std::size_t cap) {
  return power_impl(p, m, cap);
}

AnyPmf convolve_power(const AnyPmf& p, std::int64_t m, std::size_t cap) {
  if (const auto* e = std::get_if<ExactPmf>(&p)) return convolve_power(*e, m, cap);
  return convolve_power(std::get<FloatPmf>(p), m, cap);
}

}  // namespace llt
