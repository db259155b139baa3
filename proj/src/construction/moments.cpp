#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "llt/construction.hpp"
#include "llt/detail/compensated.hpp"
#include "llt/detail/gmp_util.hpp"

namespace llt {

namespace {

mpz_class from_i128(__int128 v) {
  const bool neg = v < 0;
  unsigned __int128 u = neg ? static_cast<unsigned __int128>(-v) : static_cast<unsigned __int128>(v);
  const auto hi = static_cast<std::uint64_t>(u >> 64);
  const auto lo = static_cast<std::uint64_t>(u);
  mpz_class out = hi;
  out <<= 64;
  out += mpz_class(lo);
  return neg ? mpz_class(-out) : out;
}

mpz_class sum_squares_to(std::int64_t m) {
  if (m <= 0) return 0;
  mpz_class mm = m;
  return mm * (mm + 1) * (2 * mm + 1) / 6;
}

long double times_alpha(const mpz_class& s, std::int64_t k) {
  return detail::ratio_to_long_double(s, 1) * alpha_sq_value(k);
}

std::int64_t overlap(std::int64_t lo1, std::int64_t hi1, std::int64_t lo2, std::int64_t hi2) {
  return std::max<std::int64_t>(0, std::min(hi1, hi2) - std::max(lo1, lo2) + 1);
}

}  // namespace

WindowCoeffs::WindowCoeffs(std::int64_t k, std::int64_t n) : k_(k), n_(n), p_(p_of(k)) {
  if (k < 2) throw std::domain_error("window_coeffs: k must be >= 2");
  if (n < 1) throw std::invalid_argument("window_coeffs: n must be positive");
  d_ = params(k).d_small();
}

std::int64_t WindowCoeffs::trapezoid(std::int64_t j) const {
  if (j < 0 || j > n_ + p_ - 2) return 0;
  return std::min({j + 1, n_, p_, n_ + p_ - 1 - j});
}

std::int64_t WindowCoeffs::coeff(std::int64_t j) const {
  std::int64_t v = trapezoid(j);
  if (d_ && j >= *d_) v -= trapezoid(j - *d_);
  return v;
}

std::vector<std::int64_t> WindowCoeffs::dense(std::size_t cap) const {
  if (!d_) throw ResourceError("window_coeffs: d_k exceeds the addressable range");
  const auto len = static_cast<std::size_t>(*d_ + n_ + p_ - 1);
  check_support_cap(len, cap, "window_coeffs");
  std::vector<std::int64_t> out(len);
  for (std::size_t j = 0; j < len; ++j) out[j] = coeff(static_cast<std::int64_t>(j));
  return out;
}

mpz_class trapezoid_sum_sq(std::int64_t a, std::int64_t b) {
  if (a > b) std::swap(a, b);
  if (a <= 0) return 0;
  mpz_class plateau = a;
  plateau *= a;
  plateau *= (b - a + 1);
  return 2 * sum_squares_to(a - 1) + plateau;
}

mpz_class WindowCoeffs::sum_sq() const {
  const std::int64_t len = n_ + p_ - 1;
  if (!d_ || *d_ >= len) return 2 * trapezoid_sum_sq(n_, p_);
  __int128 acc = 0;
  for (std::int64_t j = 0; j < *d_ + len; ++j) {
    const __int128 c = coeff(j);
    acc += c * c;
  }
  return from_i128(acc);
}

long double WindowCoeffs::variance() const { return times_alpha(sum_sq(), k_); }

std::int64_t truncation_level(std::int64_t n) {
  if (n < 1) throw std::invalid_argument("truncation_level: n must be positive");
  const auto nn = static_cast<long double>(n);
  for (std::int64_t K = 2; K <= 62; ++K) {
    if ((std::int64_t{1} << K) < n) continue;
    const long double kk = static_cast<long double>(K);
    const long double tail = 8.0L * nn * nn / (std::ldexp(1.0L, static_cast<int>(K)) * kk * std::log2(kk));
    if (tail < 1e-12L * nn) return K;
  }
  throw std::out_of_range("truncation_level: n too large");
}

long double block_second_moment(std::int64_t k) {
  const auto a = static_cast<long double>(k);
  const auto b = static_cast<long double>(k + 1);
  return 1.0L / (a * std::log2(a)) + 1.0L / (b * std::log2(b));
}

long double var_un(std::int64_t n) {
  detail::CompensatedSum s;
  for (std::int64_t k : index_I(n)) {
    s += 2.0L * static_cast<long double>(n - (std::int64_t{1} << k)) * block_second_moment(k);
  }
  return s.value();
}

SecondMoments second_moments(std::int64_t n) {
  if (n < 5) throw std::invalid_argument("second_moments: n must be >= 5");
  SecondMoments r;
  r.n = n;
  r.K = truncation_level(n);
  const auto nn = static_cast<long double>(n);
  const auto kk = static_cast<long double>(r.K);
  r.tail_bound = 8.0L * nn * nn / (std::ldexp(1.0L, static_cast<int>(r.K)) * kk * std::log2(kk));

  const auto in_I = index_I(n);
  auto u_start = [&](std::int64_t j) -> std::optional<std::int64_t> {
    // First site of level j inside U_n: V_k carries levels k and k + 1 from i = 2^k.
    for (std::int64_t k : in_I) {
      if (k == j || k + 1 == j) return std::int64_t{1} << k;
    }
    return std::nullopt;
  };

  detail::CompensatedSum sm, yh, la, wn, en, cov, un;
  for (std::int64_t k = 2; k <= r.K; ++k) {
    const auto pr = params(k);
    const std::int64_t p = pr.p;
    const long double v = WindowCoeffs(k, n).variance();
    if (!pr.d_exceeds(n)) {
      sm += v;
      r.var_gk.push_back({k, times_alpha(trapezoid_sum_sq(p, *pr.d_small()), k)});
    } else if (p < n) {
      yh += v;
      const long double edge = times_alpha(sum_squares_to(p - 1), k);
      r.var_Ak.push_back({k, edge});
      r.var_Bk.push_back({k, static_cast<long double>(n + 1 - p) * times_alpha(mpz_class(p) * p, k)});
      r.var_Ck.push_back({k, edge});
    } else {
      la += v;
    }

    // Site coefficients on the positive side; the d_k-shifted side mirrors them.
    const long double w = times_alpha(mpz_class(p) * p, k);
    const bool in_w = p < n && pr.d_exceeds(n);
    const std::int64_t w_lo = p - 1;
    const auto u_lo = u_start(k);
    const std::int64_t w_len = in_w ? n - w_lo : 0;
    const std::int64_t u_len = u_lo ? n - *u_lo : 0;
    const std::int64_t both = (in_w && u_lo) ? overlap(w_lo, n - 1, *u_lo, n - 1) : 0;
    wn += 2.0L * w * static_cast<long double>(w_len);
    un += 2.0L * w * static_cast<long double>(u_len);
    en += 2.0L * w * static_cast<long double>(w_len + u_len - 2 * both);
    cov += -2.0L * w * static_cast<long double>(u_len - both);
  }
  r.var_ZSm = sm.value();
  r.var_Yhat = yh.value();
  r.var_ZLa = la.value();
  r.var_Sn_f = r.var_ZSm + r.var_Yhat + r.var_ZLa;
  r.var_Wn = wn.value();
  r.var_Un = un.value();
  r.var_En = en.value();
  r.cov_En_Un = cov.value();
  r.var_Un_closed = var_un(n);
  return r;
}

bool geometric_tail_check(std::span<const long double> a, long double q) {
  if (!(q > 1.0L)) throw std::invalid_argument("geometric_tail_check: q must exceed 1");
  if (a.empty()) return true;
  for (long double v : a) {
    if (!(v > 0.0L)) throw std::invalid_argument("geometric_tail_check: sequence must be positive");
  }
  for (std::size_t m = 0; m + 1 < a.size(); ++m) {
    if (a[m + 1] / a[m] < q) return false;
  }
  const long double factor = 1.0L / (1.0L - 1.0L / q);
  detail::CompensatedSum s;
  for (std::size_t m = 0; m < a.size(); ++m) {
    s += a[m];
    if (s.value() > a[m] * factor) return false;
  }
  return true;
}

}  // namespace llt
