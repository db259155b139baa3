#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "llt/construction.hpp"
#include "llt/convolution.hpp"
#include "llt/detail/gmp_util.hpp"

namespace llt {

namespace {

void require_even(std::int64_t k, const char* what) {
  if (k < 2 || k % 2 != 0) throw std::invalid_argument(std::string(what) + ": k must be even and >= 2");
}

// Sparse exact masses -> dense ExactPmf over a common denominator.
ExactPmf exact_from_points(const std::map<std::int64_t, mpq_class>& pts) {
  mpz_class den = 1;
  for (const auto& [x, q] : pts) mpz_lcm(den.get_mpz_t(), den.get_mpz_t(), q.get_den_mpz_t());
  const std::int64_t lo = pts.begin()->first;
  const std::int64_t hi = pts.rbegin()->first;
  std::vector<mpz_class> num(static_cast<std::size_t>(hi - lo + 1));
  for (const auto& [x, q] : pts) {
    mpz_class v = den / q.get_den();
    v *= q.get_num();
    num[static_cast<std::size_t>(x - lo)] = std::move(v);
  }
  return ExactPmf(lo, std::move(num), std::move(den));
}

FloatPmf float_from_points(const std::map<std::int64_t, long double>& pts) {
  const std::int64_t lo = pts.begin()->first;
  const std::int64_t hi = pts.rbegin()->first;
  std::vector<long double> m(static_cast<std::size_t>(hi - lo + 1), 0.0L);
  for (const auto& [x, v] : pts) m[static_cast<std::size_t>(x - lo)] += v;
  return FloatPmf(lo, std::move(m));
}

template <class T>
std::map<std::int64_t, T> block_points(std::int64_t k, const T& a, const T& b) {
  const std::int64_t p = p_of(k);
  const std::int64_t q = p_of(k + 1);
  const T one(1);
  const T two(2);
  std::map<std::int64_t, T> pts;
  for (int x = -1; x <= 1; ++x) {
    for (int y = -1; y <= 1; ++y) {
      const T wa = x == 0 ? T(one - a) : T(a / two);
      const T wb = y == 0 ? T(one - b) : T(b / two);
      pts[p * x + q * y] += wa * wb;
    }
  }
  return pts;
}

// Law of scale * (V - V') for V, V' independent fbar_k.
template <class T>
std::map<std::int64_t, T> difference_points(const T& a, std::int64_t scale) {
  const T one(1);
  const T half_a = a / T(2);
  std::map<std::int64_t, T> pts;
  for (int x = -1; x <= 1; ++x) {
    for (int y = -1; y <= 1; ++y) {
      const T wx = x == 0 ? T(one - a) : half_a;
      const T wy = y == 0 ? T(one - a) : half_a;
      pts[scale * (x - y)] += wx * wy;
    }
  }
  return pts;
}

}  // namespace

AnyPmf fbar_pmf(std::int64_t k, Mode mode) {
  const auto pr = params(k);
  if (mode == Mode::exact) {
    const mpq_class& a = pr.alpha_sq.exact;
    const mpq_class half = a / 2;
    const mpq_class masses[3] = {half, mpq_class(1) - a, half};
    return ExactPmf::from_masses(-1, masses);
  }
  const long double a = pr.alpha_sq.value;
  return FloatPmf(-1, {a / 2.0L, 1.0L - a, a / 2.0L});
}

BlockTable block_table(std::int64_t k) {
  require_even(k, "block_table");
  const auto pts = block_points<long double>(k, alpha_sq_value(k), alpha_sq_value(k + 1));
  BlockTable t;
  t.k = k;
  for (const auto& [x, v] : pts) {
    t.points.push_back(x);
    t.masses.push_back(v);
  }
  return t;
}

AnyPmf block_pmf(std::int64_t k, Mode mode) {
  require_even(k, "block_pmf");
  if (mode == Mode::exact) {
    const auto a = params(k).alpha_sq.exact;
    const auto b = params(k + 1).alpha_sq.exact;
    return exact_from_points(block_points<mpq_class>(k, a, b));
  }
  return float_from_points(block_points<long double>(k, alpha_sq_value(k), alpha_sq_value(k + 1)));
}

long double block_char(std::int64_t k, long double t) {
  require_even(k, "block_char");
  const long double a = alpha_sq_value(k);
  const long double b = alpha_sq_value(k + 1);
  const auto p = static_cast<long double>(std::int64_t{1} << k);
  return (1.0L - a) * (1.0L - b) + a * (1.0L - b) * std::cos(p * t) +
         b * (1.0L - a) * std::cos((p + 1.0L) * t) +
         (a * b / 2.0L) * (std::cos(t) + std::cos((2.0L * p + 1.0L) * t));
}

long double block_char_defect(std::int64_t k, long double t) {
  require_even(k, "block_char_defect");
  const long double a = alpha_sq_value(k);
  const long double b = alpha_sq_value(k + 1);
  const auto p = static_cast<long double>(std::int64_t{1} << k);
  auto one_minus_cos = [t](long double z) {
    const long double s = std::sin(t * z / 2.0L);
    return 2.0L * s * s;
  };
  return a * (1.0L - b) * one_minus_cos(p) + b * (1.0L - a) * one_minus_cos(p + 1.0L) +
         (a * b / 2.0L) * (one_minus_cos(1.0L) + one_minus_cos(2.0L * p + 1.0L));
}

std::vector<std::int64_t> y_i_levels(std::int64_t i, std::int64_t n) {
  std::vector<std::int64_t> out;
  for (std::int64_t k = 2; k <= 62 && p_of(k) <= i + 1; ++k) {
    if (p_of(k) < n && params(k).d_exceeds(n)) out.push_back(k);
  }
  return out;
}

AnyPmf y_i_pmf(std::int64_t i, std::int64_t n, Mode mode) {
  if (i < 0 || n < 1) throw std::invalid_argument("y_i_pmf: need i >= 0 and n >= 1");
  const auto levels = y_i_levels(i, n);
  if (mode == Mode::exact) {
    ExactPmf acc = ExactPmf::delta(0);
    for (std::int64_t k : levels) {
      acc = convolve(acc, exact_from_points(difference_points<mpq_class>(params(k).alpha_sq.exact, p_of(k))));
    }
    return acc;
  }
  FloatPmf acc = FloatPmf::delta(0);
  for (std::int64_t k : levels) {
    acc = convolve(acc, float_from_points(difference_points<long double>(alpha_sq_value(k), p_of(k))));
  }
  return acc;
}

}  // namespace llt
