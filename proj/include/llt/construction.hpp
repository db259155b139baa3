#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <gmpxx.h>

#include "llt/errors.hpp"
#include "llt/lattice_pmf.hpp"

namespace llt {

/// alpha_k^2 = 1 / (p_k^2 k log2 k). Rational exactly when k is a power of two; otherwise the
/// exact field holds the dyadic rational equal to the long double value.
struct AlphaSq {
  std::int64_t p_sq_factor = 0;  // p_k (the square is taken symbolically)
  std::int64_t k = 0;
  long double value = 0.0L;
  mpq_class exact;
  bool rational = false;
};

struct ConstructionParams {
  std::int64_t k = 0;
  std::int64_t p = 0;  // p_k
  mpz_class d;         // d_k = 2^(k^2)
  AlphaSq alpha_sq;

  /// True when d_k > n.
  bool d_exceeds(std::int64_t n) const;
  /// d_k when it fits in an int64, otherwise nullopt.
  std::optional<std::int64_t> d_small() const;
};

/// Valid for 2 <= k <= 62; k <= 1 throws std::domain_error ("alpha undefined").
ConstructionParams params(std::int64_t k);
std::int64_t p_of(std::int64_t k);
long double alpha_sq_value(std::int64_t k);

/// {k even : 2^k < n < 2^(k^2)}.
std::vector<std::int64_t> index_I(std::int64_t n);
/// {k : 2^(k^2) > n and 81 * 16^k <= n}.
std::vector<std::int64_t> index_J(std::int64_t n);

/// {-1: a/2, 0: 1 - a, 1: a/2} with a = alpha_k^2.
AnyPmf fbar_pmf(std::int64_t k, Mode mode = Mode::exact);

/// Point masses of X_k(1) = p_k a + p_{k+1} b for independent a ~ fbar_k, b ~ fbar_{k+1}.
struct BlockTable {
  std::int64_t k = 0;
  std::vector<std::int64_t> points;  // nine support points, increasing
  std::vector<long double> masses;
};

BlockTable block_table(std::int64_t k);
/// Nine-point law of X_k(1); k must be even and >= 2.
AnyPmf block_pmf(std::int64_t k, Mode mode = Mode::exact);
/// Closed-form characteristic function of X_k(1).
long double block_char(std::int64_t k, long double t);
/// 1 - block_char(k, t), evaluated without cancellation.
long double block_char_defect(std::int64_t k, long double t);

/// Coefficients of S_n(f_k) in the basis U^j fbar_k: T(j) - T(j - d_k) where
/// T = 1_[0,n) * 1_[0,p_k).
class WindowCoeffs {
 public:
  WindowCoeffs(std::int64_t k, std::int64_t n);

  std::int64_t k() const { return k_; }
  std::int64_t n() const { return n_; }
  /// Trapezoid value T(j).
  std::int64_t trapezoid(std::int64_t j) const;
  /// c(j); d_k beyond int64 range means no overlap with the shifted copy.
  std::int64_t coeff(std::int64_t j) const;
  /// Dense profile on 0 .. d_k + n + p_k - 2; throws ResourceError above cap.
  std::vector<std::int64_t> dense(std::size_t cap = kDefaultSupportCap) const;
  /// Nonzero sites of the positive window, 0 .. n + p_k - 2.
  std::int64_t window_length() const { return n_ + p_ - 1; }
  /// Sum of c(j)^2.
  mpz_class sum_sq() const;
  /// Var(S_n(f_k)) = alpha_k^2 sum_sq.
  long double variance() const;

 private:
  std::int64_t k_, n_, p_;
  std::optional<std::int64_t> d_;
};

/// Sum of T(j)^2 for the trapezoid 1_[0,a) * 1_[0,b).
mpz_class trapezoid_sum_sq(std::int64_t a, std::int64_t b);

/// Smallest K with 2^K >= n and 8 n^2 / (2^K K log2 K) < 1e-12 n.
std::int64_t truncation_level(std::int64_t n);

struct KTerm {
  std::int64_t k = 0;
  long double value = 0.0L;
};

struct SecondMoments {
  std::int64_t n = 0;
  std::int64_t K = 0;  // truncation level
  long double var_Sn_f = 0.0L;
  long double var_ZSm = 0.0L;
  long double var_Yhat = 0.0L;
  long double var_ZLa = 0.0L;
  std::vector<KTerm> var_Ak, var_Bk, var_Ck;  // k with p_k < n < d_k
  std::vector<KTerm> var_gk;                  // k with d_k <= n
  long double var_Wn = 0.0L;                  // W_n = Y_1(n) + ... + Y_{n-1}(n)
  long double var_En = 0.0L;                  // E_n = W_n - U_n
  long double cov_En_Un = 0.0L;               // nonzero only when n - 1 = 2^k, k even
  long double var_Un = 0.0L;
  long double var_Un_closed = 0.0L;  // 2 sum (n - 2^k)(1/(k log k) + 1/((k+1) log(k+1)))
  long double tail_bound = 0.0L;     // certified bound on the omitted k > K terms
};

/// n >= 5.
SecondMoments second_moments(std::int64_t n);

/// 1/(k log2 k) + 1/((k+1) log2(k+1)) = E X_k(1)^2.
long double block_second_moment(std::int64_t k);
/// var(U_n) by the closed form.
long double var_un(std::int64_t n);

/// Law of Y_i(n) = sum over k with p_k <= i + 1 and p_k < n < d_k of p_k (V - V').
AnyPmf y_i_pmf(std::int64_t i, std::int64_t n, Mode mode = Mode::exact);
/// The k entering Y_i(n).
std::vector<std::int64_t> y_i_levels(std::int64_t i, std::int64_t n);

/// Ratio test a_{m+1}/a_m >= q for all m and, for every prefix, sum_{j<=m} a_j <= a_m / (1 - 1/q).
bool geometric_tail_check(std::span<const long double> a, long double q);

}  // namespace llt
