#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "llt/errors.hpp"
#include "llt/fourier.hpp"
#include "llt/gaussian.hpp"
#include "llt/lattice_pmf.hpp"

namespace llt {

/// ln phi_n(t) = sum_{k in I_n} 2(n - 2^k) log1p(-(1 - c_k(t))).
long double log_phi_n(std::int64_t n, long double t);
/// phi_n(t); equals 1 when I_n is empty.
long double phi_n(std::int64_t n, long double t);

/// sum_{k in I_n} 2(n - 2^k)(2^(k+1) + 1).
std::int64_t un_support_bound(std::int64_t n);

enum class UnRoute { automatic, exact, fourier, factorized };

struct UnOptions {
  UnRoute route = UnRoute::automatic;
  /// automatic uses the exact route when the support has at most this many points.
  std::size_t exact_cap = std::size_t{1} << 14;
  std::size_t cap = kDefaultSupportCap;
  /// factorized route drops masses below this in the per-level factors.
  long double trim = 1e-40L;
};

struct UnLaw {
  AnyPmf law;
  UnRoute route = UnRoute::automatic;
  long double renormalization_delta = 0.0L;  // Fourier route only
  long double trimmed_mass = 0.0L;           // factorized route only
};

/// Law of U_n, n >= 5.
UnLaw un_pmf(std::int64_t n, const UnOptions& opt = {});
const char* to_string(UnRoute r);

enum class GaussianChoice { limit, matched };

/// sup_x |sqrt(n) P(U_n = x) - density|; matched uses sigma^2 = var(U_n)/n.
long double llt_sup_error(std::int64_t n, GaussianChoice choice = GaussianChoice::limit,
                          const UnOptions& opt = {});
GaussianRef gaussian_for(std::int64_t n, GaussianChoice choice);

struct BoundReport {
  std::int64_t n = 0;
  std::vector<long double> grid;  // x (or t) sample points
  std::vector<long double> lhs;
  std::vector<long double> rhs;
  long double worst_ratio = 0.0L;  // max lhs / rhs
  long double fitted_constant = 0.0L;
  // Extra diagnostics.
  long double min_log_slack = 0.0L;  // min over the grid of ln rhs - ln lhs
  std::size_t resonance_points = 0;
  bool trig_step_ok = true;
};

/// x-grid: 512 log-spaced points per decade on [lo, hi], plus every integer when hi - lo <= 4096.
std::vector<long double> x_grid(long double lo, long double hi);

/// |phi_n(x / sqrt n)| against the product bound, x in [n^(1/4), pi sqrt n]; n >= 81.
/// x_grid_size is the minimum number of log-spaced points.
BoundReport check_lemma_away(std::int64_t n, std::size_t x_grid_size = 2048);
/// -ln |phi_n(x / sqrt n)| / x^2 over 1e-3 <= |x| <= n^(1/4); fitted L is its minimum.
BoundReport check_lemma_near(std::int64_t n);
/// cos(n^(-1/4)) <= 1 - 1/(4 sqrt n).
bool trig_step_holds(std::int64_t n);

struct UpsilonMoments {
  std::vector<std::int64_t> J;   // the index set used
  std::vector<std::int64_t> active;  // k in J with 2^k <= j
  long double m2 = 0.0L;         // sum 1/(k log2 k)
  long double m4 = 0.0L;         // from the explicit law
  long double m3 = 0.0L;         // from the explicit law
  long double m4_formula = 0.0L; // sum p^4 a^2 + 3 (m2^2 - sum (p^2 a)^2)
  long double sum_p4_alpha2 = 0.0L;
  bool regime = false;           // J equals J_n
  std::optional<bool> corrected_bound;  // m4 <= (sqrt n / 9) m2 + 3 m2^2, in regime only
  std::optional<bool> printed_bound;    // m4 <= (sqrt n / 9) m2 + m2^2, in regime only
};

UpsilonMoments upsilon_moments(std::int64_t j, std::int64_t n,
                               const std::optional<std::vector<std::int64_t>>& J_override = std::nullopt);

/// (1/(n sigma^2)) sum_{i=1}^{n-1} E[Y_i(n)^2 ; Y_i(n)^2 > eps^2 sigma^2 n] with sigma^2 = 2 (ln 2)^2.
long double lindeberg(std::int64_t n, long double eps);

struct NoiseSpec {
  FloatPmf z_law;
  long double second_moment = 0.0L;
  long double a_n = 0.0L;
};

/// a_n = (n / (log2 n)^(1/4))^(1/2).
long double noise_radius(std::int64_t n);
/// {-z0: q/2, 0: 1 - q, z0: q/2} with q z0^2 = second_moment and z0 = 2 ceil(sqrt(second_moment)).
NoiseSpec three_point_noise(std::int64_t n, long double second_moment);
NoiseSpec make_noise(std::int64_t n, FloatPmf z_law);

struct NoiseReport {
  FloatPmf x_law;
  long double sup_error_before = 0.0L;
  long double sup_error_after = 0.0L;
  long double tail_mass_beyond_a_n = 0.0L;  // P(|Z| >= a_n)
  long double markov_bound = 0.0L;          // E Z^2 / a_n^2
  long double peak = 0.0L;                  // sqrt(n) max_y P(Y = y)
  long double interior_drift = 0.0L;  // sup_x |sum_{|z| < a_n} P(z) g(x - z) - g(x)|
  long double budget = 0.0L;          // before + 2 (peak * markov + drift)
  long double D = 0.0L;               // (log2 n)^(1/4) E Z^2 / n
  long double r_n = 0.0L;             // sup_error_before / sqrt(n), the unscaled LLT remainder
};

NoiseReport noise_stability(const FloatPmf& y, const NoiseSpec& z, std::int64_t n,
                            const GaussianRef& g = GaussianRef::limit());

}  // namespace llt
