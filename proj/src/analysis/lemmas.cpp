#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "llt/analysis.hpp"
#include "llt/construction.hpp"
#include "llt/detail/compensated.hpp"

namespace llt {

namespace {

long double log_product_bound(std::int64_t n, long double t) {
  detail::CompensatedSum s;
  const long double st = std::sin(t / 2.0L);
  const long double one_minus_cos = 2.0L * st * st;
  for (std::int64_t k : index_I(n)) {
    const long double ab = alpha_sq_value(k) * alpha_sq_value(k + 1);
    s += 2.0L * static_cast<long double>(n - (std::int64_t{1} << k)) *
         std::log1p(-(ab / 2.0L) * one_minus_cos);
  }
  return s.value();
}

void finish_ratio(BoundReport& r, const std::vector<long double>& log_lhs,
                  const std::vector<long double>& log_rhs) {
  r.worst_ratio = 0.0L;
  r.min_log_slack = INFINITY;
  for (std::size_t i = 0; i < log_lhs.size(); ++i) {
    r.lhs.push_back(std::exp(log_lhs[i]));
    r.rhs.push_back(std::exp(log_rhs[i]));
    r.worst_ratio = std::max(r.worst_ratio, std::exp(log_lhs[i] - log_rhs[i]));
    r.min_log_slack = std::min(r.min_log_slack, log_rhs[i] - log_lhs[i]);
  }
}

}  // namespace

std::vector<long double> x_grid(long double lo, long double hi) {
  if (!(lo > 0.0L) || !(hi > lo)) throw std::invalid_argument("x_grid: need 0 < lo < hi");
  const long double decades = std::log10(hi / lo);
  const auto m = static_cast<std::size_t>(std::max<long double>(2.0L, std::ceil(512.0L * decades)));
  std::vector<long double> g;
  g.reserve(m + 1);
  for (std::size_t i = 0; i <= m; ++i) {
    g.push_back(lo * std::pow(hi / lo, static_cast<long double>(i) / static_cast<long double>(m)));
  }
  g.back() = hi;
  if (hi - lo <= 4096.0L) {
    for (auto x = static_cast<std::int64_t>(std::ceil(lo)); static_cast<long double>(x) <= hi; ++x) {
      g.push_back(static_cast<long double>(x));
    }
  }
  std::sort(g.begin(), g.end());
  g.erase(std::unique(g.begin(), g.end()), g.end());
  return g;
}

bool trig_step_holds(std::int64_t n) {
  const auto nn = static_cast<long double>(n);
  return std::cos(1.0L / std::pow(nn, 0.25L)) <= 1.0L - 1.0L / (4.0L * std::sqrt(nn));
}

BoundReport check_lemma_away(std::int64_t n, std::size_t x_grid_size) {
  if (n < 81) throw std::invalid_argument("check_lemma_away: n must be >= 81");
  const long double pi = std::numbers::pi_v<long double>;
  const long double rn = std::sqrt(static_cast<long double>(n));
  const long double lo = std::pow(static_cast<long double>(n), 0.25L);
  const long double hi = pi * rn;

  std::vector<long double> xs = x_grid(lo, hi);
  if (xs.size() < x_grid_size) {
    for (std::size_t i = 0; i < x_grid_size; ++i) {
      xs.push_back(lo * std::pow(hi / lo, static_cast<long double>(i) / static_cast<long double>(x_grid_size - 1)));
    }
  }
  // Resonances t = 2 pi j / z for the block lattice steps z.
  std::size_t resonances = 0;
  for (std::int64_t k : index_I(n)) {
    const std::int64_t p = std::int64_t{1} << k;
    for (std::int64_t z : {p, p + 1, 2 * p + 1}) {
      for (std::int64_t j = 1; 2 * j <= z && j <= 64; ++j) {
        const long double x = 2.0L * pi * static_cast<long double>(j) / static_cast<long double>(z) * rn;
        if (x >= lo && x <= hi) {
          xs.push_back(x);
          ++resonances;
        }
      }
    }
  }
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());

  BoundReport r;
  r.n = n;
  r.grid = xs;
  r.resonance_points = resonances;
  std::vector<long double> log_lhs, log_rhs;
  long double c = INFINITY;
  for (long double x : xs) {
    const long double t = x / rn;
    const long double ll = log_phi_n(n, t);
    log_lhs.push_back(ll);
    log_rhs.push_back(log_product_bound(n, t));
    c = std::min(c, -ll / lo);
  }
  finish_ratio(r, log_lhs, log_rhs);
  r.fitted_constant = c;
  r.trig_step_ok = trig_step_holds(n);
  return r;
}

BoundReport check_lemma_near(std::int64_t n) {
  if (n < 5) throw std::invalid_argument("check_lemma_near: n must be >= 5");
  const long double rn = std::sqrt(static_cast<long double>(n));
  const long double hi = std::pow(static_cast<long double>(n), 0.25L);
  const long double ln2 = std::numbers::ln2_v<long double>;
  const long double gauss_l = ln2 * ln2 / 72.0L;
  BoundReport r;
  r.n = n;
  r.grid = x_grid(1e-3L, hi);
  std::vector<long double> log_lhs, log_rhs;
  long double best = INFINITY;
  for (long double x : r.grid) {
    const long double ll = log_phi_n(n, x / rn);
    log_lhs.push_back(ll);
    log_rhs.push_back(-gauss_l * x * x);
    best = std::min(best, -ll / (x * x));
  }
  finish_ratio(r, log_lhs, log_rhs);
  r.fitted_constant = best;
  return r;
}

}  // namespace llt
