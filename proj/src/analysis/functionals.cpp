#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <stdexcept>

#include "llt/analysis.hpp"
#include "llt/construction.hpp"
#include "llt/convolution.hpp"
#include "llt/detail/compensated.hpp"
#include "llt/detail/gmp_util.hpp"

namespace llt {

UpsilonMoments upsilon_moments(std::int64_t j, std::int64_t n,
                               const std::optional<std::vector<std::int64_t>>& J_override) {
  if (j < 1 || n < 2) throw std::invalid_argument("upsilon_moments: need j >= 1 and n >= 2");
  UpsilonMoments r;
  const auto jn = index_J(n);
  r.J = J_override ? *J_override : jn;
  std::sort(r.J.begin(), r.J.end());
  r.regime = r.J == jn;
  for (std::int64_t k : r.J) {
    if (k < 2) throw std::domain_error("upsilon_moments: k must be >= 2");
    if (k < 62 && (std::int64_t{1} << k) <= j) r.active.push_back(k);
  }

  ExactPmf law = ExactPmf::delta(0);
  detail::CompensatedSum m2, p4a2, sq;
  for (std::int64_t k : r.active) {
    const long double pa = static_cast<long double>(p_of(k)) * static_cast<long double>(p_of(k)) *
                           alpha_sq_value(k);
    m2 += 1.0L / (static_cast<long double>(k) * std::log2(static_cast<long double>(k)));
    p4a2 += pa * static_cast<long double>(p_of(k)) * static_cast<long double>(p_of(k));
    sq += pa * pa;
    law = convolve(law, std::get<ExactPmf>(fbar_pmf(k, Mode::exact)).dilated(p_of(k)));
  }
  r.m2 = m2.value();
  r.sum_p4_alpha2 = p4a2.value();
  r.m4_formula = r.sum_p4_alpha2 + 3.0L * (r.m2 * r.m2 - sq.value());
  r.m3 = detail::to_long_double(law.moment(3));
  r.m4 = detail::to_long_double(law.moment(4));
  if (r.regime && !r.J.empty()) {
    const long double lead = std::sqrt(static_cast<long double>(n)) / 9.0L * r.m2;
    r.corrected_bound = r.m4 <= lead + 3.0L * r.m2 * r.m2;
    r.printed_bound = r.m4 <= lead + r.m2 * r.m2;
  }
  return r;
}

long double lindeberg(std::int64_t n, long double eps) {
  if (n < 5) throw std::invalid_argument("lindeberg: n must be >= 5");
  if (!(eps > 0.0L)) throw std::invalid_argument("lindeberg: eps must be positive");
  const long double ln2 = std::numbers::ln2_v<long double>;
  const long double sigma_sq = 2.0L * ln2 * ln2;
  const long double threshold = eps * eps * sigma_sq * static_cast<long double>(n);

  // Y_i(n) depends on i only through its level set; group equal sets.
  std::map<std::vector<std::int64_t>, std::pair<std::int64_t, std::int64_t>> groups;  // first i, count
  for (std::int64_t i = 1; i <= n - 1; ++i) {
    auto [it, fresh] = groups.try_emplace(y_i_levels(i, n), i, 0);
    ++it->second.second;
  }

  detail::CompensatedSum total;
  for (const auto& [levels, group] : groups) {
    const auto [first, count] = group;
    if (levels.empty()) continue;
    const auto law = std::get<FloatPmf>(y_i_pmf(first, n, Mode::floating));
    const auto m = law.masses();
    detail::CompensatedSum part;
    for (std::size_t idx = 0; idx < m.size(); ++idx) {
      const auto y = static_cast<long double>(law.offset() + static_cast<std::int64_t>(idx));
      if (y * y > threshold) part += y * y * m[idx];
    }
    total += static_cast<long double>(count) * part.value();
  }
  return total.value() / (static_cast<long double>(n) * sigma_sq);
}

long double noise_radius(std::int64_t n) {
  const auto nn = static_cast<long double>(n);
  return std::sqrt(nn / std::pow(std::log2(nn), 0.25L));
}

NoiseSpec make_noise(std::int64_t n, FloatPmf z_law) {
  NoiseSpec s{std::move(z_law)};
  s.second_moment = s.z_law.moment(2);
  s.a_n = noise_radius(n);
  return s;
}

NoiseSpec three_point_noise(std::int64_t n, long double second_moment) {
  if (!(second_moment > 0.0L)) return make_noise(n, FloatPmf::delta(0));
  const auto z0 = 2 * static_cast<std::int64_t>(std::ceil(std::sqrt(second_moment)));
  const long double q = second_moment / (static_cast<long double>(z0) * static_cast<long double>(z0));
  std::vector<long double> m(static_cast<std::size_t>(2 * z0 + 1), 0.0L);
  m.front() = q / 2.0L;
  m.back() = q / 2.0L;
  m[static_cast<std::size_t>(z0)] = 1.0L - q;
  return make_noise(n, FloatPmf(-z0, std::move(m)));
}

NoiseReport noise_stability(const FloatPmf& y, const NoiseSpec& z, std::int64_t n, const GaussianRef& g) {
  NoiseReport r{convolve(y, z.z_law)};
  const long double rn = std::sqrt(static_cast<long double>(n));
  r.sup_error_before = sup_gaussian_distance(y, n, g);
  r.sup_error_after = sup_gaussian_distance(r.x_law, n, g);
  r.r_n = r.sup_error_before / rn;

  const auto zm = z.z_law.masses();
  detail::CompensatedSum tail;
  std::vector<std::pair<std::int64_t, long double>> inner;
  for (std::size_t i = 0; i < zm.size(); ++i) {
    if (zm[i] == 0.0L) continue;
    const std::int64_t v = z.z_law.offset() + static_cast<std::int64_t>(i);
    if (std::fabs(static_cast<long double>(v)) >= z.a_n) {
      tail += zm[i];
    } else {
      inner.emplace_back(v, zm[i]);
    }
  }
  r.tail_mass_beyond_a_n = tail.value();
  r.markov_bound = z.second_moment / (z.a_n * z.a_n);

  long double peak = 0.0L;
  for (long double v : y.masses()) peak = std::max(peak, v);
  r.peak = rn * peak;

  const auto w = static_cast<std::int64_t>(std::ceil(10.0L * std::sqrt(static_cast<long double>(n) * g.sigma_sq())));
  const std::int64_t lo = std::min(-w, r.x_law.offset());
  const std::int64_t hi = std::max(w, r.x_law.max_point());
  long double drift = 0.0L;
  for (std::int64_t x = lo; x <= hi; ++x) {
    detail::CompensatedSum s;
    for (const auto& [v, p] : inner) s += p * g.scaled_density(static_cast<long double>(x - v), n);
    drift = std::max(drift, std::fabs(s.value() - g.scaled_density(static_cast<long double>(x), n)));
  }
  r.interior_drift = drift;
  r.budget = r.sup_error_before + 2.0L * (r.peak * r.markov_bound + r.interior_drift);
  r.D = std::pow(std::log2(static_cast<long double>(n)), 0.25L) * z.second_moment / static_cast<long double>(n);
  return r;
}

}  // namespace llt
