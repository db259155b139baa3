#include "llt/gaussian.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "llt/detail/compensated.hpp"

namespace llt {

GaussianRef::GaussianRef(long double sigma_sq) : sigma_sq_(sigma_sq) {
  if (!(sigma_sq > 0.0L) || !std::isfinite(sigma_sq)) {
    throw std::invalid_argument("GaussianRef: variance must be positive");
  }
}

GaussianRef GaussianRef::limit() {
  const long double ln2 = std::numbers::ln2_v<long double>;
  return GaussianRef(2.0L * ln2 * ln2);
}

long double GaussianRef::scaled_density(long double x, std::int64_t n) const {
  const long double v = static_cast<long double>(n) * sigma_sq_;
  return std::exp(-x * x / (2.0L * v)) /
         std::sqrt(2.0L * std::numbers::pi_v<long double> * sigma_sq_);
}

long double sup_gaussian_distance(const FloatPmf& p, std::int64_t n, const GaussianRef& g) {
  if (n < 1) throw std::invalid_argument("sup_gaussian_distance: n must be positive");
  const long double rn = std::sqrt(static_cast<long double>(n));
  const auto w = static_cast<std::int64_t>(
      std::ceil(10.0L * std::sqrt(static_cast<long double>(n) * g.sigma_sq())));
  long double best = 0.0L;
  auto visit = [&](std::int64_t x) {
    const long double d = std::fabs(rn * p.mass(x) - g.scaled_density(static_cast<long double>(x), n));
    best = std::max(best, d);
  };
  for (std::int64_t x = -w; x <= w; ++x) visit(x);
  const auto m = p.masses();
  for (std::size_t i = 0; i < m.size(); ++i) {
    const std::int64_t x = p.offset() + static_cast<std::int64_t>(i);
    if (x >= -w && x <= w) continue;
    visit(x);
  }
  return best;
}

long double sup_gaussian_distance(const AnyPmf& p, std::int64_t n, const GaussianRef& g) {
  return sup_gaussian_distance(as_float(p), n, g);
}

FloatPmf discrete_gaussian(long double variance) {
  if (!(variance > 0.0L)) throw std::invalid_argument("discrete_gaussian: variance must be positive");
  // exp(-x^2/(2v)) < 2^-80 once x^2 > 160 ln2 v.
  const auto w = static_cast<std::int64_t>(
      std::ceil(std::sqrt(160.0L * std::numbers::ln2_v<long double> * variance))) + 1;
  std::vector<long double> m(static_cast<std::size_t>(2 * w + 1));
  detail::CompensatedSum total;
  for (std::int64_t x = -w; x <= w; ++x) {
    const long double v = std::exp(-static_cast<long double>(x) * static_cast<long double>(x) /
                                   (2.0L * variance));
    m[static_cast<std::size_t>(x + w)] = v;
    total += v;
  }
  const long double s = total.value();
  for (auto& v : m) v /= s;
  return FloatPmf(-w, std::move(m));
}

}  // namespace llt
