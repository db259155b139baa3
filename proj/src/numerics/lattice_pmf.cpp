#include "llt/lattice_pmf.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "llt/detail/compensated.hpp"
#include "llt/detail/gmp_util.hpp"

namespace llt {

const char* to_string(Mode mode) { return mode == Mode::exact ? "exact" : "float"; }

// ---------------------------------------------------------------------------
// ExactPmf

ExactPmf::ExactPmf(std::int64_t offset, std::vector<mpz_class> numerators, mpz_class denominator)
    : offset_(offset), num_(std::move(numerators)), den_(std::move(denominator)) {
  if (den_ <= 0) throw LawError("exact law: denominator must be positive");
  std::size_t first = 0;
  while (first < num_.size() && num_[first] == 0) ++first;
  if (first == num_.size()) throw LawError("exact law: all masses are zero");
  std::size_t last = num_.size() - 1;
  while (num_[last] == 0) --last;
  if (first != 0 || last + 1 != num_.size()) {
    num_ = std::vector<mpz_class>(num_.begin() + static_cast<std::ptrdiff_t>(first),
                                  num_.begin() + static_cast<std::ptrdiff_t>(last) + 1);
    offset_ += static_cast<std::int64_t>(first);
  }
  mpz_class total = 0;
  for (const auto& v : num_) {
    if (v < 0) throw LawError("exact law: negative mass");
    total += v;
  }
  if (total != den_) {
    throw LawError("exact law: masses do not sum to one");
  }
  mpz_class g = den_;
  for (const auto& v : num_) {
    if (g == 1) break;
    mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), v.get_mpz_t());
  }
  if (g != 1) {
    for (auto& v : num_) mpz_divexact(v.get_mpz_t(), v.get_mpz_t(), g.get_mpz_t());
    mpz_divexact(den_.get_mpz_t(), den_.get_mpz_t(), g.get_mpz_t());
  }
}

ExactPmf ExactPmf::delta(std::int64_t x) { return ExactPmf(x, {mpz_class(1)}, mpz_class(1)); }

ExactPmf ExactPmf::from_masses(std::int64_t offset, std::span<const mpq_class> masses) {
  mpz_class den = 1;
  for (const auto& m : masses) {
    if (sgn(m) != 0) mpz_lcm(den.get_mpz_t(), den.get_mpz_t(), m.get_den_mpz_t());
  }
  std::vector<mpz_class> num;
  num.reserve(masses.size());
  for (const auto& m : masses) {
    mpz_class v = den / m.get_den();
    v *= m.get_num();
    num.push_back(std::move(v));
  }
  return ExactPmf(offset, std::move(num), std::move(den));
}

mpq_class ExactPmf::mass(std::int64_t x) const {
  if (x < offset_ || x > max_point()) return mpq_class(0);
  mpq_class q(num_[static_cast<std::size_t>(x - offset_)], den_);
  q.canonicalize();
  return q;
}

std::vector<mpq_class> ExactPmf::masses() const {
  std::vector<mpq_class> out;
  out.reserve(num_.size());
  for (const auto& v : num_) {
    mpq_class q(v, den_);
    q.canonicalize();
    out.push_back(std::move(q));
  }
  return out;
}

mpq_class ExactPmf::moment(int order) const {
  mpz_class acc = 0;
  for (std::size_t i = 0; i < num_.size(); ++i) {
    if (num_[i] == 0) continue;
    mpz_class x = static_cast<long>(offset_ + static_cast<std::int64_t>(i));
    mpz_class xp;
    mpz_pow_ui(xp.get_mpz_t(), x.get_mpz_t(), static_cast<unsigned long>(order));
    acc += xp * num_[i];
  }
  mpq_class q(acc, den_);
  q.canonicalize();
  return q;
}

mpq_class ExactPmf::mean() const { return moment(1); }

mpq_class ExactPmf::variance() const {
  const mpq_class m = mean();
  return moment(2) - m * m;
}

bool ExactPmf::is_symmetric() const {
  if (offset_ != -max_point()) return false;
  return std::equal(num_.begin(), num_.end(), num_.rbegin());
}

ExactPmf ExactPmf::shifted(std::int64_t by) const {
  ExactPmf out = *this;
  out.offset_ += by;
  return out;
}

ExactPmf ExactPmf::dilated(std::int64_t factor) const {
  if (factor == 0) throw std::invalid_argument("dilation factor must be nonzero");
  const std::size_t n = num_.size();
  const auto step = static_cast<std::size_t>(factor > 0 ? factor : -factor);
  std::vector<mpz_class> out((n - 1) * step + 1);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t pos = factor > 0 ? i * step : (n - 1 - i) * step;
    out[pos] = num_[i];
  }
  const std::int64_t off = factor > 0 ? offset_ * factor : max_point() * factor;
  return ExactPmf(off, std::move(out), den_);
}

FloatPmf ExactPmf::to_float() const {
  std::vector<long double> m;
  m.reserve(num_.size());
  for (const auto& v : num_) m.push_back(detail::ratio_to_long_double(v, den_));
  // Exact laws sum to one; per-entry rounding stays far inside the float tolerance.
  return FloatPmf(offset_, std::move(m));
}

bool operator==(const ExactPmf& a, const ExactPmf& b) {
  return a.offset_ == b.offset_ && a.den_ == b.den_ && a.num_ == b.num_;
}

// ---------------------------------------------------------------------------
// FloatPmf

FloatPmf::FloatPmf(std::int64_t offset, std::vector<long double> masses)
    : offset_(offset), mass_(std::move(masses)) {
  std::size_t first = 0;
  while (first < mass_.size() && mass_[first] == 0.0L) ++first;
  if (first == mass_.size()) throw LawError("float law: all masses are zero");
  std::size_t last = mass_.size() - 1;
  while (mass_[last] == 0.0L) --last;
  if (first != 0 || last + 1 != mass_.size()) {
    mass_ = std::vector<long double>(mass_.begin() + static_cast<std::ptrdiff_t>(first),
                                     mass_.begin() + static_cast<std::ptrdiff_t>(last) + 1);
    offset_ += static_cast<std::int64_t>(first);
  }
  for (long double v : mass_) {
    if (!(v >= 0.0L) || !std::isfinite(v)) throw LawError("float law: negative or non-finite mass");
  }
  const long double t = total();
  if (std::fabs(t - 1.0L) > kNormTolerance) {
    throw LawError("float law: masses sum to " + std::to_string(static_cast<double>(t)));
  }
}

FloatPmf FloatPmf::delta(std::int64_t x) { return FloatPmf(x, {1.0L}); }

long double FloatPmf::mass(std::int64_t x) const {
  if (x < offset_ || x > max_point()) return 0.0L;
  return mass_[static_cast<std::size_t>(x - offset_)];
}

long double FloatPmf::total() const {
  detail::CompensatedSum s;
  for (long double v : mass_) s += v;
  return s.value();
}

long double FloatPmf::moment(int order) const {
  detail::CompensatedSum s;
  for (std::size_t i = 0; i < mass_.size(); ++i) {
    const auto x = static_cast<long double>(offset_ + static_cast<std::int64_t>(i));
    s += mass_[i] * std::pow(x, order);
  }
  return s.value();
}

long double FloatPmf::mean() const { return moment(1); }

long double FloatPmf::central_moment(int order) const {
  const long double mu = mean();
  detail::CompensatedSum s;
  for (std::size_t i = 0; i < mass_.size(); ++i) {
    const long double x = static_cast<long double>(offset_ + static_cast<std::int64_t>(i)) - mu;
    s += mass_[i] * std::pow(x, order);
  }
  return s.value();
}

FloatPmf FloatPmf::shifted(std::int64_t by) const {
  FloatPmf out = *this;
  out.offset_ += by;
  return out;
}

FloatPmf FloatPmf::dilated(std::int64_t factor) const {
  if (factor == 0) throw std::invalid_argument("dilation factor must be nonzero");
  const std::size_t n = mass_.size();
  const auto step = static_cast<std::size_t>(factor > 0 ? factor : -factor);
  std::vector<long double> out((n - 1) * step + 1, 0.0L);
  for (std::size_t i = 0; i < n; ++i) {
    out[factor > 0 ? i * step : (n - 1 - i) * step] = mass_[i];
  }
  const std::int64_t off = factor > 0 ? offset_ * factor : max_point() * factor;
  return FloatPmf(off, std::move(out));
}

// ---------------------------------------------------------------------------

Mode mode_of(const AnyPmf& p) {
  return std::holds_alternative<ExactPmf>(p) ? Mode::exact : Mode::floating;
}

FloatPmf as_float(const AnyPmf& p) {
  if (const auto* e = std::get_if<ExactPmf>(&p)) return e->to_float();
  return std::get<FloatPmf>(p);
}

long double sup_distance(const FloatPmf& a, const FloatPmf& b) {
  const std::int64_t lo = std::min(a.offset(), b.offset());
  const std::int64_t hi = std::max(a.max_point(), b.max_point());
  long double best = 0.0L;
  for (std::int64_t x = lo; x <= hi; ++x) best = std::max(best, std::fabs(a.mass(x) - b.mass(x)));
  return best;
}

long double tv_distance(const FloatPmf& a, const FloatPmf& b) {
  const std::int64_t lo = std::min(a.offset(), b.offset());
  const std::int64_t hi = std::max(a.max_point(), b.max_point());
  detail::CompensatedSum s;
  for (std::int64_t x = lo; x <= hi; ++x) s += std::fabs(a.mass(x) - b.mass(x));
  return s.value() / 2.0L;
}

}  // namespace llt
