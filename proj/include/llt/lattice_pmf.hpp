#pragma once

#include <cstdint>
#include <span>
#include <variant>
#include <vector>

#include <gmpxx.h>

#include "llt/errors.hpp"

namespace llt {

enum class Mode { exact, floating };

const char* to_string(Mode mode);

class FloatPmf;

/// Finitely supported law on the integers with exact rational masses.
///
/// Masses are stored over one common denominator: mass(offset + i) = numerators[i] / denominator.
/// The representation is trimmed (first and last numerators nonzero) and reduced (the gcd of all
/// numerators and the denominator is 1), so two equal laws have identical storage.
class ExactPmf {
 public:
  ExactPmf(std::int64_t offset, std::vector<mpz_class> numerators, mpz_class denominator);

  static ExactPmf delta(std::int64_t x);
  /// Builds a law from per-point rational masses; entries may be zero.
  static ExactPmf from_masses(std::int64_t offset, std::span<const mpq_class> masses);

  std::int64_t offset() const { return offset_; }
  std::int64_t max_point() const { return offset_ + static_cast<std::int64_t>(num_.size()) - 1; }
  std::size_t size() const { return num_.size(); }
  const std::vector<mpz_class>& numerators() const { return num_; }
  const mpz_class& denominator() const { return den_; }

  mpq_class mass(std::int64_t x) const;
  std::vector<mpq_class> masses() const;

  mpq_class mean() const;
  mpq_class moment(int order) const;
  mpq_class variance() const;
  bool is_symmetric() const;

  ExactPmf shifted(std::int64_t by) const;
  /// Law of factor * X for a nonzero integer factor.
  ExactPmf dilated(std::int64_t factor) const;
  FloatPmf to_float() const;

  friend bool operator==(const ExactPmf&, const ExactPmf&);

 private:
  std::int64_t offset_;
  std::vector<mpz_class> num_;
  mpz_class den_;
};

/// Finitely supported law on the integers with extended-precision masses.
/// Invariants: masses nonnegative, |sum - 1| <= 2^-40, trimmed.
class FloatPmf {
 public:
  static constexpr long double kNormTolerance = 0x1p-40L;

  FloatPmf(std::int64_t offset, std::vector<long double> masses);

  static FloatPmf delta(std::int64_t x);

  std::int64_t offset() const { return offset_; }
  std::int64_t max_point() const { return offset_ + static_cast<std::int64_t>(mass_.size()) - 1; }
  std::size_t size() const { return mass_.size(); }
  std::span<const long double> masses() const { return mass_; }
  long double mass(std::int64_t x) const;

  long double total() const;
  long double mean() const;
  long double moment(int order) const;
  long double central_moment(int order) const;
  long double variance() const { return central_moment(2); }

  FloatPmf shifted(std::int64_t by) const;
  FloatPmf dilated(std::int64_t factor) const;

 private:
  std::int64_t offset_;
  std::vector<long double> mass_;
};

using AnyPmf = std::variant<ExactPmf, FloatPmf>;

Mode mode_of(const AnyPmf& p);
FloatPmf as_float(const AnyPmf& p);

/// Largest absolute pointwise difference between two laws.
long double sup_distance(const FloatPmf& a, const FloatPmf& b);
/// Total-variation distance (half the l1 distance).
long double tv_distance(const FloatPmf& a, const FloatPmf& b);

}  // namespace llt
