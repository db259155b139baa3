#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace llt {

/// Default cap on the number of lattice points a single law may occupy.
inline constexpr std::size_t kDefaultSupportCap = std::size_t{1} << 26;

/// A computation would exceed a configured size cap (support points, cells, memory).
class ResourceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Exact and floating laws were mixed in one operation.
class ModeError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// An invariant of a probability law was violated (negative mass, bad normalization).
class LawError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

inline void check_support_cap(std::size_t points, std::size_t cap, const char* what) {
  if (points > cap) {
    throw ResourceError(std::string(what) + ": support of " + std::to_string(points) +
                        " points exceeds cap " + std::to_string(cap));
  }
}

}  // namespace llt
