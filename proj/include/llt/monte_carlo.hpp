#pragma once

#include <cstdint>
#include <map>
#include <ostream>
#include <vector>

#include "llt/lattice_pmf.hpp"

namespace llt {

/// Counter-based generator: draw i of stream (seed, stream_id) is a pure function of (seed, stream_id, i).
class SeededStream {
 public:
  using result_type = std::uint64_t;
  SeededStream(std::uint64_t seed, std::uint64_t stream_id);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }
  result_type operator()();
  /// Uniform on (0, 1).
  double uniform();
  /// Independent child stream.
  SeededStream split(std::uint64_t child) const;

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_; }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

std::uint64_t splitmix64(std::uint64_t x);

/// Integer value counts.
struct Histogram {
  std::map<std::int64_t, std::uint64_t> counts;
  std::uint64_t samples = 0;

  void merge(const Histogram& other);
  FloatPmf empirical() const;
  long double mean() const;
  long double variance() const;
};

struct SamplingOptions {
  std::uint64_t samples = 0;
  unsigned threads = 1;
  /// Samples per independent sub-stream; fixes the draw layout regardless of thread count.
  std::uint64_t chunk = 1u << 16;
};

/// Empirical law of U_n from independent draws of the block variables.
Histogram sample_un(std::int64_t n, const SamplingOptions& opt, const SeededStream& s);

/// Empirical law of sum_{k=2}^{K} S_n(f_k) from fbar_k drawn on every site with a nonzero window
/// coefficient. The site count is capped at 2^26.
Histogram sample_sn_truncated(std::int64_t n, std::int64_t K, const SamplingOptions& opt,
                              const SeededStream& s);

/// Exact law of sum_{k=2}^{K} S_n(f_k) by convolving the per-site laws; small inputs only.
AnyPmf sn_truncated_law(std::int64_t n, std::int64_t K, Mode mode = Mode::exact);
/// sum_{k=2}^{K} alpha_k^2 sum_j c_{k,n}(j)^2.
long double sn_truncated_variance(std::int64_t n, std::int64_t K);

struct ChiSquare {
  long double statistic = 0.0L;
  std::size_t cells = 0;  // after pooling
  std::size_t dof = 0;
  long double critical = 0.0L;  // quantile at the requested level
  long double p_value = 0.0L;
  bool passed = false;
};

/// Pearson test against an exact law; adjacent cells pooled until each expects >= min_expected.
ChiSquare chi_square(const Histogram& h, const FloatPmf& exact, long double level = 0.999L,
                     long double min_expected = 5.0L);

/// Columns x, count, empirical_p, exact_p.
void write_histogram_csv(std::ostream& out, const Histogram& h, const FloatPmf* exact);

}  // namespace llt
