#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>

#include <boost/math/distributions/chi_squared.hpp>

#include "llt/construction.hpp"
#include "llt/convolution.hpp"
#include "llt/detail/compensated.hpp"
#include "llt/monte_carlo.hpp"

namespace llt {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

SeededStream::SeededStream(std::uint64_t seed, std::uint64_t stream_id)
    : seed_(seed), stream_(stream_id), key_(splitmix64(seed ^ splitmix64(stream_id))) {}

SeededStream::result_type SeededStream::operator()() {
  return splitmix64(key_ ^ splitmix64(counter_++));
}

double SeededStream::uniform() {
  return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1p-53;
}

SeededStream SeededStream::split(std::uint64_t child) const {
  return SeededStream(seed_, splitmix64(stream_ + 0x632BE59BD9B4E019ULL * (child + 1)));
}

void Histogram::merge(const Histogram& other) {
  for (const auto& [x, c] : other.counts) counts[x] += c;
  samples += other.samples;
}

FloatPmf Histogram::empirical() const {
  if (samples == 0) throw LawError("histogram: no samples");
  const std::int64_t lo = counts.begin()->first;
  const std::int64_t hi = counts.rbegin()->first;
  std::vector<long double> m(static_cast<std::size_t>(hi - lo + 1), 0.0L);
  for (const auto& [x, c] : counts) {
    m[static_cast<std::size_t>(x - lo)] = static_cast<long double>(c) / static_cast<long double>(samples);
  }
  return FloatPmf(lo, std::move(m));
}

long double Histogram::mean() const {
  detail::CompensatedSum s;
  for (const auto& [x, c] : counts) s += static_cast<long double>(x) * static_cast<long double>(c);
  return s.value() / static_cast<long double>(samples);
}

long double Histogram::variance() const {
  const long double mu = mean();
  detail::CompensatedSum s;
  for (const auto& [x, c] : counts) {
    const long double d = static_cast<long double>(x) - mu;
    s += d * d * static_cast<long double>(c);
  }
  return s.value() / static_cast<long double>(samples - 1);
}

namespace {

// Index of the next success after position pos for Bernoulli(a) trials.
std::int64_t next_hit(SeededStream& rng, long double log_fail, std::int64_t pos) {
  const long double g = std::floor(std::log(static_cast<long double>(rng.uniform())) / log_fail);
  if (g > 4e18L) return std::numeric_limits<std::int64_t>::max();
  return pos + 1 + static_cast<std::int64_t>(g);
}

// Sum of m independent fbar draws with nonzero probability a.
std::int64_t fbar_sum(SeededStream& rng, long double log_fail, std::int64_t m) {
  std::int64_t s = 0;
  for (std::int64_t pos = next_hit(rng, log_fail, -1); pos < m; pos = next_hit(rng, log_fail, pos)) {
    s += (rng() >> 63) ? 1 : -1;
  }
  return s;
}

template <class Draw>
Histogram run_chunks(const SamplingOptions& opt, const SeededStream& s, Draw draw) {
  if (opt.samples == 0) throw std::invalid_argument("sampling: samples must be >= 1");
  if (opt.chunk == 0) throw std::invalid_argument("sampling: chunk must be >= 1");
  const std::uint64_t chunks = (opt.samples + opt.chunk - 1) / opt.chunk;
  std::vector<Histogram> parts(chunks);
  std::atomic<std::uint64_t> next{0};
  auto worker = [&]() {
    for (std::uint64_t c = next++; c < chunks; c = next++) {
      SeededStream rng = s.split(c);
      const std::uint64_t count = std::min(opt.chunk, opt.samples - c * opt.chunk);
      Histogram& h = parts[c];
      for (std::uint64_t i = 0; i < count; ++i) ++h.counts[draw(rng)];
      h.samples = count;
    }
  };
  const unsigned threads = std::max(1u, std::min<unsigned>(opt.threads, static_cast<unsigned>(chunks)));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  Histogram out;
  for (const auto& h : parts) out.merge(h);
  return out;
}

struct SiteLevel {
  long double log_fail = 0.0L;
  std::vector<std::int64_t> coeffs;  // nonzero window coefficients
};

std::vector<SiteLevel> site_levels(std::int64_t n, std::int64_t K) {
  if (K < 2) throw std::invalid_argument("sample_sn_truncated: K must be >= 2");
  if (n < 1) throw std::invalid_argument("sample_sn_truncated: n must be >= 1");
  constexpr std::size_t kSiteCap = std::size_t{1} << 26;
  std::vector<SiteLevel> out;
  std::size_t total = 0;
  for (std::int64_t k = 2; k <= K; ++k) {
    const WindowCoeffs w(k, n);
    const auto d = params(k).d_small();
    const std::int64_t len = w.window_length();
    const std::size_t sites = (d && *d < len) ? static_cast<std::size_t>(*d + len)
                                               : 2 * static_cast<std::size_t>(len);
    total += sites;
    check_support_cap(total, kSiteCap, "sample_sn_truncated sites");
    SiteLevel lv;
    lv.log_fail = std::log1p(-alpha_sq_value(k));
    if (d && *d < len) {
      for (std::int64_t j = 0; j < *d + len; ++j) {
        if (const auto c = w.coeff(j); c != 0) lv.coeffs.push_back(c);
      }
    } else {
      for (std::int64_t j = 0; j < len; ++j) lv.coeffs.push_back(w.trapezoid(j));
      for (std::int64_t j = 0; j < len; ++j) lv.coeffs.push_back(-w.trapezoid(j));
    }
    out.push_back(std::move(lv));
  }
  return out;
}

}  // namespace

Histogram sample_un(std::int64_t n, const SamplingOptions& opt, const SeededStream& s) {
  if (n < 5) throw std::invalid_argument("sample_un: n must be >= 5");
  struct Block {
    std::int64_t scale;
    std::int64_t m;
    long double log_fail_a, log_fail_b;
  };
  std::vector<Block> blocks;
  for (std::int64_t k : index_I(n)) {
    blocks.push_back({std::int64_t{1} << k, 2 * (n - (std::int64_t{1} << k)),
                      std::log1p(-alpha_sq_value(k)), std::log1p(-alpha_sq_value(k + 1))});
  }
  return run_chunks(opt, s, [&blocks](SeededStream& rng) {
    std::int64_t u = 0;
    for (const auto& b : blocks) {
      u += b.scale * fbar_sum(rng, b.log_fail_a, b.m);
      u += (b.scale + 1) * fbar_sum(rng, b.log_fail_b, b.m);
    }
    return u;
  });
}

Histogram sample_sn_truncated(std::int64_t n, std::int64_t K, const SamplingOptions& opt,
                              const SeededStream& s) {
  const auto levels = site_levels(n, K);
  return run_chunks(opt, s, [&levels](SeededStream& rng) {
    std::int64_t v = 0;
    for (const auto& lv : levels) {
      const auto m = static_cast<std::int64_t>(lv.coeffs.size());
      for (std::int64_t pos = next_hit(rng, lv.log_fail, -1); pos < m; pos = next_hit(rng, lv.log_fail, pos)) {
        v += (rng() >> 63) ? lv.coeffs[static_cast<std::size_t>(pos)] : -lv.coeffs[static_cast<std::size_t>(pos)];
      }
    }
    return v;
  });
}

AnyPmf sn_truncated_law(std::int64_t n, std::int64_t K, Mode mode) {
  const auto levels = site_levels(n, K);
  AnyPmf acc = mode == Mode::exact ? AnyPmf(ExactPmf::delta(0)) : AnyPmf(FloatPmf::delta(0));
  std::int64_t k = 2;
  for (const auto& lv : levels) {
    std::map<std::int64_t, std::int64_t> multiplicity;
    for (std::int64_t c : lv.coeffs) ++multiplicity[c < 0 ? -c : c];
    const AnyPmf base = fbar_pmf(k, mode);
    for (const auto& [c, count] : multiplicity) {
      AnyPmf scaled = mode == Mode::exact ? AnyPmf(std::get<ExactPmf>(base).dilated(c))
                                          : AnyPmf(std::get<FloatPmf>(base).dilated(c));
      acc = convolve(acc, convolve_power(scaled, count));
    }
    ++k;
  }
  return acc;
}

long double sn_truncated_variance(std::int64_t n, std::int64_t K) {
  detail::CompensatedSum s;
  for (std::int64_t k = 2; k <= K; ++k) s += WindowCoeffs(k, n).variance();
  return s.value();
}

ChiSquare chi_square(const Histogram& h, const FloatPmf& exact, long double level, long double min_expected) {
  if (h.samples == 0) throw std::invalid_argument("chi_square: empty histogram");
  const auto total = static_cast<long double>(h.samples);
  std::int64_t lo = exact.offset();
  std::int64_t hi = exact.max_point();
  if (!h.counts.empty()) {
    lo = std::min(lo, h.counts.begin()->first);
    hi = std::max(hi, h.counts.rbegin()->first);
  }
  std::vector<std::pair<long double, long double>> pools;  // expected, observed
  long double e_acc = 0.0L;
  long double o_acc = 0.0L;
  auto it = h.counts.begin();
  for (std::int64_t x = lo; x <= hi; ++x) {
    e_acc += total * exact.mass(x);
    if (it != h.counts.end() && it->first == x) {
      o_acc += static_cast<long double>(it->second);
      ++it;
    }
    if (e_acc >= min_expected) {
      pools.emplace_back(e_acc, o_acc);
      e_acc = 0.0L;
      o_acc = 0.0L;
    }
  }
  if (pools.empty()) {
    pools.emplace_back(e_acc, o_acc);
  } else {
    pools.back().first += e_acc;
    pools.back().second += o_acc;
  }
  ChiSquare r;
  r.cells = pools.size();
  detail::CompensatedSum stat;
  for (const auto& [e, o] : pools) stat += (o - e) * (o - e) / e;
  r.statistic = stat.value();
  r.dof = r.cells > 1 ? r.cells - 1 : 1;
  const boost::math::chi_squared_distribution<double> dist(static_cast<double>(r.dof));
  r.critical = boost::math::quantile(dist, static_cast<double>(level));
  r.p_value = boost::math::cdf(boost::math::complement(dist, static_cast<double>(r.statistic)));
  r.passed = r.statistic <= r.critical;
  return r;
}

void write_histogram_csv(std::ostream& out, const Histogram& h, const FloatPmf* exact) {
  out << "x,count,empirical_p,exact_p\n";
  out.precision(17);
  for (const auto& [x, c] : h.counts) {
    out << x << ',' << c << ','
        << static_cast<double>(static_cast<long double>(c) / static_cast<long double>(h.samples)) << ',';
    if (exact != nullptr) out << static_cast<double>(exact->mass(x));
    out << '\n';
  }
}

}  // namespace llt
