#include "llt/fourier.hpp"

#include <cmath>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <string>

#include <fftw3.h>

#include "llt/detail/compensated.hpp"

namespace llt {

Complex char_fn(const FloatPmf& p, long double t) {
  detail::CompensatedSum re;
  detail::CompensatedSum im;
  const auto m = p.masses();
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (m[i] == 0.0L) continue;
    const long double x = static_cast<long double>(p.offset() + static_cast<std::int64_t>(i));
    // Reduce the phase exactly enough for long double before the trig call.
    const long double phase = std::remainder(t * x, 2.0L * std::numbers::pi_v<long double>);
    re += m[i] * std::cos(phase);
    im += m[i] * std::sin(phase);
  }
  return {re.value(), im.value()};
}

Complex char_fn(const ExactPmf& p, long double t) { return char_fn(p.to_float(), t); }

Complex char_fn(const AnyPmf& p, long double t) {
  if (const auto* e = std::get_if<ExactPmf>(&p)) return char_fn(*e, t);
  return char_fn(std::get<FloatPmf>(p), t);
}

std::vector<long double> uniform_t_grid(std::size_t m) {
  if (m < 2) throw std::invalid_argument("uniform_t_grid: need at least two points");
  const long double pi = std::numbers::pi_v<long double>;
  std::vector<long double> ts(m);
  for (std::size_t i = 0; i < m; ++i) {
    ts[i] = -pi + 2.0L * pi * static_cast<long double>(i) / static_cast<long double>(m - 1);
  }
  return ts;
}

CharGrid sample_char(const CharFunction& phi, std::span<const long double> ts, std::int64_t n_label) {
  CharGrid g;
  g.n_label = n_label;
  g.t.assign(ts.begin(), ts.end());
  for (std::size_t i = 1; i < g.t.size(); ++i) {
    if (!(g.t[i] > g.t[i - 1])) throw std::invalid_argument("sample_char: grid not increasing");
  }
  g.value.reserve(ts.size());
  for (long double t : ts) g.value.push_back(t == 0.0L ? Complex(1.0L, 0.0L) : phi(t));
  return g;
}

namespace {
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

Inversion invert_to_pmf(const CharFunction& phi, std::int64_t support_bound, std::size_t cap) {
  if (support_bound < 0) throw std::invalid_argument("invert_to_pmf: negative support bound");
  std::size_t m = 1;
  while (m < 2 * static_cast<std::size_t>(support_bound) + 2) m <<= 1U;
  check_support_cap(m, cap, "invert_to_pmf grid");

  const long double pi = std::numbers::pi_v<long double>;
  auto* buf = static_cast<fftwl_complex*>(fftwl_malloc(sizeof(fftwl_complex) * m));
  if (buf == nullptr) throw ResourceError("invert_to_pmf: allocation failed");
  fftwl_plan plan = nullptr;
  {
    std::lock_guard<std::mutex> lock(planner_mutex());
    plan = fftwl_plan_dft_1d(static_cast<int>(m), buf, buf, FFTW_FORWARD, FFTW_ESTIMATE);
  }
  for (std::size_t j = 0; j < m; ++j) {
    const long double t = -pi + 2.0L * pi * static_cast<long double>(j) / static_cast<long double>(m);
    const Complex v = phi(t);
    buf[j][0] = v.real();
    buf[j][1] = v.imag();
  }
  fftwl_execute(plan);

  const auto width = static_cast<std::size_t>(2 * support_bound + 1);
  std::vector<long double> raw(width);
  for (std::int64_t x = -support_bound; x <= support_bound; ++x) {
    const auto idx = static_cast<std::size_t>((x % static_cast<std::int64_t>(m) + static_cast<std::int64_t>(m)) %
                                              static_cast<std::int64_t>(m));
    const long double sign = (x % 2 == 0) ? 1.0L : -1.0L;
    raw[static_cast<std::size_t>(x + support_bound)] = sign * buf[idx][0] / static_cast<long double>(m);
  }
  {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftwl_destroy_plan(plan);
  }
  fftwl_free(buf);

  Inversion out{FloatPmf::delta(0)};
  out.grid_size = m;
  detail::CompensatedSum total;
  for (auto& v : raw) {
    out.most_negative = std::min(out.most_negative, v);
    if (v < 0.0L) {
      if (-v > kClipThreshold) {
        throw LawError("invert_to_pmf: negative mass " + std::to_string(static_cast<double>(v)) +
                       " exceeds clipping threshold");
      }
      v = 0.0L;
    }
    total += v;
  }
  const long double s = total.value();
  out.renormalization_delta = s - 1.0L;
  for (auto& v : raw) v /= s;
  out.law = FloatPmf(-support_bound, std::move(raw));
  return out;
}

}  // namespace llt
