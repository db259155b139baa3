#include <cmath>
#include <stdexcept>

#include "llt/analysis.hpp"
#include "llt/construction.hpp"
#include "llt/convolution.hpp"
#include "llt/detail/compensated.hpp"

namespace llt {

long double log_phi_n(std::int64_t n, long double t) {
  detail::CompensatedSum s;
  for (std::int64_t k : index_I(n)) {
    const long double delta = block_char_defect(k, t);
    if (!(delta < 1.0L)) throw std::logic_error("log_phi_n: block characteristic function not positive");
    s += 2.0L * static_cast<long double>(n - (std::int64_t{1} << k)) * std::log1p(-delta);
  }
  return s.value();
}

long double phi_n(std::int64_t n, long double t) { return std::exp(log_phi_n(n, t)); }

std::int64_t un_support_bound(std::int64_t n) {
  std::int64_t b = 0;
  for (std::int64_t k : index_I(n)) {
    b += 2 * (n - (std::int64_t{1} << k)) * ((std::int64_t{1} << (k + 1)) + 1);
  }
  return b;
}

const char* to_string(UnRoute r) {
  switch (r) {
    case UnRoute::automatic: return "automatic";
    case UnRoute::exact: return "exact";
    case UnRoute::fourier: return "fourier";
    case UnRoute::factorized: return "factorized";
  }
  return "?";
}

namespace {

FloatPmf trimmed(const FloatPmf& p, long double threshold, long double& dropped) {
  std::vector<long double> m(p.masses().begin(), p.masses().end());
  for (auto& v : m) {
    if (v < threshold) {
      dropped += v;
      v = 0.0L;
    }
  }
  return FloatPmf(p.offset(), std::move(m));
}

// Convolution power with tail trimming after every product.
FloatPmf trimmed_power(const FloatPmf& p, std::int64_t m, long double threshold, std::size_t cap,
                       long double& dropped) {
  std::optional<FloatPmf> acc;
  FloatPmf base = p;
  auto e = static_cast<std::uint64_t>(m);
  while (true) {
    if (e & 1U) acc = acc ? trimmed(convolve(*acc, base, cap), threshold, dropped) : base;
    e >>= 1U;
    if (e == 0) break;
    base = trimmed(convolve(base, base, cap), threshold, dropped);
  }
  return *acc;
}

UnLaw exact_route(std::int64_t n, std::size_t cap) {
  ExactPmf acc = ExactPmf::delta(0);
  for (std::int64_t k : index_I(n)) {
    const auto block = std::get<ExactPmf>(block_pmf(k, Mode::exact));
    acc = convolve(acc, convolve_power(block, 2 * (n - (std::int64_t{1} << k)), cap), cap);
  }
  return {acc, UnRoute::exact};
}

UnLaw fourier_route(std::int64_t n, std::size_t cap) {
  auto inv = invert_to_pmf([n](long double t) { return Complex(phi_n(n, t), 0.0L); },
                           un_support_bound(n), cap);
  UnLaw out{inv.law, UnRoute::fourier};
  out.renormalization_delta = inv.renormalization_delta;
  return out;
}

// U_n = sum_k (2^k S_k + (2^k + 1) S'_k) with S_k, S'_k sums of 2(n - 2^k) copies of fbar.
UnLaw factorized_route(std::int64_t n, long double trim, std::size_t cap) {
  long double dropped = 0.0L;
  FloatPmf acc = FloatPmf::delta(0);
  for (std::int64_t k : index_I(n)) {
    const std::int64_t m = 2 * (n - (std::int64_t{1} << k));
    const auto sa = trimmed_power(std::get<FloatPmf>(fbar_pmf(k, Mode::floating)), m, trim, cap, dropped);
    const auto sb = trimmed_power(std::get<FloatPmf>(fbar_pmf(k + 1, Mode::floating)), m, trim, cap, dropped);
    const auto block = convolve(sa.dilated(std::int64_t{1} << k), sb.dilated((std::int64_t{1} << k) + 1), cap);
    acc = convolve(acc, block, cap);
  }
  UnLaw out{acc, UnRoute::factorized};
  out.trimmed_mass = dropped;
  return out;
}

}  // namespace

UnLaw un_pmf(std::int64_t n, const UnOptions& opt) {
  if (n < 5) throw std::invalid_argument("un_pmf: n must be >= 5");
  switch (opt.route) {
    case UnRoute::exact: return exact_route(n, opt.cap);
    case UnRoute::fourier: return fourier_route(n, opt.cap);
    case UnRoute::factorized: return factorized_route(n, opt.trim, opt.cap);
    case UnRoute::automatic: break;
  }
  const auto points = static_cast<std::size_t>(2 * un_support_bound(n) + 1);
  if (points <= opt.exact_cap) return exact_route(n, opt.cap);
  return factorized_route(n, opt.trim, opt.cap);
}

GaussianRef gaussian_for(std::int64_t n, GaussianChoice choice) {
  if (choice == GaussianChoice::limit) return GaussianRef::limit();
  return GaussianRef(var_un(n) / static_cast<long double>(n));
}

long double llt_sup_error(std::int64_t n, GaussianChoice choice, const UnOptions& opt) {
  return sup_gaussian_distance(un_pmf(n, opt).law, n, gaussian_for(n, choice));
}

}  // namespace llt
