// Acceptance criteria 1-11: one PASS/FAIL line each.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <string>

#include "llt/analysis.hpp"
#include "llt/castle.hpp"
#include "llt/construction.hpp"
#include "llt/gaussian.hpp"
#include "llt/monte_carlo.hpp"

using namespace llt;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

int failures = 0;

void criterion(int id, const char* name, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (!o.pass) ++failures;
  std::printf("criterion %2d %-28s %s  %s  [%.2f s]\n", id, name, o.pass ? "PASS" : "FAIL", o.detail.c_str(), sec);
  std::fflush(stdout);
}

double elapsed(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Outcome exact_path() {
  const auto t0 = std::chrono::steady_clock::now();
  long double worst = 0;
  for (std::int64_t n : {5, 10, 20, 50}) {
    UnOptions e, f;
    e.route = UnRoute::exact;
    f.route = UnRoute::fourier;
    worst = std::max(worst, sup_distance(as_float(un_pmf(n, e).law), as_float(un_pmf(n, f).law)));
  }
  const double sec = elapsed(t0);
  return {worst <= 1e-12L && sec < 60, fmt("max sup-distance %.3Le (<= 1e-12), %.2f s (< 60 s)", worst, sec)};
}

Outcome moment_identities() {
  bool ok = true;
  std::string d;
  for (std::int64_t n : {100, 1000, 10000}) {
    const long double v = as_float(un_pmf(n).law).variance();
    const long double closed = second_moments(n).var_Un_closed;
    const long double rel = std::fabs(v - closed) / closed;
    ok = ok && rel <= 1e-9L;
    d += fmt("n=%lld rel %.2Le; ", static_cast<long long>(n), rel);
    if (n == 1000) {
      ok = ok && std::fabs(v - 745.6L) <= 0.1L && std::fabs(v - 745.629207924L) <= 1e-6L;
      d += fmt("var(1000)=%.9Lf; ", v);
    }
  }
  return {ok, d + "(rel <= 1e-9, 745.6 +- 0.1)"};
}

Outcome variance_trend() {
  const long double limit = GaussianRef::limit().sigma_sq();
  const long double r3 = second_moments(1000).var_Un / 1000, r6 = second_moments(1000000).var_Un / 1000000;
  const bool fixtures = std::fabs(r3 - 0.745629207924326511L) <= 1e-12L && std::fabs(r6 - 0.748977761356074988L) <= 1e-12L;
  const bool ok = r3 > 0 && r6 > 0 && r3 < limit && r6 < limit && r6 > r3 && fixtures;
  return {ok, fmt("var/n: 1e3 %.12Lf, 1e6 %.12Lf, limit %.6Lf, fixtures %s", r3, r6, limit, fixtures ? "ok" : "off")};
}

Outcome llt_trend() {
  const long double e8 = llt_sup_error(1 << 8, GaussianChoice::matched);
  const long double e12 = llt_sup_error(1 << 12, GaussianChoice::matched);
  const long double e16 = llt_sup_error(1 << 16, GaussianChoice::matched);
  const bool fixtures = std::fabs(e8 - 10.5294971684L) <= 1e-8L && std::fabs(e12 - 2.5978074995L) <= 1e-8L &&
                        std::fabs(e16 - 23.309L) <= 1e-3L;
  const bool ok = e8 > e12 && e12 > e16 && e16 < e8 / 2;
  return {ok, fmt("matched sup error 2^8 %.6Lf, 2^12 %.6Lf, 2^16 %.6Lf (need strict decrease, 2^16 < %.4Lf); "
                  "fixtures %s",
                  e8, e12, e16, e8 / 2, fixtures ? "ok" : "off")};
}

Outcome lemma_away() {
  bool ok = true;
  std::string d;
  for (std::int64_t n : {1 << 8, 1 << 12, 1 << 16}) {
    const auto r = check_lemma_away(n, 2048);
    ok = ok && r.grid.size() >= 2048 && r.resonance_points > 0 && r.min_log_slack >= 0 && r.fitted_constant > 0 &&
         r.trig_step_ok;
    d += fmt("n=%lld pts %zu res %zu slack %.2Le c %.3Le; ", static_cast<long long>(n), r.grid.size(),
             r.resonance_points, r.min_log_slack, r.fitted_constant);
  }
  return {ok, d};
}

Outcome lemma_near() {
  const long double target = std::numbers::ln2_v<long double> * std::numbers::ln2_v<long double> / 72;
  const auto a = check_lemma_near(1 << 12), b = check_lemma_near(1 << 16);
  return {a.fitted_constant > target && b.fitted_constant > target,
          fmt("L(2^12) %.5Lf, L(2^16) %.5Lf (> %.5Lf)", a.fitted_constant, b.fitted_constant, target)};
}

Outcome lindeberg_decay() {
  const long double a = lindeberg(1 << 9, 0.1L), b = lindeberg(1 << 11, 0.1L), c = lindeberg(1 << 13, 0.1L);
  const bool fixtures = std::fabs(a - 0.716594L) <= 1e-6L && std::fabs(b - 0.867285L) <= 1e-6L &&
                        std::fabs(c - 0.980095L) <= 1e-6L;
  return {a > b && b > c, fmt("2^9 %.6Lf, 2^11 %.6Lf, 2^13 %.6Lf (need strict decrease); fixtures %s", a, b, c,
                              fixtures ? "ok" : "off")};
}

Outcome castles() {
  const auto t0 = std::chrono::steady_clock::now();
  SeededStream rng(20240601, 8);
  int passed = 0, detected = 0;
  std::string witness;
  for (int i = 0; i < 100; ++i) {
    const int l = 1 + static_cast<int>(rng() % 3);
    const int A = 2 + static_cast<int>(rng() % 2);
    const int atoms = 1 + static_cast<int>(rng() % 3);
    std::vector<mpq_class> P;
    int total = 0;
    std::vector<int> w(static_cast<std::size_t>(A));
    for (auto& v : w) total += (v = 1 + static_cast<int>(rng() % 9));
    for (int v : w) {
      P.emplace_back(v, total);
      P.back().canonicalize();
    }
    const auto c = castle::build_synthetic_castle(l, atoms, rng());
    auto s = castle::code_level(c, P, l);
    const auto r = castle::verify_identities(c, s);
    if (r.all() && castle::audit(c).ok()) ++passed;
    castle::corrupt(s, static_cast<int>(rng() % s.top_tables.size()), 0, 1, mpq_class(1, 1000000));
    const auto bad = castle::verify_identities(c, s);
    if (!bad.main && bad.witness) {
      ++detected;
      if (witness.empty()) {
        for (const auto& f : bad.failures) {
          if (f.identity != "main") continue;
          witness = "main [" + f.cell + "] word (";
          for (std::size_t k = 0; k < f.word.size(); ++k) witness += (k ? " " : "") + std::to_string(f.word[k]);
          witness += ")";
        }
      }
    }
  }
  const double sec = elapsed(t0);
  return {passed == 100 && detected == 100 && sec < 120,
          fmt("%d/100 verified, %d/100 corruptions detected, first witness %s, %.1f s (< 120 s)", passed, detected,
              witness.c_str(), sec)};
}

Outcome realization() {
  const castle::LevelSpec a{2, {mpq_class(1, 2), mpq_class(1, 2)}, 2}, b{2, {mpq_class(1, 3), mpq_class(2, 3)}, 2};
  const auto r = castle::realize_array({a, b}, 99);
  return {r.factorizes && r.equalities == 16 && r.castles_independent,
          fmt("%zu exact equalities, factorizes %s", r.equalities, r.factorizes ? "yes" : "no")};
}

Outcome noise() {
  const std::int64_t n = 1 << 16;
  const auto g = GaussianRef::limit();
  const auto y = discrete_gaussian(static_cast<long double>(n) * g.sigma_sq());
  const auto z = three_point_noise(n, static_cast<long double>(n) / std::sqrt(std::log2(static_cast<long double>(n))));
  const auto r = noise_stability(y, z, n, g);
  return {r.sup_error_after <= r.budget && r.tail_mass_beyond_a_n <= r.markov_bound,
          fmt("after %.5Le <= budget %.5Le (before %.2Le, Markov %.4Lf, drift %.5Lf, E Z^2 %.0Lf)", r.sup_error_after,
              r.budget, r.sup_error_before, r.markov_bound, r.interior_drift, z.second_moment)};
}

Outcome monte_carlo() {
  SamplingOptions one, many;
  one.samples = many.samples = 1000000;
  one.threads = 1;
  many.threads = 8;
  const SeededStream s(314159, 0);
  const auto h1 = sample_un(100, one, s);
  const auto h8 = sample_un(100, many, s);
  const auto chi = chi_square(h1, as_float(un_pmf(100).law), 0.999L);
  const bool same = h1.counts == h8.counts && h1.samples == h8.samples;
  return {chi.passed && same, fmt("chi2 %.2Lf < %.2Lf (dof %zu, p %.3Lf), 1 vs 8 threads identical: %s",
                                  chi.statistic, chi.critical, chi.dof, chi.p_value, same ? "yes" : "no")};
}

}  // namespace

int main() {
  criterion(1, "exact-path equivalence", exact_path);
  criterion(2, "moment identities", moment_identities);
  criterion(3, "variance trend", variance_trend);
  criterion(4, "LLT trend", llt_trend);
  criterion(5, "lemma away from origin", lemma_away);
  criterion(6, "lemma near origin", lemma_near);
  criterion(7, "Lindeberg decay", lindeberg_decay);
  criterion(8, "castle identities", castles);
  criterion(9, "triangular-array realization", realization);
  criterion(10, "noise stability", noise);
  criterion(11, "Monte Carlo", monte_carlo);
  std::printf("%d of 11 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
