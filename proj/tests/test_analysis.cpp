#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "llt/analysis.hpp"
#include "llt/construction.hpp"
#include "llt/fourier.hpp"
#include "llt/gaussian.hpp"

using namespace llt;

namespace {

UnLaw route(std::int64_t n, UnRoute r) {
  UnOptions opt;
  opt.route = r;
  return un_pmf(n, opt);
}

}  // namespace

TEST(CharPhi, Basics) {
  EXPECT_EQ(phi_n(5, 0.0L), 1.0L);
  for (long double t : {0.1L, 0.7L, 2.5L}) EXPECT_EQ(phi_n(100, -t), phi_n(100, t));
  const auto u = route(5, UnRoute::exact);
  EXPECT_NEAR(std::real(char_fn(u.law, 1.0L)), phi_n(5, 1.0L), 1e-12L);
}

TEST(UnLaw, FiveAtEighteen) {
  const auto u = std::get<ExactPmf>(route(5, UnRoute::exact).law);
  const mpq_class a2 = params(2).alpha_sq.exact / 2, a3 = params(3).alpha_sq.exact / 2;
  EXPECT_EQ(u.mass(18), a2 * a2 * a3 * a3);
  mpq_class total = 0;
  for (const auto& m : u.masses()) total += m;
  EXPECT_EQ(total, 1);
  EXPECT_EQ(u.max_point(), un_support_bound(5));
}

TEST(UnLaw, RoutesAgree) {
  for (std::int64_t n : {5, 10, 20}) {
    const auto e = as_float(route(n, UnRoute::exact).law);
    EXPECT_LE(sup_distance(e, as_float(route(n, UnRoute::fourier).law)), 1e-12L) << n;
    EXPECT_LE(sup_distance(e, as_float(route(n, UnRoute::factorized).law)), 1e-15L) << n;
  }
}

TEST(UnLaw, VarianceMatchesMoments) {
  for (std::int64_t n : {100, 1000}) {
    const auto u = un_pmf(n);
    const long double v = as_float(u.law).variance();
    EXPECT_NEAR(v, second_moments(n).var_Un, 1e-9L * v) << n;
  }
}

TEST(Llt, FixtureAndMatchedGaussian) {
  const long double e1 = llt_sup_error(256);
  EXPECT_GT(e1, 0);
  EXPECT_NEAR(e1, 10.6514327433L, 1e-8L);
  EXPECT_LT(llt_sup_error(256, GaussianChoice::matched), e1);
  EXPECT_LT(llt_sup_error(4096, GaussianChoice::matched), llt_sup_error(4096));
}

TEST(LemmaAway, N4096) {
  const auto r = check_lemma_away(4096);
  EXPECT_GE(r.grid.size(), 2048u);
  EXPECT_GT(r.resonance_points, 0u);
  EXPECT_GE(r.min_log_slack, 0.0L);
  EXPECT_GT(r.fitted_constant, 0.0L);
  EXPECT_TRUE(r.trig_step_ok);
  for (std::int64_t n = 2; n < 5000; n += 7) EXPECT_TRUE(trig_step_holds(n)) << n;
}

TEST(LemmaNear, N4096) {
  const auto r = check_lemma_near(4096);
  EXPECT_GT(r.fitted_constant, 0.0L);
  EXPECT_GT(r.fitted_constant, std::numbers::ln2_v<long double> * std::numbers::ln2_v<long double> / 72);
  for (long double x : r.grid) EXPECT_GT(x, 0.0L);
}

TEST(Upsilon, SingleLevel) {
  const auto u = upsilon_moments(1 << 8, std::int64_t{1} << 40, std::vector<std::int64_t>{7});
  EXPECT_NEAR(u.m2, 1.0L / (7 * std::log2(7.0L)), 1e-18L);
  EXPECT_EQ(u.m3, 0.0L);
}

TEST(Upsilon, FourthCumulant) {
  const auto u = upsilon_moments(1 << 9, std::int64_t{1} << 40, std::vector<std::int64_t>{7, 8});
  EXPECT_EQ(u.m3, 0.0L);
  EXPECT_LE(u.m4 - 3 * u.m2 * u.m2, u.sum_p4_alpha2);
  EXPECT_NEAR(u.m4, u.m4_formula, 1e-12L * u.m4);
}

TEST(Upsilon, RegimeFixture) {
  const auto u = upsilon_moments(1024, std::int64_t{1} << 49);
  EXPECT_TRUE(u.regime);
  EXPECT_NEAR(u.m2, 0.106821319209L, 1e-11L);
  EXPECT_NEAR(u.m4, 36611.0987870L, 1e-6L);
  ASSERT_TRUE(u.corrected_bound.has_value());
  EXPECT_TRUE(*u.corrected_bound);
}

TEST(Lindeberg, Examples) {
  EXPECT_EQ(lindeberg(512, 100.0L), 0.0L);
  const long double l1 = lindeberg(512, 0.1L);
  EXPECT_GT(l1, 0.0L);
  EXPECT_NEAR(l1, 0.716594L, 1e-6L);
}

TEST(Noise, IdentityNoise) {
  const std::int64_t n = 1024;
  const auto g = GaussianRef::limit();
  const auto y = as_float(un_pmf(n).law);
  const auto r = noise_stability(y, make_noise(n, FloatPmf::delta(0)), n, g);
  EXPECT_EQ(r.sup_error_after, r.sup_error_before);
}

TEST(Noise, MarkovAndBudget) {
  const std::int64_t n = 65536;
  const auto g = GaussianRef::limit();
  const auto y = discrete_gaussian(static_cast<long double>(n) * g.sigma_sq());
  const auto z = three_point_noise(n, static_cast<long double>(n) / std::sqrt(std::log2(static_cast<long double>(n))));
  EXPECT_EQ(z.second_moment, 16384.0L);
  const auto r = noise_stability(y, z, n, g);
  EXPECT_LE(r.tail_mass_beyond_a_n, r.markov_bound);
  EXPECT_LE(r.sup_error_after, r.budget);
  // Scaled form of the three-constant example.
  EXPECT_LE(r.sup_error_after, 3 * (r.sup_error_before + r.peak * r.D / std::pow(std::log2(65536.0L), 0.25L)));
}
