#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "llt/construction.hpp"
#include "llt/convolution.hpp"
#include "llt/fourier.hpp"
#include "llt/gaussian.hpp"
#include "llt/lattice_pmf.hpp"
#include "llt/analysis.hpp"
#include "llt/pmf_json.hpp"

using namespace llt;

namespace {

ExactPmf coin() { return ExactPmf(-1, {1, 0, 1}, 2); }

ExactPmf exact(const AnyPmf& p) { return std::get<ExactPmf>(p); }

}  // namespace

TEST(LatticePmf, RejectsBadLaws) {
  EXPECT_THROW(ExactPmf(0, {1, 1}, 3), LawError);
  EXPECT_THROW(ExactPmf(0, {-1, 2}, 1), LawError);
  EXPECT_THROW(FloatPmf(0, {0.5L, 0.4L}), LawError);
  EXPECT_THROW(FloatPmf(0, {-0.1L, 1.1L}), LawError);
}

TEST(LatticePmf, CanonicalStorage) {
  const ExactPmf a(-2, {0, 2, 0, 2, 0}, 4);
  EXPECT_EQ(a.offset(), -1);
  EXPECT_EQ(a.denominator(), 2);
  EXPECT_EQ(a, coin());
  EXPECT_TRUE(a.is_symmetric());
}

TEST(Convolution, DeltaIsIdentity) {
  const auto b = exact(block_pmf(2));
  EXPECT_EQ(convolve(ExactPmf::delta(0), b), b);
  EXPECT_EQ(convolve(b, ExactPmf::delta(0)), b);
}

TEST(Convolution, CoinSquared) {
  EXPECT_EQ(convolve(coin(), coin()), ExactPmf(-2, {1, 0, 2, 0, 1}, 4));
}

TEST(Convolution, BlockSquareAtEighteenMatchesDoubleSum) {
  const auto b = exact(block_pmf(2));
  mpq_class brute = 0;
  for (std::int64_t x = b.offset(); x <= b.max_point(); ++x) brute += b.mass(x) * b.mass(18 - x);
  const auto c = convolve(b, b);
  EXPECT_EQ(c.mass(18), brute);
  const mpq_class q = b.mass(9);
  EXPECT_EQ(c.mass(18), q * q);
}

TEST(Convolution, PowerOne) { EXPECT_EQ(convolve_power(coin(), 1), coin()); }

TEST(Convolution, CoinFourthPowerIsBinomial) {
  EXPECT_EQ(convolve_power(coin(), 4), ExactPmf(-4, {1, 0, 4, 0, 6, 0, 4, 0, 1}, 16));
}

TEST(Convolution, BlockEighthPowerEqualsChain) {
  const auto b = exact(block_pmf(2));
  ExactPmf chain = b;
  for (int i = 0; i < 7; ++i) chain = convolve(chain, b);
  EXPECT_EQ(convolve_power(b, 8), chain);
}

TEST(Convolution, RejectsMixedModesAndBadPowers) {
  const AnyPmf e = coin();
  const AnyPmf f = coin().to_float();
  EXPECT_THROW(convolve(e, f), ModeError);
  EXPECT_THROW(convolve_power(coin(), 0), std::invalid_argument);
  EXPECT_THROW(convolve_power(coin(), 64, 100), ResourceError);
}

TEST(CharFn, Basics) {
  EXPECT_NEAR(std::real(char_fn(block_pmf(2), 0.0L)), 1.0L, 1e-18L);
  const auto d = char_fn(ExactPmf::delta(1), std::numbers::pi_v<long double>);
  EXPECT_NEAR(std::real(d), -1.0L, 1e-18L);
  EXPECT_NEAR(std::imag(d), 0.0L, 1e-18L);
}

TEST(CharFn, MatchesBlockClosedForm) {
  const auto v = char_fn(block_pmf(2), 0.3L);
  EXPECT_NEAR(std::real(v), block_char(2, 0.3L), 0x1p-40L);
  EXPECT_NEAR(std::imag(v), 0.0L, 0x1p-40L);
}

TEST(Inversion, ConstantGivesDelta) {
  const auto inv = invert_to_pmf([](long double) { return Complex(1.0L); }, 4);
  EXPECT_NEAR(inv.law.mass(0), 1.0L, 1e-18L);
  EXPECT_LT(sup_distance(inv.law, FloatPmf::delta(0)), 1e-18L);
}

TEST(Inversion, CosineGivesCoin) {
  const auto inv = invert_to_pmf([](long double t) { return Complex(std::cos(t)); }, 2);
  EXPECT_LT(sup_distance(inv.law, coin().to_float()), 1e-18L);
}

TEST(Inversion, PhiFiveMatchesExactLaw) {
  const auto inv = invert_to_pmf([](long double t) { return Complex(phi_n(5, t)); }, 20);
  UnOptions opt;
  opt.route = UnRoute::exact;
  const auto u = un_pmf(5, opt);
  EXPECT_LE(sup_distance(inv.law, as_float(u.law)), 1e-12L);
}

TEST(Gaussian, DeltaAtOne) {
  const auto g = GaussianRef::limit();
  const long double expect = std::fabs(1.0L - 1.0L / std::sqrt(2 * std::numbers::pi_v<long double> * g.sigma_sq()));
  EXPECT_NEAR(sup_gaussian_distance(FloatPmf::delta(0), 1, g), expect, 1e-15L);
  EXPECT_NEAR(expect, 0.593023L, 1e-6L);
}

TEST(Gaussian, DiscreteKernelIsClose) {
  const std::int64_t n = 4096;
  const auto g = GaussianRef::limit();
  const auto y = discrete_gaussian(static_cast<long double>(n) * g.sigma_sq());
  EXPECT_LT(sup_gaussian_distance(y, n, g), 1.0L / (2 * n));
}

TEST(Gaussian, ShiftByZeroIsInvariant) {
  const auto p = as_float(block_pmf(2));
  const auto g = GaussianRef::limit();
  EXPECT_EQ(sup_gaussian_distance(p.shifted(0), 1, g), sup_gaussian_distance(p, 1, g));
}

TEST(PmfJson, RoundTrip) {
  const AnyPmf e = block_pmf(2);
  EXPECT_EQ(std::get<ExactPmf>(pmf_from_json(pmf_to_json(e))), std::get<ExactPmf>(e));
  const AnyPmf f = as_float(e);
  const auto back = std::get<FloatPmf>(pmf_from_json(pmf_to_json(f)));
  EXPECT_LT(sup_distance(back, std::get<FloatPmf>(f)), 1e-16L);
}
