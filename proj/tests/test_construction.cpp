#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "llt/construction.hpp"
#include "llt/convolution.hpp"

using namespace llt;

namespace {

using Ks = std::vector<std::int64_t>;

ExactPmf exact(const AnyPmf& p) { return std::get<ExactPmf>(p); }

}  // namespace

TEST(Params, LevelTwo) {
  const auto p = params(2);
  EXPECT_EQ(p.p, 4);
  EXPECT_EQ(p.d, 16);
  EXPECT_TRUE(p.alpha_sq.rational);
  EXPECT_EQ(p.alpha_sq.exact, mpq_class(1, 32));
}

TEST(Params, LevelFour) {
  const auto p = params(4);
  EXPECT_EQ(p.p, 16);
  EXPECT_EQ(p.d, 65536);
  EXPECT_EQ(p.alpha_sq.exact, mpq_class(1, 2048));
  EXPECT_EQ(p.alpha_sq.value, 1.0L / 2048);
}

TEST(Params, OddLevelAndErrors) {
  EXPECT_EQ(p_of(3), 5);
  EXPECT_EQ(p_of(5), 17);
  EXPECT_FALSE(params(3).alpha_sq.rational);
  EXPECT_NEAR(alpha_sq_value(3), 1.0L / (25 * 3 * std::log2(3.0L)), 1e-20L);
  try {
    params(1);
    FAIL();
  } catch (const std::domain_error& e) {
    EXPECT_NE(std::string(e.what()).find("alpha undefined"), std::string::npos);
  }
  EXPECT_THROW(params(63), std::out_of_range);
}

TEST(IndexSets, I) {
  EXPECT_EQ(index_I(1000), (Ks{4, 6, 8}));
  EXPECT_EQ(index_I(16), Ks{});
  EXPECT_EQ(index_I(5), Ks{2});
}

TEST(IndexSets, J) {
  EXPECT_EQ(index_J(1000), Ks{});
  EXPECT_EQ(index_J(std::int64_t{1} << 36), Ks{7});
  EXPECT_EQ(index_J(std::int64_t{1} << 49), (Ks{8, 9, 10}));
}

TEST(Laws, FbarLevelTwo) {
  EXPECT_EQ(exact(fbar_pmf(2)), ExactPmf(-1, {1, 62, 1}, 64));
  const auto f = exact(fbar_pmf(2));
  EXPECT_EQ(f.mean(), 0);
  EXPECT_EQ(f.moment(2), mpq_class(1, 32));
}

TEST(Laws, BlockLevelTwo) {
  const auto b = exact(block_pmf(2));
  std::vector<std::int64_t> support;
  for (std::int64_t x = b.offset(); x <= b.max_point(); ++x) {
    if (b.mass(x) != 0) support.push_back(x);
  }
  EXPECT_EQ(support, (Ks{-9, -5, -4, -1, 0, 1, 4, 5, 9}));
  const mpq_class a2 = params(2).alpha_sq.exact, a3 = params(3).alpha_sq.exact;
  EXPECT_EQ(b.mass(9), a2 * a3 / 4);
  EXPECT_EQ(b.mass(-9), a2 * a3 / 4);
  EXPECT_EQ(b.mass(9), mpq_class("2482901267759212861/37778931862957161709568"));
  mpq_class total = 0;
  for (const auto& m : b.masses()) total += m;
  EXPECT_EQ(total, 1);
  EXPECT_EQ(b.mass(0), (1 - a2) * (1 - a3));

  // Brute-force marginalization of the product law of (fbar_2, fbar_3) under x = 4 u + 5 v.
  const auto u = exact(fbar_pmf(2)), v = exact(fbar_pmf(3));
  mpq_class zero = 0;
  for (int i = -1; i <= 1; ++i) {
    for (int j = -1; j <= 1; ++j) {
      if (4 * i + 5 * j == 0) zero += u.mass(i) * v.mass(j);
    }
  }
  EXPECT_EQ(b.mass(0), zero);
  EXPECT_THROW(block_pmf(3), std::invalid_argument);
}

TEST(Laws, BlockCharBound) {
  EXPECT_NEAR(block_char(2, 0.0L), 1.0L, 1e-18L);
  for (std::int64_t k : {2, 4, 6, 8}) {
    const long double a = alpha_sq_value(k) * alpha_sq_value(k + 1);
    for (int i = 0; i <= 400; ++i) {
      const long double t = -std::numbers::pi_v<long double> + i * std::numbers::pi_v<long double> / 200;
      EXPECT_LE(block_char(k, t), 1.0L - (a / 2) * (1.0L - std::cos(t)) + 0x1p-40L) << k << " " << t;
    }
  }
}

TEST(Window, LevelTwoNThree) {
  const WindowCoeffs w(2, 3);
  const std::vector<std::int64_t> head{1, 2, 3, 3, 2, 1};
  for (int j = 0; j < 6; ++j) {
    EXPECT_EQ(w.coeff(j), head[static_cast<std::size_t>(j)]);
    EXPECT_EQ(w.coeff(16 + j), -head[static_cast<std::size_t>(j)]);
  }
  const auto dense = w.dense();
  std::int64_t sum = 0;
  for (auto c : dense) sum += c;
  EXPECT_EQ(sum, 0);
  EXPECT_EQ(w.sum_sq(), 56);
  EXPECT_EQ(w.variance(), 1.75L);
}

TEST(Window, ClosedFormMatchesLoop) {
  for (std::int64_t a = 1; a < 12; ++a) {
    for (std::int64_t b = a; b < 20; ++b) {
      mpz_class brute = 0;
      for (std::int64_t j = 0; j <= a + b - 2; ++j) {
        std::int64_t t = 0;
        for (std::int64_t i = 0; i < a; ++i) t += (j - i >= 0 && j - i < b);
        brute += t * t;
      }
      EXPECT_EQ(trapezoid_sum_sq(a, b), brute) << a << " " << b;
    }
  }
}

TEST(Moments, NThousand) {
  const auto m = second_moments(1000);
  ASSERT_FALSE(m.var_Bk.empty());
  EXPECT_EQ(m.var_Bk.front().k, 4);
  EXPECT_NEAR(m.var_Bk.front().value, 985.0L / 8, 1e-12L);
  EXPECT_NEAR(m.var_Un, 745.6L, 0.1L);
  EXPECT_NEAR(m.var_Un, 745.629207924L, 1e-8L);
  EXPECT_NEAR(m.var_Un, m.var_Un_closed, 1e-9L * m.var_Un);
  EXPECT_NEAR(m.var_Sn_f, m.var_ZSm + m.var_Yhat + m.var_ZLa, 1e-12L * m.var_Sn_f);
  EXPECT_NEAR(m.var_Wn, 746.0915L, 1e-3L);
  EXPECT_EQ(m.cov_En_Un, 0.0L);
  EXPECT_EQ(m.K, 45);
  EXPECT_NEAR(var_un(1000), 745.629207924L, 1e-8L);
}

TEST(Moments, DecompositionAcrossN) {
  for (std::int64_t n : {5, 17, 100, 257, 4097, 65537}) {
    const auto m = second_moments(n);
    EXPECT_NEAR(m.var_Sn_f, m.var_ZSm + m.var_Yhat + m.var_ZLa, 1e-12L * m.var_Sn_f) << n;
    EXPECT_NEAR(m.var_Un, m.var_Un_closed, 1e-12L * m.var_Un) << n;
    EXPECT_NEAR(m.var_Wn, m.var_Un + m.var_En + 2 * m.cov_En_Un, 1e-12L * m.var_Wn) << n;
  }
}

TEST(YLaws, Examples) {
  const auto y = exact(y_i_pmf(3, 10));
  EXPECT_EQ(y.mass(8), mpq_class(1, 4096));
  EXPECT_EQ(y.mean(), 0);
  EXPECT_EQ(exact(y_i_pmf(0, 10)), ExactPmf::delta(0));
}

TEST(GeometricTail, Examples) {
  std::vector<long double> pow2, fast, flat(6, 1.0L);
  for (int k = 0; k < 20; ++k) pow2.push_back(std::ldexp(1.0L, k));
  for (int k = 2; k <= 6; ++k) fast.push_back(std::ldexp(1.0L, k * k) / (k * std::log2(static_cast<long double>(k))));
  EXPECT_TRUE(geometric_tail_check(pow2, 2));
  long double s = 0;
  for (auto v : pow2) s += v;
  EXPECT_LE(s, 2 * pow2.back());
  EXPECT_TRUE(geometric_tail_check(fast, 2));
  EXPECT_FALSE(geometric_tail_check(flat, 2));
}
