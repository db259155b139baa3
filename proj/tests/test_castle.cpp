#include <gtest/gtest.h>

#include "llt/castle.hpp"

using namespace llt::castle;

namespace {

std::vector<mpq_class> q(std::initializer_list<const char*> v) {
  std::vector<mpq_class> out;
  for (const char* s : v) out.emplace_back(s);
  for (auto& x : out) x.canonicalize();
  return out;
}

}  // namespace

TEST(Castle, MinimalTrivialXi) {
  const auto c = build_synthetic_castle(1, 1, 0);
  EXPECT_TRUE(audit(c).ok());
  EXPECT_EQ(c.xi_mass, q({"1"}));
}

TEST(Castle, AuditSeedSeven) {
  const auto c = build_synthetic_castle(2, 2, 7);
  const auto a = audit(c);
  EXPECT_TRUE(a.mass_balance);
  EXPECT_TRUE(a.independence);
  EXPECT_TRUE(a.bijective_top);
  EXPECT_EQ(4 * c.width[B] + 5 * c.width[F], 1);
}

TEST(Castle, AuditCatchesBrokenSplit) {
  auto c = build_synthetic_castle(2, 2, 7);
  std::swap(c.rungs[B][0].labels[0], c.rungs[B][0].labels[1]);
  if (c.xi_mass[0] != c.xi_mass[1]) {
    EXPECT_FALSE(audit(c).independence);
  }
  c = build_synthetic_castle(2, 2, 7);
  c.width[F] += mpq_class(1, 1000);
  EXPECT_FALSE(audit(c).mass_balance);
}

TEST(Coding, DegenerateMarginal) {
  const auto c = build_synthetic_castle(2, 3, 1);
  const auto s = code_level(c, q({"1"}), 2);
  EXPECT_TRUE(verify_identities(c, s).all());
  const auto w = window_law(c, s, 5);
  ASSERT_EQ(w.size(), 1u);
  EXPECT_EQ(w[0], 1);
}

TEST(Coding, BinaryExample) {
  CastleOptions o;
  o.l = 2;
  o.seed = 7;
  o.xi_weights = q({"1/4", "1/4", "1/2"});
  const auto c = build_synthetic_castle(o);
  const auto P = q({"2/3", "1/3"});
  const auto s = code_level(c, P, 2);
  // word (1, 0) has lexicographic index 2
  EXPECT_EQ(window_law(c, s, 2, 0)[2], mpq_class(1, 18));
  for (int d = 0; d < 3; ++d) {
    const auto w = window_law(c, s, 2, d);
    for (std::size_t i = 0; i < 4; ++i) EXPECT_EQ(w[i], c.xi_mass[d] * P[i / 2] * P[i % 2]) << d << " " << i;
  }
  const auto all = window_law(c, s, 2);
  for (std::size_t i = 0; i < 4; ++i) EXPECT_EQ(all[i], P[i / 2] * P[i % 2]);
}

TEST(Coding, MassPreserved) {
  const auto c = build_synthetic_castle(2, 3, 9);
  const auto s = code_level(c, q({"1/5", "3/10", "1/2"}), 2);
  mpq_class top = 0;
  for (const auto& m : s.cell_mass) top += m;
  EXPECT_EQ(top, c.width[B] + c.width[F]);
  for (const auto& t : s.top_tables) {
    mpq_class sum = 0;
    for (const auto& p : t.p) sum += p;
    EXPECT_EQ(sum, 1);
  }
  EXPECT_TRUE(audit(c).ok());
}

TEST(Coding, RejectsBadInput) {
  const auto c = build_synthetic_castle(2, 2, 1);
  EXPECT_THROW(code_level(c, q({"1/2", "1/3"}), 2), llt::LawError);
  EXPECT_THROW(code_level(c, q({"1/2", "1/2"}), 3), std::invalid_argument);
}

TEST(Verify, MinimalCastle) {
  const auto c = build_synthetic_castle(1, 2, 3);
  EXPECT_TRUE(verify_identities(c, code_level(c, q({"1/2", "1/2"}), 1)).all());
}

TEST(Verify, RandomCastles) {
  for (int i = 0; i < 30; ++i) {
    const int l = 1 + i % 3;
    const auto c = build_synthetic_castle(l, 1 + i % 4, 500 + static_cast<std::uint64_t>(i));
    const auto P = (i / 3) % 2 ? q({"1/6", "1/3", "1/2"}) : q({"3/7", "4/7"});
    const auto r = verify_identities(c, code_level(c, P, l));
    EXPECT_TRUE(r.all()) << i;
    EXPECT_FALSE(r.witness.has_value());
  }
}

TEST(Verify, RefinementInvariance) {
  const auto c = build_synthetic_castle(2, 3, 21);
  const auto s = code_level(c, q({"1/3", "2/3"}), 2);
  const auto r1 = verify_identities(c, s, 1);
  const auto r3 = verify_identities(c, s, 3);
  EXPECT_TRUE(r1.all());
  EXPECT_TRUE(r3.all());
  EXPECT_EQ(r1.checks, r3.checks);
}

TEST(Verify, CorruptionDetected) {
  const auto c = build_synthetic_castle(2, 2, 13);
  auto s = code_level(c, q({"1/3", "2/3"}), 2);
  corrupt(s, 0, 1, 2, mpq_class(1, 1000000));
  const auto r = verify_identities(c, s);
  EXPECT_FALSE(r.main);
  ASSERT_TRUE(r.witness.has_value());
  bool main_witness = false;
  for (const auto& w : r.failures) {
    EXPECT_NE(w.lhs, w.rhs);
    if (w.identity == "main") {
      main_witness = true;
      EXPECT_EQ(w.word.size(), 2u);
    }
  }
  EXPECT_TRUE(main_witness);
}

TEST(Realize, TwoBinaryLevels) {
  const LevelSpec a{2, q({"1/2", "1/2"}), 2}, b{2, q({"1/3", "2/3"}), 2};
  const auto r = realize_array({a, b}, 5);
  EXPECT_TRUE(r.factorizes);
  EXPECT_TRUE(r.castles_independent);
  EXPECT_EQ(r.equalities, 16u);
  EXPECT_EQ(r.joint[0], mpq_class(1, 4) * mpq_class(1, 9));
}

TEST(Realize, OneLevelIsCodeLevel) {
  const LevelSpec a{3, q({"1/6", "1/3", "1/2"}), 2};
  const auto r = realize_array({a}, 8);
  ASSERT_EQ(r.levels.size(), 1u);
  EXPECT_EQ(r.joint, window_law(r.levels[0].castle, r.levels[0].symbols, 2));
  EXPECT_TRUE(r.factorizes);
}

TEST(Realize, ThreeTinyLevels) {
  const LevelSpec a{2, q({"1/4", "3/4"}), 1};
  try {
    const auto r = realize_array({a, a, a}, 1);
    EXPECT_TRUE(r.factorizes);
    EXPECT_EQ(r.equalities, 8u);
  } catch (const llt::ResourceError&) {
    SUCCEED();
  }
}

TEST(Castle, JsonHasStringMasses) {
  const auto c = build_synthetic_castle(1, 2, 4);
  const auto s = code_level(c, q({"1/2", "1/2"}), 1);
  const auto jc = to_json(c), js = to_json(s);
  EXPECT_TRUE(jc["width"]["B"].is_string());
  EXPECT_EQ(mpq_class(jc["width"]["B"].get<std::string>()), c.width[B]);
  EXPECT_TRUE(js["top_cells"][0]["mass"].is_string());
  EXPECT_EQ(parse_marginal("0.25, 3/4"), q({"1/4", "3/4"}));
}
