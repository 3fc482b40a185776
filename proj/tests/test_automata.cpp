#include "algca/automaton.hpp"
#include "algca/error.hpp"

#include <gtest/gtest.h>

#include <map>
#include <random>
#include <set>

using namespace algca;

namespace {

const GroupSpec z2 = GroupSpec::cyclic(2);
const GroupSpec z3 = GroupSpec::cyclic(3);
const GroupSpec z4 = GroupSpec::cyclic(4);

CellularAutomaton scalar_ca(const GroupSpec& a, std::map<int, std::int64_t> coeffs) {
  return CellularAutomaton::linear(LaurentPoly::scalar(a, coeffs));
}

CellularAutomaton and_rule() {
  return CellularAutomaton::from_function(z2, {0, 1}, [](std::span<const Letter> w) { return w[0] & w[1]; });
}

// Direct evaluation of a scalar linear rule on a window.
Word oracle_apply(const std::map<int, std::int64_t>& coeffs, std::int64_t m, const Word& w, int r, int s) {
  Word out;
  for (std::size_t j = 0; j + static_cast<std::size_t>(s - r) < w.size(); ++j) {
    std::int64_t v = 0;
    for (const auto& [u, c] : coeffs) v += c * w[j + static_cast<std::size_t>(u - r)];
    out.push_back(static_cast<Letter>(((v % m) + m) % m));
  }
  return out;
}

// Number of preimage words of w under apply_window, by enumeration.
std::size_t count_preimages(const CellularAutomaton& f, const Word& w) {
  const std::uint64_t q = f.alphabet().order();
  const std::size_t len = w.size() + f.width() - 1;
  std::size_t count = 0;
  for (std::uint64_t c = 0; c < checked_power(q, len); ++c)
    if (apply_window(f, unpack_word(q, c, len)) == w) ++count;
  return count;
}

}  // namespace

TEST(Automata, ApplyWindowExamples) {
  const auto f = scalar_ca(z2, {{0, 1}, {1, 1}});
  EXPECT_EQ(apply_window(f, Word{0, 1, 1}), (Word{1, 0}));
  EXPECT_EQ(apply_window(f, Word{0, 0, 0, 0}), (Word{0, 0, 0}));
  const auto g = scalar_ca(z4, {{0, 1}, {1, 1}, {2, 2}});
  EXPECT_EQ(apply_window(g, Word{1, 2, 3, 0}), (Word{1, 1}));
  EXPECT_THROW(apply_window(g, Word{1, 2}), ShapeError);
}

TEST(Automata, ApplyWindowMatchesOracle) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    const std::int64_t m = 2 + static_cast<std::int64_t>(rng() % 5);
    const GroupSpec a = GroupSpec::cyclic(m);
    const int r = -static_cast<int>(rng() % 2);
    const int s = static_cast<int>(rng() % 3);
    std::map<int, std::int64_t> coeffs;
    for (int u = r; u <= s; ++u) coeffs[u] = static_cast<std::int64_t>(rng() % static_cast<std::uint64_t>(m));
    coeffs[r] = 1;
    coeffs[s] = m - 1;
    const auto f = CellularAutomaton(a, LinearRule{LaurentPoly::scalar(a, coeffs)}, {r, s});
    Word w(8);
    for (auto& x : w) x = static_cast<Letter>(rng() % static_cast<std::uint64_t>(m));
    EXPECT_EQ(apply_window(f, w), oracle_apply(coeffs, m, w, r, s));
    const auto table = CellularAutomaton::table(a, {r, s}, f.materialize_table());
    EXPECT_EQ(apply_window(table, w), apply_window(f, w));
  }
}

TEST(Automata, ApplyPeriodicExamples) {
  const auto f = scalar_ca(z2, {{0, 1}, {1, 1}});
  EXPECT_EQ(apply_periodic(f, PeriodicConfig(z2, {0, 1})), PeriodicConfig::constant(z2, 1));
  const auto g = scalar_ca(z2, {{0, 1}, {2, 1}});
  EXPECT_TRUE(apply_periodic(g, PeriodicConfig(z2, {0, 1, 0, 1})).is_zero());
  const auto h = CellularAutomaton::affine(LaurentPoly::scalar(z3, {{0, 1}, {1, 2}}), 2);
  EXPECT_EQ(apply_periodic(h, PeriodicConfig::zero(z3)), PeriodicConfig::constant(z3, 2));
}

TEST(Automata, ShiftCommutation) {
  std::mt19937_64 rng(11);
  const auto f = CellularAutomaton::from_function(z3, {-1, 1}, [](std::span<const Letter> w) {
    return static_cast<Letter>((w[0] * w[2] + w[1]) % 3);
  });
  for (int trial = 0; trial < 30; ++trial) {
    Word w(1 + rng() % 6);
    for (auto& x : w) x = static_cast<Letter>(rng() % 3);
    const PeriodicConfig x(z3, w);
    EXPECT_EQ(apply_periodic(f, config_shift(x, 1)), config_shift(apply_periodic(f, x), 1));
  }
}

TEST(Automata, SmallestNeighborhood) {
  const auto dummy = CellularAutomaton::from_function(z2, {0, 2}, [](std::span<const Letter> w) {
    return static_cast<Letter>(w[0] ^ w[1]);
  });
  EXPECT_EQ(smallest_neighborhood(dummy).neighborhood(), (Neighborhood{0, 1}));
  EXPECT_TRUE(is_trivial(CellularAutomaton::identity(z2)));
  EXPECT_FALSE(is_trivial(scalar_ca(z2, {{0, 1}, {1, 1}})));
  const auto stored_zero = scalar_ca(z3, {{0, 1}, {2, 3}});
  EXPECT_EQ(smallest_neighborhood(stored_zero).neighborhood(), (Neighborhood{0, 0}));
}

TEST(Automata, PermutativityExamples) {
  EXPECT_EQ(permutativity(scalar_ca(z2, {{0, 1}, {1, 1}})), (Permutativity{true, true}));
  EXPECT_EQ(permutativity(scalar_ca(z4, {{0, 1}, {1, 2}})), (Permutativity{true, false}));
  EXPECT_EQ(permutativity_by_table(scalar_ca(z4, {{0, 1}, {1, 2}})), (Permutativity{true, false}));
  EXPECT_FALSE(permutativity(and_rule()).left);
}

TEST(Automata, LinearPermutativityAgreesWithTable) {
  // Every linear rule over Z/2 x Z/2 on [0, 1].
  const GroupSpec a({2, 2});
  for (int m0 = 0; m0 < 16; ++m0)
    for (int m1 = 0; m1 < 16; ++m1) {
      IntMatrix f0(2, 2), f1(2, 2);
      f0 << (m0 & 1), (m0 >> 1) & 1, (m0 >> 2) & 1, (m0 >> 3) & 1;
      f1 << (m1 & 1), (m1 >> 1) & 1, (m1 >> 2) & 1, (m1 >> 3) & 1;
      const std::map<int, Endomorphism> terms{{0, Endomorphism(a, f0)}, {1, Endomorphism(a, f1)}};
      const LaurentPoly p(a, terms);
      if (p.is_zero()) continue;
      const auto f = CellularAutomaton::linear(p);
      EXPECT_EQ(permutativity(f), permutativity_by_table(f)) << p.to_string();
    }
}

TEST(Automata, BipermutativeBalance) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    const std::int64_t m = trial % 2 ? 3 : 2;
    const GroupSpec a = GroupSpec::cyclic(m);
    const auto f = scalar_ca(a, {{0, 1}, {1, static_cast<std::int64_t>(rng() % static_cast<std::uint64_t>(m))},
                                 {2, m - 1}});
    for (std::size_t len = 1; len <= 3; ++len) {
      Word w(len);
      for (auto& x : w) x = static_cast<Letter>(rng() % static_cast<std::uint64_t>(m));
      EXPECT_EQ(count_preimages(f, w), checked_power(a.order(), 2));
    }
  }
}

TEST(Automata, CompositionAgreesWithNestedApplication) {
  std::mt19937_64 rng(9);
  const auto f = scalar_ca(z3, {{-1, 1}, {0, 2}});
  const auto g = CellularAutomaton::from_function(z3, {0, 1}, [](std::span<const Letter> w) {
    return static_cast<Letter>((w[0] * w[0] + w[1]) % 3);
  });
  const auto fg = compose(f, g);
  EXPECT_EQ(fg.neighborhood(), (Neighborhood{-1, 1}));
  for (int trial = 0; trial < 100; ++trial) {
    Word w(3 + rng() % 10);
    for (auto& x : w) x = static_cast<Letter>(rng() % 3);
    EXPECT_EQ(apply_window(fg, w), apply_window(f, apply_window(g, w)));
  }
  // Polynomial product for linear rules.
  const auto h = scalar_ca(z3, {{0, 1}, {2, 1}});
  EXPECT_EQ(as_laurent(compose(f, h)), as_laurent(f) * as_laurent(h));
}

TEST(Automata, AffineComposition) {
  const auto f = CellularAutomaton::affine(LaurentPoly::scalar(z4, {{0, 1}, {1, 3}}), 1);
  const auto g = CellularAutomaton::affine(LaurentPoly::scalar(z4, {{0, 2}, {1, 1}}), 3);
  const auto fg = compose(f, g);
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 50; ++trial) {
    Word w(6);
    for (auto& x : w) x = static_cast<Letter>(rng() % 4);
    EXPECT_EQ(apply_window(fg, w), apply_window(f, apply_window(g, w)));
  }
}

TEST(Automata, PowersAndShifts) {
  const auto f = scalar_ca(z2, {{0, 1}, {1, 1}});
  EXPECT_EQ(as_laurent(power(f, 2)), LaurentPoly::scalar(z2, {{0, 1}, {2, 1}}));
  EXPECT_EQ(as_laurent(power(f, 1)), as_laurent(f));
  EXPECT_EQ(as_laurent(with_shift(f, 0)), as_laurent(f));
  const auto g = scalar_ca(z4, {{0, 1}, {1, 1}, {2, 2}});
  EXPECT_EQ(as_laurent(power(g, 2)), LaurentPoly::scalar(z4, {{0, 1}, {1, 2}, {2, 1}}));
  const auto shifted = with_shift(f, -1);
  EXPECT_EQ(shifted.neighborhood(), (Neighborhood{-1, 0}));
  EXPECT_EQ(apply_window(shifted, Word{0, 1, 1}), apply_window(f, Word{0, 1, 1}));
}

TEST(Automata, LaurentRoundTrip) {
  const auto p = LaurentPoly::scalar(z3, {{-1, 1}, {1, 1}});
  const auto f = from_laurent(p);
  EXPECT_EQ(f.neighborhood(), (Neighborhood{-1, 1}));
  EXPECT_EQ(as_laurent(f), p);
  EXPECT_EQ(as_laurent(scalar_ca(z2, {{0, 1}, {1, 1}})).to_string(), LaurentPoly::scalar(z2, {{0, 1}, {1, 1}}).to_string());
  EXPECT_THROW(as_laurent(and_rule()), PreconditionError);
}

TEST(Automata, EndomorphismDetection) {
  const auto f = scalar_ca(z3, {{0, 1}, {1, 2}});
  const auto table = CellularAutomaton::table(z3, f.neighborhood(), f.materialize_table());
  EXPECT_TRUE(is_endomorphism(table));
  EXPECT_EQ(as_laurent(to_linear(table)), as_laurent(f));
  EXPECT_FALSE(is_endomorphism(and_rule()));
}

TEST(Automata, SurjectivityAgainstPreimageOracle) {
  // Oracle: every word of length <= 5 has a preimage.
  auto oracle = [](const CellularAutomaton& f) {
    const std::uint64_t q = f.alphabet().order();
    for (std::size_t len = 1; len <= 5; ++len)
      for (std::uint64_t c = 0; c < checked_power(q, len); ++c)
        if (count_preimages(f, unpack_word(q, c, len)) == 0) return false;
    return true;
  };
  const std::vector<CellularAutomaton> cases{
      scalar_ca(z2, {{0, 1}, {1, 1}}), and_rule(), CellularAutomaton::shift(z2, 1),
      scalar_ca(z4, {{0, 2}, {1, 2}}), scalar_ca(z4, {{0, 1}, {1, 2}}),
      CellularAutomaton::from_function(z2, {0, 2}, [](std::span<const Letter> w) {
        return static_cast<Letter>((w[0] + w[1] + w[2]) >= 2);
      })};
  for (const auto& f : cases) {
    const auto report = surjectivity(f);
    EXPECT_EQ(report.surjective, oracle(f)) << f.describe();
    EXPECT_EQ(report.balanced, report.surjective);
    EXPECT_GT(report.bound_used, 0u);
  }
  EXPECT_FALSE(is_surjective(and_rule()));
  EXPECT_TRUE(is_surjective(CellularAutomaton::shift(z2, 1)));
}

TEST(Automata, CylinderPreimages) {
  const auto f = scalar_ca(z2, {{0, 1}, {1, 1}});
  const auto pre0 = cylinder_preimage(f, {0, {0}});
  EXPECT_EQ(pre0, (std::vector<Cylinder>{{0, {0, 0}}, {0, {1, 1}}}));
  const auto pre01 = cylinder_preimage(f, {0, {0, 1}});
  EXPECT_EQ(pre01, (std::vector<Cylinder>{{0, {0, 0, 1}}, {0, {1, 1, 0}}}));
  const auto g = scalar_ca(z3, {{-1, 1}, {1, 2}});
  const Cylinder c{4, {2, 0, 1}};
  const auto pre = cylinder_preimage(g, c);
  EXPECT_EQ(pre.size(), 9u);
  std::set<Word> distinct;
  for (const auto& p : pre) {
    EXPECT_EQ(p.offset, 3);
    EXPECT_EQ(apply_window(g, p.word), c.word);
    distinct.insert(p.word);
  }
  EXPECT_EQ(distinct.size(), pre.size());
}
