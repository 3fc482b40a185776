#include "algca/error.hpp"
#include "algca/measure.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <random>

using namespace algca;

namespace {

const GroupSpec z2 = GroupSpec::cyclic(2);
const GroupSpec z4 = GroupSpec::cyclic(4);

CellularAutomaton id_plus_sigma() { return CellularAutomaton::linear(LaurentPoly::scalar(z2, {{0, 1}, {1, 1}})); }

MeasurePtr haar_even_z4() { return MeasureSpec::haar(z4, letterwise_subgroup(z4, {0, 2})); }

std::vector<Word> all_words(std::uint64_t q, std::size_t len) {
  std::vector<Word> out;
  for (std::uint64_t c = 0; c < checked_power(q, len); ++c) out.push_back(unpack_word(q, c, len));
  return out;
}

// A zoo covering every variant.
std::vector<MeasurePtr> zoo() {
  const auto f = id_plus_sigma();
  const auto coin = MeasureSpec::bernoulli(z2, {Rational(3, 4), Rational(1, 4)});
  const auto suite = counterexample_suite();
  const auto kernel = MeasureSpec::haar(z2, LinearKernelShift{LaurentPoly::scalar(z2, {{0, 1}, {1, 1}, {2, 1}})});
  return {
      MeasureSpec::uniform(z2),
      coin,
      suite.nu,
      suite.mu,
      kernel,
      MeasureSpec::pushforward(coin, {AutomatonStep{f, 2}}),
      MeasureSpec::pushforward(coin, {ShiftStep{-1}, AutomatonStep{f, 1}}),
      MeasureSpec::periodic_orbit(PeriodicConfig(z2, {0, 0, 1}), &f),
      MeasureSpec::pushforward(MeasureSpec::periodic_orbit(PeriodicConfig(z2, {0, 1, 1})), {AutomatonStep{f, 1}}),
  };
}

// F^{-1}[w]_i for a radius-[0,1] rule: all words u of length |w|+1 at offset i with F(u) = w.
Rational oracle_push_prob(const MeasureSpec& mu, const Cylinder& c) {
  Rational total = 0;
  for (const auto& u : all_words(2, c.word.size() + 1)) {
    bool hit = true;
    for (std::size_t m = 0; m < c.word.size(); ++m) hit = hit && ((u[m] + u[m + 1]) % 2 == c.word[m]);
    if (hit) total += cylinder_prob(mu, {c.offset, u});
  }
  return total;
}

}  // namespace

TEST(Measures, CylinderExamples) {
  EXPECT_EQ(cylinder_prob(*MeasureSpec::uniform(z2), {0, {0, 1}}), Rational(1, 4));
  EXPECT_EQ(cylinder_prob(*haar_even_z4(), {0, {2}}), Rational(1, 2));
  EXPECT_EQ(cylinder_prob(*haar_even_z4(), {0, {1}}), Rational(0));
  // X_1, X_2, X_4 put mass 1/2 on [0]_0 and X_3 = {x_{2n} = 0} puts mass 1.
  EXPECT_EQ(cylinder_prob(*counterexample_suite().mu, {0, {0}}), Rational(5, 8));
  EXPECT_EQ(cylinder_prob(*counterexample_suite().mu, {1, {0}}), Rational(5, 8));
  EXPECT_EQ(cylinder_prob(*MeasureSpec::uniform(z2), {5, {}}), Rational(1));
}

TEST(Measures, Validation) {
  EXPECT_THROW(MeasureSpec::bernoulli(z2, {Rational(1, 2), Rational(1, 3)}), Error);
  EXPECT_THROW(MeasureSpec::bernoulli(z2, {Rational(1)}), Error);
  EXPECT_THROW(MeasureSpec::mixture({Rational(1, 2), Rational(1, 2)},
                                    {MeasureSpec::uniform(z2), MeasureSpec::uniform(z4)}),
               Error);
}

TEST(Measures, Additivity) {
  for (const auto& mu : zoo()) {
    const std::uint64_t q = mu->alphabet().order();
    for (std::int64_t offset : {-1, 0, 3})
      for (std::size_t len = 0; len <= 4; ++len)
        for (const auto& w : all_words(q, len)) {
          Rational sum = 0;
          for (Letter a = 0; a < q; ++a) {
            Word wa = w;
            wa.push_back(a);
            sum += cylinder_prob(*mu, {offset, wa});
          }
          ASSERT_EQ(sum, cylinder_prob(*mu, {offset, w})) << mu->describe() << " " << word_string(mu->alphabet(), w);
          // Extending on the left too.
          Rational left = 0;
          for (Letter a = 0; a < q; ++a) {
            Word aw{a};
            aw.insert(aw.end(), w.begin(), w.end());
            left += cylinder_prob(*mu, {offset - 1, aw});
          }
          ASSERT_EQ(left, cylinder_prob(*mu, {offset, w})) << mu->describe();
        }
  }
}

TEST(Measures, WindowDistributionMatchesCylinders) {
  for (const auto& mu : zoo()) {
    const std::uint64_t q = mu->alphabet().order();
    const auto dist = window_distribution(*mu, 1, 3);
    Rational total = 0;
    for (std::uint64_t c = 0; c < dist.size(); ++c) {
      EXPECT_EQ(dist[c], cylinder_prob(*mu, {1, unpack_word(q, c, 3)})) << mu->describe();
      total += dist[c];
    }
    EXPECT_EQ(total, Rational(1));
  }
}

TEST(Measures, PushforwardMatchesPreimageSum) {
  const auto f = id_plus_sigma();
  for (const auto& base : {MeasureSpec::bernoulli(z2, {Rational(2, 3), Rational(1, 3)}), counterexample_suite().nu}) {
    const auto pushed = MeasureSpec::pushforward(base, {AutomatonStep{f, 1}});
    for (std::size_t len = 1; len <= 4; ++len)
      for (const auto& w : all_words(2, len))
        for (std::int64_t i : {0, 1}) {
          const Cylinder c{i, w};
          EXPECT_EQ(cylinder_prob(*pushed, c), oracle_push_prob(*base, c));
        }
  }
  // sigma^1 moves mass one step left.
  const auto coin = MeasureSpec::bernoulli(z2, {Rational(2, 3), Rational(1, 3)});
  const auto nu = counterexample_suite().nu;
  const auto snu = MeasureSpec::pushforward(nu, {ShiftStep{1}});
  EXPECT_EQ(cylinder_prob(*snu, {0, {0, 1}}), cylinder_prob(*nu, {1, {0, 1}}));
  EXPECT_EQ(cylinder_prob(*MeasureSpec::pushforward(coin, {ShiftStep{3}}), {0, {1, 1}}), Rational(1, 9));
}

TEST(Measures, SamplerFrequencies) {
  const auto mu = MeasureSpec::uniform(z2);
  std::mt19937_64 rng(17);
  const std::size_t n = 160000;
  std::map<Word, std::size_t> counts;
  for (std::size_t i = 0; i < n; ++i) ++counts[sample(*mu, 0, 4, rng)];
  const double p = 1.0 / 16.0;
  const double sd = std::sqrt(n * p * (1 - p));
  EXPECT_EQ(counts.size(), 16u);
  for (const auto& [w, c] : counts) EXPECT_NEAR(static_cast<double>(c), n * p, 3 * sd);
}

TEST(Measures, SamplersAgreeWithExactProbabilities) {
  for (const auto& mu : zoo()) {
    const std::uint64_t q = mu->alphabet().order();
    const auto dist = window_distribution(*mu, -1, 3);
    std::mt19937_64 rng(23);
    const std::size_t n = 40000;
    std::vector<std::size_t> counts(dist.size(), 0);
    for (std::size_t i = 0; i < n; ++i) ++counts[pack_word(q, sample(*mu, -1, 3, rng))];
    for (std::size_t c = 0; c < dist.size(); ++c) {
      const double p = dist[c].convert_to<double>();
      if (p == 0.0) {
        EXPECT_EQ(counts[c], 0u) << mu->describe();
        continue;
      }
      const double sd = std::sqrt(n * p * (1 - p));
      EXPECT_NEAR(static_cast<double>(counts[c]), n * p, 5 * sd + 1) << mu->describe();
    }
  }
}

TEST(Measures, PeriodicOrbitSamples) {
  const auto mu = MeasureSpec::periodic_orbit(PeriodicConfig(z2, {0, 1}));
  std::mt19937_64 rng(2);
  for (int i = 0; i < 200; ++i) {
    const auto w = sample(*mu, 0, 6, rng);
    for (std::size_t j = 1; j < w.size(); ++j) EXPECT_NE(w[j], w[j - 1]);
  }
}

TEST(Measures, PushforwardSamplesMatchApplyWindow) {
  const auto f = id_plus_sigma();
  const auto coin = MeasureSpec::bernoulli(z2, {Rational(3, 4), Rational(1, 4)});
  const auto pushed = MeasureSpec::pushforward(coin, {AutomatonStep{f, 1}});
  std::mt19937_64 a(31), b(31);
  for (int i = 0; i < 100; ++i) {
    const Word x = sample(*coin, 0, 6, a);
    EXPECT_EQ(sample(*pushed, 0, 5, b), apply_window(f, x));
  }
}

TEST(Measures, InvarianceExamples) {
  const auto f = id_plus_sigma();
  EXPECT_EQ(invariance_check(*MeasureSpec::uniform(z2), {AutomatonStep{f, 1}}, 6).max_discrepancy, Rational(0));
  const auto suite = counterexample_suite();
  EXPECT_TRUE(invariance_check(*suite.mu, {AutomatonStep{f, 1}}, 6).invariant());
  EXPECT_TRUE(invariance_check(*suite.mu, {ShiftStep{1}}, 6).invariant());
  const auto nu_sigma = invariance_check(*suite.nu, {ShiftStep{1}}, 6);
  EXPECT_FALSE(nu_sigma.invariant());
  ASSERT_TRUE(nu_sigma.witness.has_value());
  EXPECT_FALSE(invariance_check(*suite.nu, {AutomatonStep{f, 1}}, 6).invariant());
  EXPECT_TRUE(invariance_check(*suite.nu, {ShiftStep{2}}, 6).invariant());
  const auto coin = MeasureSpec::bernoulli(z2, {Rational(3, 4), Rational(1, 4)});
  EXPECT_FALSE(invariance_check(*coin, {AutomatonStep{f, 1}}, 2).invariant());
  EXPECT_TRUE(invariance_check_mc(*MeasureSpec::uniform(z2), {AutomatonStep{f, 1}}, 4, 20000, 3).invariant());
  EXPECT_FALSE(invariance_check_mc(*coin, {AutomatonStep{f, 1}}, 2, 20000, 3).invariant());
}

TEST(Measures, CharacterExamples) {
  const auto uniform = MeasureSpec::uniform(z2);
  const FiniteCharacter chi01{0, {Character{{1}}, Character{{1}}}};
  EXPECT_NEAR(std::abs(character_integral(*uniform, chi01)), 0.0, 1e-12);
  const FiniteCharacter trivial{0, {Character{{0}}}};
  EXPECT_NEAR(std::abs(character_integral(*uniform, trivial) - 1.0), 0.0, 1e-12);

  // Independent sum over length-2 cylinders.
  const auto mu = counterexample_suite().mu;
  double oracle = 0.0;
  for (const auto& w : all_words(2, 2)) oracle += ((w[0] + w[1]) % 2 ? -1.0 : 1.0) * cylinder_prob(*mu, {0, w}).convert_to<double>();
  const auto value = character_integral(*mu, chi01);
  EXPECT_NEAR(value.real(), oracle, 1e-12);
  EXPECT_GT(std::abs(value), 1e-6);
}

TEST(Measures, HaarOrthogonality) {
  // Characters nontrivial on Sigma integrate to zero against Haar on Sigma.
  const auto haar = haar_even_z4();
  for (std::int64_t c0 = 0; c0 < 4; ++c0)
    for (std::int64_t c1 = 0; c1 < 4; ++c1) {
      const FiniteCharacter chi{0, {Character{{c0}}, Character{{c1}}}};
      const bool trivial_on_sigma = c0 % 2 == 0 && c1 % 2 == 0;
      EXPECT_NEAR(std::abs(character_integral(*haar, chi)), trivial_on_sigma ? 1.0 : 0.0, 1e-9);
    }
}

TEST(Measures, HaarTests) {
  const auto ok = haar_test(*MeasureSpec::uniform(z2), FullShift{}, 3);
  EXPECT_TRUE(ok.consistent());
  EXPECT_LT(ok.max_abs, 1e-9);
  EXPECT_EQ(ok.characters_checked, 7u);
  const auto sigma = letterwise_subgroup(z4, {0, 2});
  EXPECT_TRUE(haar_test(*haar_even_z4(), sigma, 3).consistent());
  const auto full = haar_test(*haar_even_z4(), FullShift{}, 3);
  EXPECT_FALSE(full.consistent());
  EXPECT_TRUE(full.witness.has_value());
  const auto mu = haar_test(*counterexample_suite().mu, FullShift{}, 2);
  EXPECT_FALSE(mu.consistent());
  ASSERT_TRUE(mu.witness.has_value());
}

TEST(Measures, Cesaro) {
  const auto f = id_plus_sigma();
  const auto coin = MeasureSpec::bernoulli(z2, {Rational(3, 4), Rational(1, 4)});
  const auto seq = cesaro_sequence(coin, f, 32, 1);
  ASSERT_EQ(seq.size(), 32u);
  EXPECT_EQ(seq.front().distance_to_uniform, Rational(1, 4));
  EXPECT_LT(seq.back().distance_to_uniform, seq.front().distance_to_uniform);
  // Trend: averages over the last quarter sit below those of the first quarter.
  Rational first = 0, last = 0;
  for (std::size_t i = 0; i < 8; ++i) {
    first += seq[i].distance_to_uniform;
    last += seq[24 + i].distance_to_uniform;
  }
  EXPECT_LT(last, first);

  for (const auto& p : cesaro_sequence(MeasureSpec::uniform(z2), f, 8, 2)) EXPECT_EQ(p.distance_to_uniform, Rational(0));
  const auto point = MeasureSpec::periodic_orbit(PeriodicConfig::zero(z2));
  for (const auto& p : cesaro_sequence(point, f, 8, 2)) EXPECT_EQ(p.distribution[0], Rational(1));
}

TEST(Measures, CounterexampleSuite) {
  const auto s = counterexample_suite();
  EXPECT_TRUE(s.sigma_x1_is_x2);
  EXPECT_TRUE(s.f_x1_is_x3);
  EXPECT_TRUE(s.f_x2_is_x4);
  EXPECT_TRUE(s.sigma_pre2_x1_is_x1);
  EXPECT_TRUE(s.sigma_pre1_x1_is_x2);
  EXPECT_NE(s.x1, s.x2);
  // sigma nu equals Haar on X_2 on every cylinder of length <= 6.
  const auto snu = MeasureSpec::pushforward(s.nu, {ShiftStep{1}});
  const auto h2 = MeasureSpec::haar(z2, s.x2);
  for (std::size_t len = 1; len <= 6; ++len)
    for (const auto& w : all_words(2, len))
      for (std::int64_t i = 0; i < 2; ++i) ASSERT_EQ(cylinder_prob(*snu, {i, w}), cylinder_prob(*h2, {i, w}));
  // mu is fixed by sigma and F.
  for (const auto& w : all_words(2, 4)) {
    EXPECT_EQ(cylinder_prob(*s.mu, {0, w}), cylinder_prob(*s.mu, {1, w}));
  }
}

TEST(Measures, SameSupport) {
  const auto a = make_product_subgroup(z2, 2, 0, {0, 1});
  const auto b = make_product_subgroup(z2, 2, 1, {0, 2});
  EXPECT_TRUE(same_support(z2, a, b, 6));
  EXPECT_FALSE(same_support(z2, a, make_product_subgroup(z2, 2, 0, {0, 2}), 6));
  EXPECT_TRUE(same_support(z2, FullShift{}, letterwise_subgroup(z2, {0, 1}), 4));
}

TEST(Measures, Hypotheses) {
  const auto f = id_plus_sigma();
  const auto ok = check_hypotheses(f, FullShift{}, MeasureSpec::uniform(z2));
  EXPECT_EQ(ok.k, 2u);
  EXPECT_EQ(ok.p1, 1u);
  ASSERT_TRUE(ok.condition4.has_value() && ok.condition4->found.has_value());
  EXPECT_EQ(*ok.condition4->found, 0u);
  EXPECT_TRUE(ok.all_checkable_hold());

  const auto s = counterexample_suite();
  const auto bad = check_hypotheses(f, FullShift{}, s.mu);
  EXPECT_FALSE(bad.all_checkable_hold());
  bool item2_fails = false;
  for (const auto& item : bad.items) item2_fails = item2_fails || item.verdict == Verdict::Fails;
  EXPECT_TRUE(item2_fails);
  ASSERT_TRUE(bad.h_sigma_estimate.has_value());
  EXPECT_GT(*bad.h_sigma_estimate, 1e-3);

  const auto trivial = check_hypotheses(CellularAutomaton::shift(z2, 1), FullShift{}, MeasureSpec::uniform(z2));
  EXPECT_TRUE(trivial.trivial);
  for (const auto& item : trivial.items) EXPECT_EQ(item.verdict, Verdict::NotApplicable);

  const auto abstract = check_hypotheses(f, FullShift{}, nullptr);
  for (const auto& item : abstract.items) EXPECT_NE(item.verdict, Verdict::Fails);
}
