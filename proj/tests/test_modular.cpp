#include "algca/error.hpp"
#include "algca/kernel_tower.hpp"
#include "algca/modular.hpp"

#include <gtest/gtest.h>

#include <map>
#include <random>

using namespace algca;

namespace {

const GroupSpec z2 = GroupSpec::cyclic(2);
const GroupSpec z4 = GroupSpec::cyclic(4);

CellularAutomaton scalar_ca(const GroupSpec& a, std::map<int, std::int64_t> coeffs) {
  return CellularAutomaton::linear(LaurentPoly::scalar(a, coeffs));
}

// Dense integer convolution, reduced mod m.
std::vector<std::int64_t> oracle_square(const std::vector<std::int64_t>& a, std::int64_t m) {
  std::vector<std::int64_t> out(2 * a.size() - 1, 0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < a.size(); ++j) out[i + j] = (out[i + j] + a[i] * a[j]) % m;
  return out;
}

// Remainder of a by monic b over F_p, on plain vectors.
std::vector<std::int64_t> oracle_rem(std::vector<std::int64_t> a, const std::vector<std::int64_t>& b, std::int64_t p) {
  while (a.size() >= b.size()) {
    const std::int64_t c = a.back() % p;
    const std::size_t shift = a.size() - b.size();
    for (std::size_t i = 0; i < b.size(); ++i) a[shift + i] = ((a[shift + i] - c * b[i]) % p + p) % p;
    while (!a.empty() && a.back() == 0) a.pop_back();
  }
  return a;
}

// No monic divisor of degree 1 .. deg/2.
bool oracle_irreducible(const std::vector<std::int64_t>& f, std::int64_t p) {
  const std::size_t deg = f.size() - 1;
  for (std::size_t d = 1; 2 * d <= deg; ++d) {
    std::size_t count = 1;
    for (std::size_t i = 0; i < d; ++i) count *= static_cast<std::size_t>(p);
    for (std::size_t code = 0; code < count; ++code) {
      std::vector<std::int64_t> g(d + 1, 1);
      std::size_t c = code;
      for (std::size_t i = 0; i < d; ++i, c /= static_cast<std::size_t>(p)) g[i] = static_cast<std::int64_t>(c % static_cast<std::size_t>(p));
      if (oracle_rem(f, g, p).empty()) return false;
    }
  }
  return true;
}

}  // namespace

TEST(Modular, PrimePower) {
  EXPECT_EQ(prime_power(8).prime, 2u);
  EXPECT_EQ(prime_power(8).exponent, 3u);
  EXPECT_EQ(prime_power(5).exponent, 1u);
  EXPECT_THROW(prime_power(12), PreconditionError);
}

TEST(Modular, PermutativeSupport) {
  EXPECT_EQ(permutative_support(scalar_ca(z4, {{0, 1}, {1, 1}, {2, 2}})).offsets, (std::vector<int>{0, 1}));
  EXPECT_TRUE(permutative_support(scalar_ca(z4, {{0, 2}, {1, 2}})).empty());
  EXPECT_EQ(permutative_support(scalar_ca(z2, {{0, 1}, {1, 1}})).offsets, (std::vector<int>{0, 1}));
}

TEST(Modular, BipermutativePowerOnZ4Example) {
  const auto f = scalar_ca(z4, {{0, 1}, {1, 1}, {2, 2}});
  const auto g = bipermutative_power(f);
  const auto sq = oracle_square({1, 1, 2}, 4);
  std::map<int, std::int64_t> expected;
  for (std::size_t d = 0; d < sq.size(); ++d)
    if (sq[d] != 0) expected[static_cast<int>(d)] = sq[d];
  EXPECT_EQ(expected, (std::map<int, std::int64_t>{{0, 1}, {1, 2}, {2, 1}}));
  EXPECT_EQ(as_laurent(g), LaurentPoly::scalar(z4, expected));
  EXPECT_EQ(g.neighborhood(), (Neighborhood{0, 2}));
  EXPECT_TRUE(permutativity_by_table(g).bipermutative());
}

TEST(Modular, BipermutativePowerEdgeCases) {
  const auto f = scalar_ca(GroupSpec::cyclic(5), {{0, 2}, {1, 3}});
  EXPECT_EQ(as_laurent(bipermutative_power(f)), as_laurent(f));
  EXPECT_THROW(bipermutative_power(scalar_ca(GroupSpec::cyclic(9), {{0, 1}, {1, 3}})), PreconditionError);
  EXPECT_THROW(bipermutative_power(scalar_ca(z4, {{0, 2}, {1, 2}})), PreconditionError);
}

TEST(Modular, FrobeniusCongruence) {
  EXPECT_TRUE(frobenius_congruence_check(LaurentPoly::scalar(z4, {{0, 1}, {1, 1}}),
                                         LaurentPoly::scalar(z4, {{2, 1}}), 2, 1));
  EXPECT_TRUE(frobenius_congruence_check(LaurentPoly::scalar(z4, {{0, 1}, {1, 1}}), LaurentPoly(z4), 2, 1));
  const GroupSpec z8 = GroupSpec::cyclic(8);
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 20; ++trial) {
    std::map<int, std::int64_t> c1, c2;
    for (int d = -1; d <= 2; ++d) {
      c1[d] = static_cast<std::int64_t>(rng() % 8);
      c2[d] = static_cast<std::int64_t>(rng() % 8);
    }
    EXPECT_TRUE(frobenius_congruence_check(LaurentPoly::scalar(z8, c1), LaurentPoly::scalar(z8, c2), 2, 2));
  }
}

TEST(Modular, DivisorBound) {
  EXPECT_EQ(divisor_bound(2, 1), 1u);
  EXPECT_EQ(divisor_bound(2, 2), 6u);
  EXPECT_EQ(divisor_bound(3, 1), 2u);
  EXPECT_EQ(divisor_bound(3, 2), 48u);
}

TEST(Modular, FactorizationExamples) {
  EXPECT_TRUE(is_irreducible(LaurentPoly::scalar(z2, {{0, 1}, {1, 1}})));
  EXPECT_TRUE(is_irreducible(LaurentPoly::scalar(z2, {{0, 1}, {1, 1}, {2, 1}})));
  const auto sq = factor_mod_p(LaurentPoly::scalar(z2, {{0, 1}, {2, 1}}));
  ASSERT_EQ(sq.factors.size(), 1u);
  EXPECT_EQ(sq.factors[0].first, (PolyFp{1, 1}));
  EXPECT_EQ(sq.factors[0].second, 2);
  EXPECT_THROW(factor_mod_p(LaurentPoly(z2)), PreconditionError);
}

TEST(Modular, FactorizationReconstructs) {
  std::mt19937_64 rng(8);
  for (std::int64_t p : {2, 3, 5}) {
    const GroupSpec a = GroupSpec::cyclic(p);
    for (int trial = 0; trial < 30; ++trial) {
      std::map<int, std::int64_t> c;
      const int lo = -static_cast<int>(rng() % 3);
      const int deg = 1 + static_cast<int>(rng() % 7);
      for (int d = 0; d <= deg; ++d) c[lo + d] = static_cast<std::int64_t>(rng() % static_cast<std::uint64_t>(p));
      c[lo] = 1 + static_cast<std::int64_t>(rng() % static_cast<std::uint64_t>(p - 1));
      c[lo + deg] = 1 + static_cast<std::int64_t>(rng() % static_cast<std::uint64_t>(p - 1));
      const auto poly = LaurentPoly::scalar(a, c);
      const auto fac = factor_mod_p(poly);
      EXPECT_EQ(fac.expand(), from_laurent_scalar(poly));
      EXPECT_EQ(to_laurent(a, fac.expand(), fac.shift), poly);
      for (const auto& [factor, mult] : fac.factors) {
        EXPECT_GE(mult, 1);
        EXPECT_EQ(factor.back(), 1);
        EXPECT_TRUE(oracle_irreducible(factor, p)) << poly_string(factor);
      }
    }
  }
}

TEST(Modular, KernelDirectSum) {
  // (1 + X)(1 + X + X^2) = 1 + X^3.
  const auto f = scalar_ca(z2, {{0, 1}, {3, 1}});
  const auto report = kernel_direct_sum_check(f, 1);
  EXPECT_TRUE(report.holds);
  EXPECT_EQ(report.kernel_size, 8u);
  EXPECT_EQ(report.factor_kernel_sizes, (std::vector<std::size_t>{2, 4}));
  EXPECT_TRUE(kernel_direct_sum_check(scalar_ca(z2, {{0, 1}, {1, 1}}), 2).holds);
  const auto sq = kernel_direct_sum_check(scalar_ca(z2, {{0, 1}, {2, 1}}), 1);
  EXPECT_EQ(sq.kernel_size, 4u);
  EXPECT_EQ(kernel_elements(scalar_ca(z2, {{0, 1}, {2, 1}}), 1),
            kernel_elements(scalar_ca(z2, {{0, 1}, {1, 1}}), 2));
}

TEST(Modular, MatrixOrderDividesBound) {
  std::mt19937_64 rng(13);
  for (std::int64_t p : {2, 3, 5}) {
    const GroupSpec a = GroupSpec::cyclic(p);
    for (int trial = 0; trial < 20; ++trial) {
      const int r = 1 + static_cast<int>(rng() % 3);
      std::map<int, std::int64_t> c;
      for (int d = 0; d <= r; ++d) c[d] = static_cast<std::int64_t>(rng() % static_cast<std::uint64_t>(p));
      c[0] = 1 + static_cast<std::int64_t>(rng() % static_cast<std::uint64_t>(p - 1));
      c[r] = 1 + static_cast<std::int64_t>(rng() % static_cast<std::uint64_t>(p - 1));
      const auto f = scalar_ca(a, c);
      const auto order = recurrence_matrix(f).matrix_order();
      EXPECT_EQ(divisor_bound(static_cast<std::uint64_t>(p), static_cast<std::uint32_t>(r)) % order, 0u);
      for (const auto& x : kernel_elements(f, 1)) EXPECT_EQ(order % x.period(), 0u);
    }
  }
}
