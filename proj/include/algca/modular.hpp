#pragma once

// Linear automata over Z/p^k: permutative support, bipermutative powers,
// the Frobenius congruence, factorization over F_p and kernel splitting.

#include "algca/automaton.hpp"

#include <utility>
#include <vector>

namespace algca {

struct PrimePower {
  std::uint64_t prime = 0;
  std::uint32_t exponent = 0;
};

/// p and k with n = p^k; throws PreconditionError otherwise.
PrimePower prime_power(std::uint64_t n);

struct PermutativeSupport {
  std::vector<int> offsets;  // offsets with a coefficient prime to p
  PrimePower modulus;

  bool empty() const { return offsets.empty(); }
  int min() const { return offsets.front(); }
  int max() const { return offsets.back(); }
};

PermutativeSupport permutative_support(const CellularAutomaton& f);

/// F^{p^{k-1}}, checked to be bipermutative with smallest neighborhood [p^{k-1} min, p^{k-1} max].
CellularAutomaton bipermutative_power(const CellularAutomaton& f);

/// (P1 + p P2)^{p^j} == P1^{p^j} mod p^{j+1}, coefficientwise.
bool frobenius_congruence_check(const LaurentPoly& p1, const LaurentPoly& p2, std::uint64_t p, std::uint32_t j);

/// prod_{i<r} (p^r - p^i).
std::uint64_t divisor_bound(std::uint64_t p, std::uint32_t r);

/// Dense polynomial over F_p, index = degree, no trailing zeros (empty = 0).
using PolyFp = std::vector<std::int64_t>;

PolyFp poly_trim(PolyFp a);
PolyFp poly_mul(const PolyFp& a, const PolyFp& b, std::int64_t p);
/// Quotient and remainder; b nonzero.
std::pair<PolyFp, PolyFp> poly_divmod(const PolyFp& a, const PolyFp& b, std::int64_t p);
std::string poly_string(const PolyFp& a);

struct Factorization {
  std::int64_t prime = 0;
  int shift = 0;              // P = unit * X^shift * prod factors
  std::int64_t unit = 1;      // leading coefficient
  std::vector<std::pair<PolyFp, int>> factors;  // monic irreducible, multiplicity

  PolyFp expand() const;  // unit * prod factors^mult (without the X^shift)
};

inline constexpr int kMaxFactorDegree = 8;

/// Trial division by monic polynomials; throws CapExceeded when an irreducible factor may exceed degree 8.
Factorization factor_mod_p(const LaurentPoly& poly);
bool is_irreducible(const LaurentPoly& poly);

/// Scalar polynomial over the cyclic alphabet Z/p, shifted by X^shift.
LaurentPoly to_laurent(const GroupSpec& alphabet, const PolyFp& a, int shift = 0);
/// Nonnegative-degree dense coefficients of P X^{-min degree}.
PolyFp from_laurent_scalar(const LaurentPoly& poly);

struct DirectSumReport {
  bool holds = false;
  std::size_t kernel_size = 0;
  std::vector<std::size_t> factor_kernel_sizes;
  bool sum_map_bijective = false;
};

/// D_n(P_F) against the direct sum of D_n(P_i^{a_i}) over the factorization of P_F.
DirectSumReport kernel_direct_sum_check(const CellularAutomaton& f, std::size_t n);

}  // namespace algca
