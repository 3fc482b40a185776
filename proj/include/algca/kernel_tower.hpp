#pragma once

// Kernel towers D_n = Ker(F^n) of algebraic automata, their sigma-periods,
// restrictions to subgroup shifts and the density criteria built on them.

#include "algca/automaton.hpp"

#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace algca {

inline constexpr std::size_t kDefaultKernelCap = std::size_t{1} << 16;

// --- subgroup shifts -------------------------------------------------------

struct FullShift {
  bool operator==(const FullShift&) const = default;
};

/// Configurations whose blocks x[t j + phase .. t j + phase + t - 1] all lie in B <= A^t.
struct ProductSubgroup {
  std::size_t grouping = 1;
  std::size_t phase = 0;
  std::vector<Letter> blocks;  // sorted letters of A^t

  bool operator==(const ProductSubgroup&) const = default;
};

/// Ker G(sigma) for a Laurent polynomial G.
struct LinearKernelShift {
  LaurentPoly constraint;

  bool operator==(const LinearKernelShift&) const = default;
};

using SubgroupShift = std::variant<FullShift, ProductSubgroup, LinearKernelShift>;

/// Validates that B is a subgroup of A^t and normalizes the phase mod t.
ProductSubgroup make_product_subgroup(const GroupSpec& alphabet, std::size_t grouping, std::size_t phase,
                                      std::vector<Letter> blocks);
/// Sigma' = {x : x_i in H for every i} for a subgroup H of A.
ProductSubgroup letterwise_subgroup(const GroupSpec& alphabet, std::vector<Letter> letters);

bool shift_contains(const GroupSpec& alphabet, const SubgroupShift& shift, const PeriodicConfig& x);
std::string describe(const GroupSpec& alphabet, const SubgroupShift& shift);

/// sigma^j(S): the phase moves by -j.
ProductSubgroup shift_image(const ProductSubgroup& s, std::int64_t j);
/// sigma^{-j}(S): the phase moves by +j.
ProductSubgroup shift_preimage(const ProductSubgroup& s, std::int64_t j);
/// F(S) when it is again a product subgroup with the same grouping; nullopt otherwise.
std::optional<ProductSubgroup> automaton_image(const CellularAutomaton& f, const GroupSpec& alphabet,
                                               const ProductSubgroup& s);

// --- kernels ---------------------------------------------------------------

/// All x with F^n(x) = 0, sorted. F must be algebraic and one-sided permutative after trimming.
std::vector<PeriodicConfig> kernel_elements(const CellularAutomaton& f, std::size_t n,
                                            std::size_t cap = kDefaultKernelCap);

struct KernelLevel {
  std::vector<PeriodicConfig> elements;  // sorted
  std::uint64_t period_lcm = 1;          // p_n

  std::size_t size() const { return elements.size(); }
  bool contains(const PeriodicConfig& x) const;
};

struct KernelTower {
  CellularAutomaton automaton;  // linear form, smallest neighborhood
  Permutativity permutativity;
  std::vector<KernelLevel> levels;

  std::size_t depth() const { return levels.size() - 1; }
  const KernelLevel& level(std::size_t n) const;
};

KernelTower tower(const CellularAutomaton& f, std::size_t depth, std::size_t cap = kDefaultKernelCap);

/// D_n \ D_{n-1}, n >= 1.
std::vector<PeriodicConfig> boundary(const KernelTower& t, std::size_t n);

/// Levels filtered by membership in the subgroup shift. Throws Error if a filtered level is not a subgroup.
KernelTower restrict(const KernelTower& t, const GroupSpec& alphabet, const SubgroupShift& shift);

struct LevelCheck {
  std::size_t n = 0;                // compares level n with level n + 1
  bool nested = false;              // D_n subset of D_{n+1}
  bool period_divides = false;      // p_n | p_{n+1}
  bool width_bound = false;         // p_{n+1} | |A|^{s-r} p_n; can fail at n = 0
  bool span_bound = false;          // p_{n+1} | |A|^t p_n, t = max(s,0) - min(r,0)
  bool maps_onto_lower = false;     // F(D_{n+1}) = D_n
  bool boundary_to_boundary = false;  // F(dD_{n+1}) subset of dD_n (n >= 1)
};

struct TowerReport {
  std::vector<LevelCheck> steps;
  std::optional<bool> size_law;     // |D_n| = |A|^{(s-r) n}, only for bipermutative F
  std::size_t width_exponent = 0;   // s - r
  std::size_t span_exponent = 0;    // t

  bool all_hold() const;
};

TowerReport check_tower(const KernelTower& t);

// --- density criteria ------------------------------------------------------

struct Condition4Step {
  std::size_t m = 0;
  std::size_t boundary_size = 0;
  bool holds = false;
  std::optional<PeriodicConfig> witness;  // boundary element whose closure misses D^Sigma_1
};

struct Condition4Result {
  std::optional<std::size_t> found;  // smallest m with the property
  std::size_t m_max = 0;
  std::vector<Condition4Step> steps;
  std::optional<std::size_t> cap_hit_at;  // search stopped here because D_{m+1} was too large
};

/// Searches m <= m_max such that every d in dD^Sigma_{m+1} generates (under F and sigma) a group containing D^Sigma_1.
Condition4Result condition4_search(const CellularAutomaton& f, const GroupSpec& alphabet, const SubgroupShift& shift,
                                   std::size_t m_max = 4, std::size_t cap = kDefaultKernelCap);

struct CorollaryKerResult {
  bool holds = false;              // no sigma-invariant subgroups besides {0} and D^Sigma_1
  std::size_t kernel_size = 0;
  std::size_t sigma_invariant_subgroups = 0;  // from full subgroup enumeration
  bool enumeration_agrees = false;
  std::vector<std::pair<PeriodicConfig, bool>> boundary_generates;  // d, <d>_{F,sigma} == D^Sigma_1
};

CorollaryKerResult corollary_ker_check(const CellularAutomaton& f, const GroupSpec& alphabet,
                                       const SubgroupShift& shift,
                                       std::size_t enumeration_cap = kDefaultSubgroupEnumerationCap);

/// Smallest subgroup of configs containing the seeds and closed under sigma and, optionally, F.
std::vector<PeriodicConfig> config_closure(std::span<const PeriodicConfig> seeds, const GroupSpec& alphabet,
                                           const CellularAutomaton* f, std::size_t cap = kDefaultClosureCap);

// --- recurrence ------------------------------------------------------------

/// Companion matrix of the kernel recurrence over a cyclic alphabet Z/m.
/// State X_i = (x_{i+s-1}, ..., x_{i+r}); X_{i+1} = A X_i.
struct KernelRecurrence {
  std::int64_t modulus = 0;
  Neighborhood neighborhood;
  IntMatrix matrix;

  /// Multiplicative order of the matrix mod `modulus`; throws CapExceeded past the cap.
  std::uint64_t matrix_order(std::uint64_t cap = std::uint64_t{1} << 24) const;
};

KernelRecurrence recurrence_matrix(const CellularAutomaton& f);

}  // namespace algca
