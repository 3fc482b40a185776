#pragma once

// Shift-space measures built from Bernoulli and Haar pieces, with exact
// rational cylinder probabilities, samplers and the diagnostics used on them.

#include "algca/kernel_tower.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <complex>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <variant>
#include <vector>

namespace algca {

using Rational = boost::multiprecision::cpp_rational;

inline constexpr std::uint64_t kDefaultDistributionCap = std::uint64_t{1} << 16;

/// One step of a map word: sigma^j or F^k.
struct ShiftStep {
  std::int64_t j = 1;
};
struct AutomatonStep {
  CellularAutomaton automaton;
  std::uint64_t k = 1;
};
using MapStep = std::variant<ShiftStep, AutomatonStep>;
/// Steps applied left to right: {sigma, F} means F o sigma.
using MapWord = std::vector<MapStep>;

class MeasureSpec;
using MeasurePtr = std::shared_ptr<const MeasureSpec>;

struct Bernoulli {
  std::vector<Rational> weights;
};
struct HaarOnShift {
  SubgroupShift support;
};
struct Pushforward {
  MeasurePtr base;
  MapWord map;
};
struct Mixture {
  std::vector<Rational> weights;
  std::vector<MeasurePtr> components;
};
/// Uniform measure on a finite set of periodic configurations.
struct UniformPeriodicOrbit {
  std::vector<PeriodicConfig> support;
};

class MeasureSpec {
 public:
  using Variant = std::variant<Bernoulli, HaarOnShift, Pushforward, Mixture, UniformPeriodicOrbit>;

  MeasureSpec(GroupSpec alphabet, Variant v, std::string name = {});

  static MeasurePtr bernoulli(const GroupSpec& alphabet, std::vector<Rational> weights);
  static MeasurePtr uniform(const GroupSpec& alphabet);
  static MeasurePtr haar(const GroupSpec& alphabet, SubgroupShift support);
  static MeasurePtr pushforward(MeasurePtr base, MapWord map);
  static MeasurePtr mixture(std::vector<Rational> weights, std::vector<MeasurePtr> components);
  /// Uniform on the sigma-orbit of x, closed under F too when one is given.
  static MeasurePtr periodic_orbit(const PeriodicConfig& x, const CellularAutomaton* f = nullptr);

  const GroupSpec& alphabet() const { return alphabet_; }
  const Variant& variant() const { return v_; }
  const std::string& name() const { return name_; }
  std::string describe() const;

 private:
  GroupSpec alphabet_;
  Variant v_;
  std::string name_;
};

Rational cylinder_prob(const MeasureSpec& mu, const Cylinder& c);
/// mu([w]_offset) for every word w of the given length, indexed by packed word.
std::vector<Rational> window_distribution(const MeasureSpec& mu, std::int64_t offset, std::size_t length,
                                          std::uint64_t cap = kDefaultDistributionCap);

/// A word distributed as mu restricted to [offset, offset + length).
Word sample(const MeasureSpec& mu, std::int64_t offset, std::size_t length, std::mt19937_64& rng);

// --- invariance ------------------------------------------------------------

struct InvarianceResult {
  bool exact = true;
  Rational max_discrepancy = 0;  // exact mode
  double max_z = 0.0;            // Monte Carlo mode
  std::optional<Cylinder> witness;
  std::size_t max_length = 0;
  std::size_t cylinders_checked = 0;

  bool invariant() const { return exact ? max_discrepancy == 0 : max_z < 5.0; }
};

/// Exact: max over cylinders [w]_i with |w| <= L and 0 <= i < L of |mu(T^{-1}[w]_i) - mu([w]_i)|.
InvarianceResult invariance_check(const MeasureSpec& mu, const MapWord& map, std::size_t max_length);
/// Two-sample comparison of length-L window frequencies at offset 0; max |z| reported.
InvarianceResult invariance_check_mc(const MeasureSpec& mu, const MapWord& map, std::size_t length,
                                     std::size_t samples, std::uint64_t seed);

// --- characters ------------------------------------------------------------

/// Finite-support character: chi(x) = prod_j letters[j](x_{offset + j}).
struct FiniteCharacter {
  std::int64_t offset = 0;
  std::vector<Character> letters;

  bool is_trivial() const;
  std::complex<double> operator()(const GroupSpec& alphabet, std::span<const Letter> window) const;
  std::string describe() const;
};

std::complex<double> character_integral(const MeasureSpec& mu, const FiniteCharacter& chi);

struct HaarTestReport {
  bool support_ok = false;
  std::optional<Cylinder> support_witness;  // positive mass outside the shift
  double max_abs = 0.0;
  std::optional<FiniteCharacter> witness;  // arg max
  std::size_t characters_checked = 0;
  std::size_t budget = 0;

  bool consistent() const { return support_ok && max_abs < 1e-9; }
};

HaarTestReport haar_test(const MeasureSpec& mu, const SubgroupShift& shift, std::size_t budget);

// --- Cesaro means ----------------------------------------------------------

struct CesaroPoint {
  std::size_t n = 0;
  std::vector<Rational> distribution;  // (1/n) sum_{j<n} F^j mu0 on length-L words at offset 0
  Rational distance_to_uniform = 0;    // total variation
};

std::vector<CesaroPoint> cesaro_sequence(const MeasurePtr& mu0, const CellularAutomaton& f, std::size_t n_max,
                                         std::size_t length);

/// Same window patterns (positive Haar mass) on every window of `length` at offsets 0 .. length - 1.
bool same_support(const GroupSpec& alphabet, const SubgroupShift& a, const SubgroupShift& b, std::size_t length);

// --- worked counterexample -------------------------------------------------

struct CounterexampleSuite {
  CellularAutomaton automaton;                 // Id + sigma over Z/2
  ProductSubgroup x1, x2, x3, x4;              // x_{2n} = x_{2n+1}, its shift, and images
  MeasurePtr nu;                               // Haar on x1
  MeasurePtr mu;                               // (nu + sigma nu + F nu + F sigma nu) / 4
  bool sigma_x1_is_x2 = false;                 // spec-level images
  bool f_x1_is_x3 = false;
  bool f_x2_is_x4 = false;
  bool sigma_pre2_x1_is_x1 = false;
  bool sigma_pre1_x1_is_x2 = false;
};

CounterexampleSuite counterexample_suite();

// --- hypothesis report -----------------------------------------------------

enum class Verdict { Holds, Fails, Unchecked, NotApplicable };
std::string to_string(Verdict v);

struct HypothesisItem {
  std::string name;
  Verdict verdict = Verdict::Unchecked;
  std::string detail;
};

struct HypothesisReport {
  bool trivial = false;
  bool bipermutative = false;
  std::uint64_t k = 0;
  std::uint64_t p1 = 0;
  std::uint64_t kp1 = 0;
  std::optional<Condition4Result> condition4;
  std::optional<CorollaryKerResult> corollary_ker;
  std::optional<double> h_sigma_estimate;
  std::vector<HypothesisItem> items;

  bool all_checkable_hold() const;
};

struct HypothesisOptions {
  std::size_t samples = 100000;
  std::size_t block = 4;
  std::uint64_t seed = 1;
  std::size_t invariance_length = 6;
  std::size_t m_max = 4;
};

/// mu may be null for an abstract measure; measure-dependent items are then unchecked.
HypothesisReport check_hypotheses(const CellularAutomaton& f, const SubgroupShift& shift, const MeasurePtr& mu,
                                  const HypothesisOptions& options = {});

}  // namespace algca
