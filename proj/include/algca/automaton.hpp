#pragma once

// One-dimensional cellular automata over a finite abelian alphabet.
//
// F(x)_m = rule(x_{m+r}, ..., x_{m+s}) for the neighborhood [r, s]. Rules are
// explicit tables (indexed by the packed window, first letter most
// significant), linear (a Laurent polynomial) or affine (linear + constant).

#include "algca/configuration.hpp"
#include "algca/laurent.hpp"

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace algca {

struct Neighborhood {
  int left = 0;
  int right = 0;

  std::size_t width() const { return static_cast<std::size_t>(right - left + 1); }
  bool operator==(const Neighborhood&) const = default;
};

struct TableRule {
  std::vector<Letter> outputs;
};

struct LinearRule {
  LaurentPoly poly;
};

struct AffineRule {
  LaurentPoly poly;
  Letter constant = 0;
};

using LocalRule = std::variant<TableRule, LinearRule, AffineRule>;

inline constexpr std::uint64_t kDefaultTableCap = std::uint64_t{1} << 20;
inline constexpr std::size_t kDefaultPreimageCap = std::size_t{1} << 16;

class CellularAutomaton {
 public:
  CellularAutomaton(GroupSpec alphabet, LocalRule rule, Neighborhood neighborhood, std::string name = {});

  /// Neighborhood spans the polynomial's degrees; the zero polynomial gets [0, 0].
  static CellularAutomaton linear(const LaurentPoly& poly);
  static CellularAutomaton affine(const LaurentPoly& poly, Letter constant);
  static CellularAutomaton table(GroupSpec alphabet, Neighborhood neighborhood, std::vector<Letter> outputs);
  static CellularAutomaton from_function(const GroupSpec& alphabet, Neighborhood neighborhood,
                                         const std::function<Letter(std::span<const Letter>)>& rule);
  /// sigma^m.
  static CellularAutomaton shift(const GroupSpec& alphabet, int m = 1);
  static CellularAutomaton identity(const GroupSpec& alphabet) { return shift(alphabet, 0); }

  const GroupSpec& alphabet() const { return alphabet_; }
  const LocalRule& rule() const { return rule_; }
  Neighborhood neighborhood() const { return neighborhood_; }
  std::size_t width() const { return neighborhood_.width(); }
  const std::string& name() const { return name_; }
  CellularAutomaton& set_name(std::string name) {
    name_ = std::move(name);
    return *this;
  }

  bool is_table() const { return std::holds_alternative<TableRule>(rule_); }
  bool is_linear() const { return std::holds_alternative<LinearRule>(rule_); }
  bool is_affine() const { return std::holds_alternative<AffineRule>(rule_); }
  /// Linear part of a linear or affine rule; throws for tables.
  const LaurentPoly& polynomial() const;
  /// Affine constant (0 for linear rules); throws for tables.
  Letter constant() const;

  /// Rule value on a window of exactly width() letters.
  Letter local(std::span<const Letter> window) const;
  Letter local_code(std::uint64_t window_code) const;
  /// All outputs indexed by packed window; throws CapExceeded past `cap` entries.
  std::vector<Letter> materialize_table(std::uint64_t cap = kDefaultTableCap) const;

  std::string describe() const;

 private:
  GroupSpec alphabet_;
  LocalRule rule_;
  Neighborhood neighborhood_;
  std::string name_;
};

/// Output length |w| - (s - r); output j reads input j .. j + s - r.
Word apply_window(const CellularAutomaton& f, std::span<const Letter> w);
PeriodicConfig apply_periodic(const CellularAutomaton& f, const PeriodicConfig& x);

/// Equivalent automaton whose rule depends on both ends of its neighborhood.
CellularAutomaton smallest_neighborhood(const CellularAutomaton& f);
/// Width one after trimming.
bool is_trivial(const CellularAutomaton& f);

struct Permutativity {
  bool left = false;
  bool right = false;

  bool bipermutative() const { return left && right; }
  bool operator==(const Permutativity&) const = default;
};

/// Decided on the smallest neighborhood. Linear/affine rules use the extreme coefficients.
Permutativity permutativity(const CellularAutomaton& f);
/// Exhaustive decision over the rule table regardless of the rule kind.
Permutativity permutativity_by_table(const CellularAutomaton& f);

/// f o g.
CellularAutomaton compose(const CellularAutomaton& f, const CellularAutomaton& g,
                          std::uint64_t table_cap = kDefaultTableCap);
CellularAutomaton power(const CellularAutomaton& f, std::uint64_t n, std::uint64_t table_cap = kDefaultTableCap);
/// sigma^m o f.
CellularAutomaton with_shift(const CellularAutomaton& f, int m);

/// Linear rules, and affine rules with zero constant.
LaurentPoly as_laurent(const CellularAutomaton& f);
CellularAutomaton from_laurent(const LaurentPoly& poly);

/// Whether the global map is a group endomorphism of A^Z.
bool is_endomorphism(const CellularAutomaton& f);
/// Linear rule equal to an additive automaton; throws PreconditionError otherwise.
CellularAutomaton to_linear(const CellularAutomaton& f);

struct SurjectivityReport {
  bool surjective = false;          // exact, from the pair graph (no diamonds)
  bool balanced = false;            // every checked word has |A|^(s-r) preimages
  std::size_t bound_requested = 0;  // 2 * width * ceil(log2 |A|) + 4
  std::size_t bound_used = 0;       // largest word length actually checked
};

SurjectivityReport surjectivity(const CellularAutomaton& f, std::uint64_t enumeration_cap = std::uint64_t{1} << 20);
bool is_surjective(const CellularAutomaton& f);

/// F^{-1}([w]_i) as disjoint cylinders of length |w| + s - r at offset i + r, in lexicographic order.
std::vector<Cylinder> cylinder_preimage(const CellularAutomaton& f, const Cylinder& c,
                                        std::size_t cap = kDefaultPreimageCap);

}  // namespace algca
