#pragma once

// One-sided radius-1 automata: the right-letter relation partition, the two
// Boyle-Maass criteria, inversion, the dual automaton on the class alphabet
// and a brute-force conjugacy check.

#include "algca/automaton.hpp"

#include <optional>
#include <string>
#include <vector>

namespace algca {

struct ClassAAnalysis {
  GroupSpec alphabet;
  std::vector<Letter> table;                // F(a, b) at index a * |A| + b
  std::vector<std::vector<Letter>> classes;  // ordered by smallest member; class of 0 first
  std::vector<std::size_t> class_of;
  std::vector<Letter> pi;                  // pi(a) = F(a, a)
  std::vector<std::vector<Letter>> succ;   // Succ(a) = {F(a, b)}, sorted
  bool pi_permutation = false;
  bool left_permutative = false;
  bool invertible_r1 = false;  // the three BM1 conditions
  bool class_a = false;        // BM1 and BM2

  Letter local(Letter a, Letter b) const { return table[a * alphabet.order() + b]; }
  std::size_t quotient_size() const { return classes.size(); }
  /// Quotient alphabet Z/n, class i labelled i.
  GroupSpec quotient() const { return GroupSpec::cyclic(static_cast<std::int64_t>(classes.size())); }
};

/// F must read only positions 0 and 1; throws ShapeError otherwise.
ClassAAnalysis analyze_radius1(const CellularAutomaton& f);

bool check_bm1(const ClassAAnalysis& analysis);
/// Throws PreconditionError unless BM1 holds.
bool check_bm2(const ClassAAnalysis& analysis);

/// Inverse on neighborhood [0, 1]: the formula for linear rules, solved from the table otherwise.
/// Round trip checked on every window of width 8 (capped at 2^16 windows).
CellularAutomaton invert_radius1(const CellularAutomaton& f);

/// f0 automorphism, Im f1 = f0(Ker f1), Im f1 meets Ker f1 only in 0.
bool check_linear_classA(const Endomorphism& f0, const Endomorphism& f1);

/// f0, f1 of a linear rule on [0, 1].
std::pair<Endomorphism, Endomorphism> radius1_coefficients(const CellularAutomaton& f);

enum class DualProvenance { Solved, Formula };

struct DualCA {
  CellularAutomaton rule;  // table over the quotient alphabet on [-1, 1]
  DualProvenance provenance = DualProvenance::Solved;
};

/// delta = class(F(x)_1) as a function of (class x_0, class F(x)_0, class F^2(x)_0).
DualCA dual_ca(const CellularAutomaton& f);
/// Same map from the projections of f0 and f1 on Im f1 + Ker f1; linear Class (A) F only.
DualCA dual_ca_linear(const CellularAutomaton& f);

struct ConjugacyResult {
  bool holds = false;
  std::size_t windows_checked = 0;
  std::size_t comparisons = 0;
  std::optional<Word> witness;  // first seed window with a mismatch
};

/// Class labels of the orbit columns of every seed window of the given width, advanced by
/// the dual rule, against the labels one column to the right.
ConjugacyResult verify_conjugacy(const CellularAutomaton& f, const DualCA& dual, std::size_t depth,
                                 std::size_t width);

/// The two worked Class (A) rules over Z/2 x Z/2.
CellularAutomaton class_a_example_f1();
CellularAutomaton class_a_example_f2();

}  // namespace algca
