#pragma once

// Closed-form entropies of bipermutative automata, the width upper bound,
// the expansive lower bound, and block-entropy Monte Carlo estimates.

#include "algca/measure.hpp"

#include <optional>
#include <string>
#include <vector>

namespace algca {

/// Sign pattern of the smallest neighborhood [r, s].
enum class FormulaCase {
  NonNegative,  // s >= r >= 0: s * h
  Straddling,   // s >= 0 >= r: (s - r) * h
  NonPositive,  // 0 >= s >= r: -r * h
};
std::string to_string(FormulaCase c);

struct FormulaEntropy {
  double value = 0.0;
  FormulaCase formula_case = FormulaCase::NonNegative;
  Neighborhood neighborhood;
};

/// h(F) from h(sigma); throws PreconditionError unless F is bipermutative.
FormulaEntropy formula_entropy(const CellularAutomaton& f, double h_sigma);

/// t log|A| with t = max(s, 0) - min(r, 0); bipermutative F only.
double topological_entropy(const CellularAutomaton& f);

/// Width of the column process: max(s, 0) - min(r, 0), at least 1.
std::size_t column_width(const CellularAutomaton& f);

/// H_k - H_{k-1} in nats from the length-k prefixes of the samples, clamped at 0.
double block_entropy_estimate(const std::vector<Word>& samples, std::size_t k);

/// Each word lists F^n(x)_{[0, width)} as a letter of A^width for n < depth.
std::vector<Word> column_factor_samples(const CellularAutomaton& f, const MeasureSpec& mu, std::size_t width,
                                        std::size_t depth, std::size_t count, std::uint64_t seed);

struct BoundsReport {
  double upper = 0.0;  // (s - r) h_sigma
  bool upper_ok = false;
  std::optional<double> lower;  // h_sigma / r_T
  std::optional<bool> lower_ok;
};

BoundsReport bounds_check(const CellularAutomaton& f, double h_sigma, double h_f,
                          std::optional<double> expansivity_radius = std::nullopt, double tolerance = 0.02);

struct EntropyOptions {
  std::size_t samples = 1000000;
  std::size_t block = 4;
  std::uint64_t seed = 1;
  std::optional<double> expansivity_radius;
};

struct EntropyReport {
  double h_sigma_estimate = 0.0;  // nats
  double h_f_estimate = 0.0;
  std::optional<FormulaEntropy> h_f_formula;  // absent unless bipermutative
  std::string formula_error;
  std::size_t column_width = 1;
  BoundsReport bounds;
  std::size_t samples = 0;
  std::size_t block = 0;
  std::uint64_t seed = 0;
};

EntropyReport estimate_entropy(const CellularAutomaton& f, const MeasureSpec& mu, const EntropyOptions& options = {});

}  // namespace algca
