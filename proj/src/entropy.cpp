#include "algca/entropy.hpp"

#include "algca/error.hpp"

#include <boost/container_hash/hash.hpp>

#include <algorithm>
#include <cmath>
#include <unordered_map>

namespace algca {

std::string to_string(FormulaCase c) {
  switch (c) {
    case FormulaCase::NonNegative:
      return "s>=r>=0: s*h";
    case FormulaCase::Straddling:
      return "s>=0>=r: (s-r)*h";
    case FormulaCase::NonPositive:
      return "0>=s>=r: -r*h";
  }
  return "?";
}

namespace {

CellularAutomaton require_bipermutative(const CellularAutomaton& f) {
  CellularAutomaton g = smallest_neighborhood(f);
  if (!permutativity(g).bipermutative())
    throw PreconditionError("entropy formula needs a bipermutative automaton; " + f.describe() + " is not");
  return g;
}

}  // namespace

FormulaEntropy formula_entropy(const CellularAutomaton& f, double h_sigma) {
  const CellularAutomaton g = require_bipermutative(f);
  const int r = g.neighborhood().left;
  const int s = g.neighborhood().right;
  FormulaEntropy out;
  out.neighborhood = g.neighborhood();
  if (r >= 0) {
    out.formula_case = FormulaCase::NonNegative;
    out.value = s * h_sigma;
  } else if (s >= 0) {
    out.formula_case = FormulaCase::Straddling;
    out.value = (s - r) * h_sigma;
  } else {
    out.formula_case = FormulaCase::NonPositive;
    out.value = -r * h_sigma;
  }
  return out;
}

std::size_t column_width(const CellularAutomaton& f) {
  const CellularAutomaton g = smallest_neighborhood(f);
  const int t = std::max(g.neighborhood().right, 0) - std::min(g.neighborhood().left, 0);
  return static_cast<std::size_t>(std::max(t, 1));
}

double topological_entropy(const CellularAutomaton& f) {
  const CellularAutomaton g = require_bipermutative(f);
  const int t = std::max(g.neighborhood().right, 0) - std::min(g.neighborhood().left, 0);
  return t * std::log(static_cast<double>(g.alphabet().order()));
}

namespace {

struct WordHash {
  std::size_t operator()(const Word& w) const { return boost::hash_range(w.begin(), w.end()); }
};

double prefix_entropy(const std::vector<Word>& samples, std::size_t len) {
  if (len == 0) return 0.0;
  std::unordered_map<Word, std::size_t, WordHash> counts;
  for (const auto& w : samples) ++counts[Word(w.begin(), w.begin() + static_cast<std::ptrdiff_t>(len))];
  const auto n = static_cast<double>(samples.size());
  double h = 0.0;
  for (const auto& [w, c] : counts) {
    (void)w;
    const double p = static_cast<double>(c) / n;
    h -= p * std::log(p);
  }
  return h;
}

}  // namespace

double block_entropy_estimate(const std::vector<Word>& samples, std::size_t k) {
  if (k == 0) throw PreconditionError("block length must be at least 1");
  if (samples.empty()) throw PreconditionError("block entropy needs samples");
  for (const auto& w : samples)
    if (w.size() < k) throw PreconditionError("sample shorter than the block length");
  return std::max(0.0, prefix_entropy(samples, k) - prefix_entropy(samples, k - 1));
}

std::vector<Word> column_factor_samples(const CellularAutomaton& f, const MeasureSpec& mu, std::size_t width,
                                        std::size_t depth, std::size_t count, std::uint64_t seed) {
  if (width == 0 || depth == 0) throw PreconditionError("column width and depth must be positive");
  if (!(f.alphabet() == mu.alphabet())) throw ShapeError("measure and automaton alphabets differ");
  const std::int64_t r = f.neighborhood().left;
  const std::int64_t s = f.neighborhood().right;
  const auto steps = static_cast<std::int64_t>(depth - 1);
  const std::int64_t lo = std::min<std::int64_t>(0, steps * r);
  const std::int64_t hi = static_cast<std::int64_t>(width) - 1 + std::max<std::int64_t>(0, steps * s);
  if (hi - lo + 1 > (std::int64_t{1} << 20)) throw CapExceeded("column sampling window too wide");
  const std::uint64_t q = f.alphabet().order();
  (void)checked_power(q, width, std::uint64_t{1} << 32);

  std::mt19937_64 rng(seed);
  std::vector<Word> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    Word w = sample(mu, lo, static_cast<std::size_t>(hi - lo + 1), rng);
    std::int64_t start = lo;
    Word column;
    column.reserve(depth);
    for (std::size_t n = 0; n < depth; ++n) {
      if (n > 0) {
        w = apply_window(f, w);
        start -= r;
      }
      const auto at = static_cast<std::size_t>(-start);
      column.push_back(static_cast<Letter>(pack_word(q, std::span<const Letter>(w).subspan(at, width))));
    }
    out.push_back(std::move(column));
  }
  return out;
}

BoundsReport bounds_check(const CellularAutomaton& f, double h_sigma, double h_f,
                          std::optional<double> expansivity_radius, double tolerance) {
  const CellularAutomaton g = smallest_neighborhood(f);
  BoundsReport out;
  out.upper = (g.neighborhood().right - g.neighborhood().left) * h_sigma;
  out.upper_ok = h_f <= out.upper + tolerance;
  if (expansivity_radius) {
    out.lower = h_sigma / *expansivity_radius;
    out.lower_ok = h_f >= *out.lower - tolerance;
  }
  return out;
}

EntropyReport estimate_entropy(const CellularAutomaton& f, const MeasureSpec& mu, const EntropyOptions& options) {
  EntropyReport report;
  report.samples = options.samples;
  report.block = options.block;
  report.seed = options.seed;

  std::mt19937_64 rng(options.seed);
  std::vector<Word> windows;
  windows.reserve(options.samples);
  for (std::size_t i = 0; i < options.samples; ++i) windows.push_back(sample(mu, 0, options.block, rng));
  report.h_sigma_estimate = block_entropy_estimate(windows, options.block);
  windows.clear();
  windows.shrink_to_fit();

  const CellularAutomaton g = smallest_neighborhood(f);
  report.column_width = column_width(g);
  const auto columns =
      column_factor_samples(g, mu, report.column_width, options.block, options.samples, options.seed + 1);
  report.h_f_estimate = block_entropy_estimate(columns, options.block);

  try {
    report.h_f_formula = formula_entropy(g, report.h_sigma_estimate);
  } catch (const PreconditionError& e) {
    report.formula_error = e.what();
  }
  report.bounds = bounds_check(g, report.h_sigma_estimate, report.h_f_estimate, options.expansivity_radius);
  return report;
}

}  // namespace algca
