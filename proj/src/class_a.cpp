#include "algca/class_a.hpp"

#include "algca/error.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace algca {

namespace {

/// F(a, b) for every pair, reading F on [0, 1].
std::vector<Letter> radius1_table(const CellularAutomaton& f) {
  const Neighborhood nb = f.neighborhood();
  if (nb.left < 0 || nb.right > 1)
    throw ShapeError("one-sided radius-1 automaton expected, neighborhood is [" + std::to_string(nb.left) + "," +
                     std::to_string(nb.right) + "]");
  const std::uint64_t q = f.alphabet().order();
  std::vector<Letter> out(q * q);
  for (Letter a = 0; a < q; ++a)
    for (Letter b = 0; b < q; ++b) {
      const Letter pair[2] = {a, b};
      out[a * q + b] = f.local(std::span<const Letter>(pair).subspan(static_cast<std::size_t>(nb.left), f.width()));
    }
  return out;
}

bool is_permutation(std::vector<Letter> v) {
  std::sort(v.begin(), v.end());
  for (std::size_t i = 0; i < v.size(); ++i)
    if (v[i] != i) return false;
  return true;
}

/// Every window of the given width, capped.
std::uint64_t window_count(std::uint64_t q, std::size_t width) {
  return checked_power(q, width, std::uint64_t{1} << 20);
}

std::vector<Letter> sorted_image(std::vector<Letter> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

}  // namespace

ClassAAnalysis analyze_radius1(const CellularAutomaton& f) {
  ClassAAnalysis out{f.alphabet(), radius1_table(f), {}, {}, {}, {}, false, false, false, false};
  const std::uint64_t q = f.alphabet().order();

  // a R b iff F(., a) = F(., b).
  std::map<std::vector<Letter>, std::size_t> by_signature;
  out.class_of.assign(q, 0);
  for (Letter b = 0; b < q; ++b) {
    std::vector<Letter> sig(q);
    for (Letter c = 0; c < q; ++c) sig[c] = out.local(c, b);
    auto [it, inserted] = by_signature.emplace(sig, out.classes.size());
    if (inserted) out.classes.emplace_back();
    out.classes[it->second].push_back(b);
    out.class_of[b] = it->second;
  }

  out.pi.resize(q);
  out.succ.resize(q);
  for (Letter a = 0; a < q; ++a) {
    out.pi[a] = out.local(a, a);
    std::vector<Letter> row(q);
    for (Letter b = 0; b < q; ++b) row[b] = out.local(a, b);
    out.succ[a] = sorted_image(std::move(row));
  }
  out.pi_permutation = is_permutation(out.pi);
  out.left_permutative = true;
  for (Letter b = 0; b < q && out.left_permutative; ++b) {
    std::vector<Letter> col(q);
    for (Letter a = 0; a < q; ++a) col[a] = out.local(a, b);
    out.left_permutative = is_permutation(std::move(col));
  }
  out.invertible_r1 = check_bm1(out);
  out.class_a = out.invertible_r1 && check_bm2(out);
  return out;
}

namespace {

std::vector<Letter> pi_of_class(const ClassAAnalysis& an, std::size_t c) {
  std::vector<Letter> img;
  for (Letter x : an.classes[c]) img.push_back(an.pi[x]);
  return sorted_image(std::move(img));
}

}  // namespace

bool check_bm1(const ClassAAnalysis& an) {
  if (!an.pi_permutation || !an.left_permutative) return false;
  for (Letter a = 0; a < an.alphabet.order(); ++a) {
    const auto target = pi_of_class(an, an.class_of[a]);
    if (!std::includes(target.begin(), target.end(), an.succ[a].begin(), an.succ[a].end())) return false;
  }
  return true;
}

bool check_bm2(const ClassAAnalysis& an) {
  if (!check_bm1(an)) throw PreconditionError("BM2 is only meaningful once BM1 holds");
  for (std::size_t c = 0; c < an.classes.size(); ++c) {
    for (std::size_t d = 0; d < an.classes.size(); ++d) {
      const auto img = pi_of_class(an, d);
      std::size_t meet = 0;
      for (Letter x : an.classes[c]) meet += std::binary_search(img.begin(), img.end(), x) ? 1 : 0;
      if (meet > 1) return false;
    }
  }
  for (Letter a = 0; a < an.alphabet.order(); ++a)
    if (an.succ[a] != pi_of_class(an, an.class_of[a])) return false;
  return true;
}

std::pair<Endomorphism, Endomorphism> radius1_coefficients(const CellularAutomaton& f) {
  if (!f.is_linear()) throw PreconditionError("linear rule expected");
  const Neighborhood nb = f.neighborhood();
  if (nb.left < 0 || nb.right > 1) throw ShapeError("one-sided radius-1 automaton expected");
  return {f.polynomial().coefficient(0), f.polynomial().coefficient(1)};
}

namespace {

void check_round_trip(const CellularAutomaton& f, const CellularAutomaton& g) {
  const std::uint64_t q = f.alphabet().order();
  std::size_t width = 8;
  while (width > 3 && checked_power(q, width, std::uint64_t{1} << 62) > (std::uint64_t{1} << 16)) --width;
  const std::uint64_t count = window_count(q, width);
  for (std::uint64_t code = 0; code < count; ++code) {
    const Word w = unpack_word(q, code, width);
    const Word gf = apply_window(g, apply_window(f, w));
    const Word fg = apply_window(f, apply_window(g, w));
    if (!std::equal(gf.begin(), gf.end(), w.begin()) || !std::equal(fg.begin(), fg.end(), w.begin()))
      throw Error("inverse round trip failed on " + word_string(f.alphabet(), w));
  }
}

}  // namespace

CellularAutomaton invert_radius1(const CellularAutomaton& f) {
  const GroupSpec& a = f.alphabet();
  const std::uint64_t q = a.order();
  std::optional<CellularAutomaton> inverse;
  if (f.is_linear()) {
    const auto [f0, f1] = radius1_coefficients(f);
    const auto f0_inv = hom_inverse(f0);
    if (!f0_inv) throw PreconditionError("f0 is not an automorphism; F is not invertible with radius 1");
    if (!compose(f1, compose(*f0_inv, f1)).is_zero())
      throw PreconditionError("f1 f0^-1 f1 is nonzero; F is not invertible with radius 1");
    const Endomorphism tail = -compose(*f0_inv, compose(f1, *f0_inv));
    std::map<int, Endomorphism> terms{{0, *f0_inv}};
    if (!tail.is_zero()) terms.emplace(1, tail);
    inverse = CellularAutomaton::linear(LaurentPoly(a, terms));
    inverse = CellularAutomaton(a, inverse->rule(), Neighborhood{0, 1});
  } else {
    const ClassAAnalysis an = analyze_radius1(f);
    if (!an.invertible_r1) throw PreconditionError("BM1 fails; F is not invertible with radius 1");
    // x_0 as a function of (F(x)_0, F(x)_1).
    std::vector<std::optional<Letter>> solved(q * q);
    for (std::uint64_t code = 0; code < q * q * q; ++code) {
      const Word x = unpack_word(q, code, 3);
      const std::uint64_t key = an.local(x[0], x[1]) * q + an.local(x[1], x[2]);
      if (solved[key] && *solved[key] != x[0]) throw Error("inverse is not a function of two letters");
      solved[key] = x[0];
    }
    std::vector<Letter> outputs(q * q);
    for (std::uint64_t k = 0; k < q * q; ++k) {
      if (!solved[k]) throw Error("inverse undefined on a pair; F is not surjective");
      outputs[k] = *solved[k];
    }
    inverse = CellularAutomaton::table(a, Neighborhood{0, 1}, std::move(outputs));
  }
  check_round_trip(f, *inverse);
  if (!f.name().empty()) inverse->set_name(f.name() + "^-1");
  return *inverse;
}

bool check_linear_classA(const Endomorphism& f0, const Endomorphism& f1) {
  if (!f0.is_square() || !f1.is_square() || !(f0.source() == f1.source()))
    throw ShapeError("f0 and f1 must be endomorphisms of one group");
  if (!hom_is_automorphism(f0)) return false;
  const auto im = hom_image(f1);
  const auto ker = hom_kernel(f1);
  std::vector<Letter> f0_ker;
  for (Letter k : ker) f0_ker.push_back(f0.apply(k));
  if (sorted_image(f0_ker) != sorted_image(im)) return false;
  std::vector<Letter> meet;
  std::set_intersection(im.begin(), im.end(), ker.begin(), ker.end(), std::back_inserter(meet));
  return meet.size() == 1;
}

DualCA dual_ca(const CellularAutomaton& f) {
  const ClassAAnalysis an = analyze_radius1(f);
  if (!an.class_a) throw PreconditionError("dual automaton needs a Class (A) rule");
  const std::uint64_t q = an.alphabet.order();
  const std::uint64_t n = an.quotient_size();
  std::vector<std::optional<Letter>> solved(n * n * n);
  for (std::uint64_t code = 0; code < q * q * q; ++code) {
    const Word x = unpack_word(q, code, 3);
    const Letter f0 = an.local(x[0], x[1]);
    const Letter f1 = an.local(x[1], x[2]);
    const Letter ff0 = an.local(f0, f1);
    const std::uint64_t key = (an.class_of[x[0]] * n + an.class_of[f0]) * n + an.class_of[ff0];
    const auto delta = static_cast<Letter>(an.class_of[f1]);
    if (solved[key] && *solved[key] != delta) throw Error("column constraints do not determine the dual rule");
    solved[key] = delta;
  }
  std::vector<Letter> outputs(n * n * n);
  for (std::uint64_t k = 0; k < outputs.size(); ++k) {
    if (!solved[k]) throw Error("dual rule undetermined on some class triple");
    outputs[k] = *solved[k];
  }
  CellularAutomaton rule = CellularAutomaton::table(an.quotient(), Neighborhood{-1, 1}, std::move(outputs));
  if (!permutativity_by_table(rule).bipermutative()) throw Error("dual rule is not bipermutative");
  rule.set_name(f.name().empty() ? "dual" : "dual(" + f.name() + ")");
  return {std::move(rule), DualProvenance::Solved};
}

DualCA dual_ca_linear(const CellularAutomaton& f) {
  const auto [f0, f1] = radius1_coefficients(f);
  if (!check_linear_classA(f0, f1)) throw PreconditionError("linear rule is not in Class (A)");
  const ClassAAnalysis an = analyze_radius1(f);
  const GroupSpec& a = f.alphabet();
  const auto im = hom_image(f1);
  const auto ker = hom_kernel(f1);

  // v = proj_im(v) + proj_ker(v).
  auto split = [&](Letter v) -> std::pair<Letter, Letter> {
    for (Letter i : im) {
      const Letter k = a.sub(v, i);
      if (std::binary_search(ker.begin(), ker.end(), k)) return {i, k};
    }
    throw Error("Im f1 + Ker f1 does not cover the alphabet");
  };
  // Representative in Im f1 of each class.
  const std::uint64_t n = an.quotient_size();
  std::vector<Letter> rep(n);
  for (Letter i : im) rep[an.class_of[i]] = i;
  std::map<Letter, Letter> f1_inv;  // f1 restricted to Im f1
  for (Letter i : im) f1_inv[f1.apply(i)] = i;

  std::vector<Letter> outputs(n * n * n);
  for (std::uint64_t code = 0; code < outputs.size(); ++code) {
    const Word cls = unpack_word(n, code, 3);
    const Letter alpha = rep[cls[0]];
    const Letter beta = rep[cls[1]];
    const Letter gamma = rep[cls[2]];
    const Letter f0_11_beta = split(f0.apply(beta)).first;
    const Letter f0_21_alpha = split(f0.apply(alpha)).second;
    const Letter f0_12_term = split(f0.apply(f0_21_alpha)).first;
    const Letter inner = a.sub(a.sub(gamma, f0_11_beta), f0_12_term);
    const Letter delta = f1_inv.at(inner);
    outputs[code] = static_cast<Letter>(an.class_of[delta]);
  }
  CellularAutomaton rule = CellularAutomaton::table(an.quotient(), Neighborhood{-1, 1}, std::move(outputs));
  rule.set_name(f.name().empty() ? "dual" : "dual(" + f.name() + ")");
  return {std::move(rule), DualProvenance::Formula};
}

ConjugacyResult verify_conjugacy(const CellularAutomaton& f, const DualCA& dual, std::size_t depth,
                                 std::size_t width) {
  const ClassAAnalysis an = analyze_radius1(f);
  ConjugacyResult out;
  if (dual.rule.alphabet().order() != an.quotient_size() || !(dual.rule.neighborhood() == Neighborhood{-1, 1})) {
    out.holds = false;
    return out;
  }
  const std::uint64_t q = an.alphabet.order();
  const std::uint64_t count = window_count(q, width);
  depth = std::min(depth, width);
  out.holds = true;
  for (std::uint64_t code = 0; code < count; ++code) {
    ++out.windows_checked;
    std::vector<Word> labels;
    Word row = unpack_word(q, code, width);
    for (std::size_t i = 0; i < depth && !row.empty(); ++i) {
      Word lab(row.size());
      for (std::size_t j = 0; j < row.size(); ++j) lab[j] = static_cast<Letter>(an.class_of[row[j]]);
      labels.push_back(std::move(lab));
      Word next(row.size() - 1);
      for (std::size_t j = 0; j + 1 < row.size(); ++j) next[j] = an.local(row[j], row[j + 1]);
      row = std::move(next);
    }
    for (std::size_t i = 1; i + 1 < labels.size(); ++i) {
      // Row i + 1 is one shorter than row i, so both sides are defined for j < |row i+1|.
      for (std::size_t j = 0; j < labels[i + 1].size(); ++j) {
        const Letter window[3] = {labels[i - 1][j], labels[i][j], labels[i + 1][j]};
        ++out.comparisons;
        if (dual.rule.local(window) != labels[i][j + 1]) {
          out.holds = false;
          out.witness = unpack_word(q, code, width);
          return out;
        }
      }
    }
  }
  return out;
}

namespace {

CellularAutomaton example(const char* name, std::initializer_list<std::int64_t> f0_entries) {
  const GroupSpec a({2, 2});
  IntMatrix m0(2, 2);
  auto it = f0_entries.begin();
  m0 << it[0], it[1], it[2], it[3];
  IntMatrix m1(2, 2);
  m1 << 1, 0, 0, 0;
  std::map<int, Endomorphism> terms{{0, Endomorphism(a, m0)}, {1, Endomorphism(a, m1)}};
  CellularAutomaton f = CellularAutomaton::linear(LaurentPoly(a, terms));
  f.set_name(name);
  return f;
}

}  // namespace

CellularAutomaton class_a_example_f1() { return example("F1", {1, 1, 1, 0}); }
CellularAutomaton class_a_example_f2() { return example("F2", {0, 1, 1, 0}); }

}  // namespace algca
