#include "algca/entropy.hpp"
#include "algca/error.hpp"
#include "algca/measure.hpp"

#include <sstream>

namespace algca {

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Holds:
      return "holds";
    case Verdict::Fails:
      return "fails";
    case Verdict::Unchecked:
      return "unchecked";
    case Verdict::NotApplicable:
      return "n/a";
  }
  return "?";
}

bool HypothesisReport::all_checkable_hold() const {
  if (trivial || !bipermutative) return false;
  for (const auto& item : items)
    if (item.verdict == Verdict::Fails) return false;
  return true;
}

namespace {

/// A cylinder charged by Haar on X and disjoint from sigma^{-1}(X), when X is sigma^{kp1}- but not sigma-invariant.
std::optional<Cylinder> invariant_set_witness(const GroupSpec& a, const ProductSubgroup& x, std::uint64_t kp1) {
  const std::size_t window = 2 * x.grouping * std::max<std::uint64_t>(kp1, 1);
  if (!same_support(a, shift_preimage(x, static_cast<std::int64_t>(kp1)), x, window)) return std::nullopt;
  const MeasureSpec on_x(a, HaarOnShift{x});
  const MeasureSpec on_pre(a, HaarOnShift{shift_preimage(x, 1)});
  for (std::size_t off = 0; off < x.grouping; ++off) {
    const auto p = window_distribution(on_x, static_cast<std::int64_t>(off), window);
    const auto q = window_distribution(on_pre, static_cast<std::int64_t>(off), window);
    for (std::size_t c = 0; c < p.size(); ++c)
      if (p[c] > 0 && q[c] == 0) return Cylinder{static_cast<std::int64_t>(off), unpack_word(a.order(), c, window)};
  }
  return std::nullopt;
}

std::vector<std::pair<Rational, MeasurePtr>> weighted_components(const MeasurePtr& mu) {
  if (const auto* m = std::get_if<Mixture>(&mu->variant())) {
    std::vector<std::pair<Rational, MeasurePtr>> out;
    for (std::size_t i = 0; i < m->components.size(); ++i) out.emplace_back(m->weights[i], m->components[i]);
    return out;
  }
  return {{Rational(1), mu}};
}

}  // namespace

HypothesisReport check_hypotheses(const CellularAutomaton& f, const SubgroupShift& shift, const MeasurePtr& mu,
                                  const HypothesisOptions& options) {
  const GroupSpec& a = f.alphabet();
  HypothesisReport report;
  report.k = a.radical();
  report.trivial = is_trivial(f);
  const CellularAutomaton g = smallest_neighborhood(f);
  report.bipermutative = permutativity(g).bipermutative();
  if (report.trivial || !report.bipermutative) {
    const std::string why = report.trivial ? "trivial automaton (one-cell neighborhood)" : "not bipermutative";
    for (const char* name : {"(1) ergodicity", "(2) invariant sigma-algebras", "(3) positive entropy",
                             "(4) dense subgroups"})
      report.items.push_back({name, Verdict::NotApplicable, why});
    return report;
  }

  const KernelTower t = tower(g, 1);
  report.p1 = t.level(1).period_lcm;
  report.kp1 = report.k * report.p1;
  report.condition4 = condition4_search(g, a, shift, options.m_max);
  report.corollary_ker = corollary_ker_check(g, a, shift);

  // (1) ergodicity is not decidable here; invariance is the checkable part.
  {
    HypothesisItem item{"(1) mu is (F,sigma)-ergodic", Verdict::Unchecked,
                        "ergodicity of the joint action is not decided"};
    if (mu) {
      try {
        const auto by_f = invariance_check(*mu, {AutomatonStep{g, 1}}, options.invariance_length);
        const auto by_sigma = invariance_check(*mu, {ShiftStep{1}}, options.invariance_length);
        std::ostringstream os;
        os << "ergodicity not decided; exact invariance at L=" << options.invariance_length
           << ": F " << (by_f.invariant() ? "yes" : "no") << ", sigma " << (by_sigma.invariant() ? "yes" : "no");
        item.detail = os.str();
        if (!by_f.invariant() || !by_sigma.invariant()) item.verdict = Verdict::Fails;
      } catch (const CapExceeded&) {
        item.detail += " (invariance check exceeded its cap)";
      }
    }
    report.items.push_back(std::move(item));
  }

  // (2) I(sigma) = I(sigma^{kp1}): only a refutation is attempted.
  {
    HypothesisItem item{"(2) I_mu(sigma) = I_mu(sigma^{k p1})", Verdict::Unchecked,
                        "equality of invariant sigma-algebras is not decided"};
    if (mu) {
      for (const auto& [w, component] : weighted_components(mu)) {
        if (w == 0) continue;
        const auto* h = std::get_if<HaarOnShift>(&component->variant());
        if (h == nullptr) continue;
        const auto* x = std::get_if<ProductSubgroup>(&h->support);
        if (x == nullptr) continue;
        if (auto cyl = invariant_set_witness(a, *x, report.kp1)) {
          std::ostringstream os;
          os << "X = " << describe(a, h->support) << " is sigma^" << report.kp1
             << "-invariant, carries mass >= " << w << ", and cylinder [" << word_string(a, cyl->word) << "]_"
             << cyl->offset << " meets X but not sigma^-1(X)";
          item.verdict = Verdict::Fails;
          item.detail = os.str();
          break;
        }
      }
    }
    report.items.push_back(std::move(item));
  }

  // (3) h(F) > 0 iff h(sigma) > 0 for nontrivial bipermutative F.
  {
    HypothesisItem item{"(3) h_mu(F) > 0", Verdict::Unchecked, "abstract measure"};
    if (mu) {
      std::mt19937_64 rng(options.seed);
      std::vector<Word> windows;
      windows.reserve(options.samples);
      for (std::size_t i = 0; i < options.samples; ++i) windows.push_back(sample(*mu, 0, options.block, rng));
      report.h_sigma_estimate = block_entropy_estimate(windows, options.block);
      const FormulaEntropy fe = formula_entropy(g, *report.h_sigma_estimate);
      std::ostringstream os;
      os << "h_sigma ~ " << *report.h_sigma_estimate << " nats (k=" << options.block << ", n=" << options.samples
         << ", seed=" << options.seed << "); formula gives h_F ~ " << fe.value;
      item.detail = os.str();
      item.verdict = *report.h_sigma_estimate > 1e-3 ? Verdict::Holds : Verdict::Fails;
    }
    report.items.push_back(std::move(item));
  }

  // (4) through the D^Sigma_1 criterion.
  {
    HypothesisItem item{"(4) sigma-invariant infinite subgroups of D^Sigma_inf are dense in Sigma", Verdict::Fails,
                        ""};
    std::ostringstream os;
    if (report.condition4->found) {
      item.verdict = Verdict::Holds;
      os << "boundary criterion met at m = " << *report.condition4->found;
    } else {
      os << "boundary criterion not met for m <= " << report.condition4->m_max;
      if (report.condition4->cap_hit_at) os << " (enumeration cap reached at m = " << *report.condition4->cap_hit_at << ")";
      item.verdict = Verdict::Unchecked;
    }
    os << "; kernel criterion " << (report.corollary_ker->holds ? "holds" : "does not hold");
    item.detail = os.str();
    report.items.push_back(std::move(item));
  }
  return report;
}

}  // namespace algca
