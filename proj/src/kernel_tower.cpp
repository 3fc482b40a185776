#include "algca/kernel_tower.hpp"

#include "algca/closure.hpp"
#include "algca/error.hpp"

#include <algorithm>
#include <set>
#include <sstream>
#include <unordered_set>

namespace algca {

namespace {

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

bool is_subgroup_of_letters(const GroupSpec& g, const std::vector<Letter>& letters) {
  if (letters.empty() || letters.front() != 0) return false;
  for (Letter a : letters)
    for (Letter b : letters)
      if (!std::binary_search(letters.begin(), letters.end(), g.add(a, b))) return false;
  return true;
}

using ConfigSet = std::unordered_set<PeriodicConfig, PeriodicConfigHash>;

}  // namespace

// --- subgroup shifts -------------------------------------------------------

ProductSubgroup make_product_subgroup(const GroupSpec& alphabet, std::size_t grouping, std::size_t phase,
                                      std::vector<Letter> blocks) {
  if (grouping == 0) throw SpecError("product subgroup: grouping must be positive");
  const GroupSpec block_group = alphabet.power(grouping);
  std::sort(blocks.begin(), blocks.end());
  blocks.erase(std::unique(blocks.begin(), blocks.end()), blocks.end());
  for (Letter b : blocks)
    if (b >= block_group.order()) throw SpecError("product subgroup: block outside A^t");
  if (!is_subgroup_of_letters(block_group, blocks)) throw SpecError("product subgroup: blocks do not form a subgroup of A^t");
  return ProductSubgroup{grouping, phase % grouping, std::move(blocks)};
}

ProductSubgroup letterwise_subgroup(const GroupSpec& alphabet, std::vector<Letter> letters) {
  return make_product_subgroup(alphabet, 1, 0, std::move(letters));
}

bool shift_contains(const GroupSpec& alphabet, const SubgroupShift& shift, const PeriodicConfig& x) {
  if (!(x.alphabet() == alphabet)) throw ShapeError("shift_contains: alphabet mismatch");
  if (std::holds_alternative<FullShift>(shift)) return true;
  if (const auto* ps = std::get_if<ProductSubgroup>(&shift)) {
    const std::size_t t = ps->grouping;
    const std::size_t span = lcm_u64(x.period(), t);
    for (std::size_t j = 0; j < span / t; ++j) {
      const Word w = x.window(static_cast<std::int64_t>(t * j + ps->phase), t);
      const auto code = static_cast<Letter>(pack_word(alphabet.order(), w));
      if (!std::binary_search(ps->blocks.begin(), ps->blocks.end(), code)) return false;
    }
    return true;
  }
  const auto& lk = std::get<LinearKernelShift>(shift);
  return apply_periodic(from_laurent(lk.constraint), x).is_zero();
}

std::string describe(const GroupSpec& alphabet, const SubgroupShift& shift) {
  if (std::holds_alternative<FullShift>(shift)) return "full shift";
  if (const auto* ps = std::get_if<ProductSubgroup>(&shift)) {
    std::ostringstream os;
    os << "blocks of length " << ps->grouping << " at phase " << ps->phase << " in {";
    for (std::size_t i = 0; i < ps->blocks.size(); ++i) {
      const Word w = unpack_word(alphabet.order(), ps->blocks[i], ps->grouping);
      os << (i ? "," : "") << word_string(alphabet, w);
    }
    os << "}";
    return os.str();
  }
  return "Ker(" + std::get<LinearKernelShift>(shift).constraint.to_string() + ")";
}

ProductSubgroup shift_image(const ProductSubgroup& s, std::int64_t j) {
  ProductSubgroup out = s;
  out.phase = static_cast<std::size_t>(mod(static_cast<std::int64_t>(s.phase) - j, static_cast<std::int64_t>(s.grouping)));
  return out;
}

ProductSubgroup shift_preimage(const ProductSubgroup& s, std::int64_t j) { return shift_image(s, -j); }

std::optional<ProductSubgroup> automaton_image(const CellularAutomaton& f, const GroupSpec& alphabet,
                                               const ProductSubgroup& s) {
  const auto t = static_cast<std::int64_t>(s.grouping);
  const std::int64_t r = f.neighborhood().left;
  const std::int64_t sr = f.neighborhood().right;
  const std::int64_t k0 = floor_div(r, t);
  const std::int64_t k1 = floor_div(t - 1 + sr, t);
  const std::uint64_t q = alphabet.order();
  const std::uint64_t nb = s.blocks.size();

  // Patterns of `count` consecutive output blocks produced by all admissible inputs.
  auto image_patterns = [&](std::size_t count) {
    const std::size_t in_blocks = static_cast<std::size_t>(k1 - k0 + 1) + count - 1;
    const std::uint64_t combos = checked_power(nb, in_blocks, std::uint64_t{1} << 22);
    std::set<Word> patterns;
    std::vector<std::size_t> digits(in_blocks, 0);
    for (std::uint64_t c = 0; c < combos; ++c) {
      std::uint64_t rest = c;
      Word input;
      for (std::size_t b = 0; b < in_blocks; ++b) {
        digits[b] = rest % nb;
        rest /= nb;
        const Word part = unpack_word(q, s.blocks[digits[b]], s.grouping);
        input.insert(input.end(), part.begin(), part.end());
      }
      // input covers relative positions [t k0, t (k1 + count)); output j needs [j + r, j + s].
      const Word out = apply_window(f, input);
      const std::int64_t first_out = t * k0 - r;  // relative position of out[0]
      Word pattern(static_cast<std::size_t>(t) * count);
      for (std::size_t p = 0; p < pattern.size(); ++p)
        pattern[p] = out[static_cast<std::size_t>(static_cast<std::int64_t>(p) - first_out)];
      patterns.insert(std::move(pattern));
    }
    return patterns;
  };

  std::vector<Letter> image;
  for (const Word& w : image_patterns(1)) image.push_back(static_cast<Letter>(pack_word(q, w)));
  std::sort(image.begin(), image.end());
  if (!is_subgroup_of_letters(alphabet.power(s.grouping), image)) return std::nullopt;
  // Product structure: joint patterns of consecutive blocks must be the full product.
  const std::size_t max_joint = static_cast<std::size_t>(k1 - k0 + 2);
  for (std::size_t count = 2; count <= max_joint; ++count) {
    const auto patterns = image_patterns(count);
    const std::uint64_t expected = checked_power(image.size(), count, std::uint64_t{1} << 40);
    if (patterns.size() != expected) return std::nullopt;
  }
  return ProductSubgroup{s.grouping, s.phase, std::move(image)};
}

// --- kernels ---------------------------------------------------------------

std::vector<PeriodicConfig> kernel_elements(const CellularAutomaton& f, std::size_t n, std::size_t cap) {
  const GroupSpec& a = f.alphabet();
  if (n == 0) return {PeriodicConfig::zero(a)};
  const CellularAutomaton g = smallest_neighborhood(power(to_linear(f), n));
  const LaurentPoly& poly = g.polynomial();
  if (poly.is_zero()) throw PreconditionError("F^n is the zero map; its kernel is not finite");
  const std::size_t width = g.width();
  if (width == 1) {
    if (hom_is_automorphism(poly.coefficient(g.neighborhood().left))) return {PeriodicConfig::zero(a)};
    throw PreconditionError("single-site rule with a nontrivial kernel; the kernel is not finite");
  }
  const Permutativity perm = permutativity(g);
  if (!perm.left && !perm.right)
    throw PreconditionError("kernel enumeration needs a left- or right-permutative power of F");

  const std::uint64_t q = a.order();
  const std::uint64_t states = checked_power(q, width - 1);
  if (states > cap) throw CapExceeded("kernel_elements: " + std::to_string(states) + " states exceed cap");

  std::vector<Endomorphism> coeffs;
  for (int u = g.neighborhood().left; u <= g.neighborhood().right; ++u) coeffs.push_back(poly.coefficient(u));

  // Functional graph on windows of width - 1: the unique extension keeping the rule at 0.
  std::vector<std::uint32_t> next(states);
  const Endomorphism& solved = perm.right ? coeffs.back() : coeffs.front();
  std::vector<Letter> solve(q);
  for (Letter x = 0; x < q; ++x) solve[solved.apply(x)] = x;
  for (std::uint64_t code = 0; code < states; ++code) {
    const Word u = unpack_word(q, code, width - 1);
    Letter partial = 0;
    if (perm.right) {
      for (std::size_t j = 0; j + 1 < width; ++j) partial = a.add(partial, coeffs[j].apply(u[j]));
      const Letter ext = solve[a.neg(partial)];
      next[code] = static_cast<std::uint32_t>((code * q + ext) % states);
    } else {
      for (std::size_t j = 1; j < width; ++j) partial = a.add(partial, coeffs[j].apply(u[j - 1]));
      const Letter ext = solve[a.neg(partial)];
      next[code] = static_cast<std::uint32_t>(ext * (states / q) + code / q);
    }
  }

  // States lying on cycles of the functional graph.
  std::vector<std::uint8_t> color(states, 0);  // 0 new, 1 on current path, 2 done
  std::vector<char> on_cycle(states, 0);
  std::vector<std::uint32_t> path;
  for (std::uint64_t start = 0; start < states; ++start) {
    if (color[start] != 0) continue;
    path.clear();
    std::uint32_t v = static_cast<std::uint32_t>(start);
    while (color[v] == 0) {
      color[v] = 1;
      path.push_back(v);
      v = next[v];
    }
    if (color[v] == 1) {
      std::uint32_t w = v;
      do {
        on_cycle[w] = 1;
        w = next[w];
      } while (w != v);
    }
    for (std::uint32_t p : path) color[p] = 2;
  }

  std::vector<PeriodicConfig> out;
  for (std::uint64_t code = 0; code < states; ++code) {
    if (!on_cycle[code]) continue;
    std::vector<Letter> letters;  // x_0, x_1, ... (right) or x_0, x_{-1}, ... (left)
    std::uint32_t v = static_cast<std::uint32_t>(code);
    const std::uint64_t lead = states / q;
    do {
      letters.push_back(static_cast<Letter>(v / lead));
      v = next[v];
    } while (v != code);
    Word w(letters.size());
    if (perm.right) {
      w = letters;
    } else {
      const std::size_t len = letters.size();
      for (std::size_t j = 0; j < len; ++j) w[j] = letters[(len - j) % len];
    }
    out.emplace_back(a, std::move(w));
  }
  std::sort(out.begin(), out.end());
  return out;
}

bool KernelLevel::contains(const PeriodicConfig& x) const {
  return std::binary_search(elements.begin(), elements.end(), x);
}

const KernelLevel& KernelTower::level(std::size_t n) const {
  if (n >= levels.size()) throw PreconditionError("kernel tower level " + std::to_string(n) + " not computed");
  return levels[n];
}

namespace {

KernelLevel make_level(std::vector<PeriodicConfig> elements) {
  KernelLevel level;
  level.elements = std::move(elements);
  for (const auto& x : level.elements) level.period_lcm = lcm_u64(level.period_lcm, x.period());
  return level;
}

}  // namespace

KernelTower tower(const CellularAutomaton& f, std::size_t depth, std::size_t cap) {
  CellularAutomaton lin = smallest_neighborhood(to_linear(f));
  KernelTower t{lin, permutativity(lin), {}};
  for (std::size_t n = 0; n <= depth; ++n) t.levels.push_back(make_level(kernel_elements(lin, n, cap)));
  return t;
}

std::vector<PeriodicConfig> boundary(const KernelTower& t, std::size_t n) {
  if (n == 0) throw PreconditionError("boundary is defined for n >= 1");
  const KernelLevel& upper = t.level(n);
  const KernelLevel& lower = t.level(n - 1);
  std::vector<PeriodicConfig> out;
  std::set_difference(upper.elements.begin(), upper.elements.end(), lower.elements.begin(), lower.elements.end(),
                      std::back_inserter(out));
  return out;
}

KernelTower restrict(const KernelTower& t, const GroupSpec& alphabet, const SubgroupShift& shift) {
  KernelTower out{t.automaton, t.permutativity, {}};
  for (const KernelLevel& level : t.levels) {
    std::vector<PeriodicConfig> kept;
    for (const auto& x : level.elements)
      if (shift_contains(alphabet, shift, x)) kept.push_back(x);
    // Subgroup check: sums against every element (or a prefix for large levels).
    const std::size_t probe = kept.size() <= 2048 ? kept.size() : 32;
    for (std::size_t i = 0; i < probe; ++i)
      for (const auto& y : kept)
        if (!std::binary_search(kept.begin(), kept.end(), config_add(kept[i], y)))
          throw Error("restricted kernel level is not a subgroup");
    out.levels.push_back(make_level(std::move(kept)));
  }
  return out;
}

bool TowerReport::all_hold() const {
  if (size_law && !*size_law) return false;
  return std::all_of(steps.begin(), steps.end(), [](const LevelCheck& c) {
    // The width bound needs d in D_1 to have period dividing p_n, so it starts at n = 1.
    return c.nested && c.period_divides && (c.n == 0 || c.width_bound) && c.maps_onto_lower && c.boundary_to_boundary;
  });
}

TowerReport check_tower(const KernelTower& t) {
  TowerReport report;
  const Neighborhood nb = t.automaton.neighborhood();
  const GroupSpec& a = t.automaton.alphabet();
  report.width_exponent = static_cast<std::size_t>(nb.right - nb.left);
  report.span_exponent = static_cast<std::size_t>(std::max(nb.right, 0) - std::min(nb.left, 0));
  const std::uint64_t width_factor = checked_power(a.order(), report.width_exponent);
  const std::uint64_t span_factor = checked_power(a.order(), report.span_exponent);

  if (t.permutativity.bipermutative()) {
    bool ok = true;
    for (std::size_t n = 0; n < t.levels.size(); ++n)
      ok = ok && t.levels[n].size() == checked_power(a.order(), report.width_exponent * n);
    report.size_law = ok;
  }
  for (std::size_t n = 0; n + 1 < t.levels.size(); ++n) {
    const KernelLevel& lo = t.levels[n];
    const KernelLevel& hi = t.levels[n + 1];
    LevelCheck c;
    c.n = n;
    c.nested = std::includes(hi.elements.begin(), hi.elements.end(), lo.elements.begin(), lo.elements.end());
    c.period_divides = hi.period_lcm % lo.period_lcm == 0;
    c.width_bound = (width_factor * lo.period_lcm) % hi.period_lcm == 0;
    c.span_bound = (span_factor * lo.period_lcm) % hi.period_lcm == 0;
    std::set<PeriodicConfig> images;
    for (const auto& x : hi.elements) images.insert(apply_periodic(t.automaton, x));
    c.maps_onto_lower = std::equal(images.begin(), images.end(), lo.elements.begin(), lo.elements.end());
    c.boundary_to_boundary = true;
    if (n >= 1) {
      const KernelLevel& below = t.levels[n - 1];
      for (const auto& d : boundary(t, n + 1))
        if (below.contains(apply_periodic(t.automaton, d))) c.boundary_to_boundary = false;
    }
    report.steps.push_back(c);
  }
  return report;
}

// --- density criteria ------------------------------------------------------

std::vector<PeriodicConfig> config_closure(std::span<const PeriodicConfig> seeds, const GroupSpec& alphabet,
                                           const CellularAutomaton* f, std::size_t cap) {
  using Op = std::function<PeriodicConfig(const PeriodicConfig&)>;
  std::vector<Op> ops;
  ops.emplace_back([](const PeriodicConfig& x) { return config_shift(x, 1); });
  if (f != nullptr) ops.emplace_back([f](const PeriodicConfig& x) { return apply_periodic(*f, x); });
  auto add = [](const PeriodicConfig& x, const PeriodicConfig& y) { return config_add(x, y); };
  return close_subgroup<PeriodicConfig, PeriodicConfigHash>(seeds, PeriodicConfig::zero(alphabet), add,
                                                            std::span<const Op>(ops), cap);
}

namespace {

Condition4Step condition4_at(const KernelTower& restricted, std::size_t m) {
  Condition4Step step;
  step.m = m;
  const auto bd = boundary(restricted, m + 1);
  step.boundary_size = bd.size();
  step.holds = true;
  const KernelLevel& base = restricted.level(1);
  const GroupSpec& a = restricted.automaton.alphabet();
  ConfigSet known_good;
  for (const auto& d : bd) {
    if (known_good.contains(d)) continue;
    const PeriodicConfig seed[] = {d};
    const auto closure = config_closure(seed, a, &restricted.automaton);
    const bool ok = std::includes(closure.begin(), closure.end(), base.elements.begin(), base.elements.end());
    if (!ok) {
      step.holds = false;
      step.witness = d;
      break;
    }
    // Shifts of d generate the same group.
    for (std::size_t k = 0; k < d.period(); ++k) known_good.insert(config_shift(d, static_cast<std::int64_t>(k)));
  }
  return step;
}

}  // namespace

Condition4Result condition4_search(const CellularAutomaton& f, const GroupSpec& alphabet, const SubgroupShift& shift,
                                   std::size_t m_max, std::size_t cap) {
  Condition4Result result;
  result.m_max = m_max;
  for (std::size_t m = 0; m <= m_max; ++m) {
    std::optional<KernelTower> full;
    try {
      full.emplace(tower(f, m + 1, cap));
    } catch (const CapExceeded&) {
      result.cap_hit_at = m;
      break;
    }
    const KernelTower restricted = restrict(*full, alphabet, shift);
    Condition4Step step = condition4_at(restricted, m);
    result.steps.push_back(step);
    if (step.holds) {
      result.found = m;
      break;
    }
  }
  return result;
}

CorollaryKerResult corollary_ker_check(const CellularAutomaton& f, const GroupSpec& alphabet,
                                       const SubgroupShift& shift, std::size_t enumeration_cap) {
  const KernelTower restricted = restrict(tower(f, 1), alphabet, shift);
  const auto& kernel = restricted.level(1).elements;
  CorollaryKerResult result;
  result.kernel_size = kernel.size();
  if (kernel.size() > enumeration_cap) throw CapExceeded("corollary_ker_check: kernel larger than enumeration cap");

  result.holds = true;
  for (const auto& d : kernel) {
    if (d.is_zero()) continue;
    const PeriodicConfig seed[] = {d};
    if (config_closure(seed, alphabet, nullptr).size() != kernel.size()) result.holds = false;
  }

  auto add = [](const PeriodicConfig& x, const PeriodicConfig& y) { return config_add(x, y); };
  const auto subgroups = enumerate_all_subgroups<PeriodicConfig, PeriodicConfigHash>(
      kernel, PeriodicConfig::zero(alphabet), add, std::size_t{1} << 20);
  for (const auto& s : subgroups) {
    const bool invariant = std::all_of(s.begin(), s.end(), [&](const PeriodicConfig& x) {
      return std::binary_search(s.begin(), s.end(), config_shift(x, 1));
    });
    if (invariant) ++result.sigma_invariant_subgroups;
  }
  const std::size_t expected = kernel.size() > 1 ? 2 : 1;
  result.enumeration_agrees = (result.sigma_invariant_subgroups == expected) == result.holds;

  for (const auto& d : boundary(restricted, 1)) {
    const PeriodicConfig seed[] = {d};
    result.boundary_generates.emplace_back(d, config_closure(seed, alphabet, &restricted.automaton).size() ==
                                                  kernel.size());
  }
  return result;
}

// --- recurrence ------------------------------------------------------------

KernelRecurrence recurrence_matrix(const CellularAutomaton& f) {
  const CellularAutomaton g = smallest_neighborhood(to_linear(f));
  const GroupSpec& a = g.alphabet();
  if (!a.is_cyclic()) throw PreconditionError("recurrence_matrix: cyclic alphabet required");
  const std::int64_t m = a.moduli()[0];
  const LaurentPoly& p = g.polynomial();
  if (p.is_zero()) throw PreconditionError("recurrence_matrix: zero rule");
  const int r = g.neighborhood().left;
  const int s = g.neighborhood().right;
  const std::int64_t fr = p.scalar_coefficient(r);
  const std::int64_t fs = p.scalar_coefficient(s);
  if (gcd_u64(static_cast<std::uint64_t>(fr), static_cast<std::uint64_t>(m)) != 1 ||
      gcd_u64(static_cast<std::uint64_t>(fs), static_cast<std::uint64_t>(m)) != 1)
    throw PreconditionError("recurrence_matrix: extreme coefficients must be invertible");
  std::int64_t fs_inv = 1;
  while (mod(fs * fs_inv, m) != 1) ++fs_inv;

  const auto d = static_cast<Eigen::Index>(s - r);
  KernelRecurrence rec{m, g.neighborhood(), IntMatrix::Zero(d, d)};
  for (Eigen::Index j = 0; j < d; ++j)
    rec.matrix(0, j) = mod(-p.scalar_coefficient(s - 1 - static_cast<int>(j)) * fs_inv, m);
  for (Eigen::Index k = 1; k < d; ++k) rec.matrix(k, k - 1) = 1;
  return rec;
}

std::uint64_t KernelRecurrence::matrix_order(std::uint64_t cap) const {
  const Eigen::Index d = matrix.rows();
  if (d == 0) return 1;
  const IntMatrix id = IntMatrix::Identity(d, d);
  IntMatrix power = matrix;
  for (std::uint64_t k = 1; k <= cap; ++k) {
    if (power == id) return k;
    power = (power * matrix).unaryExpr([this](std::int64_t v) { return mod(v, modulus); });
  }
  throw CapExceeded("matrix_order: no return to identity within cap");
}

}  // namespace algca
