#include "algca/automaton.hpp"

#include "algca/error.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <sstream>

namespace algca {

namespace {

std::uint64_t window_count(const GroupSpec& a, std::size_t width, std::uint64_t cap) {
  return checked_power(a.order(), width, cap);
}

}  // namespace

CellularAutomaton::CellularAutomaton(GroupSpec alphabet, LocalRule rule, Neighborhood neighborhood, std::string name)
    : alphabet_(std::move(alphabet)), rule_(std::move(rule)), neighborhood_(neighborhood), name_(std::move(name)) {
  if (neighborhood_.left > neighborhood_.right) throw SpecError("neighborhood: r must not exceed s");
  if (const auto* t = std::get_if<TableRule>(&rule_)) {
    const std::uint64_t n = window_count(alphabet_, width(), kDefaultTableCap * 16);
    if (t->outputs.size() != n)
      throw SpecError("rule table has " + std::to_string(t->outputs.size()) + " entries, expected " + std::to_string(n));
    for (Letter b : t->outputs)
      if (b >= alphabet_.order()) throw SpecError("rule table output outside alphabet");
    return;
  }
  const LaurentPoly& p = polynomial();
  if (!(p.group() == alphabet_)) throw SpecError("rule coefficients do not act on " + alphabet_.describe());
  for (const auto& [d, f] : p.terms()) {
    (void)f;
    if (d < neighborhood_.left || d > neighborhood_.right)
      throw SpecError("coefficient at offset " + std::to_string(d) + " lies outside the neighborhood");
  }
  if (const auto* a = std::get_if<AffineRule>(&rule_); a && a->constant >= alphabet_.order())
    throw SpecError("affine constant outside alphabet");
}

CellularAutomaton CellularAutomaton::linear(const LaurentPoly& poly) {
  const Neighborhood n = poly.is_zero() ? Neighborhood{0, 0} : Neighborhood{poly.min_degree(), poly.max_degree()};
  return {poly.group(), LinearRule{poly}, n};
}

CellularAutomaton CellularAutomaton::affine(const LaurentPoly& poly, Letter constant) {
  const Neighborhood n = poly.is_zero() ? Neighborhood{0, 0} : Neighborhood{poly.min_degree(), poly.max_degree()};
  return {poly.group(), AffineRule{poly, constant}, n};
}

CellularAutomaton CellularAutomaton::table(GroupSpec alphabet, Neighborhood neighborhood, std::vector<Letter> outputs) {
  return {std::move(alphabet), TableRule{std::move(outputs)}, neighborhood};
}

CellularAutomaton CellularAutomaton::from_function(const GroupSpec& alphabet, Neighborhood neighborhood,
                                                   const std::function<Letter(std::span<const Letter>)>& rule) {
  const std::uint64_t n = window_count(alphabet, neighborhood.width(), kDefaultTableCap);
  std::vector<Letter> outputs(n);
  for (std::uint64_t code = 0; code < n; ++code) {
    const Word w = unpack_word(alphabet.order(), code, neighborhood.width());
    outputs[code] = rule(w);
  }
  return table(alphabet, neighborhood, std::move(outputs));
}

CellularAutomaton CellularAutomaton::shift(const GroupSpec& alphabet, int m) {
  return linear(LaurentPoly::x_power(alphabet, m));
}

const LaurentPoly& CellularAutomaton::polynomial() const {
  if (const auto* l = std::get_if<LinearRule>(&rule_)) return l->poly;
  if (const auto* a = std::get_if<AffineRule>(&rule_)) return a->poly;
  throw PreconditionError("table rule has no polynomial form");
}

Letter CellularAutomaton::constant() const {
  if (const auto* a = std::get_if<AffineRule>(&rule_)) return a->constant;
  if (is_linear()) return 0;
  throw PreconditionError("table rule has no affine constant");
}

Letter CellularAutomaton::local(std::span<const Letter> window) const {
  if (window.size() != width()) throw ShapeError("local rule expects a window of width " + std::to_string(width()));
  if (const auto* t = std::get_if<TableRule>(&rule_)) return t->outputs[pack_word(alphabet_.order(), window)];
  Letter out = constant();
  for (const auto& [d, f] : polynomial().terms())
    out = alphabet_.add(out, f.apply(window[static_cast<std::size_t>(d - neighborhood_.left)]));
  return out;
}

Letter CellularAutomaton::local_code(std::uint64_t window_code) const {
  if (const auto* t = std::get_if<TableRule>(&rule_)) return t->outputs[window_code];
  const Word w = unpack_word(alphabet_.order(), window_code, width());
  return local(w);
}

std::vector<Letter> CellularAutomaton::materialize_table(std::uint64_t cap) const {
  if (const auto* t = std::get_if<TableRule>(&rule_)) return t->outputs;
  const std::uint64_t n = window_count(alphabet_, width(), cap);
  std::vector<Letter> out(n);
  Word w(width(), 0);
  for (std::uint64_t code = 0; code < n; ++code) {
    out[code] = local(w);
    // increment w as a mixed-radix counter
    for (std::size_t j = w.size(); j-- > 0;) {
      if (++w[j] < alphabet_.order()) break;
      w[j] = 0;
    }
  }
  return out;
}

std::string CellularAutomaton::describe() const {
  std::ostringstream os;
  if (!name_.empty()) os << name_ << ": ";
  os << "CA over " << alphabet_.describe() << " on [" << neighborhood_.left << "," << neighborhood_.right << "], ";
  if (is_table())
    os << "table rule";
  else if (is_linear())
    os << "P(X) = " << polynomial().to_string();
  else
    os << "P(X) = " << polynomial().to_string() << " + " << alphabet_.letter_string(constant());
  return os.str();
}

// --- application -----------------------------------------------------------

Word apply_window(const CellularAutomaton& f, std::span<const Letter> w) {
  const std::size_t width = f.width();
  if (w.size() < width) throw ShapeError("apply_window: window shorter than neighborhood width");
  Word out(w.size() - width + 1);
  for (std::size_t j = 0; j < out.size(); ++j) out[j] = f.local(w.subspan(j, width));
  return out;
}

PeriodicConfig apply_periodic(const CellularAutomaton& f, const PeriodicConfig& x) {
  if (!(x.alphabet() == f.alphabet())) throw ShapeError("apply_periodic: alphabet mismatch");
  const Word extended = x.window(f.neighborhood().left, x.period() + f.width() - 1);
  return {f.alphabet(), apply_window(f, extended)};
}

// --- neighborhood trimming -------------------------------------------------

namespace {

bool depends_on(const GroupSpec& a, std::span<const Letter> table, std::size_t width, std::size_t position) {
  const std::uint64_t q = a.order();
  const std::uint64_t stride = checked_power(q, width - 1 - position);
  for (std::uint64_t code = 0; code < table.size(); ++code) {
    const std::uint64_t digit = (code / stride) % q;
    if (digit != 0) continue;
    for (std::uint64_t letter = 1; letter < q; ++letter)
      if (table[code + letter * stride] != table[code]) return true;
  }
  return false;
}

}  // namespace

CellularAutomaton smallest_neighborhood(const CellularAutomaton& f) {
  if (!f.is_table()) {
    const LaurentPoly& p = f.polynomial();
    const Neighborhood n = p.is_zero() ? Neighborhood{0, 0} : Neighborhood{p.min_degree(), p.max_degree()};
    CellularAutomaton out(f.alphabet(), f.rule(), n, f.name());
    return out;
  }
  const auto& table = std::get<TableRule>(f.rule()).outputs;
  const std::size_t width = f.width();
  std::size_t lo = 0;
  while (lo < width && !depends_on(f.alphabet(), table, width, lo)) ++lo;
  if (lo == width) {
    // Constant rule.
    return CellularAutomaton::table(f.alphabet(), {0, 0}, std::vector<Letter>(f.alphabet().order(), table[0]))
        .set_name(f.name());
  }
  std::size_t hi = width - 1;
  while (hi > lo && !depends_on(f.alphabet(), table, width, hi)) --hi;
  if (lo == 0 && hi == width - 1) return f;

  const Neighborhood n{f.neighborhood().left + static_cast<int>(lo), f.neighborhood().left + static_cast<int>(hi)};
  const std::size_t new_width = hi - lo + 1;
  const std::uint64_t q = f.alphabet().order();
  const std::uint64_t count = checked_power(q, new_width);
  const std::uint64_t tail = checked_power(q, width - 1 - hi);
  std::vector<Letter> outputs(count);
  for (std::uint64_t code = 0; code < count; ++code) outputs[code] = table[code * tail];
  return CellularAutomaton::table(f.alphabet(), n, std::move(outputs)).set_name(f.name());
}

bool is_trivial(const CellularAutomaton& f) { return smallest_neighborhood(f).width() == 1; }

// --- permutativity ---------------------------------------------------------

Permutativity permutativity_by_table(const CellularAutomaton& f) {
  const CellularAutomaton g = smallest_neighborhood(f);
  const std::vector<Letter> table = g.materialize_table();
  const std::uint64_t q = g.alphabet().order();
  const std::size_t width = g.width();
  const std::uint64_t rest_count = checked_power(q, width - 1);
  Permutativity out{true, true};
  std::vector<std::uint32_t> seen(q, 0);
  std::uint32_t stamp = 0;
  // Left: vary the first letter with the rest fixed.
  for (std::uint64_t rest = 0; rest < rest_count && out.left; ++rest) {
    ++stamp;
    for (std::uint64_t a = 0; a < q; ++a) {
      const Letter b = table[a * rest_count + rest];
      if (seen[b] == stamp) {
        out.left = false;
        break;
      }
      seen[b] = stamp;
    }
  }
  for (std::uint64_t rest = 0; rest < rest_count && out.right; ++rest) {
    ++stamp;
    for (std::uint64_t a = 0; a < q; ++a) {
      const Letter b = table[rest * q + a];
      if (seen[b] == stamp) {
        out.right = false;
        break;
      }
      seen[b] = stamp;
    }
  }
  return out;
}

Permutativity permutativity(const CellularAutomaton& f) {
  if (f.is_table()) return permutativity_by_table(f);
  const CellularAutomaton g = smallest_neighborhood(f);
  const LaurentPoly& p = g.polynomial();
  if (p.is_zero()) {
    // Constant map: bijective only on a one-letter alphabet, which GroupSpec excludes.
    return {false, false};
  }
  return {hom_is_automorphism(p.coefficient(p.min_degree())), hom_is_automorphism(p.coefficient(p.max_degree()))};
}

// --- composition -----------------------------------------------------------

CellularAutomaton compose(const CellularAutomaton& f, const CellularAutomaton& g, std::uint64_t table_cap) {
  if (!(f.alphabet() == g.alphabet())) throw ShapeError("compose: alphabet mismatch");
  const Neighborhood n{f.neighborhood().left + g.neighborhood().left,
                       f.neighborhood().right + g.neighborhood().right};
  if (!f.is_table() && !g.is_table()) {
    const LaurentPoly poly = f.polynomial() * g.polynomial();
    // F(G x) = P(Q x + d) + c = PQ x + P(d) + c, with d the constant configuration.
    Letter c = f.constant();
    for (const auto& [u, coeff] : f.polynomial().terms()) {
      (void)u;
      c = f.alphabet().add(c, coeff.apply(g.constant()));
    }
    if (f.is_linear() && g.is_linear()) return {f.alphabet(), LinearRule{poly}, n};
    return {f.alphabet(), AffineRule{poly, c}, n};
  }
  const std::size_t width = n.width();
  const std::uint64_t count = checked_power(f.alphabet().order(), width, table_cap);
  std::vector<Letter> outputs(count);
  for (std::uint64_t code = 0; code < count; ++code) {
    const Word w = unpack_word(f.alphabet().order(), code, width);
    outputs[code] = f.local(apply_window(g, w));
  }
  return CellularAutomaton::table(f.alphabet(), n, std::move(outputs));
}

CellularAutomaton power(const CellularAutomaton& f, std::uint64_t n, std::uint64_t table_cap) {
  if (n == 1) return f;
  if (f.is_linear()) return from_laurent(pow(f.polynomial(), n));
  CellularAutomaton result = CellularAutomaton::identity(f.alphabet());
  if (n == 0) return result;
  if (n == 1) return f;
  CellularAutomaton base = f;
  bool first = true;
  while (n > 0) {
    if (n & 1u) {
      result = first ? base : compose(result, base, table_cap);
      first = false;
    }
    n >>= 1u;
    if (n > 0) base = compose(base, base, table_cap);
  }
  return result;
}

CellularAutomaton with_shift(const CellularAutomaton& f, int m) {
  const Neighborhood n{f.neighborhood().left + m, f.neighborhood().right + m};
  if (const auto* t = std::get_if<TableRule>(&f.rule())) return CellularAutomaton::table(f.alphabet(), n, t->outputs);
  const LaurentPoly p = f.polynomial().shifted(m);
  if (f.is_linear()) return {f.alphabet(), LinearRule{p}, n};
  return {f.alphabet(), AffineRule{p, f.constant()}, n};
}

LaurentPoly as_laurent(const CellularAutomaton& f) {
  if (f.is_table() || f.constant() != 0) throw PreconditionError("as_laurent: rule is not linear");
  return f.polynomial();
}

CellularAutomaton from_laurent(const LaurentPoly& poly) { return CellularAutomaton::linear(poly); }

// --- algebraic tables ------------------------------------------------------

bool is_endomorphism(const CellularAutomaton& f) {
  if (f.is_linear()) return true;
  if (f.is_affine()) return f.constant() == 0;
  const GroupSpec& a = f.alphabet();
  const std::size_t width = f.width();
  const GroupSpec window_group = a.power(width);
  const std::vector<Letter>& table = std::get<TableRule>(f.rule()).outputs;
  if (table[0] != 0) return false;
  // Generators of A^width: unit vectors in every cyclic factor of every position.
  std::vector<Letter> generators;
  for (std::size_t i = 0; i < window_group.rank(); ++i) {
    GroupElement e;
    e.residues.assign(window_group.rank(), 0);
    e.residues[i] = 1;
    generators.push_back(window_group.encode(e));
  }
  for (Letter u = 0; u < window_group.order(); ++u)
    for (Letter e : generators)
      if (table[window_group.add(u, e)] != a.add(table[u], table[e])) return false;
  return true;
}

CellularAutomaton to_linear(const CellularAutomaton& f) {
  if (!f.is_table()) {
    if (f.constant() != 0) throw PreconditionError("affine rule with nonzero constant is not an endomorphism");
    return {f.alphabet(), LinearRule{f.polynomial()}, f.neighborhood(), f.name()};
  }
  if (!is_endomorphism(f)) throw PreconditionError("table rule is not a group endomorphism of A^Z");
  const GroupSpec& a = f.alphabet();
  const std::size_t width = f.width();
  LaurentPoly poly(a);
  for (std::size_t pos = 0; pos < width; ++pos) {
    std::vector<Letter> images(a.order());
    Word w(width, 0);
    for (Letter x = 0; x < a.order(); ++x) {
      w[pos] = x;
      images[x] = f.local(w);
    }
    poly = poly + LaurentPoly::monomial(a, f.neighborhood().left + static_cast<int>(pos),
                                        endomorphism_from_table(a, images));
  }
  return {a, LinearRule{poly}, f.neighborhood(), f.name()};
}

// --- surjectivity ----------------------------------------------------------

SurjectivityReport surjectivity(const CellularAutomaton& f, std::uint64_t enumeration_cap) {
  const CellularAutomaton g = smallest_neighborhood(f);
  const std::vector<Letter> table = g.materialize_table();
  const std::uint64_t q = g.alphabet().order();
  const std::size_t width = g.width();
  const std::uint64_t states = checked_power(q, width - 1);
  SurjectivityReport report;

  // Pair graph on (A^{w-1})^2: a diamond is a path that leaves the diagonal and returns to it.
  const std::uint64_t pairs = states * states;
  if (pairs > enumeration_cap * 4) throw CapExceeded("surjectivity: pair graph exceeds cap");
  std::vector<char> visited(pairs, 0);
  std::vector<std::uint64_t> stack;
  auto push_successors = [&](std::uint64_t u, std::uint64_t v, bool off_diagonal_only) {
    for (std::uint64_t a = 0; a < q; ++a) {
      const Letter fa = table[u * q + a];
      const std::uint64_t u2 = (u * q + a) % states;
      for (std::uint64_t b = 0; b < q; ++b) {
        if (off_diagonal_only && a == b) continue;
        if (table[v * q + b] != fa) continue;
        const std::uint64_t v2 = (v * q + b) % states;
        const std::uint64_t id = u2 * states + v2;
        if (!visited[id]) {
          visited[id] = 1;
          stack.push_back(id);
        }
      }
    }
  };
  for (std::uint64_t u = 0; u < states; ++u) push_successors(u, u, true);
  bool diamond = false;
  while (!stack.empty() && !diamond) {
    const std::uint64_t id = stack.back();
    stack.pop_back();
    const std::uint64_t u = id / states;
    const std::uint64_t v = id % states;
    if (u == v) {
      diamond = true;
      break;
    }
    push_successors(u, v, false);
  }
  report.surjective = !diamond;

  // Bounded balance check.
  const auto log2q = static_cast<std::size_t>(std::bit_width(q - 1));
  report.bound_requested = 2 * width * log2q + 4;
  report.balanced = true;
  for (std::size_t len = 1; len <= report.bound_requested; ++len) {
    std::uint64_t inputs = 0;
    try {
      inputs = checked_power(q, len + width - 1, enumeration_cap);
    } catch (const CapExceeded&) {
      break;
    }
    std::vector<std::uint64_t> counts(checked_power(q, len), 0);
    Word w(len + width - 1, 0);
    for (std::uint64_t code = 0; code < inputs; ++code) {
      std::uint64_t image = 0;
      std::uint64_t window = pack_word(q, std::span<const Letter>(w).first(width - 1));
      for (std::size_t j = 0; j < len; ++j) {
        window = (window * q + w[j + width - 1]) % (states * q);
        image = image * q + table[window];
      }
      ++counts[image];
      for (std::size_t j = w.size(); j-- > 0;) {
        if (++w[j] < q) break;
        w[j] = 0;
      }
    }
    report.bound_used = len;
    if (std::any_of(counts.begin(), counts.end(), [&](std::uint64_t c) { return c != states; })) {
      report.balanced = false;
      break;
    }
  }
  return report;
}

bool is_surjective(const CellularAutomaton& f) { return surjectivity(f).surjective; }

// --- preimages -------------------------------------------------------------

std::vector<Cylinder> cylinder_preimage(const CellularAutomaton& f, const Cylinder& c, std::size_t cap) {
  if (c.word.empty()) throw ShapeError("cylinder_preimage: empty cylinder word");
  const std::size_t width = f.width();
  const std::size_t n = c.word.size() + width - 1;
  const std::uint64_t q = f.alphabet().order();
  std::vector<Cylinder> out;
  Word current(n, 0);
  // Depth-first over positions; each completed window must reproduce the target letter.
  std::vector<Letter> next(n + 1, 0);
  std::size_t pos = 0;
  while (true) {
    if (next[pos] >= q) {
      if (pos == 0) break;
      next[pos] = 0;
      --pos;
      continue;
    }
    current[pos] = next[pos]++;
    if (pos + 1 >= width && f.local(std::span<const Letter>(current).subspan(pos + 1 - width, width)) !=
                                c.word[pos + 1 - width])
      continue;
    if (pos + 1 == n) {
      out.push_back({c.offset + f.neighborhood().left, current});
      if (out.size() > cap) throw CapExceeded("cylinder_preimage: more than " + std::to_string(cap) + " cylinders");
      continue;
    }
    ++pos;
    next[pos] = 0;
  }
  return out;
}

}  // namespace algca
