#include "algca/measure.hpp"

#include "algca/error.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

namespace algca {

using boost::multiprecision::cpp_int;

namespace {

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

Rational abs_rational(const Rational& x) { return x < 0 ? Rational(-x) : x; }

void validate_shift(const GroupSpec& a, const SubgroupShift& s) {
  if (const auto* ps = std::get_if<ProductSubgroup>(&s)) {
    (void)make_product_subgroup(a, ps->grouping, ps->phase, ps->blocks);
  } else if (const auto* lk = std::get_if<LinearKernelShift>(&s)) {
    if (!(lk->constraint.group() == a)) throw SpecError("kernel constraint acts on a different alphabet");
    if (lk->constraint.is_zero()) throw SpecError("kernel constraint must be nonzero");
  }
}

void validate_weights(const std::vector<Rational>& w) {
  Rational total = 0;
  for (const auto& x : w) {
    if (x < 0) throw SpecError("measure weights must be nonnegative");
    total += x;
  }
  if (total != 1) throw SpecError("measure weights must sum to 1");
}

}  // namespace

// --- construction ----------------------------------------------------------

MeasureSpec::MeasureSpec(GroupSpec alphabet, Variant v, std::string name)
    : alphabet_(std::move(alphabet)), v_(std::move(v)), name_(std::move(name)) {
  if (const auto* b = std::get_if<Bernoulli>(&v_)) {
    if (b->weights.size() != alphabet_.order()) throw SpecError("Bernoulli weights must list every letter");
    validate_weights(b->weights);
  } else if (const auto* h = std::get_if<HaarOnShift>(&v_)) {
    validate_shift(alphabet_, h->support);
  } else if (const auto* p = std::get_if<Pushforward>(&v_)) {
    if (!p->base || !(p->base->alphabet() == alphabet_)) throw SpecError("pushforward base on a different alphabet");
    for (const auto& step : p->map)
      if (const auto* a = std::get_if<AutomatonStep>(&step); a && !(a->automaton.alphabet() == alphabet_))
        throw SpecError("pushforward automaton on a different alphabet");
  } else if (const auto* m = std::get_if<Mixture>(&v_)) {
    if (m->weights.size() != m->components.size() || m->components.empty())
      throw SpecError("mixture needs one weight per component");
    validate_weights(m->weights);
    for (const auto& c : m->components)
      if (!c || !(c->alphabet() == alphabet_)) throw SpecError("mixture component on a different alphabet");
  } else {
    const auto& o = std::get<UniformPeriodicOrbit>(v_);
    if (o.support.empty()) throw SpecError("periodic-orbit measure needs a nonempty support");
    for (const auto& x : o.support)
      if (!(x.alphabet() == alphabet_)) throw SpecError("orbit configuration on a different alphabet");
  }
}

MeasurePtr MeasureSpec::bernoulli(const GroupSpec& alphabet, std::vector<Rational> weights) {
  return std::make_shared<MeasureSpec>(alphabet, Bernoulli{std::move(weights)});
}

MeasurePtr MeasureSpec::uniform(const GroupSpec& alphabet) {
  std::vector<Rational> w(alphabet.order(), Rational(1, static_cast<long long>(alphabet.order())));
  return bernoulli(alphabet, std::move(w));
}

MeasurePtr MeasureSpec::haar(const GroupSpec& alphabet, SubgroupShift support) {
  return std::make_shared<MeasureSpec>(alphabet, HaarOnShift{std::move(support)});
}

MeasurePtr MeasureSpec::pushforward(MeasurePtr base, MapWord map) {
  GroupSpec a = base->alphabet();
  return std::make_shared<MeasureSpec>(std::move(a), Pushforward{std::move(base), std::move(map)});
}

MeasurePtr MeasureSpec::mixture(std::vector<Rational> weights, std::vector<MeasurePtr> components) {
  if (components.empty()) throw SpecError("mixture needs components");
  GroupSpec a = components.front()->alphabet();
  return std::make_shared<MeasureSpec>(std::move(a), Mixture{std::move(weights), std::move(components)});
}

MeasurePtr MeasureSpec::periodic_orbit(const PeriodicConfig& x, const CellularAutomaton* f) {
  std::set<PeriodicConfig> seen{x};
  std::vector<PeriodicConfig> todo{x};
  while (!todo.empty()) {
    PeriodicConfig y = todo.back();
    todo.pop_back();
    std::vector<PeriodicConfig> next{config_shift(y, 1)};
    if (f != nullptr) next.push_back(apply_periodic(*f, y));
    for (auto& z : next)
      if (seen.insert(z).second) todo.push_back(std::move(z));
  }
  return std::make_shared<MeasureSpec>(x.alphabet(),
                                       UniformPeriodicOrbit{std::vector<PeriodicConfig>(seen.begin(), seen.end())});
}

namespace {

std::string describe_map(const MapWord& map) {
  std::ostringstream os;
  bool first = true;
  // Printed as a composition, last step leftmost.
  for (auto it = map.rbegin(); it != map.rend(); ++it) {
    if (!first) os << " o ";
    first = false;
    if (const auto* s = std::get_if<ShiftStep>(&*it))
      os << "sigma^" << s->j;
    else {
      const auto& a = std::get<AutomatonStep>(*it);
      os << (a.automaton.name().empty() ? "F" : a.automaton.name()) << "^" << a.k;
    }
  }
  return os.str();
}

}  // namespace

std::string MeasureSpec::describe() const {
  if (!name_.empty()) return name_;
  std::ostringstream os;
  if (const auto* b = std::get_if<Bernoulli>(&v_)) {
    os << "Bernoulli(";
    for (std::size_t i = 0; i < b->weights.size(); ++i) os << (i ? "," : "") << b->weights[i];
    os << ")";
  } else if (const auto* h = std::get_if<HaarOnShift>(&v_)) {
    os << "Haar[" << algca::describe(alphabet_, h->support) << "]";
  } else if (const auto* p = std::get_if<Pushforward>(&v_)) {
    os << "(" << describe_map(p->map) << ")*" << p->base->describe();
  } else if (const auto* m = std::get_if<Mixture>(&v_)) {
    for (std::size_t i = 0; i < m->components.size(); ++i)
      os << (i ? " + " : "") << m->weights[i] << "*" << m->components[i]->describe();
  } else {
    const auto& o = std::get<UniformPeriodicOrbit>(v_);
    os << "uniform on " << o.support.size() << " periodic points";
  }
  return os.str();
}

// --- exact probabilities ---------------------------------------------------

namespace {

Rational product_subgroup_prob(const GroupSpec& a, const ProductSubgroup& ps, const Cylinder& c) {
  const auto t = static_cast<std::int64_t>(ps.grouping);
  const auto phase = static_cast<std::int64_t>(ps.phase);
  const std::int64_t lo = c.offset;
  const std::int64_t hi = c.offset + static_cast<std::int64_t>(c.word.size()) - 1;
  Rational prob = 1;
  for (std::int64_t j = floor_div(lo - phase, t); j <= floor_div(hi - phase, t); ++j) {
    const std::int64_t start = t * j + phase;
    long long matches = 0;
    for (Letter b : ps.blocks) {
      const Word w = unpack_word(a.order(), b, ps.grouping);
      bool ok = true;
      for (std::int64_t p = std::max(start, lo); p <= std::min(start + t - 1, hi) && ok; ++p)
        ok = w[static_cast<std::size_t>(p - start)] == c.word[static_cast<std::size_t>(p - lo)];
      if (ok) ++matches;
    }
    if (matches == 0) return 0;
    prob *= Rational(matches, static_cast<long long>(ps.blocks.size()));
  }
  return prob;
}

/// Local solutions of the kernel constraint on [offset - (W-1), offset + L - 1 + (W-1)].
struct KernelWindowCounter {
  CellularAutomaton rule;
  std::size_t width;
  std::uint64_t q;
  std::uint64_t states;

  explicit KernelWindowCounter(const LaurentPoly& g)
      : rule(smallest_neighborhood(from_laurent(g))),
        width(rule.width()),
        q(rule.alphabet().order()),
        states(checked_power(q, width - 1, kDefaultKernelCap)) {}

  /// Count of sequences of the given length, with `forced[p]` fixed when set, satisfying every window.
  cpp_int count(const std::vector<std::optional<Letter>>& forced) const {
    const std::size_t n = forced.size();
    // First width-1 letters form the initial state.
    std::vector<cpp_int> dp(states, 0);
    for (std::uint64_t code = 0; code < states; ++code) {
      const Word u = unpack_word(q, code, width - 1);
      bool ok = true;
      for (std::size_t p = 0; p + 1 < width && ok; ++p) ok = !forced[p] || *forced[p] == u[p];
      if (ok) dp[code] = 1;
    }
    for (std::size_t p = width - 1; p < n; ++p) {
      std::vector<cpp_int> next(states, 0);
      for (std::uint64_t code = 0; code < states; ++code) {
        if (dp[code] == 0) continue;
        for (Letter x = 0; x < q; ++x) {
          if (forced[p] && *forced[p] != x) continue;
          if (rule.local_code(code * q + x) != 0) continue;
          next[(code * q + x) % states] += dp[code];
        }
      }
      dp = std::move(next);
    }
    cpp_int total = 0;
    for (const auto& v : dp) total += v;
    return total;
  }
};

Rational linear_kernel_prob(const LinearKernelShift& lk, const Cylinder& c) {
  const KernelWindowCounter counter(lk.constraint);
  const std::size_t pad = counter.width - 1;
  std::vector<std::optional<Letter>> forced(c.word.size() + 2 * pad);
  const cpp_int total = counter.count(forced);
  for (std::size_t j = 0; j < c.word.size(); ++j) forced[pad + j] = c.word[j];
  const cpp_int matched = counter.count(forced);
  return Rational(matched, total);
}

Rational haar_prob(const GroupSpec& a, const SubgroupShift& s, const Cylinder& c) {
  if (std::holds_alternative<FullShift>(s)) {
    return Rational(1, static_cast<long long>(checked_power(a.order(), c.word.size(), std::uint64_t{1} << 62)));
  }
  if (const auto* ps = std::get_if<ProductSubgroup>(&s)) return product_subgroup_prob(a, *ps, c);
  return linear_kernel_prob(std::get<LinearKernelShift>(s), c);
}

std::optional<std::vector<Rational>> bernoulli_weights(const MeasureSpec& mu) {
  if (const auto* b = std::get_if<Bernoulli>(&mu.variant())) return b->weights;
  if (const auto* h = std::get_if<HaarOnShift>(&mu.variant()); h && std::holds_alternative<FullShift>(h->support))
    return std::vector<Rational>(mu.alphabet().order(), Rational(1, static_cast<long long>(mu.alphabet().order())));
  return std::nullopt;
}

/// The composite affine automaton of a map word, when every automaton step is linear or affine.
std::optional<CellularAutomaton> affine_composite(const GroupSpec& a, const MapWord& map) {
  CellularAutomaton h = CellularAutomaton::identity(a);
  for (const auto& step : map) {
    if (const auto* s = std::get_if<ShiftStep>(&step)) {
      h = with_shift(h, static_cast<int>(s->j));
    } else {
      const auto& st = std::get<AutomatonStep>(step);
      if (st.automaton.is_table()) return std::nullopt;
      h = compose(power(st.automaton, st.k), h);
    }
  }
  return h;
}

/// Distribution of H(x) on [offset, offset + L) for x i.i.d. with the given letter weights.
std::vector<Rational> affine_bernoulli_distribution(const CellularAutomaton& h, const std::vector<Rational>& weights,
                                                    std::int64_t offset, std::size_t length, std::uint64_t cap) {
  const GroupSpec& a = h.alphabet();
  const std::uint64_t q = a.order();
  const std::uint64_t n = checked_power(q, length, cap);
  const GroupSpec window_group = a.power(length);
  const int r = h.neighborhood().left;
  const int s = h.neighborhood().right;
  const LaurentPoly& poly = h.polynomial();

  std::vector<Rational> dist(n, 0);
  {
    Word c(length, h.constant());
    dist[pack_word(q, c)] = 1;
  }
  (void)offset;  // i.i.d. input: the distribution does not depend on the offset
  for (std::int64_t p = r; p <= static_cast<std::int64_t>(length) - 1 + s; ++p) {
    // Contribution of input position p (relative to the window start) for every letter.
    std::vector<Letter> contrib(q);
    for (Letter x = 0; x < q; ++x) {
      Word y(length, 0);
      for (std::size_t m = 0; m < length; ++m) {
        const std::int64_t u = p - static_cast<std::int64_t>(m);
        if (u < r || u > s) continue;
        y[m] = poly.coefficient(static_cast<int>(u)).apply(x);
      }
      contrib[x] = static_cast<Letter>(pack_word(q, y));
    }
    std::vector<Rational> next(n, 0);
    for (std::uint64_t code = 0; code < n; ++code) {
      if (dist[code] == 0) continue;
      for (Letter x = 0; x < q; ++x) {
        if (weights[x] == 0) continue;
        next[window_group.add(static_cast<Letter>(code), contrib[x])] += dist[code] * weights[x];
      }
    }
    dist = std::move(next);
  }
  return dist;
}

std::vector<PeriodicConfig> push_atoms(const std::vector<PeriodicConfig>& atoms, const MapWord& map) {
  std::vector<PeriodicConfig> out = atoms;
  for (const auto& step : map) {
    for (auto& x : out) {
      if (const auto* s = std::get_if<ShiftStep>(&step)) {
        x = config_shift(x, s->j);
      } else {
        const auto& st = std::get<AutomatonStep>(step);
        for (std::uint64_t i = 0; i < st.k; ++i) x = apply_periodic(st.automaton, x);
      }
    }
  }
  return out;
}

std::vector<Cylinder> pull_back(const MapWord& map, const Cylinder& c) {
  std::vector<Cylinder> current{c};
  for (auto it = map.rbegin(); it != map.rend(); ++it) {
    std::vector<Cylinder> next;
    if (const auto* s = std::get_if<ShiftStep>(&*it)) {
      for (auto& cyl : current) next.push_back({cyl.offset + s->j, cyl.word});
    } else {
      const auto& st = std::get<AutomatonStep>(*it);
      for (std::uint64_t i = 0; i < st.k; ++i) {
        next.clear();
        for (const auto& cyl : current) {
          auto pre = cylinder_preimage(st.automaton, cyl);
          next.insert(next.end(), std::make_move_iterator(pre.begin()), std::make_move_iterator(pre.end()));
          if (next.size() > kDefaultPreimageCap) throw CapExceeded("pushforward preimage expansion exceeds cap");
        }
        current = std::move(next);
      }
      continue;
    }
    current = std::move(next);
  }
  return current;
}

}  // namespace

Rational cylinder_prob(const MeasureSpec& mu, const Cylinder& c) {
  const GroupSpec& a = mu.alphabet();
  if (c.word.empty()) return 1;
  for (Letter x : c.word)
    if (x >= a.order()) throw ShapeError("cylinder letter outside alphabet");
  const auto& v = mu.variant();
  if (const auto* b = std::get_if<Bernoulli>(&v)) {
    Rational p = 1;
    for (Letter x : c.word) p *= b->weights[x];
    return p;
  }
  if (const auto* h = std::get_if<HaarOnShift>(&v)) return haar_prob(a, h->support, c);
  if (const auto* m = std::get_if<Mixture>(&v)) {
    Rational p = 0;
    for (std::size_t i = 0; i < m->components.size(); ++i)
      if (m->weights[i] != 0) p += m->weights[i] * cylinder_prob(*m->components[i], c);
    return p;
  }
  if (const auto* o = std::get_if<UniformPeriodicOrbit>(&v)) {
    long long hits = 0;
    for (const auto& x : o->support) hits += in_cylinder(x, c) ? 1 : 0;
    return Rational(hits, static_cast<long long>(o->support.size()));
  }
  const auto& p = std::get<Pushforward>(v);
  if (const auto* o = std::get_if<UniformPeriodicOrbit>(&p.base->variant())) {
    const auto pushed = push_atoms(o->support, p.map);
    long long hits = 0;
    for (const auto& x : pushed) hits += in_cylinder(x, c) ? 1 : 0;
    return Rational(hits, static_cast<long long>(pushed.size()));
  }
  if (auto weights = bernoulli_weights(*p.base)) {
    if (auto h = affine_composite(a, p.map)) {
      try {
        const auto dist = affine_bernoulli_distribution(*h, *weights, c.offset, c.word.size(), kDefaultDistributionCap);
        return dist[pack_word(a.order(), c.word)];
      } catch (const CapExceeded&) {
        // fall through to preimage expansion
      }
    }
  }
  Rational total = 0;
  for (const auto& cyl : pull_back(p.map, c)) total += cylinder_prob(*p.base, cyl);
  return total;
}

std::vector<Rational> window_distribution(const MeasureSpec& mu, std::int64_t offset, std::size_t length,
                                          std::uint64_t cap) {
  const GroupSpec& a = mu.alphabet();
  const std::uint64_t n = checked_power(a.order(), length, cap);
  const auto& v = mu.variant();
  if (const auto* m = std::get_if<Mixture>(&v)) {
    std::vector<Rational> out(n, 0);
    for (std::size_t i = 0; i < m->components.size(); ++i) {
      if (m->weights[i] == 0) continue;
      const auto part = window_distribution(*m->components[i], offset, length, cap);
      for (std::uint64_t c = 0; c < n; ++c) out[c] += m->weights[i] * part[c];
    }
    return out;
  }
  if (const auto* p = std::get_if<Pushforward>(&v)) {
    if (auto weights = bernoulli_weights(*p->base))
      if (auto h = affine_composite(a, p->map)) return affine_bernoulli_distribution(*h, *weights, offset, length, cap);
  }
  std::vector<Rational> out(n, 0);
  for (std::uint64_t c = 0; c < n; ++c) out[c] = cylinder_prob(mu, {offset, unpack_word(a.order(), c, length)});
  return out;
}

// --- sampling --------------------------------------------------------------

namespace {

Letter draw(const std::vector<double>& cumulative, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, cumulative.back());
  const double x = u(rng);
  const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), x);
  return static_cast<Letter>(std::min<std::ptrdiff_t>(it - cumulative.begin(),
                                                      static_cast<std::ptrdiff_t>(cumulative.size()) - 1));
}

std::vector<double> cumulative_of(const std::vector<Rational>& w) {
  std::vector<double> out;
  double acc = 0.0;
  for (const auto& x : w) {
    acc += static_cast<double>(x);
    out.push_back(acc);
  }
  return out;
}

Word sample_linear_kernel(const GroupSpec& a, const LinearKernelShift& lk, std::int64_t offset, std::size_t length,
                          std::mt19937_64& rng) {
  (void)a;
  const KernelWindowCounter k(lk.constraint);
  const std::size_t pad = k.width - 1;
  const std::size_t n = length + 2 * pad;
  (void)offset;
  // Backward completion counts: ways[p][state] = number of valid continuations from position p.
  std::vector<std::vector<double>> ways(n + 1, std::vector<double>(k.states, 0.0));
  std::fill(ways[n].begin(), ways[n].end(), 1.0);
  for (std::size_t p = n; p-- > pad;) {
    for (std::uint64_t code = 0; code < k.states; ++code) {
      double total = 0.0;
      for (Letter x = 0; x < k.q; ++x)
        if (k.rule.local_code(code * k.q + x) == 0) total += ways[p + 1][(code * k.q + x) % k.states];
      ways[p][code] = total;
    }
  }
  // Initial state weighted by completions.
  std::vector<double> cum;
  double acc = 0.0;
  for (std::uint64_t code = 0; code < k.states; ++code) cum.push_back(acc += ways[pad][code]);
  std::uint64_t state = draw(cum, rng);
  Word w = unpack_word(k.q, state, pad);
  for (std::size_t p = pad; p < n; ++p) {
    std::vector<double> c;
    acc = 0.0;
    for (Letter x = 0; x < k.q; ++x) {
      const bool ok = k.rule.local_code(state * k.q + x) == 0;
      c.push_back(acc += ok ? ways[p + 1][(state * k.q + x) % k.states] : 0.0);
    }
    const Letter x = draw(c, rng);
    w.push_back(x);
    state = (state * k.q + x) % k.states;
  }
  return Word(w.begin() + static_cast<std::ptrdiff_t>(pad), w.begin() + static_cast<std::ptrdiff_t>(pad + length));
}

}  // namespace

Word sample(const MeasureSpec& mu, std::int64_t offset, std::size_t length, std::mt19937_64& rng) {
  const GroupSpec& a = mu.alphabet();
  const auto& v = mu.variant();
  if (const auto* b = std::get_if<Bernoulli>(&v)) {
    const auto cum = cumulative_of(b->weights);
    Word w(length);
    for (auto& x : w) x = draw(cum, rng);
    return w;
  }
  if (const auto* h = std::get_if<HaarOnShift>(&v)) {
    if (std::holds_alternative<FullShift>(h->support)) {
      std::uniform_int_distribution<Letter> u(0, static_cast<Letter>(a.order() - 1));
      Word w(length);
      for (auto& x : w) x = u(rng);
      return w;
    }
    if (const auto* ps = std::get_if<ProductSubgroup>(&h->support)) {
      const auto t = static_cast<std::int64_t>(ps->grouping);
      const auto phase = static_cast<std::int64_t>(ps->phase);
      const std::int64_t j0 = floor_div(offset - phase, t);
      const std::int64_t j1 = floor_div(offset + static_cast<std::int64_t>(length) - 1 - phase, t);
      std::uniform_int_distribution<std::size_t> u(0, ps->blocks.size() - 1);
      Word all;
      for (std::int64_t j = j0; j <= j1; ++j) {
        const Word part = unpack_word(a.order(), ps->blocks[u(rng)], ps->grouping);
        all.insert(all.end(), part.begin(), part.end());
      }
      const std::int64_t skip = offset - (t * j0 + phase);
      return Word(all.begin() + skip, all.begin() + skip + static_cast<std::ptrdiff_t>(length));
    }
    return sample_linear_kernel(a, std::get<LinearKernelShift>(h->support), offset, length, rng);
  }
  if (const auto* m = std::get_if<Mixture>(&v)) {
    const Letter i = draw(cumulative_of(m->weights), rng);
    return sample(*m->components[i], offset, length, rng);
  }
  if (const auto* o = std::get_if<UniformPeriodicOrbit>(&v)) {
    std::uniform_int_distribution<std::size_t> u(0, o->support.size() - 1);
    return o->support[u(rng)].window(offset, length);
  }
  const auto& p = std::get<Pushforward>(v);
  // Input interval needed for the output window, computed from the last step back.
  std::int64_t lo = offset;
  std::int64_t hi = offset + static_cast<std::int64_t>(length) - 1;
  for (auto it = p.map.rbegin(); it != p.map.rend(); ++it) {
    if (const auto* s = std::get_if<ShiftStep>(&*it)) {
      lo += s->j;
      hi += s->j;
    } else {
      const auto& st = std::get<AutomatonStep>(*it);
      lo += static_cast<std::int64_t>(st.k) * st.automaton.neighborhood().left;
      hi += static_cast<std::int64_t>(st.k) * st.automaton.neighborhood().right;
    }
  }
  Word w = sample(*p.base, lo, static_cast<std::size_t>(hi - lo + 1), rng);
  std::int64_t start = lo;
  for (const auto& step : p.map) {
    if (const auto* s = std::get_if<ShiftStep>(&step)) {
      start -= s->j;
    } else {
      const auto& st = std::get<AutomatonStep>(step);
      for (std::uint64_t i = 0; i < st.k; ++i) {
        w = apply_window(st.automaton, w);
        start += st.automaton.neighborhood().left;
      }
    }
  }
  const std::int64_t skip = offset - start;
  return Word(w.begin() + skip, w.begin() + skip + static_cast<std::ptrdiff_t>(length));
}

// --- invariance ------------------------------------------------------------

InvarianceResult invariance_check(const MeasureSpec& mu, const MapWord& map, std::size_t max_length) {
  const auto base = std::make_shared<MeasureSpec>(mu);
  const auto pushed = MeasureSpec::pushforward(base, map);
  InvarianceResult result;
  result.max_length = max_length;
  for (std::size_t len = 1; len <= max_length; ++len) {
    for (std::size_t off = 0; off < max_length; ++off) {
      const auto lhs = window_distribution(*pushed, static_cast<std::int64_t>(off), len);
      const auto rhs = window_distribution(mu, static_cast<std::int64_t>(off), len);
      for (std::uint64_t c = 0; c < lhs.size(); ++c) {
        ++result.cylinders_checked;
        const Rational d = abs_rational(lhs[c] - rhs[c]);
        if (d > result.max_discrepancy) {
          result.max_discrepancy = d;
          result.witness = Cylinder{static_cast<std::int64_t>(off), unpack_word(mu.alphabet().order(), c, len)};
        }
      }
    }
  }
  return result;
}

InvarianceResult invariance_check_mc(const MeasureSpec& mu, const MapWord& map, std::size_t length,
                                     std::size_t samples, std::uint64_t seed) {
  const auto base = std::make_shared<MeasureSpec>(mu);
  const auto pushed = MeasureSpec::pushforward(base, map);
  std::mt19937_64 rng_a(seed);
  std::mt19937_64 rng_b(seed ^ 0x5bd1e995u);
  std::map<Word, std::size_t> ca;
  std::map<Word, std::size_t> cb;
  for (std::size_t i = 0; i < samples; ++i) {
    ++ca[sample(mu, 0, length, rng_a)];
    ++cb[sample(*pushed, 0, length, rng_b)];
  }
  InvarianceResult result;
  result.exact = false;
  result.max_length = length;
  std::set<Word> keys;
  for (const auto& [w, c] : ca) keys.insert(w), (void)c;
  for (const auto& [w, c] : cb) keys.insert(w), (void)c;
  const auto n = static_cast<double>(samples);
  for (const auto& w : keys) {
    ++result.cylinders_checked;
    const double pa = static_cast<double>(ca[w]) / n;
    const double pb = static_cast<double>(cb[w]) / n;
    const double pooled = (pa + pb) / 2.0;
    const double se = std::sqrt(std::max(pooled * (1.0 - pooled) * 2.0 / n, 1e-300));
    const double z = std::abs(pa - pb) / se;
    if (z > result.max_z) {
      result.max_z = z;
      result.witness = Cylinder{0, w};
    }
  }
  return result;
}

// --- characters ------------------------------------------------------------

bool FiniteCharacter::is_trivial() const {
  return std::all_of(letters.begin(), letters.end(), [](const Character& c) { return algca::is_trivial(c); });
}

std::complex<double> FiniteCharacter::operator()(const GroupSpec& alphabet, std::span<const Letter> window) const {
  std::complex<double> v = 1.0;
  for (std::size_t j = 0; j < letters.size(); ++j) v *= char_eval(alphabet, letters[j], window[j]);
  return v;
}

std::string FiniteCharacter::describe() const {
  std::ostringstream os;
  os << "chi@" << offset << "[";
  for (std::size_t j = 0; j < letters.size(); ++j) {
    os << (j ? " " : "") << "(";
    for (std::size_t i = 0; i < letters[j].residues.size(); ++i) os << (i ? "," : "") << letters[j].residues[i];
    os << ")";
  }
  os << "]";
  return os.str();
}

std::complex<double> character_integral(const MeasureSpec& mu, const FiniteCharacter& chi) {
  if (chi.letters.empty()) return 1.0;
  const GroupSpec& a = mu.alphabet();
  for (const auto& c : chi.letters)
    if (c.residues.size() != a.rank()) throw ShapeError("character moduli do not match the alphabet");
  const auto dist = window_distribution(mu, chi.offset, chi.letters.size());
  std::complex<double> total = 0.0;
  for (std::uint64_t c = 0; c < dist.size(); ++c) {
    if (dist[c] == 0) continue;
    const Word w = unpack_word(a.order(), c, chi.letters.size());
    total += static_cast<double>(dist[c]) * chi(a, w);
  }
  return total;
}

HaarTestReport haar_test(const MeasureSpec& mu, const SubgroupShift& shift, std::size_t budget) {
  const GroupSpec& a = mu.alphabet();
  HaarTestReport report;
  report.budget = budget;
  const auto lambda = MeasureSpec(a, HaarOnShift{shift});
  const auto patterns = window_distribution(lambda, 0, budget);
  const auto dist = window_distribution(mu, 0, budget);
  report.support_ok = true;
  for (std::uint64_t c = 0; c < dist.size(); ++c) {
    if (dist[c] > 0 && patterns[c] == 0) {
      report.support_ok = false;
      report.support_witness = Cylinder{0, unpack_word(a.order(), c, budget)};
      break;
    }
  }
  std::vector<Word> words(dist.size());
  for (std::uint64_t c = 0; c < dist.size(); ++c) words[c] = unpack_word(a.order(), c, budget);

  // Characters of A^budget are indexed like letters of A^budget.
  for (std::uint64_t code = 0; code < dist.size(); ++code) {
    FiniteCharacter chi{0, {}};
    for (Letter x : words[code]) chi.letters.push_back(Character{a.decode(x).residues});
    bool nontrivial_on_shift = false;
    for (std::uint64_t c = 0; c < dist.size() && !nontrivial_on_shift; ++c)
      if (patterns[c] > 0 && std::abs(chi(a, words[c]) - 1.0) > 1e-9) nontrivial_on_shift = true;
    if (!nontrivial_on_shift) continue;
    ++report.characters_checked;
    std::complex<double> total = 0.0;
    for (std::uint64_t c = 0; c < dist.size(); ++c)
      if (dist[c] != 0) total += static_cast<double>(dist[c]) * chi(a, words[c]);
    if (std::abs(total) > report.max_abs || !report.witness) {
      if (std::abs(total) >= report.max_abs) {
        report.max_abs = std::abs(total);
        report.witness = chi;
      }
    }
  }
  return report;
}

// --- Cesaro means ----------------------------------------------------------

std::vector<CesaroPoint> cesaro_sequence(const MeasurePtr& mu0, const CellularAutomaton& f, std::size_t n_max,
                                         std::size_t length) {
  const GroupSpec& a = mu0->alphabet();
  const std::uint64_t n = checked_power(a.order(), length, kDefaultDistributionCap);
  const Rational uniform(1, static_cast<long long>(n));
  std::vector<Rational> running(n, 0);
  std::vector<CesaroPoint> out;
  for (std::size_t j = 0; j < n_max; ++j) {
    const MeasurePtr iterate = j == 0 ? mu0 : MeasureSpec::pushforward(mu0, {AutomatonStep{f, j}});
    const auto dist = window_distribution(*iterate, 0, length);
    for (std::uint64_t c = 0; c < n; ++c) running[c] += dist[c];
    CesaroPoint point;
    point.n = j + 1;
    point.distribution.resize(n);
    Rational tv = 0;
    for (std::uint64_t c = 0; c < n; ++c) {
      point.distribution[c] = running[c] / static_cast<long long>(j + 1);
      tv += abs_rational(point.distribution[c] - uniform);
    }
    point.distance_to_uniform = tv / 2;
    out.push_back(std::move(point));
  }
  return out;
}

// --- counterexample --------------------------------------------------------

bool same_support(const GroupSpec& alphabet, const SubgroupShift& a, const SubgroupShift& b, std::size_t length) {
  const MeasureSpec la(alphabet, HaarOnShift{a});
  const MeasureSpec lb(alphabet, HaarOnShift{b});
  for (std::size_t off = 0; off < length; ++off) {
    const auto da = window_distribution(la, static_cast<std::int64_t>(off), length);
    const auto db = window_distribution(lb, static_cast<std::int64_t>(off), length);
    for (std::size_t c = 0; c < da.size(); ++c)
      if ((da[c] > 0) != (db[c] > 0)) return false;
  }
  return true;
}

CounterexampleSuite counterexample_suite() {
  const GroupSpec a = GroupSpec::cyclic(2);
  CellularAutomaton f = CellularAutomaton::linear(LaurentPoly::scalar(a, {{0, 1}, {1, 1}}));
  f.set_name("F");
  // Letters of A^2: 00 -> 0, 01 -> 1, 10 -> 2, 11 -> 3.
  const ProductSubgroup x1 = make_product_subgroup(a, 2, 0, {0, 3});
  const ProductSubgroup x2 = make_product_subgroup(a, 2, 1, {0, 3});
  const ProductSubgroup x3_expected = make_product_subgroup(a, 2, 0, {0, 1});
  const ProductSubgroup x4_expected = make_product_subgroup(a, 2, 0, {0, 2});

  const auto x3 = automaton_image(f, a, x1);
  const auto x4 = automaton_image(f, a, x2);
  if (!x3 || !x4) throw Error("counterexample: image of a product subgroup is not a product subgroup");

  CounterexampleSuite suite{f, x1, x2, *x3, *x4, nullptr, nullptr};
  const std::size_t window = 6;
  suite.sigma_x1_is_x2 = same_support(a, shift_image(x1, 1), x2, window);
  suite.f_x1_is_x3 = same_support(a, *x3, x3_expected, window);
  suite.f_x2_is_x4 = same_support(a, *x4, x4_expected, window);
  suite.sigma_pre2_x1_is_x1 = same_support(a, shift_preimage(x1, 2), x1, window);
  suite.sigma_pre1_x1_is_x2 = same_support(a, shift_preimage(x1, 1), x2, window);

  suite.nu = std::make_shared<MeasureSpec>(a, HaarOnShift{x1}, "nu");
  const Rational quarter(1, 4);
  suite.mu = std::make_shared<MeasureSpec>(
      a,
      Mixture{{quarter, quarter, quarter, quarter},
              {suite.nu, MeasureSpec::pushforward(suite.nu, {ShiftStep{1}}),
               MeasureSpec::pushforward(suite.nu, {AutomatonStep{f, 1}}),
               MeasureSpec::pushforward(suite.nu, {ShiftStep{1}, AutomatonStep{f, 1}})}},
      "mu");
  return suite;
}

}  // namespace algca
