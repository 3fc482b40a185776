#include "algca/cli.hpp"

#include "algca/class_a.hpp"
#include "algca/entropy.hpp"
#include "algca/error.hpp"
#include "algca/modular.hpp"
#include "algca/spec_io.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

namespace algca {

namespace {

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Globals {
  std::uint64_t seed = 1;
  std::string out_path;
  std::uint64_t cap = 0;  // 0: library defaults
};

struct Outcome {
  Json report = Json::object();
  int code = kExitOk;

  void fail_check() { code = kExitCheckFailed; }
};

std::string fixed(double v, int digits = 6) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(digits) << v;
  return s.str();
}

std::string rational_text(const Rational& q) { return q.str(); }

std::size_t kernel_cap(const Globals& g) { return g.cap ? static_cast<std::size_t>(g.cap) : kDefaultKernelCap; }

CaSpec need_ca(const std::string& path) {
  if (path.empty()) throw UsageError("--ca is required");
  return load_ca_spec(path);
}

MeasurePtr measure_for(const std::string& path, const CaSpec* ca) {
  if (!path.empty()) return load_measure(path, ca ? &ca->automaton : nullptr);
  if (ca != nullptr && ca->measure) return ca->measure;
  throw UsageError("--measure is required (or a CA spec with a measure)");
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string part;
  while (std::getline(ss, part, sep)) out.push_back(part);
  return out;
}

std::int64_t parse_int(const std::string& s, const std::string& what) {
  try {
    std::size_t used = 0;
    const long long v = std::stoll(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw UsageError("bad " + what + " '" + s + "'");
  }
}

Word parse_word(const GroupSpec& a, const std::string& s) {
  Word w;
  if (s.empty()) return w;
  for (const auto& part : split(s, ',')) {
    const std::int64_t v = parse_int(part, "letter");
    if (v < 0 || static_cast<std::uint64_t>(v) >= a.order()) throw UsageError("letter " + part + " outside the alphabet");
    w.push_back(static_cast<Letter>(v));
  }
  return w;
}

// "sigma,F^2,sigma^-1", applied left to right.
MapWord parse_map(const std::string& s, const CaSpec* ca) {
  MapWord map;
  for (const auto& token : split(s, ',')) {
    const auto caret = token.find('^');
    const std::string head = token.substr(0, caret);
    const std::int64_t e = caret == std::string::npos ? 1 : parse_int(token.substr(caret + 1), "exponent");
    if (head == "sigma") {
      map.push_back(ShiftStep{e});
    } else if (head == "F") {
      if (ca == nullptr) throw UsageError("map step F needs --ca");
      if (e < 0) throw UsageError("negative powers of F are not supported");
      map.push_back(AutomatonStep{ca->automaton, static_cast<std::uint64_t>(e)});
    } else {
      throw UsageError("bad map step '" + token + "'");
    }
  }
  if (map.empty()) throw UsageError("empty map");
  return map;
}

Json permutativity_json(const Permutativity& p) {
  return Json{{"left", p.left}, {"right", p.right}, {"bipermutative", p.bipermutative()}};
}

Json tower_json(const KernelTower& t, const TowerReport& r, std::ostream& text) {
  Json levels = Json::array();
  for (std::size_t n = 0; n <= t.depth(); ++n) {
    const auto& lv = t.level(n);
    Json elems = Json::array();
    for (const auto& x : lv.elements) elems.push_back(x.to_string());
    levels.push_back(Json{{"n", n}, {"size", lv.size()}, {"p_n", lv.period_lcm}, {"elements", elems}});
    text << "  D_" << n << ": size " << lv.size() << ", p_" << n << " = " << lv.period_lcm << "\n";
  }
  Json steps = Json::array();
  for (const auto& s : r.steps)
    steps.push_back(Json{{"n", s.n},
                         {"nested", s.nested},
                         {"period_divides", s.period_divides},
                         {"width_bound", s.width_bound},
                         {"span_bound", s.span_bound},
                         {"maps_onto_lower", s.maps_onto_lower},
                         {"boundary_to_boundary", s.boundary_to_boundary}});
  Json out{{"levels", levels}, {"checks", steps}, {"width_exponent", r.width_exponent},
           {"span_exponent", r.span_exponent}, {"all_hold", r.all_hold()}};
  out["size_law"] = r.size_law ? Json(*r.size_law) : Json(nullptr);
  text << "  invariants: " << (r.all_hold() ? "hold" : "FAIL") << "\n";
  return out;
}

Json condition4_json(const Condition4Result& c) {
  Json steps = Json::array();
  for (const auto& s : c.steps) {
    Json j{{"m", s.m}, {"boundary_size", s.boundary_size}, {"holds", s.holds}};
    if (s.witness) j["witness"] = s.witness->to_string();
    steps.push_back(j);
  }
  return Json{{"found", c.found ? Json(*c.found) : Json(nullptr)},
              {"m_max", c.m_max},
              {"steps", steps},
              {"cap_hit_at", c.cap_hit_at ? Json(*c.cap_hit_at) : Json(nullptr)}};
}

Json corollary_json(const CorollaryKerResult& c) {
  Json gens = Json::array();
  for (const auto& [d, ok] : c.boundary_generates) gens.push_back(Json{{"d", d.to_string()}, {"generates", ok}});
  return Json{{"holds", c.holds},
              {"kernel_size", c.kernel_size},
              {"sigma_invariant_subgroups", c.sigma_invariant_subgroups},
              {"enumeration_agrees", c.enumeration_agrees},
              {"boundary", gens}};
}

Json hypotheses_json(const HypothesisReport& h, std::ostream& text) {
  Json items = Json::array();
  for (const auto& item : h.items) {
    items.push_back(Json{{"name", item.name}, {"verdict", to_string(item.verdict)}, {"detail", item.detail}});
    text << "  " << item.name << ": " << to_string(item.verdict) << (item.detail.empty() ? "" : " (" + item.detail + ")")
         << "\n";
  }
  Json out{{"trivial", h.trivial}, {"bipermutative", h.bipermutative}, {"k", h.k}, {"p1", h.p1}, {"kp1", h.kp1},
           {"items", items}, {"all_checkable_hold", h.all_checkable_hold()}};
  if (h.condition4) out["condition4"] = condition4_json(*h.condition4);
  if (h.corollary_ker) out["corollary_ker"] = corollary_json(*h.corollary_ker);
  if (h.h_sigma_estimate) out["h_sigma_estimate"] = *h.h_sigma_estimate;
  text << "  all checkable hypotheses hold: " << (h.all_checkable_hold() ? "yes" : "no") << "\n";
  return out;
}

Json entropy_json(const EntropyReport& e, std::ostream& text) {
  Json out{{"h_sigma_estimate", e.h_sigma_estimate},
           {"h_f_estimate", e.h_f_estimate},
           {"column_width", e.column_width},
           {"samples", e.samples},
           {"block", e.block},
           {"seed", e.seed},
           {"units", "nats"},
           {"upper_bound", e.bounds.upper},
           {"upper_ok", e.bounds.upper_ok}};
  if (e.h_f_formula) {
    out["h_f_formula"] = e.h_f_formula->value;
    out["formula_case"] = to_string(e.h_f_formula->formula_case);
  } else {
    out["h_f_formula"] = nullptr;
    out["formula_error"] = e.formula_error;
  }
  if (e.bounds.lower) {
    out["lower_bound"] = *e.bounds.lower;
    out["lower_ok"] = *e.bounds.lower_ok;
  }
  text << "  h_sigma ~ " << fixed(e.h_sigma_estimate) << ", h_F ~ " << fixed(e.h_f_estimate);
  if (e.h_f_formula) text << " (formula " << fixed(e.h_f_formula->value) << ")";
  text << "\n  upper bound " << fixed(e.bounds.upper) << ": " << (e.bounds.upper_ok ? "ok" : "VIOLATED") << "\n";
  if (e.bounds.lower)
    text << "  lower bound " << fixed(*e.bounds.lower) << ": " << (*e.bounds.lower_ok ? "ok" : "VIOLATED") << "\n";
  return out;
}

bool entropy_ok(const EntropyReport& e) { return e.bounds.upper_ok && e.bounds.lower_ok.value_or(true); }

// Names the dual rule as a sum of alpha, beta, gamma when it is additive on Z/n.
std::string dual_formula(const CellularAutomaton& rule) {
  const GroupSpec& q = rule.alphabet();
  if (!q.is_cyclic() || rule.width() != 3) return "table";
  const auto table = rule.materialize_table();
  const std::uint64_t n = q.order();
  std::int64_t k[3];
  for (int i = 0; i < 3; ++i) {
    Word unit(3, 0);
    unit[static_cast<std::size_t>(i)] = 1;
    k[i] = table[pack_word(n, unit)];
  }
  for (std::uint64_t c = 0; c < table.size(); ++c) {
    const Word w = unpack_word(n, c, 3);
    std::uint64_t v = 0;
    for (int i = 0; i < 3; ++i) v += static_cast<std::uint64_t>(k[i]) * w[static_cast<std::size_t>(i)];
    if (v % n != table[c]) return "table";
  }
  static const char* names[3] = {"alpha", "beta", "gamma"};
  std::string out;
  for (int i = 0; i < 3; ++i) {
    if (k[i] == 0) continue;
    if (!out.empty()) out += " + ";
    out += (k[i] == 1 ? std::string{} : std::to_string(k[i])) + names[i];
  }
  return out.empty() ? "0" : out;
}

Json class_a_json(const CellularAutomaton& f, std::size_t conj_depth, std::size_t conj_width, Outcome& o,
                  std::ostream& text) {
  const auto an = analyze_radius1(f);
  Json classes = Json::array();
  for (const auto& c : an.classes) classes.push_back(c);
  Json succ = Json::array();
  for (const auto& s : an.succ) succ.push_back(s);
  const bool bm1 = check_bm1(an);
  const bool bm2 = bm1 && check_bm2(an);
  Json out{{"classes", classes}, {"pi", an.pi}, {"succ", succ}, {"pi_permutation", an.pi_permutation},
           {"left_permutative", an.left_permutative}, {"bm1", bm1}, {"bm2", bm2}, {"class_a", an.class_a},
           {"quotient_size", an.quotient_size()}};
  text << "  classes: " << an.quotient_size() << ", BM1 " << (bm1 ? "yes" : "no") << ", BM2 " << (bm2 ? "yes" : "no")
       << ", class (A): " << (an.class_a ? "yes" : "no") << "\n";
  if (!an.class_a) return out;
  const auto dual = dual_ca(f);
  const std::string formula = dual_formula(dual.rule);
  out["dual"] = Json{{"outputs", dual.rule.materialize_table()}, {"formula", formula},
                     {"bipermutative", permutativity_by_table(dual.rule).bipermutative()}};
  if (is_endomorphism(f)) {
    const bool agree = dual_ca_linear(f).rule.materialize_table() == dual.rule.materialize_table();
    out["dual"]["linear_formula_agrees"] = agree;
    if (!agree) o.fail_check();
  }
  const auto conj = verify_conjugacy(f, dual, conj_depth, conj_width);
  out["conjugacy"] = Json{{"holds", conj.holds}, {"depth", conj_depth}, {"width", conj_width},
                          {"windows_checked", conj.windows_checked}, {"comparisons", conj.comparisons}};
  if (conj.witness) out["conjugacy"]["witness"] = *conj.witness;
  text << "  dual rule: " << formula << "\n  conjugacy over width-" << conj_width << " windows, depth " << conj_depth
       << ": " << (conj.holds ? "holds" : "FAILS") << "\n";
  if (!conj.holds) o.fail_check();
  return out;
}

struct AnalyzeOptions {
  std::size_t depth = 3;
  std::size_t samples = 100000;
  std::size_t block = 4;
  std::size_t m_max = 4;
  std::size_t conj_depth = 6;
  std::size_t conj_width = 6;
};

Outcome analyze(const CaSpec& spec, const MeasurePtr& mu, const AnalyzeOptions& opt, const Globals& g,
                std::ostream& text) {
  Outcome o;
  const CellularAutomaton& f = spec.automaton;
  const CellularAutomaton small = smallest_neighborhood(f);
  const auto perm = permutativity(small);
  text << "automaton: " << f.describe() << "\n";
  text << "  smallest neighborhood [" << small.neighborhood().left << ", " << small.neighborhood().right << "]\n";
  text << "  bipermutative: " << (perm.bipermutative() ? "yes" : "no") << "\n";
  o.report["automaton"] = to_json(f);
  o.report["smallest_neighborhood"] = {small.neighborhood().left, small.neighborhood().right};
  o.report["trivial"] = is_trivial(f);
  o.report["permutativity"] = permutativity_json(perm);
  o.report["shift"] = to_json(f.alphabet(), spec.shift);
  o.report["parameters"] = Json{{"depth", opt.depth}, {"samples", opt.samples}, {"block", opt.block},
                                {"m_max", opt.m_max}, {"seed", g.seed}, {"cap", g.cap}};

  const auto surj = surjectivity(f);
  o.report["surjectivity"] = Json{{"surjective", surj.surjective}, {"balanced", surj.balanced},
                                  {"bound_requested", surj.bound_requested}, {"bound_used", surj.bound_used}};
  text << "  surjective: " << (surj.surjective ? "yes" : "no") << " (balance checked to length " << surj.bound_used
       << ")\n";

  const bool endo = is_endomorphism(f);
  o.report["polynomial"] = endo ? Json(as_laurent(to_linear(small)).to_string()) : Json(nullptr);
  if (endo) text << "  polynomial: " << as_laurent(to_linear(small)).to_string() << "\n";

  // Kernel tower: on F itself when bipermutative, otherwise on its bipermutative power when one exists.
  std::optional<CellularAutomaton> tower_ca;
  if (endo && perm.bipermutative()) {
    tower_ca = small;
  } else if (endo && f.alphabet().is_cyclic()) {
    try {
      tower_ca = bipermutative_power(small);
      o.report["kernel_of"] = "bipermutative power";
      o.report["bipermutative_power"] = as_laurent(*tower_ca).to_string();
      text << "  bipermutative power: " << as_laurent(*tower_ca).to_string() << "\n";
    } catch (const PreconditionError& e) {
      o.report["kernel_skipped"] = e.what();
    }
  } else {
    o.report["kernel_skipped"] = endo ? "not bipermutative" : "not an endomorphism";
  }
  if (tower_ca) {
    text << "kernel tower:\n";
    const auto t = tower(*tower_ca, opt.depth, kernel_cap(g));
    const auto r = check_tower(t);
    o.report["kernel"] = tower_json(t, r, text);
    if (!r.all_hold() || (r.size_law && !*r.size_law)) o.fail_check();
    const auto c4 = condition4_search(*tower_ca, f.alphabet(), spec.shift, opt.m_max, kernel_cap(g));
    const auto ck = corollary_ker_check(*tower_ca, f.alphabet(), spec.shift);
    o.report["condition4"] = condition4_json(c4);
    o.report["corollary_ker"] = corollary_json(ck);
    text << "  condition (4): " << (c4.found      ? "m = " + std::to_string(*c4.found)
                                   : c4.cap_hit_at ? "not found; enumeration cap reached at m = " + std::to_string(*c4.cap_hit_at)
                                                   : "not found up to m_max") << "\n";
    text << "  corollary ker: " << (ck.holds ? "holds" : "does not hold") << "\n";
    if (ck.holds && !c4.found) o.fail_check();
  }

  const bool radius1 = small.neighborhood() == Neighborhood{0, 1};
  if (radius1 && f.alphabet().order() <= 64) {
    text << "class (A):\n";
    o.report["class_a"] = class_a_json(small, opt.conj_depth, opt.conj_width, o, text);
  }

  if (mu) {
    text << "entropy (" << (mu->name().empty() ? mu->describe() : mu->name()) << ", nats):\n";
    EntropyOptions eo;
    eo.samples = opt.samples;
    eo.block = opt.block;
    eo.seed = g.seed;
    const auto e = estimate_entropy(f, *mu, eo);
    o.report["entropy"] = entropy_json(e, text);
    o.report["entropy"]["topological"] = nullptr;
    if (perm.bipermutative()) o.report["entropy"]["topological"] = topological_entropy(f);
    o.report["entropy"]["measure"] = to_json(*mu);
    if (!entropy_ok(e)) o.fail_check();
  }

  text << "hypotheses:\n";
  try {
    HypothesisOptions ho;
    ho.samples = opt.samples;
    ho.block = opt.block;
    ho.seed = g.seed;
    ho.m_max = opt.m_max;
    o.report["hypotheses"] = hypotheses_json(check_hypotheses(f, spec.shift, mu, ho), text);
  } catch (const PreconditionError& e) {
    o.report["hypotheses"] = Json{{"error", e.what()}};
    text << "  not evaluated: " << e.what() << "\n";
  }
  o.report["exit_code"] = o.code;
  return o;
}

void write_out(const Globals& g, const Json& report) {
  if (g.out_path.empty()) return;
  std::ofstream f(g.out_path);
  if (!f) throw UsageError("cannot write " + g.out_path);
  f << report.dump(2) << "\n";
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Algebraic cellular automata toolkit"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--seed", g.seed, "random seed");
  app.add_option("--out", g.out_path, "write the JSON report here");
  app.add_option("--cap", g.cap, "enumeration cap (0 keeps the defaults)");

  std::string ca_path, measure_path, shift_path;
  AnalyzeOptions aopt;
  std::function<Outcome()> action;

  auto* analyze_cmd = app.add_subcommand("analyze", "full report for a CA spec");
  analyze_cmd->add_option("--ca", ca_path, "CA spec file")->required();
  analyze_cmd->add_option("--measure", measure_path, "measure spec file");
  analyze_cmd->add_option("--depth", aopt.depth, "kernel tower depth");
  analyze_cmd->add_option("--samples", aopt.samples, "entropy samples");
  analyze_cmd->add_option("--block", aopt.block, "entropy block length");
  analyze_cmd->add_option("--m-max", aopt.m_max, "condition (4) search bound");
  analyze_cmd->callback([&] {
    action = [&] {
      const auto spec = need_ca(ca_path);
      const MeasurePtr mu = measure_path.empty() ? spec.measure : load_measure(measure_path, &spec.automaton);
      return analyze(spec, mu, aopt, g, out);
    };
  });

  std::size_t depth = 3;
  auto* kernel_cmd = app.add_subcommand("kernel", "kernel tower D_n");
  kernel_cmd->add_option("--ca", ca_path, "CA spec file")->required();
  kernel_cmd->add_option("--depth", depth, "tower depth");
  kernel_cmd->callback([&] {
    action = [&] {
      Outcome o;
      const auto spec = need_ca(ca_path);
      out << "kernel tower of " << spec.automaton.describe() << ":\n";
      const auto t = tower(spec.automaton, depth, kernel_cap(g));
      const auto r = check_tower(t);
      o.report = tower_json(t, r, out);
      o.report["automaton"] = to_json(spec.automaton);
      o.report["depth"] = depth;
      if (!r.all_hold() || (r.size_law && !*r.size_law)) o.fail_check();
      return o;
    };
  });

  EntropyOptions eopt;
  double expansivity = 0.0;
  auto* entropy_cmd = app.add_subcommand("entropy", "entropy estimates and bounds");
  entropy_cmd->add_option("--ca", ca_path, "CA spec file")->required();
  entropy_cmd->add_option("--measure", measure_path, "measure spec file");
  entropy_cmd->add_option("--samples", eopt.samples, "samples");
  entropy_cmd->add_option("--block", eopt.block, "block length");
  entropy_cmd->add_option("--expansivity-radius", expansivity, "r_T for the lower bound");
  entropy_cmd->callback([&] {
    action = [&] {
      Outcome o;
      const auto spec = need_ca(ca_path);
      const auto mu = measure_for(measure_path, &spec);
      eopt.seed = g.seed;
      if (expansivity > 0) eopt.expansivity_radius = expansivity;
      out << "entropy of " << spec.automaton.describe() << " (nats):\n";
      const auto e = estimate_entropy(spec.automaton, *mu, eopt);
      o.report = entropy_json(e, out);
      o.report["topological"] = e.h_f_formula ? Json(topological_entropy(spec.automaton)) : Json(nullptr);
      if (!entropy_ok(e)) o.fail_check();
      return o;
    };
  });

  auto* modular_cmd = app.add_subcommand("modular", "Z/p^k structure of a linear CA");
  modular_cmd->add_option("--ca", ca_path, "CA spec file")->required();
  modular_cmd->callback([&] {
    action = [&] {
      Outcome o;
      const auto spec = need_ca(ca_path);
      const auto& f = spec.automaton;
      if (!f.alphabet().is_cyclic()) throw UsageError("modular needs a cyclic alphabet");
      const auto pp = prime_power(f.alphabet().order());
      const auto support = permutative_support(f);
      o.report["prime"] = pp.prime;
      o.report["exponent"] = pp.exponent;
      o.report["permutative_support"] = support.offsets;
      out << "Z/" << f.alphabet().order() << " = Z/" << pp.prime << "^" << pp.exponent << "\n";
      const auto g_ca = bipermutative_power(f);
      const auto poly = as_laurent(g_ca);
      o.report["bipermutative_power"] = Json{{"polynomial", poly.to_string()},
                                             {"neighborhood", {g_ca.neighborhood().left, g_ca.neighborhood().right}},
                                             {"bipermutative", permutativity_by_table(g_ca).bipermutative()}};
      out << "bipermutative power: " << poly.to_string() << " on [" << g_ca.neighborhood().left << ", "
          << g_ca.neighborhood().right << "]\n";
      if (pp.exponent == 1) {
        const auto fac = factor_mod_p(poly);
        Json factors = Json::array();
        for (const auto& [p, m] : fac.factors) factors.push_back(Json{{"factor", poly_string(p)}, {"multiplicity", m}});
        o.report["factorization"] = Json{{"unit", fac.unit}, {"shift", fac.shift}, {"factors", factors}};
        const auto ds = kernel_direct_sum_check(g_ca, 1);
        o.report["direct_sum"] = Json{{"holds", ds.holds}, {"kernel_size", ds.kernel_size},
                                      {"factor_kernel_sizes", ds.factor_kernel_sizes}};
        out << "factors:";
        for (const auto& [p, m] : fac.factors) out << " (" << poly_string(p) << ")^" << m;
        out << "\nkernel direct sum: " << (ds.holds ? "holds" : "FAILS") << "\n";
        if (!ds.holds) o.fail_check();
        const auto rec = recurrence_matrix(g_ca);
        const auto order = rec.matrix_order();
        const auto r = static_cast<std::uint32_t>(g_ca.neighborhood().right - g_ca.neighborhood().left);
        const auto bound = divisor_bound(pp.prime, r);
        const auto t = tower(g_ca, 1, kernel_cap(g));
        const bool divides = bound % t.level(1).period_lcm == 0 && order % t.level(1).period_lcm == 0;
        o.report["recurrence"] = Json{{"matrix_order", order}, {"divisor_bound", bound}, {"p1", t.level(1).period_lcm},
                                      {"p1_divides", divides}};
        out << "p_1 = " << t.level(1).period_lcm << ", matrix order " << order << ", bound " << bound << "\n";
        if (!divides) o.fail_check();
      }
      return o;
    };
  });

  bool paper_examples = false;
  std::size_t conj_depth = 8, conj_width = 8;
  auto* dual_cmd = app.add_subcommand("dual", "class (A) analysis and dual CA");
  dual_cmd->add_option("--ca", ca_path, "CA spec file");
  dual_cmd->add_flag("--paper-examples", paper_examples, "run the bundled F1 and F2");
  dual_cmd->add_option("--depth", conj_depth, "conjugacy depth");
  dual_cmd->add_option("--width", conj_width, "conjugacy window width");
  dual_cmd->callback([&] {
    action = [&] {
      Outcome o;
      std::vector<CaSpec> specs;
      if (paper_examples) {
        for (const char* name : {"classA_F1.json", "classA_F2.json"})
          specs.push_back(load_ca_spec(bundled_examples_dir() / name));
      } else {
        specs.push_back(need_ca(ca_path));
      }
      Json all = Json::array();
      for (const auto& s : specs) {
        const auto small = smallest_neighborhood(s.automaton);
        if (!(small.neighborhood() == Neighborhood{0, 1}))
          throw UsageError(s.automaton.describe() + " does not have neighborhood [0, 1]");
        out << (s.name.empty() ? s.automaton.describe() : s.name) << ":\n";
        Json j = class_a_json(small, conj_depth, conj_width, o, out);
        j["name"] = s.name;
        all.push_back(j);
      }
      o.report["examples"] = all;
      return o;
    };
  });

  auto* measure_cmd = app.add_subcommand("measure", "measure diagnostics");
  measure_cmd->require_subcommand(1);

  std::string word_text, map_text = "sigma", residues_text, expect;
  std::int64_t offset = 0;
  std::size_t length = 6, budget = 3, n_max = 32, mc_samples = 0;

  auto* prob_cmd = measure_cmd->add_subcommand("prob", "exact cylinder probability");
  prob_cmd->add_option("--measure", measure_path)->required();
  prob_cmd->add_option("--ca", ca_path, "CA spec resolving F steps");
  prob_cmd->add_option("--word", word_text, "letters, comma separated")->required();
  prob_cmd->add_option("--offset", offset);
  prob_cmd->callback([&] {
    action = [&] {
      Outcome o;
      std::optional<CaSpec> ca;
      if (!ca_path.empty()) ca = load_ca_spec(ca_path);
      const auto mu = measure_for(measure_path, ca ? &*ca : nullptr);
      const Cylinder c{offset, parse_word(mu->alphabet(), word_text)};
      const auto p = cylinder_prob(*mu, c);
      o.report = Json{{"measure", to_json(*mu)}, {"cylinder", to_json(c)}, {"probability", to_json(p)}};
      out << "mu([" << word_string(mu->alphabet(), c.word) << "]_" << offset << ") = " << rational_text(p) << "\n";
      return o;
    };
  });

  auto* inv_cmd = measure_cmd->add_subcommand("invariance", "invariance under a map word");
  inv_cmd->add_option("--measure", measure_path)->required();
  inv_cmd->add_option("--ca", ca_path);
  inv_cmd->add_option("--map", map_text, "e.g. sigma,F^2");
  inv_cmd->add_option("--length", length, "largest cylinder length");
  inv_cmd->add_option("--mc-samples", mc_samples, "Monte Carlo mode with this many samples");
  inv_cmd->add_option("--expect", expect, "invariant | not-invariant")->check(CLI::IsMember({"invariant", "not-invariant"}));
  inv_cmd->callback([&] {
    action = [&] {
      Outcome o;
      std::optional<CaSpec> ca;
      if (!ca_path.empty()) ca = load_ca_spec(ca_path);
      const auto mu = measure_for(measure_path, ca ? &*ca : nullptr);
      const auto map = parse_map(map_text, ca ? &*ca : nullptr);
      const auto r = mc_samples ? invariance_check_mc(*mu, map, length, mc_samples, g.seed)
                                : invariance_check(*mu, map, length);
      o.report = Json{{"map", map_text}, {"max_length", r.max_length}, {"exact", r.exact},
                      {"cylinders_checked", r.cylinders_checked}, {"invariant", r.invariant()}};
      if (r.exact) {
        o.report["max_discrepancy"] = to_json(r.max_discrepancy);
      } else {
        o.report["max_z"] = r.max_z;
        o.report["samples"] = mc_samples;
        o.report["seed"] = g.seed;
      }
      if (r.witness) o.report["witness"] = to_json(*r.witness);
      out << "invariance under " << map_text << " up to length " << length << ": "
          << (r.invariant() ? "invariant" : "not invariant");
      if (r.exact) out << " (max discrepancy " << rational_text(r.max_discrepancy) << ")";
      if (r.witness) out << ", witness [" << word_string(mu->alphabet(), r.witness->word) << "]_" << r.witness->offset;
      out << "\n";
      if (!expect.empty() && (expect == "invariant") != r.invariant()) o.fail_check();
      return o;
    };
  });

  auto* char_cmd = measure_cmd->add_subcommand("char", "character integral");
  char_cmd->add_option("--measure", measure_path)->required();
  char_cmd->add_option("--ca", ca_path);
  char_cmd->add_option("--offset", offset);
  char_cmd->add_option("--residues", residues_text, "per position residues; ';' between positions, ',' within")
      ->required();
  char_cmd->callback([&] {
    action = [&] {
      Outcome o;
      std::optional<CaSpec> ca;
      if (!ca_path.empty()) ca = load_ca_spec(ca_path);
      const auto mu = measure_for(measure_path, ca ? &*ca : nullptr);
      FiniteCharacter chi{offset, {}};
      for (const auto& pos : split(residues_text, ';')) {
        Character c;
        for (const auto& r : split(pos, ',')) c.residues.push_back(parse_int(r, "residue"));
        if (c.residues.size() != mu->alphabet().rank()) throw UsageError("residue count differs from the alphabet rank");
        chi.letters.push_back(c);
      }
      const auto v = character_integral(*mu, chi);
      o.report = Json{{"character", chi.describe()}, {"re", v.real()}, {"im", v.imag()}, {"abs", std::abs(v)}};
      out << "mu(" << chi.describe() << ") = " << fixed(v.real(), 9) << " + " << fixed(v.imag(), 9) << "i\n";
      return o;
    };
  });

  auto* haar_cmd = measure_cmd->add_subcommand("haar-test", "Haar consistency against a subgroup shift");
  haar_cmd->add_option("--measure", measure_path)->required();
  haar_cmd->add_option("--ca", ca_path);
  haar_cmd->add_option("--shift", shift_path, "shift spec file (default: full shift)");
  haar_cmd->add_option("--budget", budget, "character support size");
  haar_cmd->add_option("--expect", expect, "consistent | inconsistent")->check(CLI::IsMember({"consistent", "inconsistent"}));
  haar_cmd->callback([&] {
    action = [&] {
      Outcome o;
      std::optional<CaSpec> ca;
      if (!ca_path.empty()) ca = load_ca_spec(ca_path);
      const auto mu = measure_for(measure_path, ca ? &*ca : nullptr);
      SubgroupShift shift = FullShift{};
      if (!shift_path.empty()) shift = shift_from_json(mu->alphabet(), read_json_file(shift_path), "");
      const auto r = haar_test(*mu, shift, budget);
      o.report = Json{{"shift", to_json(mu->alphabet(), shift)}, {"budget", budget}, {"support_ok", r.support_ok},
                      {"max_abs", r.max_abs}, {"characters_checked", r.characters_checked},
                      {"consistent", r.consistent()}};
      if (r.witness) o.report["witness"] = r.witness->describe();
      if (r.support_witness) o.report["support_witness"] = to_json(*r.support_witness);
      out << "haar test against " << describe(mu->alphabet(), shift) << ", budget " << budget << ": "
          << (r.consistent() ? "consistent" : "inconsistent") << " (max |mu(chi)| = " << fixed(r.max_abs, 9) << ")\n";
      if (r.witness && r.max_abs > 0) out << "  witness " << r.witness->describe() << "\n";
      if (!expect.empty() && (expect == "consistent") != r.consistent()) o.fail_check();
      return o;
    };
  });

  auto* cesaro_cmd = measure_cmd->add_subcommand("cesaro", "Cesaro means of F^j mu");
  cesaro_cmd->add_option("--measure", measure_path)->required();
  cesaro_cmd->add_option("--ca", ca_path)->required();
  cesaro_cmd->add_option("--n", n_max, "largest N");
  cesaro_cmd->add_option("--length", length, "window length");
  cesaro_cmd->callback([&] {
    action = [&] {
      Outcome o;
      const auto ca = need_ca(ca_path);
      const auto mu = measure_for(measure_path, &ca);
      const auto seq = cesaro_sequence(mu, ca.automaton, n_max, length);
      Json points = Json::array();
      for (const auto& p : seq) {
        points.push_back(Json{{"n", p.n}, {"distance_to_uniform", to_json(p.distance_to_uniform)},
                              {"distance", p.distance_to_uniform.convert_to<double>()}});
        out << "  N = " << p.n << ": TV distance " << fixed(p.distance_to_uniform.convert_to<double>()) << "\n";
      }
      o.report = Json{{"length", length}, {"points", points}};
      return o;
    };
  });

  auto* cex_cmd = measure_cmd->add_subcommand("counterexample", "the two-block counterexample suite");
  cex_cmd->callback([&] {
    action = [&] {
      Outcome o;
      const auto s = counterexample_suite();
      const auto& a = s.automaton.alphabet();
      Json checks = Json::object();
      auto check = [&](const std::string& name, bool ok) {
        checks[name] = ok;
        out << "  " << name << ": " << (ok ? "ok" : "FAIL") << "\n";
        if (!ok) o.fail_check();
      };
      out << "counterexample suite for " << s.automaton.describe() << ":\n";
      check("sigma(X1) = X2", s.sigma_x1_is_x2);
      check("F(X1) = X3", s.f_x1_is_x3);
      check("F(X2) = X4", s.f_x2_is_x4);
      check("sigma^-2(X1) = X1", s.sigma_pre2_x1_is_x1);
      check("sigma^-1(X1) = X2", s.sigma_pre1_x1_is_x2);
      const auto mu_f = invariance_check(*s.mu, {AutomatonStep{s.automaton, 1}}, 6);
      const auto mu_s = invariance_check(*s.mu, {ShiftStep{1}}, 6);
      check("mu F-invariant (L = 6)", mu_f.invariant());
      check("mu sigma-invariant (L = 6)", mu_s.invariant());
      const auto nu_s = invariance_check(*s.nu, {ShiftStep{1}}, 6);
      check("nu not sigma-invariant", !nu_s.invariant() && nu_s.witness.has_value());
      if (nu_s.witness) o.report["nu_witness"] = to_json(*nu_s.witness);
      const auto snu = MeasureSpec::pushforward(s.nu, {ShiftStep{1}});
      const MeasureSpec haar_x2(a, HaarOnShift{s.x2});
      bool same = true;
      for (std::size_t len = 1; len <= 6; ++len)
        for (std::int64_t off = 0; off < 2; ++off)
          same = same && window_distribution(*snu, off, len) == window_distribution(haar_x2, off, len);
      check("sigma nu = Haar(X2) (L = 6)", same);
      const auto ht = haar_test(*s.mu, FullShift{}, 2);
      check("mu is not Haar (character witness)", !ht.consistent() && ht.witness.has_value() && ht.max_abs > 1e-6);
      if (ht.witness) {
        o.report["character_witness"] = ht.witness->describe();
        o.report["character_value"] = ht.max_abs;
      }
      o.report["checks"] = checks;
      o.report["x1"] = to_json(a, s.x1);
      o.report["x2"] = to_json(a, s.x2);
      o.report["x3"] = to_json(a, s.x3);
      o.report["x4"] = to_json(a, s.x4);
      o.report["mu"] = to_json(*s.mu);
      return o;
    };
  });

  HypothesisOptions hopt;
  auto hyp_action = [&] {
    Outcome o;
    const auto ca = need_ca(ca_path);
    MeasurePtr mu = measure_path.empty() ? ca.measure : load_measure(measure_path, &ca.automaton);
    hopt.seed = g.seed;
    out << "hypotheses for " << ca.automaton.describe() << " on " << describe(ca.automaton.alphabet(), ca.shift)
        << (mu ? " with " + (mu->name().empty() ? mu->describe() : mu->name()) : std::string(" (abstract measure)"))
        << ":\n";
    o.report = hypotheses_json(check_hypotheses(ca.automaton, ca.shift, mu, hopt), out);
    o.report["samples"] = hopt.samples;
    o.report["seed"] = hopt.seed;
    return o;
  };
  for (auto* cmd : {measure_cmd->add_subcommand("hypotheses", "rigidity hypotheses for a measure"),
                    app.add_subcommand("hypotheses", "rigidity hypotheses")}) {
    cmd->add_option("--ca", ca_path)->required();
    cmd->add_option("--measure", measure_path);
    cmd->add_option("--samples", hopt.samples);
    cmd->add_option("--m-max", hopt.m_max);
    cmd->callback([&] { action = hyp_action; });
  }

  bool check_examples = false;
  auto* examples_cmd = app.add_subcommand("examples", "list the bundled example specs");
  examples_cmd->add_flag("--check", check_examples, "analyze every bundled example");
  examples_cmd->callback([&] {
    action = [&] {
      Outcome o;
      Json list = Json::array();
      for (const auto& file : bundled_example_files()) {
        const auto spec = load_ca_spec(file);
        Json j{{"file", file.filename().string()}, {"name", spec.name}, {"automaton", spec.automaton.describe()}};
        out << file.filename().string() << ": " << spec.automaton.describe() << "\n";
        if (check_examples) {
          std::ostringstream sink;
          AnalyzeOptions quick;
          quick.samples = 20000;
          const auto r = analyze(spec, spec.measure, quick, g, sink);
          j["exit_code"] = r.code;
          out << "  analyze exit " << r.code << "\n";
          if (r.code != kExitOk) o.code = r.code;
        }
        list.push_back(j);
      }
      o.report["examples"] = list;
      return o;
    };
  });

  try {
    app.parse(std::vector<std::string>(args.rbegin(), args.rend()));
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    Outcome o = action();
    o.report["exit_code"] = o.code;
    write_out(g, o.report);
    if (o.code == kExitCheckFailed) err << "a checked property failed; see the report\n";
    return o.code;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
  } catch (const SpecError& e) {
    err << "spec error: " << e.what() << "\n";
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
  }
  return kExitUsage;
}

int run(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace algca
