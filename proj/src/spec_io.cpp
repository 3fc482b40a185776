#include "algca/spec_io.hpp"

#include "algca/error.hpp"

#include <fstream>
#include <sstream>

#ifndef ALGCA_EXAMPLES_DIR
#define ALGCA_EXAMPLES_DIR "data/examples"
#endif

namespace algca {

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw SpecError((path.empty() ? std::string("<root>") : path) + ": " + what);
}

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }
std::string index(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }

const Json& member(const Json& j, const std::string& key, const std::string& path) {
  if (!j.is_object()) fail(path, "expected an object");
  const auto it = j.find(key);
  if (it == j.end()) fail(join(path, key), "missing");
  return *it;
}

std::int64_t integer(const Json& j, const std::string& path) {
  if (!j.is_number_integer()) fail(path, "expected an integer");
  return j.get<std::int64_t>();
}

const Json& array(const Json& j, const std::string& path) {
  if (!j.is_array()) fail(path, "expected an array");
  return j;
}

std::string string_member(const Json& j, const std::string& key, const std::string& path) {
  const Json& v = member(j, key, path);
  if (!v.is_string()) fail(join(path, key), "expected a string");
  return v.get<std::string>();
}

std::string optional_name(const Json& j) {
  const auto it = j.find("name");
  return it != j.end() && it->is_string() ? it->get<std::string>() : std::string{};
}

Letter letter(const GroupSpec& a, const Json& j, const std::string& path) {
  if (j.is_array()) {
    GroupElement x;
    for (std::size_t i = 0; i < j.size(); ++i) x.residues.push_back(integer(j[i], index(path, i)));
    if (!a.contains(x)) fail(path, "not an element of " + a.describe());
    return a.encode(x);
  }
  const std::int64_t v = integer(j, path);
  if (v < 0 || static_cast<std::uint64_t>(v) >= a.order())
    fail(path, "letter " + std::to_string(v) + " outside 0.." + std::to_string(a.order() - 1));
  return static_cast<Letter>(v);
}

Word word(const GroupSpec& a, const Json& j, const std::string& path) {
  Word w;
  for (std::size_t i = 0; i < array(j, path).size(); ++i) w.push_back(letter(a, j[i], index(path, i)));
  return w;
}

// "0,1,1" -> word over a.
Word word_key(const GroupSpec& a, const std::string& key, const std::string& path) {
  Word w;
  std::stringstream ss(key);
  std::string part;
  while (std::getline(ss, part, ',')) {
    try {
      std::size_t used = 0;
      const long long v = std::stoll(part, &used);
      if (used != part.size() || v < 0 || static_cast<std::uint64_t>(v) >= a.order()) throw std::invalid_argument(part);
      w.push_back(static_cast<Letter>(v));
    } catch (const std::exception&) {
      fail(path, "bad word key '" + key + "'");
    }
  }
  return w;
}

std::string word_key(std::span<const Letter> w) {
  std::string out;
  for (std::size_t i = 0; i < w.size(); ++i) out += (i ? "," : "") + std::to_string(w[i]);
  return out;
}

Endomorphism coefficient(const GroupSpec& a, const Json& j, const std::string& path) {
  if (j.is_number_integer()) return Endomorphism::scalar(a, j.get<std::int64_t>());
  const auto rank = static_cast<Eigen::Index>(a.rank());
  if (!j.is_array() || static_cast<Eigen::Index>(j.size()) != rank)
    fail(path, "expected an integer or a " + std::to_string(rank) + "x" + std::to_string(rank) + " matrix");
  IntMatrix m(rank, rank);
  for (Eigen::Index r = 0; r < rank; ++r) {
    const std::string row_path = index(path, static_cast<std::size_t>(r));
    const Json& row = j[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != rank) fail(row_path, "row of wrong length");
    for (Eigen::Index c = 0; c < rank; ++c)
      m(r, c) = integer(row[static_cast<std::size_t>(c)], index(row_path, static_cast<std::size_t>(c)));
  }
  try {
    return Endomorphism(a, m);
  } catch (const Error& e) {
    fail(path, e.what());
  }
}

LaurentPoly polynomial(const GroupSpec& a, const Json& coeffs, const std::string& path) {
  if (!coeffs.is_object()) fail(path, "expected an object mapping degree to coefficient");
  std::map<int, Endomorphism> terms;
  for (const auto& [key, value] : coeffs.items()) {
    int degree = 0;
    try {
      std::size_t used = 0;
      degree = std::stoi(key, &used);
      if (used != key.size()) throw std::invalid_argument(key);
    } catch (const std::exception&) {
      fail(join(path, key), "degree must be an integer");
    }
    const auto c = coefficient(a, value, join(path, key));
    if (!c.is_zero()) terms.emplace(degree, c);
  }
  return LaurentPoly(a, terms);
}

Json coefficient_json(const Endomorphism& e) {
  if (e.source().is_cyclic()) return e.matrix()(0, 0);
  Json rows = Json::array();
  for (Eigen::Index r = 0; r < e.matrix().rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < e.matrix().cols(); ++c) row.push_back(e.matrix()(r, c));
    rows.push_back(row);
  }
  return rows;
}

Json polynomial_json(const LaurentPoly& p) {
  Json out = Json::object();
  for (const auto& [d, c] : p.terms()) out[std::to_string(d)] = coefficient_json(c);
  return out;
}

std::vector<Rational> rationals(const Json& j, const std::string& path) {
  std::vector<Rational> out;
  for (std::size_t i = 0; i < array(j, path).size(); ++i) out.push_back(rational_from_json(j[i], index(path, i)));
  return out;
}

MeasurePtr renamed(const MeasurePtr& m, const std::string& name) {
  if (name.empty()) return m;
  return std::make_shared<const MeasureSpec>(m->alphabet(), m->variant(), name);
}

template <class F>
auto wrap(const std::string& path, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const SpecError&) {
    throw;
  } catch (const Error& e) {
    fail(path, e.what());
  }
}

}  // namespace

Rational rational_from_json(const Json& j, const std::string& path) {
  if (j.is_number_integer()) return Rational(j.get<std::int64_t>());
  if (j.is_string()) {
    try {
      return Rational(j.get<std::string>());
    } catch (const std::exception&) {
      fail(path, "bad rational '" + j.get<std::string>() + "'");
    }
  }
  // num/den may be strings so that big values survive a round trip.
  auto part = [&](const char* key) -> boost::multiprecision::cpp_int {
    const Json& v = member(j, key, path);
    if (v.is_string()) {
      try {
        return boost::multiprecision::cpp_int(v.get<std::string>());
      } catch (const std::exception&) {
        fail(join(path, key), "bad integer '" + v.get<std::string>() + "'");
      }
    }
    return boost::multiprecision::cpp_int(integer(v, join(path, key)));
  };
  const auto num = part("num");
  const auto den = part("den");
  if (den == 0) fail(join(path, "den"), "zero denominator");
  return Rational(num, den);
}

GroupSpec alphabet_from_json(const Json& j, const std::string& path) {
  const Json& moduli = j.is_object() ? member(j, "moduli", path) : j;
  const std::string mpath = j.is_object() ? join(path, "moduli") : path;
  std::vector<std::int64_t> ms;
  for (std::size_t i = 0; i < array(moduli, mpath).size(); ++i) {
    const std::int64_t m = integer(moduli[i], index(mpath, i));
    if (m < 2) fail(index(mpath, i), "modulus must be at least 2, got " + std::to_string(m));
    ms.push_back(m);
  }
  return wrap(mpath, [&] { return GroupSpec(ms); });
}

CellularAutomaton automaton_from_json(const Json& j, const std::string& path) {
  const GroupSpec a = alphabet_from_json(member(j, "alphabet", path), join(path, "alphabet"));
  const std::string rpath = join(path, "rule");
  const Json& rule = member(j, "rule", path);
  const std::string type = string_member(rule, "type", rpath);

  std::optional<Neighborhood> nbhd;
  if (j.contains("neighborhood")) {
    const std::string npath = join(path, "neighborhood");
    const Json& n = array(j["neighborhood"], npath);
    if (n.size() != 2) fail(npath, "expected [r, s]");
    nbhd = Neighborhood{static_cast<int>(integer(n[0], index(npath, 0))), static_cast<int>(integer(n[1], index(npath, 1)))};
    if (nbhd->left > nbhd->right) fail(npath, "r must not exceed s");
  }

  CellularAutomaton f = [&]() -> CellularAutomaton {
    if (type == "linear" || type == "affine") {
      const auto poly = polynomial(a, member(rule, "coeffs", rpath), join(rpath, "coeffs"));
      Letter constant = 0;
      if (type == "affine") constant = letter(a, member(rule, "constant", rpath), join(rpath, "constant"));
      if (!nbhd) return type == "linear" ? CellularAutomaton::linear(poly) : CellularAutomaton::affine(poly, constant);
      if (!poly.is_zero() && (poly.min_degree() < nbhd->left || poly.max_degree() > nbhd->right))
        fail(join(path, "neighborhood"), "does not cover the polynomial degrees");
      if (type == "linear") return wrap(rpath, [&] { return CellularAutomaton(a, LinearRule{poly}, *nbhd); });
      return wrap(rpath, [&] { return CellularAutomaton(a, AffineRule{poly, constant}, *nbhd); });
    }
    if (type == "table") {
      if (!nbhd) fail(join(path, "neighborhood"), "required for table rules");
      const std::uint64_t size = wrap(rpath, [&] { return checked_power(a.order(), nbhd->width(), kDefaultTableCap); });
      std::vector<Letter> outputs;
      if (rule.contains("outputs")) {
        const std::string opath = join(rpath, "outputs");
        const Json& o = array(rule["outputs"], opath);
        if (o.size() != size) fail(opath, "expected " + std::to_string(size) + " entries, got " + std::to_string(o.size()));
        for (std::size_t i = 0; i < o.size(); ++i) outputs.push_back(letter(a, o[i], index(opath, i)));
      } else {
        const std::string epath = join(rpath, "entries");
        const Json& e = member(rule, "entries", rpath);
        if (!e.is_object()) fail(epath, "expected an object mapping words to letters");
        std::vector<std::optional<Letter>> slots(size);
        for (const auto& [key, value] : e.items()) {
          const Word w = word_key(a, key, join(epath, key));
          if (w.size() != nbhd->width()) fail(join(epath, key), "word length differs from the neighborhood width");
          slots[pack_word(a.order(), w)] = letter(a, value, join(epath, key));
        }
        for (std::uint64_t c = 0; c < size; ++c) {
          if (!slots[c]) fail(epath, "missing entry for word " + word_key(unpack_word(a.order(), c, nbhd->width())));
          outputs.push_back(*slots[c]);
        }
      }
      return CellularAutomaton::table(a, *nbhd, std::move(outputs));
    }
    fail(join(rpath, "type"), "unknown rule type '" + type + "'");
  }();
  f.set_name(optional_name(j));
  return f;
}

SubgroupShift shift_from_json(const GroupSpec& a, const Json& j, const std::string& path) {
  const std::string type = string_member(j, "type", path);
  if (type == "full") return FullShift{};
  if (type == "letterwise") {
    const Word letters = word(a, member(j, "letters", path), join(path, "letters"));
    return wrap(path, [&] { return letterwise_subgroup(a, letters); });
  }
  if (type == "product") {
    const std::int64_t t = integer(member(j, "grouping", path), join(path, "grouping"));
    if (t < 1) fail(join(path, "grouping"), "must be positive");
    const std::int64_t phase = j.contains("phase") ? integer(j["phase"], join(path, "phase")) : 0;
    if (phase < 0) fail(join(path, "phase"), "must be non-negative");
    const GroupSpec at = wrap(path, [&] { return a.power(static_cast<std::size_t>(t)); });
    const Word blocks = word(at, member(j, "blocks", path), join(path, "blocks"));
    return wrap(path, [&] {
      return make_product_subgroup(a, static_cast<std::size_t>(t), static_cast<std::size_t>(phase), blocks);
    });
  }
  if (type == "linear_kernel") {
    const auto poly = polynomial(a, member(j, "coeffs", path), join(path, "coeffs"));
    if (poly.is_zero()) fail(join(path, "coeffs"), "zero constraint");
    return LinearKernelShift{poly};
  }
  fail(join(path, "type"), "unknown shift type '" + type + "'");
}

MeasurePtr measure_from_json(const Json& j, const CellularAutomaton* context, const std::string& path) {
  const std::string type = string_member(j, "type", path);
  const std::string name = optional_name(j);
  auto alphabet = [&] { return alphabet_from_json(member(j, "alphabet", path), join(path, "alphabet")); };

  MeasurePtr m;
  if (type == "uniform") {
    const GroupSpec a = alphabet();
    m = MeasureSpec::uniform(a);
  } else if (type == "bernoulli") {
    const GroupSpec a = alphabet();
    const auto w = rationals(member(j, "weights", path), join(path, "weights"));
    m = wrap(join(path, "weights"), [&] { return MeasureSpec::bernoulli(a, w); });
  } else if (type == "haar") {
    const GroupSpec a = alphabet();
    const auto s = shift_from_json(a, member(j, "shift", path), join(path, "shift"));
    m = MeasureSpec::haar(a, s);
  } else if (type == "mixture") {
    const auto w = rationals(member(j, "weights", path), join(path, "weights"));
    const std::string cpath = join(path, "components");
    const Json& cs = array(member(j, "components", path), cpath);
    std::vector<MeasurePtr> comps;
    for (std::size_t i = 0; i < cs.size(); ++i) comps.push_back(measure_from_json(cs[i], context, index(cpath, i)));
    m = wrap(path, [&] { return MeasureSpec::mixture(w, comps); });
  } else if (type == "pushforward") {
    const auto base = measure_from_json(member(j, "base", path), context, join(path, "base"));
    const std::string mpath = join(path, "map");
    const Json& steps = array(member(j, "map", path), mpath);
    MapWord map;
    for (std::size_t i = 0; i < steps.size(); ++i) {
      const std::string spath = index(mpath, i);
      const Json& s = steps[i];
      if (s.contains("shift")) {
        map.push_back(ShiftStep{integer(s["shift"], join(spath, "shift"))});
        continue;
      }
      const std::int64_t k = s.contains("power") ? integer(s["power"], join(spath, "power")) : 1;
      if (k < 0) fail(join(spath, "power"), "must be non-negative");
      if (s.contains("automaton")) {
        map.push_back(AutomatonStep{automaton_from_json(s["automaton"], join(spath, "automaton")), static_cast<std::uint64_t>(k)});
      } else {
        if (context == nullptr) fail(spath, "step names no automaton and no CA spec was given");
        map.push_back(AutomatonStep{*context, static_cast<std::uint64_t>(k)});
      }
    }
    m = wrap(path, [&] { return MeasureSpec::pushforward(base, map); });
  } else if (type == "periodic_orbit") {
    const GroupSpec a = alphabet();
    const Word w = word(a, member(j, "word", path), join(path, "word"));
    if (w.empty()) fail(join(path, "word"), "empty word");
    const bool close = j.value("close_under_automaton", false);
    if (close && context == nullptr) fail(join(path, "close_under_automaton"), "no CA spec was given");
    m = wrap(path, [&] { return MeasureSpec::periodic_orbit(PeriodicConfig(a, w), close ? context : nullptr); });
  } else if (type == "periodic_support") {
    const GroupSpec a = alphabet();
    const std::string spath = join(path, "support");
    const Json& s = array(member(j, "support", path), spath);
    std::vector<PeriodicConfig> support;
    for (std::size_t i = 0; i < s.size(); ++i) {
      const Word w = word(a, member(s[i], "word", index(spath, i)), join(index(spath, i), "word"));
      if (w.empty()) fail(join(index(spath, i), "word"), "empty word");
      support.emplace_back(a, w);
    }
    m = wrap(path, [&] { return std::make_shared<const MeasureSpec>(a, UniformPeriodicOrbit{support}); });
  } else {
    fail(join(path, "type"), "unknown measure type '" + type + "'");
  }
  if (context != nullptr && !(m->alphabet() == context->alphabet()))
    fail(path, "measure alphabet differs from the automaton alphabet");
  return renamed(m, name);
}

CaSpec ca_spec_from_json(const Json& j) {
  CaSpec spec{automaton_from_json(j), FullShift{}, nullptr, optional_name(j)};
  if (j.contains("shift")) spec.shift = shift_from_json(spec.automaton.alphabet(), j["shift"], "shift");
  if (j.contains("measure")) spec.measure = measure_from_json(j["measure"], &spec.automaton, "measure");
  return spec;
}

Json read_json_file(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw SpecError(file.string() + ": cannot open");
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw SpecError(file.string() + ": " + e.what());
  }
}

CaSpec load_ca_spec(const std::filesystem::path& file) {
  try {
    return ca_spec_from_json(read_json_file(file));
  } catch (const SpecError& e) {
    if (std::string(e.what()).starts_with(file.string())) throw;
    throw SpecError(file.string() + ": " + e.what());
  }
}

MeasurePtr load_measure(const std::filesystem::path& file, const CellularAutomaton* context) {
  try {
    return measure_from_json(read_json_file(file), context, "");
  } catch (const SpecError& e) {
    if (std::string(e.what()).starts_with(file.string())) throw;
    throw SpecError(file.string() + ": " + e.what());
  }
}

std::variant<CaSpec, MeasurePtr> load_spec(const std::filesystem::path& file) {
  const Json j = read_json_file(file);
  try {
    if (j.is_object() && j.contains("rule")) return ca_spec_from_json(j);
    return measure_from_json(j, nullptr, "");
  } catch (const SpecError& e) {
    throw SpecError(file.string() + ": " + e.what());
  }
}

Json to_json(const Rational& q) {
  return Json{{"num", boost::multiprecision::numerator(q).str()}, {"den", boost::multiprecision::denominator(q).str()}};
}

Json to_json(const GroupSpec& a) { return Json{{"moduli", a.moduli()}}; }

Json to_json(const CellularAutomaton& f) {
  Json out{{"alphabet", to_json(f.alphabet())}, {"neighborhood", {f.neighborhood().left, f.neighborhood().right}}};
  if (!f.name().empty()) out["name"] = f.name();
  if (f.is_table()) {
    out["rule"] = Json{{"type", "table"}, {"outputs", f.materialize_table()}};
  } else if (f.is_linear()) {
    out["rule"] = Json{{"type", "linear"}, {"coeffs", polynomial_json(f.polynomial())}};
  } else {
    out["rule"] = Json{{"type", "affine"}, {"coeffs", polynomial_json(f.polynomial())}, {"constant", f.constant()}};
  }
  return out;
}

Json to_json(const GroupSpec& a, const SubgroupShift& shift) {
  (void)a;
  return std::visit(
      [](const auto& s) -> Json {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, FullShift>) {
          return Json{{"type", "full"}};
        } else if constexpr (std::is_same_v<T, ProductSubgroup>) {
          return Json{{"type", "product"}, {"grouping", s.grouping}, {"phase", s.phase}, {"blocks", s.blocks}};
        } else {
          return Json{{"type", "linear_kernel"}, {"coeffs", polynomial_json(s.constraint)}};
        }
      },
      shift);
}

Json to_json(const MeasureSpec& mu) {
  Json out = std::visit(
      [&](const auto& v) -> Json {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Bernoulli>) {
          Json w = Json::array();
          for (const auto& q : v.weights) w.push_back(to_json(q));
          return Json{{"type", "bernoulli"}, {"alphabet", to_json(mu.alphabet())}, {"weights", w}};
        } else if constexpr (std::is_same_v<T, HaarOnShift>) {
          return Json{{"type", "haar"}, {"alphabet", to_json(mu.alphabet())}, {"shift", to_json(mu.alphabet(), v.support)}};
        } else if constexpr (std::is_same_v<T, Pushforward>) {
          Json steps = Json::array();
          for (const auto& s : v.map) {
            if (const auto* sh = std::get_if<ShiftStep>(&s)) {
              steps.push_back(Json{{"shift", sh->j}});
            } else {
              const auto& st = std::get<AutomatonStep>(s);
              steps.push_back(Json{{"automaton", to_json(st.automaton)}, {"power", st.k}});
            }
          }
          return Json{{"type", "pushforward"}, {"base", to_json(*v.base)}, {"map", steps}};
        } else if constexpr (std::is_same_v<T, Mixture>) {
          Json w = Json::array(), c = Json::array();
          for (const auto& q : v.weights) w.push_back(to_json(q));
          for (const auto& m : v.components) c.push_back(to_json(*m));
          return Json{{"type", "mixture"}, {"weights", w}, {"components", c}};
        } else {
          Json support = Json::array();
          for (const auto& x : v.support) support.push_back(to_json(x));
          return Json{{"type", "periodic_support"}, {"alphabet", to_json(mu.alphabet())}, {"support", support}};
        }
      },
      mu.variant());
  if (!mu.name().empty()) out["name"] = mu.name();
  return out;
}

Json to_json(const PeriodicConfig& x) { return Json{{"word", x.word()}, {"text", x.to_string()}}; }

Json to_json(const Cylinder& c) { return Json{{"offset", c.offset}, {"word", c.word}}; }

std::filesystem::path bundled_examples_dir() { return ALGCA_EXAMPLES_DIR; }

std::vector<std::filesystem::path> bundled_example_files() {
  std::vector<std::filesystem::path> out;
  const auto dir = bundled_examples_dir();
  if (!std::filesystem::is_directory(dir)) throw SpecError(dir.string() + ": bundled examples directory not found");
  for (const auto& e : std::filesystem::directory_iterator(dir))
    if (e.path().extension() == ".json") out.push_back(e.path());
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace algca
