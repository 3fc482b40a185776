#include "algca/class_a.hpp"
#include "algca/error.hpp"
#include "algca/spec_io.hpp"

#include <gtest/gtest.h>

#include <filesystem>

using namespace algca;

namespace {

const std::filesystem::path kExamples = ALGCA_TEST_EXAMPLES;

std::string spec_error_message(const Json& j) {
  try {
    automaton_from_json(j);
  } catch (const SpecError& e) {
    return e.what();
  }
  return {};
}

Json z2_linear() {
  return Json::parse(R"({"alphabet": {"moduli": [2]}, "neighborhood": [0, 1],
                         "rule": {"type": "linear", "coeffs": {"0": 1, "1": 1}}})");
}

}  // namespace

TEST(SpecIo, BundledF1IsClassA) {
  const auto spec = load_ca_spec(kExamples / "classA_F1.json");
  EXPECT_EQ(spec.automaton.alphabet(), GroupSpec({2, 2}));
  EXPECT_EQ(spec.automaton.materialize_table(), class_a_example_f1().materialize_table());
  EXPECT_TRUE(analyze_radius1(spec.automaton).class_a);
  const auto f2 = load_ca_spec(kExamples / "classA_F2.json");
  EXPECT_EQ(f2.automaton.materialize_table(), class_a_example_f2().materialize_table());
}

TEST(SpecIo, EveryBundledExampleLoads) {
  const auto files = bundled_example_files();
  EXPECT_EQ(files.size(), 5u);
  for (const auto& f : files) {
    const auto spec = load_ca_spec(f);
    EXPECT_FALSE(spec.name.empty()) << f;
    EXPECT_TRUE(spec.measure != nullptr) << f;
  }
  const auto led = load_ca_spec(kExamples / "ledrappier_kernel_sigma.json");
  EXPECT_TRUE(std::holds_alternative<LinearKernelShift>(led.shift));
}

TEST(SpecIo, SchemaErrorsNameTheField) {
  auto j = z2_linear();
  j["alphabet"]["moduli"][0] = -3;
  EXPECT_NE(spec_error_message(j).find("alphabet.moduli[0]"), std::string::npos) << spec_error_message(j);

  j = z2_linear();
  j["rule"].erase("coeffs");
  EXPECT_NE(spec_error_message(j).find("rule.coeffs"), std::string::npos);

  j = z2_linear();
  j["rule"]["type"] = "quadratic";
  EXPECT_NE(spec_error_message(j).find("rule.type"), std::string::npos);

  j = Json::parse(R"({"alphabet": {"moduli": [2]}, "neighborhood": [0, 1],
                      "rule": {"type": "table", "entries": {"0,0": 0, "0,1": 1, "1,0": 1}}})");
  const auto msg = spec_error_message(j);
  EXPECT_NE(msg.find("rule.entries"), std::string::npos) << msg;
  EXPECT_NE(msg.find("1,1"), std::string::npos) << msg;

  j = Json::parse(R"({"alphabet": {"moduli": [2]}, "neighborhood": [0, 0],
                      "rule": {"type": "table", "outputs": [0, 2]}})");
  EXPECT_NE(spec_error_message(j).find("rule.outputs[1]"), std::string::npos);

  j = z2_linear();
  j["neighborhood"] = {1, 1};
  EXPECT_NE(spec_error_message(j).find("neighborhood"), std::string::npos);
}

TEST(SpecIo, TableEntriesAndOutputsAgree) {
  const auto by_entries = automaton_from_json(Json::parse(
      R"({"alphabet": {"moduli": [2]}, "neighborhood": [0, 1],
          "rule": {"type": "table", "entries": {"0,0": 0, "0,1": 1, "1,0": 1, "1,1": 0}}})"));
  EXPECT_EQ(by_entries.materialize_table(), automaton_from_json(z2_linear()).materialize_table());
}

TEST(SpecIo, AutomatonRoundTrip) {
  const std::vector<CellularAutomaton> cases{
      automaton_from_json(z2_linear()),
      class_a_example_f1(),
      CellularAutomaton::affine(LaurentPoly::scalar(GroupSpec::cyclic(3), {{-1, 1}, {1, 2}}), 1),
      CellularAutomaton::from_function(GroupSpec::cyclic(2), {0, 2},
                                       [](std::span<const Letter> w) { return static_cast<Letter>(w[0] & w[2]); }),
  };
  for (const auto& f : cases) {
    const auto g = automaton_from_json(to_json(f));
    EXPECT_EQ(g.neighborhood(), f.neighborhood());
    EXPECT_EQ(g.materialize_table(), f.materialize_table()) << to_json(f).dump();
    EXPECT_EQ(g.rule().index(), f.rule().index());
  }
}

TEST(SpecIo, Rationals) {
  EXPECT_EQ(rational_from_json(Json::parse(R"({"num": 3, "den": 4})"), "w"), Rational(3, 4));
  EXPECT_EQ(rational_from_json(Json(2), "w"), Rational(2));
  EXPECT_EQ(to_json(Rational(-1, 6)), Json::parse(R"({"num": "-1", "den": "6"})"));
  EXPECT_THROW(rational_from_json(Json::parse(R"({"num": 1, "den": 0})"), "w"), SpecError);
}

TEST(SpecIo, CounterexampleMeasureFileMatchesSuite) {
  const auto suite = counterexample_suite();
  const auto mu = load_measure(kExamples / "measures" / "counterexample_mu.json", &suite.automaton);
  for (std::size_t len = 1; len <= 4; ++len)
    for (std::int64_t off : {0, 1})
      EXPECT_EQ(window_distribution(*mu, off, len), window_distribution(*suite.mu, off, len));
  EXPECT_THROW(load_measure(kExamples / "measures" / "counterexample_mu.json"), SpecError);
}

TEST(SpecIo, MeasureRoundTrip) {
  const auto suite = counterexample_suite();
  const std::vector<MeasurePtr> cases{
      suite.mu,
      MeasureSpec::bernoulli(GroupSpec::cyclic(3), {Rational(1, 2), Rational(1, 3), Rational(1, 6)}),
      MeasureSpec::haar(GroupSpec::cyclic(2), LinearKernelShift{LaurentPoly::scalar(GroupSpec::cyclic(2), {{0, 1}, {1, 1}, {2, 1}})}),
      MeasureSpec::periodic_orbit(PeriodicConfig(GroupSpec::cyclic(2), {0, 1, 1}), &suite.automaton),
  };
  for (const auto& m : cases) {
    const auto back = measure_from_json(to_json(*m));
    EXPECT_EQ(window_distribution(*back, 0, 4), window_distribution(*m, 0, 4)) << to_json(*m).dump();
    EXPECT_EQ(back->name(), m->name());
  }
}

TEST(SpecIo, MeasureErrors) {
  EXPECT_THROW(measure_from_json(Json::parse(R"({"type": "bernoulli", "alphabet": {"moduli": [2]},
                                                 "weights": [{"num": 1, "den": 2}, {"num": 1, "den": 3}]})")),
               SpecError);
  try {
    measure_from_json(Json::parse(R"({"type": "mixture", "weights": [1], "components": [{"type": "nope"}]})"));
    FAIL();
  } catch (const SpecError& e) {
    EXPECT_NE(std::string(e.what()).find("measure.components[0].type"), std::string::npos) << e.what();
  }
  EXPECT_THROW(load_ca_spec(kExamples / "does_not_exist.json"), SpecError);
}

TEST(SpecIo, LoadSpecDispatches) {
  EXPECT_TRUE(std::holds_alternative<CaSpec>(load_spec(kExamples / "id_plus_sigma_z2.json")));
  EXPECT_TRUE(std::holds_alternative<MeasurePtr>(load_spec(kExamples / "measures" / "bernoulli_3_1.json")));
}
