#pragma once

// JSON spec files for automata, subgroup shifts and measures, plus the JSON
// encoders used by reports. Schema violations raise SpecError naming the
// offending field path.

#include "algca/measure.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <string>
#include <variant>
#include <vector>

namespace algca {

using Json = nlohmann::json;

/// A CA file: the automaton plus an optional subgroup shift and measure.
struct CaSpec {
  CellularAutomaton automaton;
  SubgroupShift shift = FullShift{};
  MeasurePtr measure;  // null when the file has none
  std::string name;
};

GroupSpec alphabet_from_json(const Json& j, const std::string& path = "alphabet");
CellularAutomaton automaton_from_json(const Json& j, const std::string& path = "");
SubgroupShift shift_from_json(const GroupSpec& alphabet, const Json& j, const std::string& path = "shift");
/// `context` resolves pushforward steps that omit their automaton.
MeasurePtr measure_from_json(const Json& j, const CellularAutomaton* context = nullptr,
                             const std::string& path = "measure");
CaSpec ca_spec_from_json(const Json& j);

Json read_json_file(const std::filesystem::path& file);
CaSpec load_ca_spec(const std::filesystem::path& file);
MeasurePtr load_measure(const std::filesystem::path& file, const CellularAutomaton* context = nullptr);
/// Files with a "rule" member are automata; everything else is read as a measure.
std::variant<CaSpec, MeasurePtr> load_spec(const std::filesystem::path& file);

Rational rational_from_json(const Json& j, const std::string& path);
Json to_json(const Rational& q);
Json to_json(const GroupSpec& alphabet);
Json to_json(const CellularAutomaton& f);
Json to_json(const GroupSpec& alphabet, const SubgroupShift& shift);
Json to_json(const MeasureSpec& mu);
Json to_json(const PeriodicConfig& x);
Json to_json(const Cylinder& c);

/// Directory holding the bundled example specs.
std::filesystem::path bundled_examples_dir();
std::vector<std::filesystem::path> bundled_example_files();

}  // namespace algca
