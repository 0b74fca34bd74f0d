#pragma once

#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace fjc {

/// A parsed scenario: model, named object constructors and an ordered check list.
struct Scenario {
    std::string name;
    std::string description;
    nlohmann::json model;    // built-in tag or a full model description
    nlohmann::json objects;  // name -> constructor
    nlohmann::json checks;   // array of {"check": ..., parameters}
};

/// Recognized check names, in documentation order.
const std::vector<std::string>& check_names();

/// Parses and statically validates a scenario tree. Throws ParseError.
Scenario scenario_from_json(const nlohmann::json& j);
/// JSON or TOML text; `toml` selects the parser.
Scenario parse_scenario(const std::string& text, bool toml);
/// A file path, or the name of a built-in scenario. Throws ParseError.
Scenario load_scenario(const std::string& path_or_name);
nlohmann::json to_json(const Scenario& s);

std::vector<std::pair<std::string, std::string>> list_scenarios();
/// Throws ParseError for an unknown name.
Scenario builtin_scenario(const std::string& name);

struct CheckOutcome {
    std::string check;
    bool pass = false;
    nlohmann::json detail;
    double millis = 0;
};

struct ScenarioReport {
    std::string scenario;
    std::vector<CheckOutcome> checks;

    bool pass() const;
    /// The first failing check, or "" when everything passed.
    std::string first_failure() const;
    /// Deterministic verdict section (no timing).
    nlohmann::json verdicts() const;
    nlohmann::json timing() const;
};

/// Runs the checks in order; a check that throws is recorded as failed with the error text.
ScenarioReport run_scenario(const Scenario& s);

/// Exit code contract: 0 all pass, 1 some check failed, 2 parse error.
int exit_code(const ScenarioReport& r);

}  // namespace fjc
