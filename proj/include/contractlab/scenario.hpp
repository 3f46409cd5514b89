#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include <json.hpp>

#include "contractlab/solver.hpp"

namespace contractlab {

struct Tolerances {
    double bayes = 1e-6;
    double belief = kBeliefTol;
};

/// A fully specified problem instance: decision problem, type space, cost
/// model, solver settings, and optionally an exogenously given choice
/// function that bypasses the solver.
struct Scenario {
    int schema_version = 1;
    std::string name;
    DecisionProblem problem;
    TypeSpace types;
    CostModel cost;
    SolverConfig solver;
    Tolerances tolerances;
    std::optional<ChoiceFunction> given;
    nlohmann::json expected;  // optional reference values, passed through opaquely
    std::vector<std::string> warnings;
};

/// Parses and validates a scenario document; throws ScenarioError on schema
/// or invariant violations.
Scenario scenario_from_json(const nlohmann::json& j);
nlohmann::json scenario_to_json(const Scenario& scenario);

Scenario load_scenario(const std::filesystem::path& path);
void save_json(const nlohmann::json& j, const std::filesystem::path& path);
nlohmann::json read_json(const std::filesystem::path& path);

/// The given choice function when present, otherwise the solved one.
/// Returns the engine label actually used ("given", "entropy-fixed-point",
/// "concavify-lp") through engine_used when non-null.
ChoiceFunction scenario_choice_function(const Scenario& scenario,
                                        std::string* engine_used = nullptr);

/// Bundled fixtures mirroring the two worked examples: the three-state
/// entropy-cost problem solved by the fixed point, and the quadratic-cost
/// pair of exogenously given experiments.
Scenario example1_scenario();
Scenario example2_scenario();

const char* engine_name(Engine engine);
Engine engine_from_name(const std::string& name);

}  // namespace contractlab
