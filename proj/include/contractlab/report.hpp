#pragma once

#include <iosfwd>
#include <variant>

#include "contractlab/scenario.hpp"
#include "contractlab/verify.hpp"

namespace contractlab {

/// Machine-readable result of a solve (and optionally checks/audits):
/// self-contained, including the scenario echo, so downstream commands can
/// re-build and re-audit from the file alone.
struct RunReport {
    Scenario scenario;
    std::string engine_used;
    ChoiceFunction choice;
    VirtualTypes vtypes;
    Vector payments;
    double solve_seconds = 0.0;
    std::optional<MonotonicityReport> monotonicity;
    std::optional<AuditReport> audit;
    nlohmann::json contracts;  // serialized contract blocks, when built
};

nlohmann::json experiment_to_json(const Experiment& e);
Experiment experiment_from_json(const nlohmann::json& j);

nlohmann::json choice_to_json(const ChoiceFunction& choice);
ChoiceFunction choice_from_json(const nlohmann::json& j, const Belief& prior, double bayes_tol);

nlohmann::json monotonicity_to_json(const MonotonicityReport& report);
nlohmann::json audit_to_json(const AuditReport& report);

nlohmann::json report_to_json(const RunReport& report);

/// The re-loadable core of a report file: scenario, choice function and
/// payments, plus the raw document for pass-through fields.
struct LoadedReport {
    Scenario scenario;
    ChoiceFunction choice;
    Vector payments;
    nlohmann::json raw;
};
LoadedReport report_from_json(const nlohmann::json& j);

nlohmann::json results_contract_to_json(const ResultsContract& contract,
                                        const ChoiceFunction& choice, const Vector& payments);
nlohmann::json screening_contract_to_json(const ScreeningResultsContract& contract,
                                          const ChoiceFunction& choice, const Vector& payments);

/// A contract document together with the choice function and payments it
/// implements (echoed in the file so audits need only a scenario).
struct LoadedContract {
    std::variant<ResultsContract, ScreeningResultsContract> contract;
    ChoiceFunction choice;
    Vector payments;
};
LoadedContract contract_from_json(const nlohmann::json& j, const Scenario& scenario);

/// Plot-ready CSV (RFC 4180): per-posterior rows with costs, interpolant
/// values and region membership, plus a simplex grid sample of the regions.
void write_export_csv(std::ostream& out, const Scenario& scenario, const ChoiceFunction& choice,
                      int region_resolution = 64);

}  // namespace contractlab
