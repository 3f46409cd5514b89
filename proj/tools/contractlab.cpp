// Command-line workbench: solve scenarios, check choice-function
// monotonicity, build results/forcing contracts, audit them, and export
// plot data.
//
// Exit codes: 0 success, 1 audit or monotonicity failure, 2 input error,
// 3 numerical failure.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "contractlab/report.hpp"

namespace {

using namespace contractlab;

constexpr int kExitOk = 0;
constexpr int kExitVerdictFail = 1;
constexpr int kExitInputError = 2;
constexpr int kExitNumericalError = 3;

const char* status_word(CheckStatus s) {
    switch (s) {
        case CheckStatus::pass: return "pass";
        case CheckStatus::fail: return "fail";
        case CheckStatus::skipped: return "skipped";
    }
    return "skipped";
}

RunReport solve_report(const Scenario& scenario) {
    RunReport report{scenario, "", {}, virtual_types(scenario.types), Vector{}, 0.0, {}, {}, {}};
    const auto start = std::chrono::steady_clock::now();
    report.choice = scenario_choice_function(scenario, &report.engine_used);
    report.solve_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    report.payments = payments_T_star(report.choice, scenario.types, scenario.cost);
    return report;
}

void print_choice(const RunReport& report) {
    std::printf("engine: %s (%.3fs)\n", report.engine_used.c_str(), report.solve_seconds);
    std::printf("virtual types:");
    for (Index k = 0; k < report.vtypes.g.size(); ++k)
        std::printf(" %.12g", report.vtypes.g(k));
    std::printf(" (%sstrictly increasing)\n", report.vtypes.strictly_increasing ? "" : "NOT ");
    for (Index k = 0; k < report.choice.size(); ++k) {
        const Experiment& e = report.choice.experiments[static_cast<size_t>(k)];
        std::printf("type %lld: C=%.9g T*=%.9g, %lld posteriors\n", static_cast<long long>(k + 1),
                    cost_of_experiment(report.scenario.cost, e), report.payments(k),
                    static_cast<long long>(e.size()));
        for (Index i = 0; i < e.size(); ++i) {
            std::printf("  p=%.4g [", e.probs()(i));
            for (Index c = 0; c < e.support()[static_cast<size_t>(i)].dim(); ++c)
                std::printf("%s%.6f", c ? " " : "", e.support()[static_cast<size_t>(i)][c]);
            std::printf("]\n");
        }
    }
}

void print_monotonicity(const MonotonicityReport& mr) {
    std::printf("c-monotone:          %s\n", status_word(mr.c_monotone.status));
    std::printf("blackwell-monotone:  %s%s\n", status_word(mr.blackwell.status),
                mr.blackwell.exact ? "" : " (partial)");
    for (const BlackwellWitness& w : mr.blackwell.witnesses)
        std::printf("  posterior of type %lld outside conv(support of type %lld), separation "
                    "%.3g\n",
                    static_cast<long long>(w.i + 1), static_cast<long long>(w.j + 1),
                    w.separation);
    std::printf("strong-c-monotone:   %s\n", status_word(mr.strong_c.status));
    for (const Violation& v : mr.strong_c.witnesses)
        std::printf("  %s: c=%.9g bound=%.9g gap=%.3g\n", v.requirement.c_str(), v.lhs, v.rhs,
                    v.gap);
    std::printf("condition (n):       %s\n", status_word(mr.cond_n.status));
    std::printf("condition (n-adj):   %s\n", status_word(mr.cond_nadj.status));
    std::printf("symmetric:           %s\n", status_word(mr.symmetric.status));
    std::printf("comp:                %s\n", status_word(mr.comp.status));
    std::printf("implication chain:   %s\n", mr.chain_consistent ? "consistent" : "VIOLATED");
    if (!mr.chain_consistent) std::printf("  %s\n", mr.chain_message.c_str());
}

void print_audit(const AuditReport& audit) {
    std::printf("audit: %s\n", audit.passed ? "pass" : "FAIL");
    for (size_t k = 0; k < audit.per_type.size(); ++k) {
        const TypeAudit& t = audit.per_type[k];
        std::printf("  type %zu: ic=%s truthful=%.9g best-response=%.9g pay=%.9g target=%.9g%s\n",
                    k + 1, t.ic ? "yes" : "NO", t.truthful_payoff, t.best_response_value,
                    t.expected_pay, t.target_pay, t.payment_ok ? "" : " (payment mismatch)");
        for (const SecantViolation& v : t.violations)
            std::printf("    violation: payoff %.9g above secant %.9g (gap %.3g)\n",
                        v.payoff_value, v.secant_value, v.gap);
    }
}

int cmd_solve(const std::string& scenario_path, const std::string& engine, int resolution,
              const std::string& out_path) {
    Scenario scenario = load_scenario(scenario_path);
    if (!engine.empty()) scenario.solver.engine = engine_from_name(engine);
    if (resolution > 0) scenario.solver.resolution = resolution;
    RunReport report = solve_report(scenario);
    print_choice(report);
    if (!out_path.empty()) save_json(report_to_json(report), out_path);
    return kExitOk;
}

int cmd_check(const std::string& path, const std::string& out_path) {
    nlohmann::json doc = read_json(path);
    Scenario scenario = doc.value("kind", "") == "run-report"
                            ? scenario_from_json(doc.at("scenario"))
                            : scenario_from_json(doc);
    RunReport report = doc.value("kind", "") == "run-report"
                           ? [&] {
                                 LoadedReport loaded = report_from_json(doc);
                                 RunReport r{loaded.scenario,
                                             doc.value("engine_used", "file"),
                                             loaded.choice,
                                             virtual_types(loaded.scenario.types),
                                             loaded.payments,
                                             0.0,
                                             {},
                                             {},
                                             {}};
                                 return r;
                             }()
                           : solve_report(scenario);
    report.monotonicity =
        run_monotonicity_checks(report.choice, report.scenario.types, report.scenario.cost);
    print_monotonicity(*report.monotonicity);
    if (!out_path.empty()) save_json(report_to_json(report), out_path);
    if (!report.monotonicity->chain_consistent)
        throw NumericalFailure("internal implication chain violated");
    return report.monotonicity->strong_c.status == CheckStatus::fail ? kExitVerdictFail : kExitOk;
}

int cmd_build(const std::string& report_path, const std::string& kind, double floor_margin,
              const std::string& out_path) {
    LoadedReport loaded = report_from_json(read_json(report_path));
    const Scenario& scenario = loaded.scenario;
    nlohmann::json out;
    if (kind == "results") {
        try {
            ResultsContract contract =
                build_results_contract(loaded.choice, loaded.payments, scenario.types,
                                       scenario.cost, floor_margin);
            out = results_contract_to_json(contract, loaded.choice, loaded.payments);
        } catch (const NotStronglyCMonotone& e) {
            std::printf("refused: %s\n", e.what());
            CheckResult sm =
                check_strong_c_monotone(loaded.choice, scenario.types, scenario.cost);
            nlohmann::json refusal{{"kind", "refusal"}, {"error", "NotStronglyCMonotone"}};
            refusal["witnesses"] = nlohmann::json::array();
            for (const Violation& v : sm.witnesses) {
                nlohmann::json jw{{"type", v.i + 1},
                                  {"requirement", v.requirement},
                                  {"lhs", v.lhs},
                                  {"rhs", v.rhs},
                                  {"gap", v.gap}};
                jw["posterior"] = nlohmann::json::array();
                for (Index c = 0; c < v.p.dim(); ++c) jw["posterior"].push_back(v.p[c]);
                refusal["witnesses"].push_back(std::move(jw));
            }
            if (!out_path.empty()) save_json(refusal, out_path);
            return kExitVerdictFail;
        }
    } else if (kind == "forcing") {
        ScreeningResultsContract contract =
            build_forcing_contract(loaded.choice, loaded.payments, scenario.types, scenario.cost);
        out = screening_contract_to_json(contract, loaded.choice, loaded.payments);
    } else {
        throw ScenarioError("unknown contract kind '" + kind + "' (use results|forcing)");
    }
    std::printf("built %s contract\n", kind.c_str());
    if (!out_path.empty()) save_json(out, out_path);
    return kExitOk;
}

int cmd_audit(const std::string& scenario_path, const std::string& contract_path,
              const std::string& out_path) {
    Scenario scenario = load_scenario(scenario_path);
    LoadedContract loaded = contract_from_json(read_json(contract_path), scenario);
    AuditReport audit = std::visit(
        [&](const auto& contract) {
            return audit_contract(scenario.problem, scenario.types, scenario.cost, loaded.choice,
                                  contract, scenario.solver.resolution);
        },
        loaded.contract);
    print_audit(audit);
    if (!out_path.empty()) save_json(audit_to_json(audit), out_path);
    return audit.passed ? kExitOk : kExitVerdictFail;
}

int cmd_export(const std::string& report_path, const std::string& csv_path,
               int region_resolution) {
    LoadedReport loaded = report_from_json(read_json(report_path));
    std::ofstream out(csv_path, std::ios::binary);
    if (!out) throw ScenarioError("cannot write " + csv_path);
    write_export_csv(out, loaded.scenario, loaded.choice, region_resolution);
    std::printf("wrote %s\n", csv_path.c_str());
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Workbench for contracted information acquisition: optimal experiment choice, "
                 "monotonicity checks, and outcome-equivalent results-based contracts"};
    app.require_subcommand(1);

    std::string scenario_path, contract_path, report_path, out_path, engine, kind, csv_path;
    int resolution = 0;
    int region_resolution = 64;
    double floor_margin = 0.0;

    CLI::App* solve = app.add_subcommand("solve", "Solve the per-type experiment problems");
    solve->add_option("scenario", scenario_path, "Scenario JSON file")->required();
    solve->add_option("--engine", engine, "auto|entropy-fixed-point|concavify-lp");
    solve->add_option("--resolution", resolution, "Grid resolution for the LP engine");
    solve->add_option("--out", out_path, "Write the run report JSON here");

    CLI::App* check = app.add_subcommand("check", "Run all monotonicity checks");
    check->add_option("input", report_path, "Scenario or run-report JSON file")->required();
    check->add_option("--out", out_path, "Write the augmented report JSON here");

    CLI::App* build = app.add_subcommand("build", "Build a contract from a run report");
    build->add_option("report", report_path, "Run-report JSON file")->required();
    build->add_option("--contract", kind, "results|forcing")->required();
    build->add_option("--floor-margin", floor_margin, "Safety margin below the payment floor");
    build->add_option("--out", out_path, "Write the contract JSON here");

    CLI::App* audit = app.add_subcommand("audit", "Audit a contract against a scenario");
    audit->add_option("scenario", scenario_path, "Scenario JSON file")->required();
    audit->add_option("contract", contract_path, "Contract JSON file")->required();
    audit->add_option("--out", out_path, "Write the audit report JSON here");

    CLI::App* exp = app.add_subcommand("export", "Export plot data as CSV");
    exp->add_option("report", report_path, "Run-report JSON file")->required();
    exp->add_option("--csv", csv_path, "Output CSV path")->required();
    exp->add_option("--region-resolution", region_resolution, "Grid resolution for region rows");

    CLI11_PARSE(app, argc, argv);

    try {
        if (solve->parsed()) return cmd_solve(scenario_path, engine, resolution, out_path);
        if (check->parsed()) return cmd_check(report_path, out_path);
        if (build->parsed()) return cmd_build(report_path, kind, floor_margin, out_path);
        if (audit->parsed()) return cmd_audit(scenario_path, contract_path, out_path);
        if (exp->parsed()) return cmd_export(report_path, csv_path, region_resolution);
    } catch (const ScenarioError& e) {
        std::fprintf(stderr, "input error: %s\n", e.what());
        return kExitInputError;
    } catch (const DimensionMismatch& e) {
        std::fprintf(stderr, "input error: %s\n", e.what());
        return kExitInputError;
    } catch (const NotStronglyCMonotone& e) {
        std::fprintf(stderr, "monotonicity failure: %s\n", e.what());
        return kExitVerdictFail;
    } catch (const NotCMonotone& e) {
        std::fprintf(stderr, "monotonicity failure: %s\n", e.what());
        return kExitVerdictFail;
    } catch (const MonotonicityDiagnostic& e) {
        std::fprintf(stderr, "monotonicity failure: %s\n", e.what());
        return kExitVerdictFail;
    } catch (const Error& e) {
        std::fprintf(stderr, "numerical failure: %s\n", e.what());
        return kExitNumericalError;
    }
    return kExitOk;
}
