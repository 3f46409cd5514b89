#include "contractlab/report.hpp"

#include <cstdio>
#include <ostream>

namespace contractlab {

namespace {

using nlohmann::json;

json vec_json(const Vector& v) {
    json j = json::array();
    for (Index i = 0; i < v.size(); ++i) j.push_back(v(i));
    return j;
}

Vector vec_from(const json& j, const char* what) {
    if (!j.is_array()) throw ScenarioError(std::string(what) + ": expected an array");
    Vector v(static_cast<Index>(j.size()));
    Index i = 0;
    for (const auto& x : j) v(i++) = x.get<double>();
    return v;
}

const char* status_name(CheckStatus s) {
    switch (s) {
        case CheckStatus::pass: return "pass";
        case CheckStatus::fail: return "fail";
        case CheckStatus::skipped: return "skipped";
    }
    return "skipped";
}

json violation_json(const Violation& v) {
    return json{{"type", v.i + 1},          {"other_type", v.j + 1},
                {"posterior", vec_json(v.p.weights())}, {"lhs", v.lhs},
                {"rhs", v.rhs},             {"gap", v.gap},
                {"requirement", v.requirement}};
}

json check_json(const CheckResult& r) {
    json j{{"status", status_name(r.status)}};
    if (!r.note.empty()) j["note"] = r.note;
    if (!r.witnesses.empty()) {
        j["witnesses"] = json::array();
        for (const Violation& v : r.witnesses) j["witnesses"].push_back(violation_json(v));
    }
    return j;
}

const char* region_letter(Region r) {
    switch (r) {
        case Region::upper: return "U";
        case Region::lower: return "D";
        case Region::boundary: return "B";
    }
    return "B";
}

}  // namespace

json experiment_to_json(const Experiment& e) {
    json j;
    j["support"] = json::array();
    for (const Belief& p : e.support()) j["support"].push_back(vec_json(p.weights()));
    j["probs"] = vec_json(e.probs());
    return j;
}

Experiment experiment_from_json(const json& j) {
    std::vector<Belief> support;
    for (const auto& jp : j.at("support")) support.emplace_back(vec_from(jp, "support"));
    return Experiment(std::move(support), vec_from(j.at("probs"), "probs"));
}

json choice_to_json(const ChoiceFunction& choice) {
    json j = json::array();
    for (Index k = 0; k < choice.size(); ++k) {
        json je = experiment_to_json(choice.experiments[static_cast<size_t>(k)]);
        je["non_redundant"] = static_cast<bool>(choice.non_redundant[static_cast<size_t>(k)]);
        je["full_dimension"] = static_cast<bool>(choice.full_dimension[static_cast<size_t>(k)]);
        j.push_back(std::move(je));
    }
    return j;
}

ChoiceFunction choice_from_json(const json& j, const Belief& prior, double bayes_tol) {
    std::vector<Experiment> experiments;
    for (const auto& je : j) experiments.push_back(experiment_from_json(je));
    return make_choice_function(std::move(experiments), prior, bayes_tol);
}

json monotonicity_to_json(const MonotonicityReport& report) {
    json j;
    j["c_monotone"] = check_json(report.c_monotone);
    j["c_monotone"]["costs"] = vec_json(report.c_monotone.costs);

    json jb{{"status", status_name(report.blackwell.status)}, {"exact", report.blackwell.exact}};
    if (!report.blackwell.note.empty()) jb["note"] = report.blackwell.note;
    json pairs = json::array();
    const auto& cmp = report.blackwell.comparability;
    for (size_t i = 0; i < cmp.size(); ++i) {
        for (size_t jdx = i + 1; jdx < cmp.size(); ++jdx) {
            const char* order = cmp[i][jdx] == PairOrder::more_informative ? "more-informative"
                                : cmp[i][jdx] == PairOrder::less_informative
                                    ? "less-informative"
                                    : "incomparable";
            pairs.push_back(json{{"i", i + 1}, {"j", jdx + 1}, {"order", order}});
        }
    }
    jb["pairs"] = std::move(pairs);
    if (!report.blackwell.witnesses.empty()) {
        jb["witnesses"] = json::array();
        for (const BlackwellWitness& w : report.blackwell.witnesses)
            jb["witnesses"].push_back(json{{"type", w.i + 1},
                                           {"outside_conv_of_type", w.j + 1},
                                           {"posterior", vec_json(w.p.weights())},
                                           {"separator", vec_json(w.separator.coefficients())},
                                           {"separation", w.separation}});
    }
    j["blackwell"] = std::move(jb);

    j["strong_c_monotone"] = check_json(report.strong_c);
    j["condition_n"] = check_json(report.cond_n);
    j["condition_nadj"] = check_json(report.cond_nadj);

    json js{{"status", status_name(report.symmetric.status)},
            {"levels", vec_json(report.symmetric.levels)},
            {"spreads", vec_json(report.symmetric.spreads)}};
    if (report.symmetric.worst_type >= 0) js["worst_type"] = report.symmetric.worst_type + 1;
    j["symmetric"] = std::move(js);

    j["comp"] = check_json(report.comp);
    j["chain_consistent"] = report.chain_consistent;
    if (!report.chain_message.empty()) j["chain_message"] = report.chain_message;
    return j;
}

json audit_to_json(const AuditReport& report) {
    json j;
    j["passed"] = report.passed;
    j["payment_identity_applicable"] = report.payment_identity_applicable;
    if (!report.detail.empty()) j["detail"] = report.detail;
    j["per_type"] = json::array();
    for (const TypeAudit& t : report.per_type) {
        json jt{{"ic", t.ic},
                {"truthful_payoff", t.truthful_payoff},
                {"best_response_value", t.best_response_value},
                {"expected_payment", t.expected_pay},
                {"target_payment", t.target_pay},
                {"payment_ok", t.payment_ok}};
        if (t.best_response_experiment)
            jt["best_response"] = experiment_to_json(*t.best_response_experiment);
        if (!t.violations.empty()) {
            jt["violations"] = json::array();
            for (const SecantViolation& v : t.violations)
                jt["violations"].push_back(json{{"posterior", vec_json(v.q.weights())},
                                                {"secant", v.secant_value},
                                                {"payoff", v.payoff_value},
                                                {"gap", v.gap}});
        }
        if (!t.detail.empty()) jt["detail"] = t.detail;
        j["per_type"].push_back(std::move(jt));
    }
    return j;
}

json report_to_json(const RunReport& report) {
    json j;
    j["kind"] = "run-report";
    j["schema_version"] = 1;
    j["scenario"] = scenario_to_json(report.scenario);
    j["engine_used"] = report.engine_used;
    j["solve_seconds"] = report.solve_seconds;
    j["virtual_types"] = {{"g", vec_json(report.vtypes.g)},
                          {"strictly_increasing", report.vtypes.strictly_increasing}};
    j["choice_function"] = choice_to_json(report.choice);
    j["payments"] = vec_json(report.payments);
    if (!report.choice.diagnostic.empty()) j["diagnostic"] = report.choice.diagnostic;
    if (report.monotonicity) j["monotonicity"] = monotonicity_to_json(*report.monotonicity);
    if (report.audit) j["audit"] = audit_to_json(*report.audit);
    if (!report.contracts.empty()) j["contracts"] = report.contracts;
    return j;
}

LoadedReport report_from_json(const json& j) {
    try {
        if (j.value("kind", "") != std::string("run-report"))
            throw ScenarioError("report: expected kind 'run-report'");
        Scenario scenario = scenario_from_json(j.at("scenario"));
        ChoiceFunction choice = choice_from_json(j.at("choice_function"), scenario.problem.prior,
                                                 scenario.tolerances.bayes);
        Vector payments = vec_from(j.at("payments"), "payments");
        return LoadedReport{std::move(scenario), std::move(choice), std::move(payments), j};
    } catch (const json::exception& e) {
        throw ScenarioError(std::string("report: malformed document: ") + e.what());
    }
}

json results_contract_to_json(const ResultsContract& contract, const ChoiceFunction& choice,
                              const Vector& payments) {
    json j;
    j["kind"] = "results-contract";
    j["schema_version"] = 1;
    j["support_payments"] = json::array();
    for (const auto& [p, pay] : contract.support_payments)
        j["support_payments"].push_back(
            json{{"posterior", vec_json(p.weights())}, {"payment", pay}});
    j["default_payment"] = contract.default_payment;
    j["floor_margin"] = contract.floor_margin;
    j["choice_function"] = choice_to_json(choice);
    j["payments"] = vec_json(payments);
    return j;
}

json screening_contract_to_json(const ScreeningResultsContract& contract,
                                const ChoiceFunction& choice, const Vector& payments) {
    json j;
    j["kind"] = "screening-contract";
    j["schema_version"] = 1;
    j["per_type"] = json::array();
    for (Index k = 0; k < contract.n_types(); ++k) {
        json jt;
        jt["payment"] = contract.on_support_payments(k);
        jt["support"] = json::array();
        for (const Belief& p : contract.supports[static_cast<size_t>(k)])
            jt["support"].push_back(vec_json(p.weights()));
        jt["hyperplane"] = vec_json(contract.hyperplanes[static_cast<size_t>(k)].coefficients());
        j["per_type"].push_back(std::move(jt));
    }
    j["floor"] = contract.floor;
    j["choice_function"] = choice_to_json(choice);
    j["payments"] = vec_json(payments);
    return j;
}

LoadedContract contract_from_json(const json& j, const Scenario& scenario) {
    try {
        const std::string kind = j.value("kind", "");
        ChoiceFunction choice = choice_from_json(j.at("choice_function"), scenario.problem.prior,
                                                 scenario.tolerances.bayes);
        Vector payments = vec_from(j.at("payments"), "payments");
        if (kind == "results-contract") {
            ResultsContract contract;
            for (const auto& jp : j.at("support_payments"))
                contract.support_payments.emplace_back(
                    Belief(vec_from(jp.at("posterior"), "posterior")),
                    jp.at("payment").get<double>());
            contract.default_payment = j.at("default_payment").get<double>();
            contract.floor_margin = j.value("floor_margin", 0.0);
            return LoadedContract{std::move(contract), std::move(choice), std::move(payments)};
        }
        if (kind == "screening-contract") {
            ScreeningResultsContract contract;
            const json& per_type = j.at("per_type");
            contract.on_support_payments.resize(static_cast<Index>(per_type.size()));
            Index k = 0;
            for (const auto& jt : per_type) {
                contract.on_support_payments(k++) = jt.at("payment").get<double>();
                std::vector<Belief> support;
                for (const auto& jp : jt.at("support"))
                    support.emplace_back(vec_from(jp, "support"));
                contract.supports.push_back(std::move(support));
                contract.hyperplanes.emplace_back(vec_from(jt.at("hyperplane"), "hyperplane"));
            }
            contract.floor = j.at("floor").get<double>();
            return LoadedContract{std::move(contract), std::move(choice), std::move(payments)};
        }
        throw ScenarioError("contract: unknown kind '" + kind + "'");
    } catch (const json::exception& e) {
        throw ScenarioError(std::string("contract: malformed document: ") + e.what());
    }
}

void write_export_csv(std::ostream& out, const Scenario& scenario, const ChoiceFunction& choice,
                      int region_resolution) {
    const Index dim = scenario.problem.n_states();
    const Index n_types = scenario.types.size();
    const bool with_regions = choice.all_full_dimension() && n_types >= 2;
    std::vector<AffineFunctional> h;
    if (with_regions)
        for (Index k = 0; k + 1 < n_types; ++k)
            h.push_back(cost_interpolant(choice.experiments[static_cast<size_t>(k)],
                                         scenario.cost));

    auto field = [](double x) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.12g", x);
        return std::string(buf);
    };
    // RFC 4180 lines end with CRLF.
    const char* eol = "\r\n";

    out << "record,type,point";
    for (Index i = 0; i < dim; ++i) out << ",w" << i + 1;
    out << ",prob,cost";
    for (size_t k = 0; k < h.size(); ++k) out << ",H" << k + 1;
    for (size_t k = 0; k < h.size(); ++k) out << ",region" << k + 1;
    out << eol;

    auto write_row = [&](const char* record, Index type, Index point, const Belief& p,
                         const std::string& prob) {
        out << record << ',' << (type >= 0 ? std::to_string(type + 1) : std::string{}) << ','
            << (point >= 0 ? std::to_string(point + 1) : std::string{});
        for (Index i = 0; i < dim; ++i) out << ',' << field(p[i]);
        out << ',' << prob << ',' << field(scenario.cost(p));
        for (const AffineFunctional& hk : h) out << ',' << field(hk(p));
        if (!h.empty())
            for (Region r : classify_regions(p, h, scenario.cost)) out << ',' << region_letter(r);
        out << eol;
    };

    write_row("prior", -1, -1, scenario.problem.prior, "");
    for (Index k = 0; k < n_types; ++k) {
        const Experiment& e = choice.experiments[static_cast<size_t>(k)];
        for (Index i = 0; i < e.size(); ++i)
            write_row("posterior", k, i, e.support()[static_cast<size_t>(i)],
                      field(e.probs()(i)));
    }
    if (with_regions)
        for (const Belief& p : simplex_grid(dim, region_resolution))
            write_row("grid", -1, -1, p, "");
}

}  // namespace contractlab
