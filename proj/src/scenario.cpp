#include "contractlab/scenario.hpp"

#include <fstream>

namespace contractlab {

namespace {

using nlohmann::json;

Vector vector_from_json(const json& j, const char* what) {
    if (!j.is_array()) throw ScenarioError(std::string(what) + ": expected an array");
    Vector v(static_cast<Index>(j.size()));
    Index i = 0;
    for (const auto& x : j) {
        if (!x.is_number()) throw ScenarioError(std::string(what) + ": expected numbers");
        v(i++) = x.get<double>();
    }
    return v;
}

json vector_to_json(const Vector& v) {
    json j = json::array();
    for (Index i = 0; i < v.size(); ++i) j.push_back(v(i));
    return j;
}

Matrix matrix_from_json(const json& j, const char* what) {
    if (!j.is_array() || j.empty())
        throw ScenarioError(std::string(what) + ": expected a non-empty array of rows");
    const Index rows = static_cast<Index>(j.size());
    Vector first = vector_from_json(j[0], what);
    Matrix m(rows, first.size());
    m.row(0) = first.transpose();
    for (Index r = 1; r < rows; ++r) {
        Vector row = vector_from_json(j[static_cast<size_t>(r)], what);
        if (row.size() != m.cols())
            throw ScenarioError(std::string(what) + ": ragged rows");
        m.row(r) = row.transpose();
    }
    return m;
}

json matrix_to_json(const Matrix& m) {
    json j = json::array();
    for (Index r = 0; r < m.rows(); ++r) j.push_back(vector_to_json(m.row(r).transpose()));
    return j;
}

std::vector<std::string> labels_from_json(const json& j, const char* what) {
    if (!j.is_array() || j.empty())
        throw ScenarioError(std::string(what) + ": expected a non-empty label array");
    std::vector<std::string> out;
    for (const auto& x : j) {
        if (!x.is_string()) throw ScenarioError(std::string(what) + ": labels must be strings");
        out.push_back(x.get<std::string>());
    }
    return out;
}

double log_base_from_json(const json& j) {
    if (j.is_string()) {
        const std::string s = j.get<std::string>();
        if (s == "e" || s == "natural") return CostModel::kNaturalBase;
        if (s == "2") return 2.0;
        throw ScenarioError("cost.log_base: unknown name '" + s + "'");
    }
    if (j.is_number()) return j.get<double>();
    throw ScenarioError("cost.log_base: expected a number or 'e'");
}

CostModel cost_from_json(const json& j, const Belief& prior) {
    if (!j.is_object() || !j.contains("kind"))
        throw ScenarioError("cost: expected an object with a 'kind'");
    const std::string kind = j.at("kind").get<std::string>();
    try {
        if (kind == "shannon-entropy") {
            double base = CostModel::kNaturalBase;
            if (j.contains("log_base")) base = log_base_from_json(j.at("log_base"));
            return CostModel::shannon_entropy(prior, base);
        }
        if (kind == "quadratic") {
            Belief center = j.contains("center")
                                ? Belief(vector_from_json(j.at("center"), "cost.center"))
                                : prior;
            return CostModel::quadratic(std::move(center));
        }
        if (kind == "tabulated") {
            return CostModel::tabulated(prior.dim(), j.at("resolution").get<int>(),
                                        vector_from_json(j.at("values"), "cost.values"));
        }
    } catch (const Error& e) {
        throw ScenarioError(std::string("cost: ") + e.what());
    }
    throw ScenarioError("cost.kind: unknown kind '" + kind + "'");
}

json cost_to_json(const CostModel& cost) {
    json j;
    switch (cost.kind()) {
        case CostModel::Kind::shannon_entropy:
            j["kind"] = "shannon-entropy";
            j["log_base"] = cost.log_base();
            break;
        case CostModel::Kind::quadratic:
            j["kind"] = "quadratic";
            j["center"] = vector_to_json(cost.center().weights());
            break;
        case CostModel::Kind::tabulated:
            j["kind"] = "tabulated";
            j["resolution"] = cost.table_resolution();
            j["values"] = vector_to_json(cost.table_values());
            break;
    }
    return j;
}

}  // namespace

const char* engine_name(Engine engine) {
    switch (engine) {
        case Engine::automatic: return "auto";
        case Engine::concavify_lp: return "concavify-lp";
        case Engine::entropy_fixed_point: return "entropy-fixed-point";
    }
    return "auto";
}

Engine engine_from_name(const std::string& name) {
    if (name == "auto") return Engine::automatic;
    if (name == "concavify-lp") return Engine::concavify_lp;
    if (name == "entropy-fixed-point") return Engine::entropy_fixed_point;
    throw ScenarioError("unknown engine '" + name + "'");
}

Scenario scenario_from_json(const nlohmann::json& j) {
    try {
        if (!j.is_object()) throw ScenarioError("scenario: expected an object");
        if (!j.contains("schema_version"))
            throw ScenarioError("scenario: missing schema_version");

        Belief prior(vector_from_json(j.at("prior"), "prior"));
        DecisionProblem problem = make_decision_problem(
            labels_from_json(j.at("states"), "states"),
            labels_from_json(j.at("actions"), "actions"),
            matrix_from_json(j.at("utility"), "utility"), std::move(prior));

        const json& jt = j.at("types");
        TypeSpace types = make_type_space(vector_from_json(jt.at("thetas"), "types.thetas"),
                                          vector_from_json(jt.at("pmf"), "types.pmf"));

        CostModel cost = cost_from_json(j.at("cost"), problem.prior);

        SolverConfig solver;
        if (j.contains("solver")) {
            const json& js = j.at("solver");
            if (js.contains("engine"))
                solver.engine = engine_from_name(js.at("engine").get<std::string>());
            if (js.contains("resolution")) solver.resolution = js.at("resolution").get<int>();
            if (js.contains("fixed_point_tol"))
                solver.fixed_point_tol = js.at("fixed_point_tol").get<double>();
            if (js.contains("max_iterations"))
                solver.max_iterations = js.at("max_iterations").get<long>();
            if (js.contains("action_pruning"))
                solver.action_pruning = js.at("action_pruning").get<bool>();
        }
        validate_solver_config(solver);

        Tolerances tol;
        if (j.contains("tolerances")) {
            const json& jtol = j.at("tolerances");
            if (jtol.contains("bayes_plausibility"))
                tol.bayes = jtol.at("bayes_plausibility").get<double>();
            if (jtol.contains("belief")) tol.belief = jtol.at("belief").get<double>();
        }

        Scenario scenario{j.at("schema_version").get<int>(),
                          j.value("name", std::string{}),
                          std::move(problem),
                          std::move(types),
                          std::move(cost),
                          solver,
                          tol,
                          std::nullopt,
                          j.value("expected", json::object())};

        if (j.contains("given_experiments")) {
            std::vector<Experiment> given;
            for (const auto& je : j.at("given_experiments")) {
                std::vector<Belief> support;
                for (const auto& jp : je.at("support"))
                    support.emplace_back(vector_from_json(jp, "given support"));
                given.emplace_back(std::move(support),
                                   vector_from_json(je.at("probs"), "given probs"));
            }
            if (static_cast<Index>(given.size()) != scenario.types.size())
                throw ScenarioError("given_experiments: need one experiment per type");
            scenario.given = make_choice_function(std::move(given), scenario.problem.prior,
                                                  scenario.tolerances.bayes);
        }

        // The cost normalization c(prior) = 0 is part of the model contract.
        if (std::abs(scenario.cost(scenario.problem.prior)) > 1e-9)
            throw ScenarioError("cost: c(prior) must vanish");

        // Midpoint strict-convexity spot check; a piecewise-affine table can
        // only warn since interpolation flattens the midpoints.
        ConvexityCheck convexity =
            spot_check_convexity(scenario.cost, scenario.problem.n_states(), 0x5eedULL);
        if (!convexity.passed) {
            if (scenario.cost.kind() == CostModel::Kind::tabulated)
                scenario.warnings.push_back(
                    "tabulated cost failed the strict-convexity spot check at " +
                    std::to_string(convexity.violations) + " midpoints");
            else
                throw ScenarioError("cost: failed the strict-convexity spot check");
        }
        return scenario;
    } catch (const ScenarioError&) {
        throw;
    } catch (const json::exception& e) {
        throw ScenarioError(std::string("scenario: malformed document: ") + e.what());
    } catch (const Error& e) {
        throw ScenarioError(std::string("scenario: ") + e.what());
    }
}

nlohmann::json scenario_to_json(const Scenario& scenario) {
    json j;
    j["schema_version"] = scenario.schema_version;
    if (!scenario.name.empty()) j["name"] = scenario.name;
    j["states"] = scenario.problem.states;
    j["actions"] = scenario.problem.actions;
    j["utility"] = matrix_to_json(scenario.problem.utility);
    j["prior"] = vector_to_json(scenario.problem.prior.weights());
    j["types"] = {{"thetas", vector_to_json(scenario.types.thetas)},
                  {"pmf", vector_to_json(scenario.types.pmf)}};
    j["cost"] = cost_to_json(scenario.cost);
    j["solver"] = {{"engine", engine_name(scenario.solver.engine)},
                   {"resolution", scenario.solver.resolution},
                   {"fixed_point_tol", scenario.solver.fixed_point_tol},
                   {"max_iterations", scenario.solver.max_iterations},
                   {"action_pruning", scenario.solver.action_pruning}};
    j["tolerances"] = {{"bayes_plausibility", scenario.tolerances.bayes},
                       {"belief", scenario.tolerances.belief}};
    if (scenario.given) {
        json experiments = json::array();
        for (const Experiment& e : scenario.given->experiments) {
            json je;
            je["support"] = json::array();
            for (const Belief& p : e.support())
                je["support"].push_back(vector_to_json(p.weights()));
            je["probs"] = vector_to_json(e.probs());
            experiments.push_back(std::move(je));
        }
        j["given_experiments"] = std::move(experiments);
    }
    if (!scenario.expected.empty()) j["expected"] = scenario.expected;
    return j;
}

nlohmann::json read_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ScenarioError("cannot open " + path.string());
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw ScenarioError(path.string() + ": " + e.what());
    }
}

Scenario load_scenario(const std::filesystem::path& path) {
    return scenario_from_json(read_json(path));
}

void save_json(const nlohmann::json& j, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw ScenarioError("cannot write " + path.string());
    out << j.dump(2) << '\n';
}

ChoiceFunction scenario_choice_function(const Scenario& scenario, std::string* engine_used) {
    if (scenario.given) {
        if (engine_used) *engine_used = "given";
        return *scenario.given;
    }
    Engine engine = scenario.solver.engine;
    if (engine == Engine::automatic)
        engine = scenario.cost.kind() == CostModel::Kind::shannon_entropy
                     ? Engine::entropy_fixed_point
                     : Engine::concavify_lp;
    if (engine_used) *engine_used = engine_name(engine);
    return solve_choice_function(scenario.problem, scenario.types, scenario.cost, scenario.solver,
                                 scenario.tolerances.bayes);
}

Scenario example1_scenario() {
    Matrix u(3, 3);
    u << 5, 4, 2,
         0, 5, 3,
         5, 1, 5;
    DecisionProblem problem = make_decision_problem(
        {"w1", "w2", "w3"}, {"a1", "a2", "a3"}, std::move(u), Belief::uniform(3));
    TypeSpace types =
        make_type_space((Vector(2) << 2.25, 2.0).finished(), (Vector(2) << 0.5, 0.5).finished());
    CostModel cost = CostModel::shannon_entropy(problem.prior);
    nlohmann::json expected;
    expected["virtual_types"] = {2.5, 2.0};
    expected["log_base"] = "e";
    expected["posteriors"] = {
        {{0.3626, 0.4899, 0.1475}, {0.0491, 0.7308, 0.2201}, {0.3626, 0.1475, 0.4899}},
        {{0.4141, 0.4790, 0.1069}, {0.0340, 0.7898, 0.1762}, {0.4141, 0.1069, 0.4790}}};
    expected["probabilities"] = {{0.3838, 0.0933, 0.5229}, {0.2186, 0.2125, 0.5689}};
    return Scenario{1,       "example1", std::move(problem), std::move(types), std::move(cost),
                    {},      {},         std::nullopt,       std::move(expected)};
}

Scenario example2_scenario() {
    // Only the cost model and the given experiments matter here; the
    // decision problem is a placeholder since the solver is bypassed.
    Matrix u = Matrix::Identity(3, 3);
    DecisionProblem problem = make_decision_problem(
        {"w1", "w2", "w3"}, {"a1", "a2", "a3"}, std::move(u), Belief::uniform(3));
    TypeSpace types =
        make_type_space((Vector(2) << 2.25, 2.0).finished(), (Vector(2) << 0.5, 0.5).finished());
    CostModel cost = CostModel::quadratic(problem.prior);

    auto exp = [](std::initializer_list<std::initializer_list<double>> pts,
                  std::initializer_list<double> probs) {
        std::vector<Belief> support;
        for (const auto& p : pts) support.emplace_back(Vector{p});
        Vector pr(static_cast<Index>(probs.size()));
        Index i = 0;
        for (double x : probs) pr(i++) = x;
        return Experiment(std::move(support), std::move(pr));
    };
    std::vector<Experiment> given;
    given.push_back(exp({{0.5770, 0.0000, 0.4230},
                         {0.0001, 0.9998, 0.0001},
                         {0.0002, 0.0008, 0.9990}},
                        {0.58, 0.33, 0.09}));
    given.push_back(exp({{0.6799, 0.0001, 0.3200},
                         {0.0005, 0.9993, 0.0002},
                         {0.0004, 0.0170, 0.9827}},
                        {0.49, 0.33, 0.18}));

    Tolerances tol;
    tol.bayes = 4e-3;  // the published posteriors are only approximately plausible

    nlohmann::json expected;
    expected["costs"] = {0.3832, 0.44678};
    expected["strongly_c_monotone"] = false;

    Scenario scenario{1,
                      "example2",
                      std::move(problem),
                      std::move(types),
                      std::move(cost),
                      {},
                      tol,
                      std::nullopt,
                      std::move(expected)};
    scenario.given =
        make_choice_function(std::move(given), scenario.problem.prior, scenario.tolerances.bayes);
    return scenario;
}

}  // namespace contractlab
