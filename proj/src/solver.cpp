#include "contractlab/solver.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_set>

namespace contractlab {

namespace {

constexpr double kSupportWeightTol = 1e-12;
constexpr int kRefineFactor = 8;

struct CandidateSet {
    std::vector<Belief> beliefs;
    std::vector<double> values;

    // For points known to be pairwise distinct (a fresh simplex grid).
    void add_unchecked(const Belief& p, const BeliefObjective& phi) {
        beliefs.push_back(p);
        values.push_back(phi(p));
    }

    void add(const Belief& p, const BeliefObjective& phi) {
        for (const Belief& q : beliefs)
            if (q.almost_equal(p)) return;
        add_unchecked(p, phi);
    }
};

// Solves max sum w_i phi(p_i) s.t. sum w_i p_i = target, sum w_i = 1, w >= 0
// over the candidate columns. The redundant last coordinate row is dropped so
// basic solutions carry at most |states| support points.
LpSolution concavify_lp(const CandidateSet& cands, const Vector& target) {
    const Index n = target.size();
    const Index cols = static_cast<Index>(cands.beliefs.size());
    LinearProgram lp;
    lp.objective = Eigen::Map<const Vector>(cands.values.data(), cols);
    lp.eq_matrix.resize(n, cols);
    for (Index j = 0; j < cols; ++j) {
        lp.eq_matrix.block(0, j, n - 1, 1) =
            cands.beliefs[static_cast<size_t>(j)].weights().head(n - 1);
        lp.eq_matrix(n - 1, j) = 1.0;
    }
    lp.eq_rhs.resize(n);
    lp.eq_rhs.head(n - 1) = target.head(n - 1);
    lp.eq_rhs(n - 1) = 1.0;
    LpSolution sol = solve_lp(lp);
    if (sol.status != LpStatus::optimal)
        throw NumericalFailure("concavify: LP did not reach an optimum");
    return sol;
}

Experiment experiment_from_lp(const CandidateSet& cands, const LpSolution& sol) {
    std::vector<std::pair<Belief, double>> atoms;
    for (Index j = 0; j < sol.x.size(); ++j) {
        if (sol.x(j) > kSupportWeightTol)
            atoms.emplace_back(cands.beliefs[static_cast<size_t>(j)], sol.x(j));
    }
    std::sort(atoms.begin(), atoms.end(),
              [](const auto& a, const auto& b) { return a.first.lex_less(b.first); });
    std::vector<Belief> support;
    Vector probs(static_cast<Index>(atoms.size()));
    double total = 0.0;
    for (size_t i = 0; i < atoms.size(); ++i) {
        support.push_back(atoms[i].first);
        probs(static_cast<Index>(i)) = atoms[i].second;
        total += atoms[i].second;
    }
    probs /= total;
    return Experiment(std::move(support), std::move(probs));
}

AffineFunctional envelope_from_dual(const LpSolution& sol, Index n) {
    Vector coeffs(n);
    const double z = sol.dual(n - 1);
    for (Index r = 0; r + 1 < n; ++r) coeffs(r) = sol.dual(r) + z;
    coeffs(n - 1) = z;
    return AffineFunctional(std::move(coeffs));
}

}  // namespace

void validate_solver_config(const SolverConfig& cfg) {
    if (cfg.resolution < 8) throw Error("solver config: resolution must be at least 8");
    if (!(cfg.fixed_point_tol > 0.0) || cfg.fixed_point_tol > 1e-2)
        throw Error("solver config: fixed-point tolerance must lie in (0, 1e-2]");
    if (cfg.max_iterations < 1) throw Error("solver config: max iterations must be positive");
}

bool ChoiceFunction::all_non_redundant() const {
    return std::all_of(non_redundant.begin(), non_redundant.end(), [](bool b) { return b; });
}

bool ChoiceFunction::all_full_dimension() const {
    return std::all_of(full_dimension.begin(), full_dimension.end(), [](bool b) { return b; });
}

ChoiceFunction make_choice_function(std::vector<Experiment> experiments, const Belief& prior,
                                    double bayes_tol) {
    ChoiceFunction cf;
    for (const Experiment& e : experiments) {
        PlausibilityReport report = validate_experiment(e, prior, bayes_tol);
        if (!report.passed)
            throw Error("choice function: experiment is not Bayes-plausible (" + report.detail +
                        ")");
        const bool indep = affinely_independent(e.support());
        cf.non_redundant.push_back(indep);
        cf.full_dimension.push_back(indep && e.size() == prior.dim());
    }
    cf.experiments = std::move(experiments);
    return cf;
}

namespace {

ConcavifyResult solve_over(const CandidateSet& cands, const BeliefObjective& phi,
                           const Belief& prior) {
    LpSolution sol = concavify_lp(cands, prior.weights());
    const double value = sol.objective_value;
    AffineFunctional envelope = envelope_from_dual(sol, prior.dim());
    // Minimal-support tie-break: the prior itself is always a candidate, so
    // a no-learning optimum is returned as the point mass.
    const double at_prior = phi(prior);
    if (at_prior >= value - 1e-12 * (1.0 + std::abs(value)))
        return ConcavifyResult{Experiment::point_mass(prior), at_prior, std::move(envelope)};
    return ConcavifyResult{experiment_from_lp(cands, sol), value, std::move(envelope)};
}

}  // namespace

ConcavifyResult concavify(const BeliefObjective& phi, const Belief& prior, int resolution,
                          const std::vector<Belief>& extra_candidates, bool refine) {
    const Index n = prior.dim();
    CandidateSet cands;
    for (const Belief& g : simplex_grid(n, resolution)) cands.add_unchecked(g, phi);
    cands.add(prior, phi);
    for (const Belief& e : extra_candidates) cands.add(e, phi);

    if (refine) {
        LpSolution sol = concavify_lp(cands, prior.weights());
        Experiment coarse = experiment_from_lp(cands, sol);
        for (const Belief& s : coarse.support())
            for (const Belief& f :
                 local_simplex_grid(s, resolution * kRefineFactor, kRefineFactor))
                cands.add(f, phi);
    }
    return solve_over(cands, phi, prior);
}

ConcavifyResult concavify_over(const BeliefObjective& phi, const Belief& prior,
                               const std::vector<Belief>& candidates) {
    CandidateSet cands;
    for (const Belief& p : candidates) cands.add_unchecked(p, phi);
    return solve_over(cands, phi, prior);
}

Experiment solve_entropy_fixed_point(const DecisionProblem& problem, double lambda,
                                     const SolverConfig& cfg, double log_base) {
    validate_solver_config(cfg);
    if (!(lambda > 0.0)) throw Error("entropy fixed point: lambda must be positive");
    const Index na = problem.n_actions();
    const Index nw = problem.n_states();
    const double lam = lambda / std::log(log_base);

    // Per-state shift keeps the exponentials bounded; it cancels everywhere.
    Matrix w(na, nw);
    for (Index s = 0; s < nw; ++s) {
        const double shift = problem.utility.col(s).maxCoeff();
        for (Index a = 0; a < na; ++a)
            w(a, s) = std::exp((problem.utility(a, s) - shift) / lam);
    }

    Vector q = Vector::Constant(na, 1.0 / static_cast<double>(na));
    Vector denom(nw), ratio(nw), next(na);
    bool converged = false;
    for (long it = 0; it < cfg.max_iterations; ++it) {
        denom.noalias() = w.transpose() * q;
        ratio = problem.prior.weights().cwiseQuotient(denom);
        next = q.cwiseProduct(w * ratio);
        const double step = (next - q).cwiseAbs().maxCoeff();
        q = next;
        if (step < cfg.fixed_point_tol) {
            converged = true;
            break;
        }
    }
    if (!converged) throw NoConvergence("entropy fixed point: iteration cap exceeded");

    std::vector<Index> kept;
    for (Index a = 0; a < na; ++a) {
        if (!cfg.action_pruning || q(a) >= 1e-9) kept.push_back(a);
    }
    if (kept.empty()) throw NumericalFailure("entropy fixed point: all actions pruned");

    // Final E-step over the retained actions.
    Vector qk(static_cast<Index>(kept.size()));
    for (size_t i = 0; i < kept.size(); ++i) qk(static_cast<Index>(i)) = q(kept[i]);
    qk /= qk.sum();
    denom.setZero();
    for (Index s = 0; s < nw; ++s)
        for (size_t i = 0; i < kept.size(); ++i)
            denom(s) += qk(static_cast<Index>(i)) * w(kept[i], s);
    Matrix cond(static_cast<Index>(kept.size()), nw);
    for (size_t i = 0; i < kept.size(); ++i)
        for (Index s = 0; s < nw; ++s)
            cond(static_cast<Index>(i), s) = qk(static_cast<Index>(i)) * w(kept[i], s) / denom(s);
    Vector mass = cond * problem.prior.weights();

    // Inclusion test: a pruned action must not strictly improve the solution.
    for (Index a = 0; a < na; ++a) {
        if (std::find(kept.begin(), kept.end(), a) != kept.end()) continue;
        double score = 0.0;
        for (Index s = 0; s < nw; ++s) score += problem.prior[s] * w(a, s) / denom(s);
        if (score > 1.0 + 1e-6)
            throw NumericalFailure("entropy fixed point: pruned action passes inclusion test");
    }

    std::vector<std::pair<Belief, double>> atoms;
    for (size_t i = 0; i < kept.size(); ++i) {
        const Index row = static_cast<Index>(i);
        if (mass(row) <= kSupportWeightTol) continue;
        Vector posterior(nw);
        for (Index s = 0; s < nw; ++s)
            posterior(s) = problem.prior[s] * cond(row, s) / mass(row);
        Belief p(posterior);
        bool merged = false;
        for (auto& [b, prob] : atoms) {
            if (b.almost_equal(p)) {
                prob += mass(row);
                merged = true;
                break;
            }
        }
        if (!merged) atoms.emplace_back(std::move(p), mass(row));
    }
    std::sort(atoms.begin(), atoms.end(),
              [](const auto& a, const auto& b) { return a.first.lex_less(b.first); });
    std::vector<Belief> support;
    Vector probs(static_cast<Index>(atoms.size()));
    for (size_t i = 0; i < atoms.size(); ++i) {
        support.push_back(atoms[i].first);
        probs(static_cast<Index>(i)) = atoms[i].second;
    }
    probs /= probs.sum();
    return Experiment(std::move(support), std::move(probs));
}

Experiment reduce_support(const Experiment& tau, const BeliefObjective& phi) {
    if (affinely_independent(tau.support())) return tau;
    const double input_value = [&] {
        double v = 0.0;
        for (Index i = 0; i < tau.size(); ++i)
            v += tau.probs()(i) * phi(tau.support()[static_cast<size_t>(i)]);
        return v;
    }();
    CandidateSet cands;
    for (const Belief& p : tau.support()) cands.add(p, phi);
    LpSolution sol = concavify_lp(cands, tau.mean());
    Experiment reduced = experiment_from_lp(cands, sol);
    if (sol.objective_value < input_value - 1e-10 * (1.0 + std::abs(input_value)))
        throw NumericalFailure("reduce_support: objective regressed");
    return reduced;
}

ChoiceFunction solve_choice_function(const DecisionProblem& problem, const TypeSpace& types,
                                     const CostModel& cost, const SolverConfig& cfg,
                                     double bayes_tol) {
    validate_solver_config(cfg);
    if (cost.dim() != problem.n_states())
        throw DimensionMismatch("solve_choice_function: cost dimension mismatch");
    const VirtualTypes vt = virtual_types(types);

    Engine engine = cfg.engine;
    if (engine == Engine::automatic)
        engine = cost.kind() == CostModel::Kind::shannon_entropy ? Engine::entropy_fixed_point
                                                                 : Engine::concavify_lp;
    if (engine == Engine::entropy_fixed_point && cost.kind() != CostModel::Kind::shannon_entropy)
        throw Error("solve_choice_function: entropy engine requires an entropy cost");

    auto phi_for = [&problem, &cost, &vt](Index k) {
        const double g = vt.g(k);
        return BeliefObjective([&problem, &cost, g](const Belief& p) {
            return value_function(problem, p).value - g * cost(p);
        });
    };

    std::vector<Experiment> experiments;
    if (engine == Engine::entropy_fixed_point) {
        for (Index k = 0; k < types.size(); ++k) {
            Experiment e = solve_entropy_fixed_point(problem, vt.g(k), cfg, cost.log_base());
            experiments.push_back(reduce_support(e, phi_for(k)));
        }
    } else {
        // All types share one candidate set, coarse and refined, so each
        // type's solution is exactly optimal over the same feasible set and
        // the guaranteed cost ordering carries over to the discretization.
        std::vector<Belief> candidates = simplex_grid(problem.n_states(), cfg.resolution);
        candidates.push_back(problem.prior);
        std::vector<Experiment> coarse;
        for (Index k = 0; k < types.size(); ++k)
            coarse.push_back(concavify_over(phi_for(k), problem.prior, candidates).experiment);
        const int fine_res = cfg.resolution * 8;
        std::unordered_set<std::uint64_t> seen;
        for (const Experiment& e : coarse) {
            for (const Belief& s : e.support()) {
                for (const Belief& f : local_simplex_grid(s, fine_res, 8)) {
                    std::uint64_t key = 0;
                    bool on_coarse = true;
                    for (Index i = 0; i < f.dim(); ++i) {
                        const long step = std::lround(f[i] * fine_res);
                        if (step % 8 != 0) on_coarse = false;
                        key = key * 8209 + static_cast<std::uint64_t>(step);
                    }
                    if (!on_coarse && seen.insert(key).second) candidates.push_back(f);
                }
            }
        }
        for (Index k = 0; k < types.size(); ++k) {
            Experiment e = concavify_over(phi_for(k), problem.prior, candidates).experiment;
            experiments.push_back(reduce_support(e, phi_for(k)));
        }
    }

    ChoiceFunction cf = make_choice_function(std::move(experiments), problem.prior, bayes_tol);
    if (vt.strictly_increasing) {
        for (Index k = 0; k + 1 < types.size(); ++k) {
            const double lower = cost_of_experiment(cost, cf.experiments[static_cast<size_t>(k)]);
            const double upper =
                cost_of_experiment(cost, cf.experiments[static_cast<size_t>(k + 1)]);
            if (upper < lower - 1e-7)
                throw MonotonicityDiagnostic(
                    "solved choice function violates guaranteed cost monotonicity between types " +
                    std::to_string(k + 1) + " and " + std::to_string(k + 2));
        }
    } else {
        cf.diagnostic =
            "virtual types are not strictly increasing; the relaxed per-type solutions carry no "
            "cost-monotonicity guarantee";
    }
    return cf;
}

}  // namespace contractlab
