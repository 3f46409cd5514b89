#pragma once

#include <functional>
#include <string>
#include <vector>

#include "contractlab/model.hpp"

namespace contractlab {

enum class Engine { automatic, concavify_lp, entropy_fixed_point };

/// Engine configuration for the per-type experiment solves.
struct SolverConfig {
    Engine engine = Engine::automatic;  // entropy fixed point for entropy costs, LP otherwise
    int resolution = 128;               // simplex grid resolution for the LP engine
    double fixed_point_tol = 1e-12;     // max-norm step tolerance on action probabilities
    long max_iterations = 100000;
    bool action_pruning = true;
};

/// Throws on out-of-range settings (resolution >= 8, tolerance in (0, 1e-2]).
void validate_solver_config(const SolverConfig& cfg);

/// Per-type optimal experiments, one per type in TypeSpace order, with the
/// recorded support structure flags.
struct ChoiceFunction {
    std::vector<Experiment> experiments;
    std::vector<bool> non_redundant;   // affinely independent support
    std::vector<bool> full_dimension;  // non-redundant with |support| = |states|
    std::string diagnostic;            // non-empty when optimality guarantees lapse

    Index size() const { return static_cast<Index>(experiments.size()); }
    bool all_non_redundant() const;
    bool all_full_dimension() const;
};

/// Validates Bayes plausibility of every experiment against the prior and
/// computes the support flags.
ChoiceFunction make_choice_function(std::vector<Experiment> experiments, const Belief& prior,
                                    double bayes_tol = 1e-6);

using BeliefObjective = std::function<double(const Belief&)>;

/// Output of the concavification LP. envelope is the affine functional
/// supporting the upper concave envelope at the prior: it weakly dominates
/// the objective at every candidate and touches it on the support.
struct ConcavifyResult {
    Experiment experiment;
    double value = 0.0;
    AffineFunctional envelope;
};

/// Maximizes E[phi(p)] over Bayes-plausible distributions supported on a
/// simplex grid (plus the prior and any extra candidate beliefs) by a dense
/// LP, then re-solves once on a locally refined grid (resolution x8 inside
/// the 1/resolution neighborhood of each support point). Ties are broken
/// toward the point mass at the prior; the support is returned in
/// lexicographic order.
ConcavifyResult concavify(const BeliefObjective& phi, const Belief& prior, int resolution,
                          const std::vector<Belief>& extra_candidates = {}, bool refine = true);

/// Concavification over an explicit candidate set (deduplicated, prior
/// included by the caller). Used when several objectives must share one
/// feasible set, which keeps cross-type optimality comparisons exact.
ConcavifyResult concavify_over(const BeliefObjective& phi, const Belief& prior,
                               const std::vector<Belief>& candidates);

/// Alternating-minimization fixed point for entropy-cost objectives
/// E[v(p)] - lambda * E[c(p)], with c the entropy reduction in the given log
/// base. Actions with vanishing unconditional probability are pruned and
/// re-tested with the posterior-based inclusion test; posteriors within
/// belief tolerance are merged. Throws NoConvergence past the iteration cap.
Experiment solve_entropy_fixed_point(const DecisionProblem& problem, double lambda,
                                     const SolverConfig& cfg = {},
                                     double log_base = CostModel::kNaturalBase);

/// Drops redundant posteriors: re-solves the concavification LP restricted
/// to the support of tau, whose basic solutions have affinely independent
/// support with the same mean and no lower objective.
Experiment reduce_support(const Experiment& tau, const BeliefObjective& phi);

/// Solves the per-type relaxed problems max E[v(p) - g(theta) c(p)] and
/// assembles the choice function. When the virtual types are strictly
/// increasing, verifies the guaranteed cost monotonicity and throws
/// MonotonicityDiagnostic on a violation beyond 1e-7; otherwise records a
/// diagnostic note instead.
ChoiceFunction solve_choice_function(const DecisionProblem& problem, const TypeSpace& types,
                                     const CostModel& cost, const SolverConfig& cfg = {},
                                     double bayes_tol = 1e-6);

}  // namespace contractlab
