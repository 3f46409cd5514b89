#pragma once

#include <optional>
#include <string>
#include <vector>

#include "contractlab/contracts.hpp"

namespace contractlab {

/// Affine interpolant of the researcher payoff t(p) - theta * c(p) on an
/// experiment's support. Requires a full-dimension affinely independent
/// support (throws DegenerateBasis/DimensionMismatch).
AffineFunctional secant_functional(const ResultsContract& contract, double theta,
                                   const std::vector<Belief>& support, const CostModel& cost);

struct SecantViolation {
    Belief q;
    double secant_value = 0.0;
    double payoff_value = 0.0;
    double gap = 0.0;  // payoff - secant, positive when violated
};

/// Per-type verdict of the secant condition: the support interpolant of the
/// payoff must weakly dominate the payoff everywhere.
struct SecantCheck {
    bool passed = true;
    AffineFunctional secant;
    std::vector<SecantViolation> witnesses;  // sorted by gap, largest first
};

/// Tests the secant condition for every type at all payment-map beliefs,
/// grid points and vertices. Off the payment map the payoff envelope is
/// convex, so its minimum is bracketed by two levels of x8 local grid
/// refinement around the grid argmin. Throws NotFullDimension.
std::vector<SecantCheck> check_secant_condition(const ChoiceFunction& choice,
                                                const ResultsContract& contract,
                                                const TypeSpace& types, const CostModel& cost,
                                                int grid_resolution = 128);

/// The constructive deviation: replaces one support point of an affinely
/// independent full-dimension basis by q, keeping Bayes plausibility. The
/// dropped index minimizes the prior-to-q barycentric ratio (ties to the
/// lowest index). Requires the prior strictly inside the support hull.
Experiment construct_deviation(const std::vector<Belief>& support, const Belief& q,
                               const Belief& prior);

/// Concavification best response to a posterior-contingent payment rule.
struct BestResponse {
    Experiment experiment;
    double value = 0.0;
};

BestResponse best_response(const ResultsContract& contract, double theta, const CostModel& cost,
                           const Belief& prior, int grid_resolution = 128);

/// Best response of a type-theta researcher who reported `reported_type`
/// under a screening contract.
BestResponse best_response(const ScreeningResultsContract& contract, Index reported_type,
                           double theta, const CostModel& cost, const Belief& prior,
                           int grid_resolution = 128);

struct TypeAudit {
    bool ic = true;
    double truthful_payoff = 0.0;
    double best_response_value = 0.0;
    std::optional<Experiment> best_response_experiment;
    double expected_pay = 0.0;
    double target_pay = 0.0;
    bool payment_ok = true;
    std::vector<SecantViolation> violations;
    std::string detail;
};

struct AuditReport {
    bool passed = false;
    bool payment_identity_applicable = true;
    std::vector<TypeAudit> per_type;
    std::string detail;
};

/// Full incentive-compatibility audit of a results contract: secant
/// condition, best-response cross-check, and the expected-payment identity
/// against the cheapest implementing payments.
AuditReport audit_contract(const DecisionProblem& problem, const TypeSpace& types,
                           const CostModel& cost, const ChoiceFunction& choice,
                           const ResultsContract& contract, int grid_resolution = 128);

/// Audit of a screening contract: pointwise obedience chain, best-response
/// oracle over all (type, report) pairs, and on-path payment identities.
AuditReport audit_contract(const DecisionProblem& problem, const TypeSpace& types,
                           const CostModel& cost, const ChoiceFunction& choice,
                           const ScreeningResultsContract& contract, int grid_resolution = 128);

}  // namespace contractlab
