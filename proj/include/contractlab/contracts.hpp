#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "contractlab/monotonicity.hpp"

namespace contractlab {

/// Observable-methods contract: per-type experiments plus lump-sum payments.
struct MethodsContract {
    ChoiceFunction choice;
    Vector payments;
};

/// Participation/truthfulness audit of a methods contract.
struct IcIrReport {
    bool ir_ok = false;
    bool ic_ok = false;
    double worst_ir = 0.0;  // most negative participation payoff
    double worst_ic = 0.0;  // most negative truthful-minus-misreport margin
    std::string detail;
};
IcIrReport check_methods_ic_ir(const ChoiceFunction& choice, const Vector& payments,
                               const TypeSpace& types, const CostModel& cost, double tol = 1e-9);

/// Cheapest payments implementing a cost-monotone choice function:
/// the least efficient type is paid its cost exactly and every other type
/// earns the telescoping information rent. Throws NotCMonotone when the
/// choice function is not cost-monotone within 1e-9.
Vector payments_T_star(const ChoiceFunction& choice, const TypeSpace& types,
                       const CostModel& cost);

/// Screening contract paying the lump sum on the suggested support and a
/// deep floor elsewhere, with the per-type interpolant hyperplanes that make
/// obedience verifiable.
struct ScreeningResultsContract {
    std::vector<std::vector<Belief>> supports;  // per type, suggested posteriors
    Vector on_support_payments;                 // per type, T(theta)
    double floor = 0.0;
    std::vector<AffineFunctional> hyperplanes;  // per type, interpolant of c on the support

    Index n_types() const { return on_support_payments.size(); }
    /// Payment for a reported type and realized posterior.
    double payment(Index reported_type, const Belief& p) const;
};

/// Builds the forcing contract for a non-redundant, incentive-compatible
/// methods contract. The floor is the exact minimum over simplex vertices of
/// payment minus scaled hyperplane value. Throws RedundantSupport if any
/// support is affinely dependent.
ScreeningResultsContract build_forcing_contract(const ChoiceFunction& choice,
                                                const Vector& payments, const TypeSpace& types,
                                                const CostModel& cost);

/// Payment rule contingent only on the realized posterior: a finite payment
/// map on the union of supports plus a default for all other beliefs.
struct ResultsContract {
    std::vector<std::pair<Belief, double>> support_payments;
    double default_payment = 0.0;
    double floor_margin = 0.0;

    /// Payment at p: the mapped value when p matches a paid belief at belief
    /// tolerance, the default otherwise.
    double operator()(const Belief& p) const;
};

/// Builds the outcome-equivalent results-based contract for a full-dimension,
/// strongly c-monotone choice function with pairwise disjoint supports:
/// each type's posteriors are paid its scaled cost plus the telescoping
/// rent functionals, and the default is a grid minimum of the no-deviation
/// envelope minus floor_margin. Verifies that expected payments reproduce
/// `payments` to 1e-9. Throws NotFullDimension, NotStronglyCMonotone,
/// OverlappingSupports.
///
/// floor_margin <= 0 selects the default 1e-6 * (1 + max |support payment|).
ResultsContract build_results_contract(const ChoiceFunction& choice, const Vector& payments,
                                       const TypeSpace& types, const CostModel& cost,
                                       double floor_margin = 0.0);

/// As build_results_contract but without the strong-c-monotonicity gate and
/// payment verification; used to study contracts whose incentive audit is
/// expected to fail.
ResultsContract build_results_contract_unchecked(const ChoiceFunction& choice,
                                                 const TypeSpace& types, const CostModel& cost,
                                                 double floor_margin = 0.0);

/// Expected payment of an experiment under a results contract.
double expected_payment(const ResultsContract& contract, const Experiment& tau);

/// The telescoping rent functionals s_k of the constructed contract:
/// s_1 = 0 and s_j = sum_{k<j} (theta_k - theta_{k+1}) H_k.
std::vector<AffineFunctional> rent_functionals(const ChoiceFunction& choice,
                                               const TypeSpace& types, const CostModel& cost);

}  // namespace contractlab
