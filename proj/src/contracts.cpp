#include "contractlab/contracts.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace contractlab {

namespace {

constexpr int kFloorGridResolution = 256;

int floor_grid_resolution(Index dim) {
    // The full 256-grid is combinatorial in the dimension; above four states
    // a coarser sample still brackets the convex envelope minimum safely
    // because the floor margin is subtracted afterwards.
    return dim <= 4 ? kFloorGridResolution : 32;
}

void require_disjoint_supports(const ChoiceFunction& choice) {
    const Index n = choice.size();
    for (Index a = 0; a < n; ++a) {
        for (Index b = a + 1; b < n; ++b) {
            for (const Belief& p : choice.experiments[static_cast<size_t>(a)].support())
                for (const Belief& q : choice.experiments[static_cast<size_t>(b)].support())
                    if (p.almost_equal(q))
                        throw OverlappingSupports(
                            "supports of types " + std::to_string(a + 1) + " and " +
                            std::to_string(b + 1) + " share a posterior");
        }
    }
}

ResultsContract build_results_core(const ChoiceFunction& choice, const TypeSpace& types,
                                   const CostModel& cost, double floor_margin) {
    const Index n_types = choice.size();
    const Index dim = cost.dim();
    std::vector<AffineFunctional> s = rent_functionals(choice, types, cost);

    ResultsContract contract;
    double payment_scale = 0.0;
    for (Index k = 0; k < n_types; ++k) {
        const double theta = types.thetas(k);
        for (const Belief& p : choice.experiments[static_cast<size_t>(k)].support()) {
            const double pay = theta * cost(p) + s[static_cast<size_t>(k)](p);
            payment_scale = std::max(payment_scale, std::abs(pay));
            contract.support_payments.emplace_back(p, pay);
        }
    }
    if (floor_margin <= 0.0) floor_margin = 1e-6 * (1.0 + payment_scale);
    contract.floor_margin = floor_margin;

    // Default payment: minimum of the no-deviation envelope
    // min_k s_k(q) + theta_k c(q), minus the safety margin. Each per-type
    // envelope is convex, so the grid minimum refined twice around the
    // argmin brackets the continuous minimum; the margin absorbs the rest.
    // Any lower floor stays incentive-compatible with identical on-path
    // payments.
    double envelope_min = std::numeric_limits<double>::infinity();
    std::vector<Belief> argmins;
    std::vector<double> bests(static_cast<size_t>(n_types),
                              std::numeric_limits<double>::infinity());
    for (Index k = 0; k < n_types; ++k) argmins.push_back(choice.experiments[0].support()[0]);
    auto scan = [&](const Belief& q) {
        const double cq = cost(q);
        for (Index k = 0; k < n_types; ++k) {
            const double v = s[static_cast<size_t>(k)](q) + types.thetas(k) * cq;
            envelope_min = std::min(envelope_min, v);
            if (v < bests[static_cast<size_t>(k)]) {
                bests[static_cast<size_t>(k)] = v;
                argmins[static_cast<size_t>(k)] = q;
            }
        }
    };
    const int base_res = floor_grid_resolution(dim);
    for (const Belief& q : simplex_grid(dim, base_res)) scan(q);
    for (Index i = 0; i < dim; ++i) scan(Belief::vertex(dim, i));
    scan(Belief(choice.experiments[0].mean()));  // the common mean (prior)
    for (const auto& [p, pay] : contract.support_payments) {
        (void)pay;
        scan(p);
    }
    for (Index k = 0; k < n_types; ++k) {
        Belief focus = argmins[static_cast<size_t>(k)];
        int res = base_res;
        for (int level = 0; level < 2; ++level) {
            res *= 8;
            Belief next = focus;
            double local_best = std::numeric_limits<double>::infinity();
            for (const Belief& q : local_simplex_grid(focus, res, 8)) {
                const double v = s[static_cast<size_t>(k)](q) + types.thetas(k) * cost(q);
                envelope_min = std::min(envelope_min, v);
                if (v < local_best) {
                    local_best = v;
                    next = q;
                }
            }
            focus = next;
        }
    }
    contract.default_payment = envelope_min - floor_margin;
    return contract;
}

}  // namespace

IcIrReport check_methods_ic_ir(const ChoiceFunction& choice, const Vector& payments,
                               const TypeSpace& types, const CostModel& cost, double tol) {
    const Index n = types.size();
    if (payments.size() != n || choice.size() != n)
        throw DimensionMismatch("methods contract: payments/choice/type sizes differ");
    Vector costs(n);
    for (Index k = 0; k < n; ++k)
        costs(k) = cost_of_experiment(cost, choice.experiments[static_cast<size_t>(k)]);

    IcIrReport report;
    report.worst_ir = std::numeric_limits<double>::infinity();
    report.worst_ic = std::numeric_limits<double>::infinity();
    for (Index k = 0; k < n; ++k) {
        const double truthful = payments(k) - types.thetas(k) * costs(k);
        report.worst_ir = std::min(report.worst_ir, truthful);
        for (Index r = 0; r < n; ++r) {
            if (r == k) continue;
            const double misreport = payments(r) - types.thetas(k) * costs(r);
            report.worst_ic = std::min(report.worst_ic, truthful - misreport);
        }
    }
    if (n == 1) report.worst_ic = 0.0;
    report.ir_ok = report.worst_ir >= -tol;
    report.ic_ok = report.worst_ic >= -tol;
    if (!report.ir_ok) report.detail = "participation fails by " + std::to_string(-report.worst_ir);
    if (!report.ic_ok)
        report.detail += std::string(report.detail.empty() ? "" : "; ") +
                         "truthfulness fails by " + std::to_string(-report.worst_ic);
    return report;
}

Vector payments_T_star(const ChoiceFunction& choice, const TypeSpace& types,
                       const CostModel& cost) {
    const Index n = types.size();
    if (choice.size() != n)
        throw DimensionMismatch("payments: choice function and type space sizes differ");
    Vector costs(n);
    for (Index k = 0; k < n; ++k)
        costs(k) = cost_of_experiment(cost, choice.experiments[static_cast<size_t>(k)]);
    for (Index k = 0; k + 1 < n; ++k)
        if (costs(k + 1) < costs(k) - 1e-9 * (1.0 + std::abs(costs(k))))
            throw NotCMonotone("payments require a cost-monotone choice function; types " +
                               std::to_string(k + 1) + "," + std::to_string(k + 2) +
                               " have costs " + std::to_string(costs(k)) + " > " +
                               std::to_string(costs(k + 1)));

    Vector payments(n);
    double rent = 0.0;  // accumulated information rent sum_{i<k} (theta_i - theta_{i+1}) C_i
    payments(0) = types.thetas(0) * costs(0);
    for (Index k = 1; k < n; ++k) {
        rent += (types.thetas(k - 1) - types.thetas(k)) * costs(k - 1);
        payments(k) = types.thetas(k) * costs(k) + rent;
    }

    IcIrReport audit = check_methods_ic_ir(choice, payments, types, cost);
    if (!audit.ir_ok || !audit.ic_ok)
        throw NumericalFailure("payments: constructed schedule failed IC/IR validation (" +
                               audit.detail + ")");
    return payments;
}

double ScreeningResultsContract::payment(Index reported_type, const Belief& p) const {
    for (const Belief& q : supports[static_cast<size_t>(reported_type)])
        if (q.almost_equal(p)) return on_support_payments(reported_type);
    return floor;
}

ScreeningResultsContract build_forcing_contract(const ChoiceFunction& choice,
                                                const Vector& payments, const TypeSpace& types,
                                                const CostModel& cost) {
    const Index n = types.size();
    if (choice.size() != n || payments.size() != n)
        throw DimensionMismatch("forcing contract: inconsistent sizes");
    for (Index k = 0; k < n; ++k)
        if (!choice.non_redundant[static_cast<size_t>(k)])
            throw RedundantSupport("type " + std::to_string(k + 1) +
                                   ": affinely dependent support admits a cheaper sub-experiment "
                                   "with the same payment");
    IcIrReport audit = check_methods_ic_ir(choice, payments, types, cost);
    if (!audit.ic_ok || !audit.ir_ok)
        throw Error("forcing contract requires an incentive-compatible methods contract (" +
                    audit.detail + ")");

    ScreeningResultsContract contract;
    contract.on_support_payments = payments;
    for (Index k = 0; k < n; ++k) {
        contract.supports.push_back(choice.experiments[static_cast<size_t>(k)].support());
        contract.hyperplanes.push_back(
            cost_interpolant(choice.experiments[static_cast<size_t>(k)], cost));
    }

    // The floor minimizes payment minus scaled hyperplane over the simplex;
    // affine objective, so the exact minimum sits at a vertex.
    double floor = std::numeric_limits<double>::infinity();
    for (Index k = 0; k < n; ++k) {
        const Vector& coeffs = contract.hyperplanes[static_cast<size_t>(k)].coefficients();
        for (Index i = 0; i < coeffs.size(); ++i)
            floor = std::min(floor, payments(k) - types.thetas(k) * coeffs(i));
    }
    contract.floor = floor;
    return contract;
}

double ResultsContract::operator()(const Belief& p) const {
    for (const auto& [q, pay] : support_payments)
        if (q.almost_equal(p)) return pay;
    return default_payment;
}

std::vector<AffineFunctional> rent_functionals(const ChoiceFunction& choice,
                                               const TypeSpace& types, const CostModel& cost) {
    const Index n = types.size();
    std::vector<AffineFunctional> s;
    s.push_back(AffineFunctional::zero(cost.dim()));
    for (Index j = 1; j < n; ++j) {
        AffineFunctional h =
            cost_interpolant(choice.experiments[static_cast<size_t>(j - 1)], cost);
        s.push_back(s.back() + (types.thetas(j - 1) - types.thetas(j)) * h);
    }
    return s;
}

ResultsContract build_results_contract(const ChoiceFunction& choice, const Vector& payments,
                                       const TypeSpace& types, const CostModel& cost,
                                       double floor_margin) {
    if (choice.size() != types.size() || payments.size() != types.size())
        throw DimensionMismatch("results contract: inconsistent sizes");
    for (Index k = 0; k < choice.size(); ++k)
        if (!choice.full_dimension[static_cast<size_t>(k)])
            throw NotFullDimension("type " + std::to_string(k + 1) +
                                   ": support must be an affinely independent set of |states| "
                                   "posteriors");
    require_disjoint_supports(choice);

    CheckResult sm = check_strong_c_monotone(choice, types, cost);
    if (!sm.passed()) {
        std::string msg = "choice function is not strongly c-monotone";
        if (!sm.witnesses.empty()) {
            const Violation& w = sm.witnesses.front();
            msg += ": " + w.requirement + " fails at posterior of type " +
                   std::to_string(w.i + 1) + " (c=" + std::to_string(w.lhs) +
                   ", bound=" + std::to_string(w.rhs) + ")";
        }
        throw NotStronglyCMonotone(msg);
    }

    ResultsContract contract = build_results_core(choice, types, cost, floor_margin);
    for (Index k = 0; k < types.size(); ++k) {
        const double expected =
            expected_payment(contract, choice.experiments[static_cast<size_t>(k)]);
        if (std::abs(expected - payments(k)) > 1e-9 * (1.0 + std::abs(payments(k))))
            throw NumericalFailure("results contract: expected payment for type " +
                                   std::to_string(k + 1) + " is " + std::to_string(expected) +
                                   ", wanted " + std::to_string(payments(k)));
    }
    return contract;
}

ResultsContract build_results_contract_unchecked(const ChoiceFunction& choice,
                                                 const TypeSpace& types, const CostModel& cost,
                                                 double floor_margin) {
    for (Index k = 0; k < choice.size(); ++k)
        if (!choice.full_dimension[static_cast<size_t>(k)])
            throw NotFullDimension("type " + std::to_string(k + 1) +
                                   ": support must be an affinely independent set of |states| "
                                   "posteriors");
    require_disjoint_supports(choice);
    return build_results_core(choice, types, cost, floor_margin);
}

double expected_payment(const ResultsContract& contract, const Experiment& tau) {
    double total = 0.0;
    for (Index i = 0; i < tau.size(); ++i)
        total += tau.probs()(i) * contract(tau.support()[static_cast<size_t>(i)]);
    return total;
}

}  // namespace contractlab
