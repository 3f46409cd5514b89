#include "contractlab/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace contractlab {

namespace {

constexpr int kRefineFactor = 8;

double slack_for(double reference) { return 1e-9 * (1.0 + std::abs(reference)); }

std::vector<Belief> payment_map_beliefs(const ResultsContract& contract) {
    std::vector<Belief> out;
    out.reserve(contract.support_payments.size());
    for (const auto& [p, pay] : contract.support_payments) {
        (void)pay;
        out.push_back(p);
    }
    return out;
}

}  // namespace

AffineFunctional secant_functional(const ResultsContract& contract, double theta,
                                   const std::vector<Belief>& support, const CostModel& cost) {
    if (support.empty()) throw Error("secant_functional: empty support");
    if (static_cast<Index>(support.size()) != support[0].dim())
        throw DimensionMismatch("secant_functional: support must have |states| posteriors");
    std::vector<std::pair<Belief, double>> anchors;
    anchors.reserve(support.size());
    for (const Belief& p : support) anchors.emplace_back(p, contract(p) - theta * cost(p));
    return affine_from_graph(anchors);
}

std::vector<SecantCheck> check_secant_condition(const ChoiceFunction& choice,
                                                const ResultsContract& contract,
                                                const TypeSpace& types, const CostModel& cost,
                                                int grid_resolution) {
    for (Index k = 0; k < choice.size(); ++k)
        if (!choice.full_dimension[static_cast<size_t>(k)])
            throw NotFullDimension("secant condition: type " + std::to_string(k + 1) +
                                   " lacks a full-dimension support");
    const Index dim = cost.dim();
    std::vector<Belief> base_points = simplex_grid(dim, grid_resolution);
    for (Index i = 0; i < dim; ++i) base_points.push_back(Belief::vertex(dim, i));
    for (const Belief& p : payment_map_beliefs(contract)) base_points.push_back(p);

    std::vector<SecantCheck> checks;
    for (Index k = 0; k < types.size(); ++k) {
        const double theta = types.thetas(k);
        SecantCheck check;
        check.secant = secant_functional(
            contract, theta, choice.experiments[static_cast<size_t>(k)].support(), cost);

        auto payoff = [&](const Belief& p) { return contract(p) - theta * cost(p); };
        auto test_point = [&](const Belief& p) {
            const double s = check.secant(p);
            const double u = payoff(p);
            if (u > s + slack_for(s)) {
                check.passed = false;
                check.witnesses.push_back(SecantViolation{p, s, u, u - s});
            }
        };
        for (const Belief& p : base_points) test_point(p);

        // Off the payment map the margin s_k + theta*c - default is convex;
        // bracket its minimum by refining around the grid argmin twice.
        auto margin = [&](const Belief& p) { return check.secant(p) + theta * cost(p); };
        Belief focus = base_points.front();
        double best = std::numeric_limits<double>::infinity();
        for (const Belief& p : base_points) {
            const double m = margin(p);
            if (m < best) {
                best = m;
                focus = p;
            }
        }
        int res = grid_resolution;
        for (int level = 0; level < 2; ++level) {
            res *= kRefineFactor;
            Belief next = focus;
            double local_best = std::numeric_limits<double>::infinity();
            for (const Belief& p : local_simplex_grid(focus, res, kRefineFactor)) {
                test_point(p);
                const double m = margin(p);
                if (m < local_best) {
                    local_best = m;
                    next = p;
                }
            }
            focus = next;
        }

        std::stable_sort(
            check.witnesses.begin(), check.witnesses.end(),
            [](const SecantViolation& a, const SecantViolation& b) { return a.gap > b.gap; });
        checks.push_back(std::move(check));
    }
    return checks;
}

Experiment construct_deviation(const std::vector<Belief>& support, const Belief& q,
                               const Belief& prior) {
    const Index n = prior.dim();
    if (static_cast<Index>(support.size()) != n)
        throw DimensionMismatch("construct_deviation: support must have |states| posteriors");
    Vector lambda = barycentric_coords(support, prior).alpha;
    for (Index i = 0; i < n; ++i)
        if (!(lambda(i) > 0.0))
            throw InvalidGeometry(
                "construct_deviation: prior must lie strictly inside the support hull");
    Vector mu = barycentric_coords(support, q).alpha;

    Index drop = -1;
    double best_ratio = std::numeric_limits<double>::infinity();
    for (Index i = 0; i < n; ++i) {
        if (mu(i) > 0.0) {
            const double ratio = lambda(i) / mu(i);
            if (ratio < best_ratio) {  // ties keep the lowest index
                best_ratio = ratio;
                drop = i;
            }
        }
    }
    if (drop < 0)
        throw InvalidGeometry("construct_deviation: no positive barycentric weight for q");

    std::vector<std::pair<Belief, double>> atoms;
    atoms.emplace_back(q, lambda(drop) / mu(drop));
    for (Index i = 0; i < n; ++i) {
        if (i == drop) continue;
        const double w = lambda(i) - (mu(i) / mu(drop)) * lambda(drop);
        if (w > 1e-12) atoms.emplace_back(support[static_cast<size_t>(i)], w);
    }
    std::sort(atoms.begin(), atoms.end(),
              [](const auto& a, const auto& b) { return a.first.lex_less(b.first); });
    std::vector<Belief> dev_support;
    Vector probs(static_cast<Index>(atoms.size()));
    for (size_t i = 0; i < atoms.size(); ++i) {
        dev_support.push_back(atoms[i].first);
        probs(static_cast<Index>(i)) = atoms[i].second;
    }
    probs /= probs.sum();
    return Experiment(std::move(dev_support), std::move(probs));
}

BestResponse best_response(const ResultsContract& contract, double theta, const CostModel& cost,
                           const Belief& prior, int grid_resolution) {
    BeliefObjective payoff = [&contract, &cost, theta](const Belief& p) {
        return contract(p) - theta * cost(p);
    };
    ConcavifyResult result =
        concavify(payoff, prior, grid_resolution, payment_map_beliefs(contract));
    return BestResponse{std::move(result.experiment), result.value};
}

BestResponse best_response(const ScreeningResultsContract& contract, Index reported_type,
                           double theta, const CostModel& cost, const Belief& prior,
                           int grid_resolution) {
    BeliefObjective payoff = [&contract, &cost, theta, reported_type](const Belief& p) {
        return contract.payment(reported_type, p) - theta * cost(p);
    };
    ConcavifyResult result = concavify(payoff, prior, grid_resolution,
                                       contract.supports[static_cast<size_t>(reported_type)]);
    return BestResponse{std::move(result.experiment), result.value};
}

AuditReport audit_contract(const DecisionProblem& problem, const TypeSpace& types,
                           const CostModel& cost, const ChoiceFunction& choice,
                           const ResultsContract& contract, int grid_resolution) {
    AuditReport report;
    Vector target;
    try {
        target = payments_T_star(choice, types, cost);
    } catch (const NotCMonotone&) {
        report.payment_identity_applicable = false;
        report.detail = "choice function is not cost-monotone; cheapest-payment identity skipped";
    }

    std::vector<SecantCheck> secant =
        check_secant_condition(choice, contract, types, cost, grid_resolution);

    bool all_ok = true;
    for (Index k = 0; k < types.size(); ++k) {
        const Experiment& suggested = choice.experiments[static_cast<size_t>(k)];
        TypeAudit audit;
        audit.violations = secant[static_cast<size_t>(k)].witnesses;
        audit.truthful_payoff = expected_payment(contract, suggested) -
                                types.thetas(k) * cost_of_experiment(cost, suggested);
        BestResponse br =
            best_response(contract, types.thetas(k), cost, problem.prior, grid_resolution);
        audit.best_response_value = br.value;
        audit.best_response_experiment = std::move(br.experiment);
        const bool secant_ok = secant[static_cast<size_t>(k)].passed;
        const bool br_ok = audit.best_response_value <=
                           audit.truthful_payoff + 1e-6 * (1.0 + std::abs(audit.truthful_payoff));
        audit.ic = secant_ok && br_ok;

        audit.expected_pay = expected_payment(contract, suggested);
        if (report.payment_identity_applicable) {
            audit.target_pay = target(k);
            audit.payment_ok = std::abs(audit.expected_pay - audit.target_pay) <=
                               1e-9 * (1.0 + std::abs(audit.target_pay));
        }
        if (!audit.ic)
            audit.detail = secant_ok ? "profitable deviation found by the best-response oracle"
                                     : "secant condition violated";
        all_ok = all_ok && audit.ic && audit.payment_ok;
        report.per_type.push_back(std::move(audit));
    }
    report.passed = all_ok;
    return report;
}

AuditReport audit_contract(const DecisionProblem& problem, const TypeSpace& types,
                           const CostModel& cost, const ChoiceFunction& choice,
                           const ScreeningResultsContract& contract, int grid_resolution) {
    AuditReport report;
    const Index n = types.size();
    const Index dim = cost.dim();

    // Pointwise obedience chain: the paid payoff never exceeds the lump sum
    // minus the scaled hyperplane, at any grid point or vertex.
    std::vector<Belief> points = simplex_grid(dim, std::min(grid_resolution, 64));
    for (Index i = 0; i < dim; ++i) points.push_back(Belief::vertex(dim, i));
    for (const auto& support : contract.supports)
        for (const Belief& p : support) points.push_back(p);

    bool all_ok = true;
    for (Index k = 0; k < n; ++k) {
        const double theta = types.thetas(k);
        TypeAudit audit;
        const Experiment& suggested = choice.experiments[static_cast<size_t>(k)];
        audit.truthful_payoff = contract.on_support_payments(k) -
                                theta * cost_of_experiment(cost, suggested);

        for (const Belief& p : points) {
            const double lhs = contract.payment(k, p) - theta * cost(p);
            const double rhs = contract.on_support_payments(k) -
                               theta * contract.hyperplanes[static_cast<size_t>(k)](p);
            if (lhs > rhs + slack_for(rhs)) {
                audit.ic = false;
                audit.violations.push_back(SecantViolation{p, rhs, lhs, lhs - rhs});
            }
        }

        // Best response over every report, including dishonest ones.
        double best_value = -std::numeric_limits<double>::infinity();
        for (Index r = 0; r < n; ++r) {
            BestResponse br =
                best_response(contract, r, theta, cost, problem.prior, grid_resolution);
            if (br.value > best_value) {
                best_value = br.value;
                audit.best_response_experiment = std::move(br.experiment);
            }
        }
        audit.best_response_value = best_value;
        if (best_value > audit.truthful_payoff + 1e-8 * (1.0 + std::abs(audit.truthful_payoff)))
            audit.ic = false;

        audit.expected_pay = 0.0;
        for (Index i = 0; i < suggested.size(); ++i)
            audit.expected_pay +=
                suggested.probs()(i) *
                contract.payment(k, suggested.support()[static_cast<size_t>(i)]);
        audit.target_pay = contract.on_support_payments(k);
        audit.payment_ok = std::abs(audit.expected_pay - audit.target_pay) <=
                           1e-9 * (1.0 + std::abs(audit.target_pay));
        if (!audit.ic) audit.detail = "obedience or honesty violated";
        all_ok = all_ok && audit.ic && audit.payment_ok;
        report.per_type.push_back(std::move(audit));
    }
    report.passed = all_ok;
    return report;
}

}  // namespace contractlab
