#include "contractlab/monotonicity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace contractlab {

namespace {

double slack_for(double rhs) { return 1e-9 * (1.0 + std::abs(rhs)); }

void sort_by_gap(std::vector<Violation>& witnesses) {
    std::stable_sort(witnesses.begin(), witnesses.end(),
                     [](const Violation& a, const Violation& b) { return a.gap > b.gap; });
}

void require_full_dimension(const ChoiceFunction& choice) {
    for (size_t k = 0; k < choice.experiments.size(); ++k)
        if (!choice.full_dimension[k])
            throw NotFullDimension("type " + std::to_string(k + 1) +
                                   ": support is not a full-dimension affine basis");
}

std::vector<AffineFunctional> interpolants(const ChoiceFunction& choice, const CostModel& cost,
                                           Index upto) {
    std::vector<AffineFunctional> h;
    for (Index k = 0; k < upto; ++k)
        h.push_back(cost_interpolant(choice.experiments[static_cast<size_t>(k)], cost));
    return h;
}

}  // namespace

AffineFunctional cost_interpolant(const Experiment& tau, const CostModel& cost) {
    std::vector<std::pair<Belief, double>> anchors;
    anchors.reserve(static_cast<size_t>(tau.size()));
    for (const Belief& p : tau.support()) anchors.emplace_back(p, cost(p));
    return affine_from_graph(anchors);
}

CMonotoneResult check_c_monotone(const ChoiceFunction& choice, const CostModel& cost) {
    CMonotoneResult result;
    const Index n = choice.size();
    result.costs.resize(n);
    for (Index k = 0; k < n; ++k)
        result.costs(k) = cost_of_experiment(cost, choice.experiments[static_cast<size_t>(k)]);
    result.status = CheckStatus::pass;
    for (Index k = 0; k + 1 < n; ++k) {
        const double lower = result.costs(k);
        const double upper = result.costs(k + 1);
        if (upper < lower - slack_for(lower)) {
            result.status = CheckStatus::fail;
            result.witnesses.push_back(
                Violation{k, k + 1,
                          choice.experiments[static_cast<size_t>(k + 1)].support().front(), upper,
                          lower, lower - upper,
                          "C(X(theta_" + std::to_string(k + 2) + ")) >= C(X(theta_" +
                              std::to_string(k + 1) + "))"});
            break;  // first violating adjacent pair is the witness
        }
    }
    return result;
}

BlackwellResult check_blackwell_monotone(const ChoiceFunction& choice) {
    BlackwellResult result;
    const Index n = choice.size();
    result.comparability.assign(static_cast<size_t>(n),
                                std::vector<PairOrder>(static_cast<size_t>(n),
                                                       PairOrder::incomparable));
    result.status = CheckStatus::pass;
    for (Index i = 0; i < n; ++i) {
        for (Index j = i + 1; j < n; ++j) {
            const Experiment& low = choice.experiments[static_cast<size_t>(i)];
            const Experiment& high = choice.experiments[static_cast<size_t>(j)];
            if (!choice.non_redundant[static_cast<size_t>(j)]) result.exact = false;

            bool forward = true;  // support of the less efficient type nested in the hull
            std::vector<BlackwellWitness> outside;
            for (const Belief& p : low.support()) {
                HullCertificate cert = in_convex_hull(high.support(), p);
                if (!cert.member) {
                    forward = false;
                    outside.push_back(BlackwellWitness{i, j, p, cert.separator, cert.separation});
                }
            }
            bool backward = true;
            for (const Belief& p : high.support()) {
                if (!in_convex_hull(low.support(), p).member) {
                    backward = false;
                    break;
                }
            }
            PairOrder order = forward    ? PairOrder::more_informative
                              : backward ? PairOrder::less_informative
                                         : PairOrder::incomparable;
            result.comparability[static_cast<size_t>(i)][static_cast<size_t>(j)] = order;
            if (!forward) {
                result.status = CheckStatus::fail;
                for (auto& w : outside) result.witnesses.push_back(std::move(w));
            }
        }
    }
    if (!result.exact)
        result.note = "some supports are affinely dependent; containment is only a necessary "
                      "condition for those pairs";
    return result;
}

CheckResult check_strong_c_monotone(const ChoiceFunction& choice, const TypeSpace& types,
                                    const CostModel& cost) {
    require_full_dimension(choice);
    const Index n = choice.size();
    std::vector<AffineFunctional> h = interpolants(choice, cost, std::max<Index>(n - 1, 0));

    CheckResult result;
    result.status = CheckStatus::pass;
    for (Index i = 0; i < n; ++i) {
        for (Index j = i + 1; j < n; ++j) {
            const double denom = types.thetas(i) - types.thetas(j);
            AffineFunctional avg = AffineFunctional::zero(cost.dim());
            for (Index k = i; k < j; ++k)
                avg = avg + ((types.thetas(k) - types.thetas(k + 1)) / denom) *
                                h[static_cast<size_t>(k)];

            for (const Belief& p : choice.experiments[static_cast<size_t>(i)].support()) {
                const double lhs = cost(p);
                const double rhs = avg(p);
                if (lhs > rhs + slack_for(rhs)) {
                    result.status = CheckStatus::fail;
                    result.witnesses.push_back(
                        Violation{i, j, p, lhs, rhs, lhs - rhs,
                                  "c(p) <= weighted interpolant average on S_" +
                                      std::to_string(i + 1) + " (pair " + std::to_string(i + 1) +
                                      "," + std::to_string(j + 1) + ")"});
                }
            }
            for (const Belief& p : choice.experiments[static_cast<size_t>(j)].support()) {
                const double lhs = cost(p);
                const double rhs = avg(p);
                if (lhs < rhs - slack_for(rhs)) {
                    result.status = CheckStatus::fail;
                    result.witnesses.push_back(
                        Violation{j, i, p, lhs, rhs, rhs - lhs,
                                  "c(p) >= weighted interpolant average on S_" +
                                      std::to_string(j + 1) + " (pair " + std::to_string(i + 1) +
                                      "," + std::to_string(j + 1) + ")"});
                }
            }
        }
    }
    sort_by_gap(result.witnesses);
    return result;
}

CheckResult check_condition_n(const ChoiceFunction& choice, const CostModel& cost) {
    require_full_dimension(choice);
    const Index n = choice.size();
    std::vector<AffineFunctional> h = interpolants(choice, cost, std::max<Index>(n - 1, 0));

    CheckResult result;
    result.status = CheckStatus::pass;
    for (Index k = 0; k + 1 < n; ++k) {
        for (Index i = 0; i < n; ++i) {
            if (i == k) continue;
            for (const Belief& p : choice.experiments[static_cast<size_t>(i)].support()) {
                const double lhs = cost(p);
                const double rhs = h[static_cast<size_t>(k)](p);
                const bool below = i < k;  // less efficient supports sit under H_k
                const double gap = below ? lhs - rhs : rhs - lhs;
                if (gap > slack_for(rhs)) {
                    result.status = CheckStatus::fail;
                    result.witnesses.push_back(Violation{
                        i, k, p, lhs, rhs, gap,
                        std::string(below ? "c(p) <= H_" : "c(p) >= H_") +
                            std::to_string(k + 1) + " on S_" + std::to_string(i + 1)});
                }
            }
        }
    }
    sort_by_gap(result.witnesses);
    return result;
}

CheckResult check_condition_nadj(const ChoiceFunction& choice, const CostModel& cost) {
    require_full_dimension(choice);
    const Index n = choice.size();
    std::vector<AffineFunctional> h = interpolants(choice, cost, std::max<Index>(n - 1, 0));

    CheckResult result;
    result.status = CheckStatus::pass;
    for (Index k = 0; k + 1 < n; ++k) {
        for (Index i : {k - 1, k + 1}) {
            if (i < 0 || i >= n || i == k) continue;
            for (const Belief& p : choice.experiments[static_cast<size_t>(i)].support()) {
                const double lhs = cost(p);
                const double rhs = h[static_cast<size_t>(k)](p);
                const bool below = i < k;
                const double gap = below ? lhs - rhs : rhs - lhs;
                if (gap > slack_for(rhs)) {
                    result.status = CheckStatus::fail;
                    result.witnesses.push_back(Violation{
                        i, k, p, lhs, rhs, gap,
                        std::string(below ? "c(p) <= H_" : "c(p) >= H_") +
                            std::to_string(k + 1) + " on S_" + std::to_string(i + 1)});
                }
            }
        }
    }
    sort_by_gap(result.witnesses);
    return result;
}

SymmetryResult check_symmetric(const ChoiceFunction& choice, const CostModel& cost, double tol) {
    SymmetryResult result;
    const Index n = choice.size();
    result.levels.resize(n);
    result.spreads.resize(n);
    result.status = CheckStatus::pass;
    double worst = -1.0;
    for (Index k = 0; k < n; ++k) {
        const Experiment& e = choice.experiments[static_cast<size_t>(k)];
        double lo = std::numeric_limits<double>::infinity();
        double hi = -lo;
        double mean = 0.0;
        for (Index i = 0; i < e.size(); ++i) {
            const double c = cost(e.support()[static_cast<size_t>(i)]);
            lo = std::min(lo, c);
            hi = std::max(hi, c);
            mean += e.probs()(i) * c;
        }
        result.levels(k) = mean;
        result.spreads(k) = hi - lo;
        if (hi - lo > worst) {
            worst = hi - lo;
            result.worst_type = k;
        }
        if (hi - lo > tol) result.status = CheckStatus::fail;
    }
    return result;
}

CheckResult check_comp(const ChoiceFunction& choice) {
    for (size_t k = 0; k < choice.experiments.size(); ++k)
        if (!choice.non_redundant[k])
            throw DegenerateSupport("type " + std::to_string(k + 1) +
                                    ": support is affinely dependent");
    const Index n = choice.size();
    CheckResult result;
    result.status = CheckStatus::pass;
    for (Index i = 0; i < n; ++i) {
        for (Index j = i + 1; j < n; ++j) {
            const Experiment& low = choice.experiments[static_cast<size_t>(i)];
            for (const Belief& p : choice.experiments[static_cast<size_t>(j)].support()) {
                HullCertificate cert = in_convex_hull(low.support(), p);
                if (!cert.member) continue;
                const bool at_vertex =
                    std::any_of(low.support().begin(), low.support().end(),
                                [&](const Belief& q) { return q.almost_equal(p); });
                if (!at_vertex) {
                    result.status = CheckStatus::fail;
                    result.witnesses.push_back(Violation{
                        j, i, p, 0.0, 0.0, 0.0,
                        "posterior of S_" + std::to_string(j + 1) + " lies inside conv(S_" +
                            std::to_string(i + 1) + ") away from its vertices"});
                }
            }
        }
    }
    return result;
}

std::vector<Region> classify_regions(const Belief& p,
                                     const std::vector<AffineFunctional>& interpolants,
                                     const CostModel& cost, double tol) {
    std::vector<Region> regions;
    regions.reserve(interpolants.size());
    const double c = cost(p);
    for (const AffineFunctional& h : interpolants) {
        const double diff = c - h(p);
        regions.push_back(diff > tol ? Region::upper
                                     : (diff < -tol ? Region::lower : Region::boundary));
    }
    return regions;
}

MonotonicityReport run_monotonicity_checks(const ChoiceFunction& choice, const TypeSpace& types,
                                           const CostModel& cost) {
    MonotonicityReport report;
    report.c_monotone = check_c_monotone(choice, cost);
    report.blackwell = check_blackwell_monotone(choice);

    auto guarded = [&](auto&& check) -> CheckResult {
        try {
            return check();
        } catch (const NotFullDimension& e) {
            CheckResult r;
            r.status = CheckStatus::skipped;
            r.note = e.what();
            return r;
        }
    };
    report.strong_c = guarded([&] { return check_strong_c_monotone(choice, types, cost); });
    report.cond_n = guarded([&] { return check_condition_n(choice, cost); });
    report.cond_nadj = guarded([&] { return check_condition_nadj(choice, cost); });

    double cost_scale = 0.0;
    for (const Experiment& e : choice.experiments)
        for (const Belief& p : e.support()) cost_scale = std::max(cost_scale, std::abs(cost(p)));
    report.symmetric = check_symmetric(choice, cost, 1e-9 * (1.0 + cost_scale));

    try {
        report.comp = check_comp(choice);
    } catch (const DegenerateSupport& e) {
        report.comp.status = CheckStatus::skipped;
        report.comp.note = e.what();
    }

    report.chain_consistent =
        implication_chain_consistent(report, choice.size(), &report.chain_message);
    return report;
}

bool implication_chain_consistent(const MonotonicityReport& report, Index n_types,
                                  std::string* message) {
    auto fail = [&](const std::string& msg) {
        if (message) *message = msg;
        return false;
    };
    const bool sm_ran = report.strong_c.status != CheckStatus::skipped;
    if (report.cond_n.status == CheckStatus::pass && sm_ran && !report.strong_c.passed())
        return fail("nesting condition holds but the pairwise system fails");
    if (report.strong_c.passed() && report.cond_nadj.status != CheckStatus::skipped &&
        !report.cond_nadj.passed())
        return fail("pairwise system holds but adjacent nesting fails");
    if (report.strong_c.passed() && !report.c_monotone.passed())
        return fail("pairwise system holds but cost monotonicity fails");
    if (report.symmetric.passed() && report.c_monotone.passed() && sm_ran &&
        !report.strong_c.passed())
        return fail("symmetric and cost-monotone but the pairwise system fails");
    if (n_types == 2 && report.strong_c.passed() &&
        report.comp.status != CheckStatus::skipped && !report.comp.passed())
        return fail("two types: pairwise system holds but the extremeness ordering fails");
    if (message) message->clear();
    return true;
}

}  // namespace contractlab
