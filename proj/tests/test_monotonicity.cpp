#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "contractlab/instances.hpp"
#include "contractlab/monotonicity.hpp"
#include "contractlab/random.hpp"
#include "test_support.hpp"

using namespace contractlab;
using testsupport::belief;
using testsupport::experiment;

namespace {

struct Example2Fixture {
    TypeSpace types = make_type_space(Vector{{2.25, 2.0}}, Vector{{0.5, 0.5}});
    CostModel cost = CostModel::quadratic(Belief::uniform(3));
    ChoiceFunction choice;

    Example2Fixture() {
        std::vector<Experiment> exps;
        exps.push_back(experiment(
            {{0.5770, 0.0000, 0.4230}, {0.0001, 0.9998, 0.0001}, {0.0002, 0.0008, 0.9990}},
            {0.58, 0.33, 0.09}));
        exps.push_back(experiment(
            {{0.6799, 0.0001, 0.3200}, {0.0005, 0.9993, 0.0002}, {0.0004, 0.0170, 0.9827}},
            {0.49, 0.33, 0.18}));
        choice = make_choice_function(std::move(exps), Belief::uniform(3), 4e-3);
    }
};

ChoiceFunction example1_solved(const CostModel& cost, const TypeSpace& types) {
    DecisionProblem d = make_decision_problem({"w1", "w2", "w3"}, {"a1", "a2", "a3"},
                                              testsupport::example1_utility(),
                                              Belief::uniform(3));
    return solve_choice_function(d, types, cost);
}

}  // namespace

TEST_CASE("cost monotonicity") {
    Example2Fixture fx;
    SUBCASE("a constant choice function passes") {
        std::vector<Experiment> exps(2, fx.choice.experiments[0]);
        ChoiceFunction constant = make_choice_function(std::move(exps), Belief::uniform(3), 4e-3);
        CHECK(check_c_monotone(constant, fx.cost).passed());
    }
    SUBCASE("the example pair passes with the published costs") {
        CMonotoneResult r = check_c_monotone(fx.choice, fx.cost);
        CHECK(r.passed());
        CHECK(r.costs(0) == doctest::Approx(0.3832).epsilon(1e-3));
        CHECK(r.costs(1) == doctest::Approx(0.44678).epsilon(1e-3));
    }
    SUBCASE("swapping the type labels fails with the same pair as witness") {
        std::vector<Experiment> exps{fx.choice.experiments[1], fx.choice.experiments[0]};
        ChoiceFunction swapped = make_choice_function(std::move(exps), Belief::uniform(3), 4e-3);
        CMonotoneResult r = check_c_monotone(swapped, fx.cost);
        REQUIRE(r.failed());
        REQUIRE(r.witnesses.size() == 1);
        CHECK(r.witnesses[0].i == 0);
        CHECK(r.witnesses[0].j == 1);
    }
}

TEST_CASE("blackwell monotonicity") {
    SUBCASE("nested supports pass by construction") {
        std::vector<Belief> wide{belief({0.7, 0.15, 0.15}), belief({0.15, 0.7, 0.15}),
                                 belief({0.1, 0.15, 0.75})};
        Vector probs = barycentric_coords(wide, Belief::uniform(3)).alpha;
        std::vector<Experiment> exps;
        exps.push_back(Experiment::point_mass(Belief::uniform(3)));
        exps.emplace_back(std::move(wide), std::move(probs));
        ChoiceFunction cf = make_choice_function(std::move(exps), Belief::uniform(3), 1e-9);
        BlackwellResult r = check_blackwell_monotone(cf);
        CHECK(r.passed());
        CHECK(r.exact);
        CHECK(r.comparability[0][1] == PairOrder::more_informative);
    }
    SUBCASE("a constructed mean-preserving spread passes") {
        // Split each coarse support point into a centered pair; the fine
        // experiment then majorizes the coarse one by construction.
        Belief a = belief({0.5, 0.3, 0.2});
        Belief b = belief({0.1, 0.5, 0.4});
        Experiment coarse({a, b}, Vector{{0.5, 0.5}});
        Vector d1{{0.06, -0.03, -0.03}};
        Vector d2{{0.02, 0.03, -0.05}};
        Experiment fine({Belief(a.weights() + d1), Belief(a.weights() - d1),
                         Belief(b.weights() + d2), Belief(b.weights() - d2)},
                        Vector{{0.25, 0.25, 0.25, 0.25}});
        Belief prior(coarse.mean());
        std::vector<Experiment> exps{coarse, fine};
        ChoiceFunction cf = make_choice_function(std::move(exps), prior, 1e-9);
        BlackwellResult r = check_blackwell_monotone(cf);
        CHECK(r.comparability[0][1] == PairOrder::more_informative);
        CHECK_FALSE(r.exact);  // the 4-point support is affinely dependent
    }
    SUBCASE("the solved worked example fails with two outside witnesses") {
        TypeSpace types = make_type_space(Vector{{2.25, 2.0}}, Vector{{0.5, 0.5}});
        CostModel cost = CostModel::shannon_entropy(Belief::uniform(3));
        ChoiceFunction cf = example1_solved(cost, types);
        BlackwellResult r = check_blackwell_monotone(cf);
        REQUIRE(r.failed());
        CHECK(r.exact);
        REQUIRE(r.witnesses.size() == 2);
        Belief p1p = belief({0.0491, 0.7308, 0.2201});
        Belief p1pp = belief({0.3626, 0.1475, 0.4899});
        for (const BlackwellWitness& w : r.witnesses) {
            CHECK((w.p.distance(p1p) < 5e-3 || w.p.distance(p1pp) < 5e-3));
            CHECK(w.separation > 0);
            // The separating functional strictly separates the witness.
            const double at_w = w.separator(w.p);
            for (const Belief& q : cf.experiments[1].support())
                CHECK(at_w > w.separator(q) + 1e-10);
        }
    }
}

TEST_CASE("strong c-monotonicity on the worked examples") {
    SUBCASE("example 1 passes") {
        TypeSpace types = make_type_space(Vector{{2.25, 2.0}}, Vector{{0.5, 0.5}});
        CostModel cost = CostModel::shannon_entropy(Belief::uniform(3));
        ChoiceFunction cf = example1_solved(cost, types);
        CHECK(check_strong_c_monotone(cf, types, cost).passed());
        CHECK(check_condition_n(cf, cost).passed());
        CHECK(check_condition_nadj(cf, cost).passed());
    }
    SUBCASE("example 2 fails at the third posterior of the efficient type") {
        Example2Fixture fx;
        CheckResult r = check_strong_c_monotone(fx.choice, fx.types, fx.cost);
        REQUIRE(r.failed());
        REQUIRE(!r.witnesses.empty());
        // Primary witness: the largest gap, at q2'' with c < H_1 where the
        // definition requires c >= H_1 on the efficient support.
        const Violation& top = r.witnesses.front();
        CHECK(top.i == 1);
        CHECK(top.p.distance(belief({0.0004, 0.0170, 0.9827})) <= 1e-4);
        CHECK(top.lhs == doctest::Approx(0.63246).epsilon(1e-3));
        CHECK(top.rhs == doctest::Approx(0.66452).epsilon(1e-3));
        CHECK(top.lhs < top.rhs);
        CHECK(top.requirement.find(">=") != std::string::npos);
    }
}

TEST_CASE("full-dimension precondition throws") {
    std::vector<Experiment> exps;
    exps.push_back(experiment({{0.6, 0.2, 0.2}, {0.2, 0.6, 0.2}}, {0.5, 0.5}));
    Belief prior(exps[0].mean());
    exps.push_back(exps[0]);
    ChoiceFunction cf = make_choice_function(std::move(exps), prior, 1e-9);
    TypeSpace types = make_type_space(Vector{{2.0, 1.0}}, Vector{{0.5, 0.5}});
    CostModel cost = CostModel::quadratic(prior);
    CHECK_THROWS_AS(check_strong_c_monotone(cf, types, cost), NotFullDimension);
    CHECK_THROWS_AS(check_condition_n(cf, cost), NotFullDimension);
    MonotonicityReport report = run_monotonicity_checks(cf, types, cost);
    CHECK(report.strong_c.status == CheckStatus::skipped);
    CHECK(report.chain_consistent);
}

TEST_CASE("symmetry verdicts") {
    CostModel cost = CostModel::quadratic(Belief::uniform(3));
    SUBCASE("coordinate rotations are symmetric by construction") {
        ConstructedInstance inst = random_symmetric_instance(17, 3, 2);
        SymmetryResult r = check_symmetric(inst.choice, inst.cost, 1e-9);
        CHECK(r.passed());
    }
    SUBCASE("the worked example's inefficient experiment is asymmetric") {
        TypeSpace types = make_type_space(Vector{{2.25, 2.0}}, Vector{{0.5, 0.5}});
        CostModel ent = CostModel::shannon_entropy(Belief::uniform(3));
        ChoiceFunction cf = example1_solved(ent, types);
        SymmetryResult r = check_symmetric(cf, ent, 1e-9);
        CHECK_FALSE(r.passed());
        CHECK(r.spreads(0) > 0.1);  // the three entropy costs differ widely
    }
    SUBCASE("a point mass is trivially symmetric") {
        std::vector<Experiment> exps{Experiment::point_mass(Belief::uniform(3))};
        ChoiceFunction cf = make_choice_function(std::move(exps), Belief::uniform(3), 1e-9);
        SymmetryResult r = check_symmetric(cf, cost, 1e-9);
        CHECK(r.passed());
        CHECK(r.spreads(0) == 0.0);
    }
}

TEST_CASE("extremeness ordering (comp)") {
    SUBCASE("example 2: the efficient support meets the hull away from its vertices") {
        // The published q2'' lies just inside conv(S_1); the definition
        // therefore fails even though the source text asserts otherwise.
        Example2Fixture fx;
        CheckResult r = check_comp(fx.choice);
        REQUIRE(r.failed());
        REQUIRE(r.witnesses.size() == 1);
        CHECK(r.witnesses[0].p.distance(belief({0.0004, 0.0170, 0.9827})) <= 1e-4);
    }
    SUBCASE("example 1 passes") {
        TypeSpace types = make_type_space(Vector{{2.25, 2.0}}, Vector{{0.5, 0.5}});
        CostModel cost = CostModel::shannon_entropy(Belief::uniform(3));
        CHECK(check_comp(example1_solved(cost, types)).passed());
    }
    SUBCASE("strictly nested supports fail") {
        std::vector<Experiment> exps;
        exps.push_back(experiment({{0.8, 0.1, 0.1}, {0.1, 0.8, 0.1}, {0.1, 0.1, 0.8}},
                                  {1.0 / 3, 1.0 / 3, 1.0 / 3}));
        exps.push_back(experiment({{0.5, 0.25, 0.25}, {0.25, 0.5, 0.25}, {0.25, 0.25, 0.5}},
                                  {1.0 / 3, 1.0 / 3, 1.0 / 3}));
        ChoiceFunction cf = make_choice_function(std::move(exps), Belief::uniform(3), 1e-9);
        CHECK(check_comp(cf).failed());
    }
}

TEST_CASE("regions classify supports onto their own boundary") {
    TypeSpace types = make_type_space(Vector{{2.25, 2.0}}, Vector{{0.5, 0.5}});
    CostModel cost = CostModel::shannon_entropy(Belief::uniform(3));
    ChoiceFunction cf = example1_solved(cost, types);
    std::vector<AffineFunctional> h{cost_interpolant(cf.experiments[0], cost)};
    for (const Belief& p : cf.experiments[0].support())
        CHECK(classify_regions(p, h, cost, 1e-7)[0] == Region::boundary);
    for (const Belief& p : cf.experiments[1].support())
        CHECK(classify_regions(p, h, cost, 1e-7)[0] == Region::upper);
}

TEST_CASE("two-type equivalence of the three conditions") {
    Rng rng(5150);
    int checked = 0;
    for (int trial = 0; trial < 30; ++trial) {
        ConstructedInstance inst = random_full_dimension_instance(
            rng.next(), 2 + trial % 3, 2, CostModel::Kind::quadratic);
        CheckResult sm = check_strong_c_monotone(inst.choice, inst.types, inst.cost);
        CheckResult n = check_condition_n(inst.choice, inst.cost);
        CheckResult nadj = check_condition_nadj(inst.choice, inst.cost);
        CHECK(sm.passed() == n.passed());
        CHECK(sm.passed() == nadj.passed());
        ++checked;
    }
    CHECK(checked == 30);
}

TEST_CASE("binary states: pairwise system matches the informativeness order") {
    Rng rng(777);
    int agreements = 0, passes = 0;
    for (int trial = 0; trial < 60; ++trial) {
        ConstructedInstance inst =
            random_full_dimension_instance(rng.next(), 2, 2, CostModel::Kind::quadratic);
        CheckResult sm = check_strong_c_monotone(inst.choice, inst.types, inst.cost);
        BlackwellResult bw = check_blackwell_monotone(inst.choice);
        // Skip borderline geometry where tolerance could flip a verdict.
        bool borderline = false;
        for (const Violation& v : sm.witnesses)
            if (v.gap < 1e-6) borderline = true;
        if (borderline) continue;
        CHECK(sm.passed() == bw.passed());
        agreements += (sm.passed() == bw.passed());
        passes += sm.passed();
    }
    CHECK(agreements > 0);
    CHECK(passes > 0);  // the family should produce both outcomes
}

TEST_CASE("implication chain holds on the full report") {
    Rng rng(31337);
    for (int trial = 0; trial < 25; ++trial) {
        ConstructedInstance inst = random_full_dimension_instance(
            rng.next(), 2 + trial % 3, 2 + trial % 3, CostModel::Kind::quadratic);
        MonotonicityReport report = run_monotonicity_checks(inst.choice, inst.types, inst.cost);
        CHECK(report.chain_consistent);
    }
    for (int trial = 0; trial < 10; ++trial) {
        ConstructedInstance inst = random_symmetric_instance(1000 + trial, 3, 3);
        MonotonicityReport report = run_monotonicity_checks(inst.choice, inst.types, inst.cost);
        CHECK(report.chain_consistent);
        CHECK(report.symmetric.passed());
        CHECK(report.strong_c.passed());  // symmetric + c-monotone implies the system
    }
}

TEST_CASE("adjacent nesting does not imply the pairwise system with three types") {
    // Constructed separation: S1 is an obtuse triangle whose circumdisk
    // (the sublevel body of its interpolant under quadratic cost) is much
    // larger than S2's, and the single S3 posterior at the x-axis sits
    // inside the former but outside the latter. All adjacent nesting holds
    // with margins around 1e-2, yet the (1,3) pair fails there by 0.0595.
    auto pt = [](double x, double y) {
        Vector w = Vector::Constant(3, 1.0 / 3);
        w += x * (Vector{{2.0, -1.0, -1.0}} / std::sqrt(6.0));
        w += y * (Vector{{0.0, 1.0, -1.0}} / std::sqrt(2.0));
        return Belief(w);
    };
    Belief prior = Belief::uniform(3);
    auto make = [&](std::vector<Belief> support) {
        Vector probs = barycentric_coords(support, prior).alpha;
        return Experiment(std::move(support), std::move(probs));
    };
    std::vector<Experiment> exps;
    exps.push_back(make({pt(0.105, 0.29), pt(-0.03, 0.0), pt(0.105, -0.29)}));
    exps.push_back(make({pt(-0.23, 0.0), pt(0.08, 0.31), pt(0.08, -0.31)}));
    exps.push_back(make({pt(0.42, 0.0), pt(-0.35, 0.2), pt(-0.35, -0.2)}));
    ChoiceFunction cf = make_choice_function(std::move(exps), prior, 1e-9);
    TypeSpace types = make_type_space(Vector{{3.0, 2.0, 1.0}},
                                      Vector{{1.0 / 3, 1.0 / 3, 1.0 / 3}});
    CostModel cost = CostModel::quadratic(prior);

    CheckResult nadj = check_condition_nadj(cf, cost);
    CheckResult sm = check_strong_c_monotone(cf, types, cost);
    CheckResult n = check_condition_n(cf, cost);
    CHECK(nadj.passed());
    REQUIRE(sm.failed());
    CHECK_FALSE(n.passed());  // (n) => (sm), so (n) must fail here too
    REQUIRE(!sm.witnesses.empty());
    const Violation& w = sm.witnesses.front();
    CHECK(w.i == 2);
    CHECK(w.j == 0);
    CHECK(w.gap == doctest::Approx(0.0595).epsilon(5e-2));
    CHECK(w.p.almost_equal(pt(0.42, 0.0), 1e-9));

    // The same instance keeps every report-level implication intact.
    MonotonicityReport report = run_monotonicity_checks(cf, types, cost);
    CHECK(report.chain_consistent);
}
