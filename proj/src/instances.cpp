#include "contractlab/instances.hpp"

#include <cstdlib>

#include "contractlab/random.hpp"

namespace contractlab {

namespace {

TypeSpace random_types(Rng& rng, Index n_types) {
    for (int attempt = 0; attempt < 200; ++attempt) {
        Vector thetas(n_types);
        for (Index i = 0; i < n_types; ++i) thetas(i) = rng.uniform(0.5, 3.0);
        std::sort(thetas.data(), thetas.data() + n_types, std::greater<double>());
        bool separated = true;
        for (Index i = 0; i + 1 < n_types; ++i)
            if (thetas(i) - thetas(i + 1) < 0.05) separated = false;
        if (!separated) continue;
        Vector pmf(n_types);
        for (Index i = 0; i < n_types; ++i) pmf(i) = rng.uniform(0.1, 1.0);
        pmf /= pmf.sum();
        TypeSpace types = make_type_space(std::move(thetas), std::move(pmf));
        if (virtual_types(types).strictly_increasing) return types;
    }
    throw Error("random_types: could not draw strictly increasing virtual types");
}

CostModel make_cost(CostModel::Kind kind, const Belief& prior) {
    switch (kind) {
        case CostModel::Kind::shannon_entropy: return CostModel::shannon_entropy(prior);
        case CostModel::Kind::quadratic: return CostModel::quadratic(prior);
        case CostModel::Kind::tabulated: break;
    }
    throw Error("random instances use entropy or quadratic costs");
}

}  // namespace

DecisionInstance random_decision_instance(std::uint64_t seed, Index n_states, Index n_types,
                                          CostModel::Kind kind) {
    Rng rng(seed);
    const Index n_actions = n_states + static_cast<Index>(rng.uniform_int(3));
    Matrix utility(n_actions, n_states);
    for (Index a = 0; a < n_actions; ++a)
        for (Index s = 0; s < n_states; ++s) utility(a, s) = rng.uniform(0.0, 5.0);
    Belief prior = rng.belief(n_states, 0.5 / static_cast<double>(n_states));

    std::vector<std::string> states, actions;
    for (Index s = 0; s < n_states; ++s) states.push_back("w" + std::to_string(s + 1));
    for (Index a = 0; a < n_actions; ++a) actions.push_back("a" + std::to_string(a + 1));

    DecisionProblem problem =
        make_decision_problem(std::move(states), std::move(actions), std::move(utility),
                              std::move(prior));
    TypeSpace types = random_types(rng, n_types);
    CostModel cost = make_cost(kind, problem.prior);
    return DecisionInstance{std::move(problem), std::move(types), std::move(cost)};
}

ConstructedInstance random_symmetric_instance(std::uint64_t seed, Index dim, Index n_types) {
    Rng rng(seed);
    Belief prior = Belief::uniform(dim);
    CostModel cost = CostModel::quadratic(prior);
    TypeSpace types = random_types(rng, n_types);

    for (int attempt = 0; attempt < 500; ++attempt) {
        // Radii increasing toward efficient types keep the costs monotone.
        Vector radii(n_types);
        for (Index k = 0; k < n_types; ++k)
            radii(k) = 0.25 + 0.75 * (static_cast<double>(k) + rng.uniform(0.1, 0.9)) /
                                  static_cast<double>(n_types);
        bool separated = true;
        for (Index k = 0; k + 1 < n_types; ++k)
            if (radii(k + 1) - radii(k) < 0.03) separated = false;
        if (!separated) continue;

        Belief base = rng.belief(dim, 0.02);
        std::vector<Experiment> experiments;
        bool ok = true;
        for (Index k = 0; k < n_types && ok; ++k) {
            std::vector<Belief> support;
            for (Index shift = 0; shift < dim; ++shift) {
                Vector w(dim);
                for (Index i = 0; i < dim; ++i) {
                    const Index src = (i + shift) % dim;
                    w(i) = prior[i] + radii(k) * (base[src] - prior[src]);
                }
                if (w.minCoeff() <= 1e-6) {
                    ok = false;
                    break;
                }
                support.emplace_back(w);
            }
            if (!ok) break;
            for (size_t a = 0; a < support.size() && ok; ++a)
                for (size_t b = a + 1; b < support.size(); ++b)
                    if (support[a].almost_equal(support[b], 1e-3)) ok = false;
            if (ok && !affinely_independent(support)) ok = false;
            if (ok)
                experiments.emplace_back(std::move(support),
                                         Vector::Constant(dim, 1.0 / static_cast<double>(dim)));
        }
        if (!ok) continue;
        ChoiceFunction choice = make_choice_function(std::move(experiments), prior, 1e-9);
        if (!choice.all_full_dimension()) continue;
        return ConstructedInstance{prior, std::move(types), std::move(cost), std::move(choice)};
    }
    throw Error("random_symmetric_instance: construction failed");
}

ConstructedInstance random_full_dimension_instance(std::uint64_t seed, Index dim, Index n_types,
                                                   CostModel::Kind kind) {
    Rng rng(seed);
    Belief prior = rng.belief(dim, 0.8 / static_cast<double>(dim));
    CostModel cost = make_cost(kind, prior);
    TypeSpace types = random_types(rng, n_types);

    std::vector<Experiment> experiments;
    std::vector<Belief> used;
    for (Index k = 0; k < n_types; ++k) {
        bool placed = false;
        for (int attempt = 0; attempt < 500 && !placed; ++attempt) {
            std::vector<Belief> support;
            for (Index i = 0; i < dim; ++i) support.push_back(rng.belief(dim, 0.01));
            if (!affinely_independent(support)) continue;
            bool clear = true;
            for (size_t a = 0; a < support.size() && clear; ++a) {
                for (const Belief& q : used)
                    if (support[a].almost_equal(q, 2e-2)) clear = false;
                for (size_t b = a + 1; b < support.size(); ++b)
                    if (support[a].almost_equal(support[b], 2e-2)) clear = false;
            }
            if (!clear) continue;
            Vector alpha = barycentric_coords(support, prior).alpha;
            if (alpha.minCoeff() < 0.05) continue;  // prior strictly inside the hull
            used.insert(used.end(), support.begin(), support.end());
            experiments.emplace_back(std::move(support), std::move(alpha));
            placed = true;
        }
        if (!placed) throw Error("random_full_dimension_instance: construction failed");
    }
    ChoiceFunction choice = make_choice_function(std::move(experiments), prior, 1e-9);
    return ConstructedInstance{std::move(prior), std::move(types), std::move(cost),
                               std::move(choice)};
}

std::uint64_t property_suite_seed() {
    if (const char* env = std::getenv("CONTRACT_LAB_SEED")) {
        char* end = nullptr;
        const unsigned long long v = std::strtoull(env, &end, 10);
        if (end && *end == '\0') return static_cast<std::uint64_t>(v);
    }
    return 20250811ULL;
}

}  // namespace contractlab
