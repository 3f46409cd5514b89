#include "contractlab/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "contractlab/random.hpp"

namespace contractlab {

namespace {

constexpr double kFullSupportTol = 0.0;  // strictly positive prior required

unsigned long long binom(unsigned long long a, unsigned long long b) {
    if (b > a) return 0;
    b = std::min(b, a - b);
    unsigned long long r = 1;
    for (unsigned long long i = 1; i <= b; ++i) r = r * (a - b + i) / i;
    return r;
}

// Number of grid beliefs of the given dimension whose integer coordinates
// sum to `total`.
unsigned long long composition_count(Index dim, int total) {
    return binom(static_cast<unsigned long long>(total + dim - 1),
                 static_cast<unsigned long long>(dim - 1));
}

// Rank of an integer composition in the simplex_grid order (first coordinate
// descending).
Index composition_rank(const std::vector<int>& k, int total) {
    Index rank = 0;
    int remaining = total;
    const Index d = static_cast<Index>(k.size());
    for (Index i = 0; i + 1 < d; ++i) {
        for (int t = remaining; t > k[static_cast<size_t>(i)]; --t)
            rank += static_cast<Index>(composition_count(d - i - 1, remaining - t));
        remaining -= k[static_cast<size_t>(i)];
    }
    return rank;
}

}  // namespace

DecisionProblem make_decision_problem(std::vector<std::string> states,
                                      std::vector<std::string> actions, Matrix utility,
                                      Belief prior) {
    const Index n = static_cast<Index>(states.size());
    const Index a = static_cast<Index>(actions.size());
    if (utility.rows() != a || utility.cols() != n)
        throw DimensionMismatch("decision problem: utility matrix must be |actions| x |states|");
    if (prior.dim() != n)
        throw DimensionMismatch("decision problem: prior dimension mismatch");
    for (Index i = 0; i < n; ++i)
        if (prior[i] <= kFullSupportTol)
            throw Error("decision problem: prior must have full support");
    if (!utility.allFinite()) throw Error("decision problem: non-finite utilities");
    return DecisionProblem{std::move(states), std::move(actions), std::move(utility),
                           std::move(prior)};
}

ValueResult value_function(const DecisionProblem& problem, const Belief& p) {
    if (p.dim() != problem.n_states())
        throw DimensionMismatch("value_function: belief dimension mismatch");
    Vector expected = problem.utility * p.weights();
    ValueResult result;
    result.value = expected.maxCoeff();
    for (Index a = 0; a < expected.size(); ++a)
        if (expected(a) >= result.value - 1e-10) result.argmax.push_back(a);
    return result;
}

double entropy(const Belief& p, double log_base) {
    double h = 0.0;
    for (Index i = 0; i < p.dim(); ++i) {
        const double x = std::max(p[i], 1e-300);
        if (p[i] > 0.0) h -= p[i] * std::log(x);
    }
    return h / std::log(log_base);
}

CostModel CostModel::shannon_entropy(Belief reference, double log_base) {
    if (!(log_base > 1.0)) throw Error("shannon_entropy: log base must exceed 1");
    CostModel c(Kind::shannon_entropy, std::move(reference));
    c.log_base_ = log_base;
    c.reference_entropy_ = entropy(c.center_, log_base);
    return c;
}

CostModel CostModel::quadratic(Belief center) {
    return CostModel(Kind::quadratic, std::move(center));
}

CostModel CostModel::tabulated(Index dim, int resolution, Vector grid_values) {
    if (resolution < 1) throw Error("tabulated cost: resolution must be positive");
    const auto expected = composition_count(dim, resolution);
    if (static_cast<unsigned long long>(grid_values.size()) != expected)
        throw DimensionMismatch("tabulated cost: value count does not match the grid");
    if (!grid_values.allFinite()) throw Error("tabulated cost: non-finite values");
    CostModel c(Kind::tabulated, Belief::uniform(dim));
    c.resolution_ = resolution;
    c.values_ = std::move(grid_values);
    return c;
}

Index CostModel::dim() const { return center_.dim(); }

double CostModel::operator()(const Belief& p) const {
    if (p.dim() != dim()) throw DimensionMismatch("cost: belief dimension mismatch");
    switch (kind_) {
        case Kind::shannon_entropy:
            return reference_entropy_ - entropy(p, log_base_);
        case Kind::quadratic:
            return (p.weights() - center_.weights()).squaredNorm();
        case Kind::tabulated:
            break;
    }

    // Piecewise-affine interpolation on the canonical triangulation of the
    // grid. The cumulative-coordinate map z_i = sum_{j<=i} y_j turns the
    // simplex into the monotone lattice polytope, whose unit cells are
    // triangulated by sorted fractional parts; weights telescope from them.
    const Index d = dim();
    const int r = resolution_;
    Vector y = static_cast<double>(r) * p.weights();
    const Index dz = d - 1;
    std::vector<double> z(static_cast<size_t>(dz));
    double acc = 0.0;
    for (Index i = 0; i < dz; ++i) {
        acc += y(i);
        z[static_cast<size_t>(i)] = std::min(acc, static_cast<double>(r));
    }
    std::vector<int> base(static_cast<size_t>(dz));
    std::vector<double> frac(static_cast<size_t>(dz));
    for (Index i = 0; i < dz; ++i) {
        int k = static_cast<int>(std::floor(z[static_cast<size_t>(i)]));
        k = std::clamp(k, 0, r);
        base[static_cast<size_t>(i)] = k;
        frac[static_cast<size_t>(i)] = z[static_cast<size_t>(i)] - k;
    }
    // Fractional parts sorted descending; equal values keep the higher
    // index first so each partial increment stays inside the polytope.
    std::vector<Index> order(static_cast<size_t>(dz));
    std::iota(order.begin(), order.end(), Index{0});
    std::sort(order.begin(), order.end(), [&](Index a, Index b) {
        const double fa = frac[static_cast<size_t>(a)];
        const double fb = frac[static_cast<size_t>(b)];
        if (fa != fb) return fa > fb;
        return a > b;
    });

    std::vector<int> vertex = base;
    std::vector<int> comp(static_cast<size_t>(d));
    double value = 0.0;
    auto add_vertex = [&](double weight) {
        if (weight <= 0.0) return;
        comp[0] = vertex[0];
        for (Index i = 1; i < dz; ++i)
            comp[static_cast<size_t>(i)] =
                vertex[static_cast<size_t>(i)] - vertex[static_cast<size_t>(i - 1)];
        comp[static_cast<size_t>(dz)] = r - vertex[static_cast<size_t>(dz - 1)];
        value += weight * values_(composition_rank(comp, r));
    };
    double prev = 1.0;
    for (Index m = 0; m < dz; ++m) {
        const double f = frac[static_cast<size_t>(order[static_cast<size_t>(m)])];
        add_vertex(prev - f);
        vertex[static_cast<size_t>(order[static_cast<size_t>(m)])] += 1;
        prev = f;
    }
    add_vertex(prev);
    return value;
}

ConvexityCheck spot_check_convexity(const CostModel& cost, Index dim, std::uint64_t seed,
                                    int pairs) {
    Rng rng(seed);
    ConvexityCheck check;
    for (int i = 0; i < pairs; ++i) {
        Belief p = rng.belief(dim);
        Belief q = rng.belief(dim);
        if (p.almost_equal(q)) continue;
        Belief mid(0.5 * (p.weights() + q.weights()));
        const double gap = cost(mid) - 0.5 * (cost(p) + cost(q));
        if (gap >= -1e-12) {
            ++check.violations;
            check.worst_gap = std::max(check.worst_gap, gap);
        }
    }
    check.passed = check.violations == 0;
    return check;
}

TypeSpace make_type_space(Vector thetas, Vector pmf) {
    if (thetas.size() == 0 || thetas.size() != pmf.size())
        throw DimensionMismatch("type space: thetas and pmf must match and be non-empty");
    for (Index i = 0; i < thetas.size(); ++i) {
        if (!(thetas(i) > 0.0)) throw Error("type space: thetas must be positive");
        if (i + 1 < thetas.size() && !(thetas(i) > thetas(i + 1)))
            throw Error("type space: thetas must be strictly decreasing");
        if (!(pmf(i) > 0.0)) throw Error("type space: pmf must have full support");
    }
    if (std::abs(pmf.sum() - 1.0) > 1e-10)
        throw Error("type space: pmf must sum to one");
    return TypeSpace{std::move(thetas), std::move(pmf)};
}

VirtualTypes virtual_types(const TypeSpace& types) {
    const Index n = types.size();
    VirtualTypes vt;
    vt.g.resize(n);
    vt.g(n - 1) = types.thetas(n - 1);
    double tail = 0.0;  // F(theta_{k+1}) = probability of a weakly lower type
    for (Index k = n - 2; k >= 0; --k) {
        tail += types.pmf(k + 1);
        vt.g(k) = types.thetas(k) +
                  tail / types.pmf(k) * (types.thetas(k) - types.thetas(k + 1));
    }
    vt.strictly_increasing = true;
    for (Index k = 0; k + 1 < n; ++k)
        if (!(vt.g(k) > vt.g(k + 1))) vt.strictly_increasing = false;
    return vt;
}

Experiment::Experiment(std::vector<Belief> support, Vector probs)
    : support_(std::move(support)), probs_(std::move(probs)) {
    if (support_.empty() || static_cast<Index>(support_.size()) != probs_.size())
        throw DimensionMismatch("experiment: support and probabilities must match");
    for (Index i = 0; i < probs_.size(); ++i)
        if (!(probs_(i) > 0.0)) throw Error("experiment: probabilities must be positive");
    if (std::abs(probs_.sum() - 1.0) > 1e-10)
        throw Error("experiment: probabilities must sum to one");
    for (size_t i = 0; i < support_.size(); ++i) {
        if (support_[i].dim() != support_[0].dim())
            throw DimensionMismatch("experiment: mixed belief dimensions");
        for (size_t j = i + 1; j < support_.size(); ++j)
            if (support_[i].almost_equal(support_[j]))
                throw Error("experiment: support beliefs must be pairwise distinct");
    }
}

Experiment Experiment::point_mass(Belief p) {
    std::vector<Belief> support{std::move(p)};
    return Experiment(std::move(support), Vector::Ones(1));
}

Vector Experiment::mean() const {
    Vector m = Vector::Zero(support_[0].dim());
    for (Index i = 0; i < probs_.size(); ++i)
        m += probs_(i) * support_[static_cast<size_t>(i)].weights();
    return m;
}

double cost_of_experiment(const CostModel& cost, const Experiment& tau) {
    double total = 0.0;
    for (Index i = 0; i < tau.size(); ++i)
        total += tau.probs()(i) * cost(tau.support()[static_cast<size_t>(i)]);
    return total;
}

PlausibilityReport validate_experiment(const Experiment& tau, const Belief& prior, double tol) {
    PlausibilityReport report;
    report.prob_sum_deviation = std::abs(tau.probs().sum() - 1.0);
    if (tau.support()[0].dim() != prior.dim()) {
        report.detail = "dimension mismatch between posteriors and prior";
        return report;
    }
    report.max_coord_deviation = (tau.mean() - prior.weights()).cwiseAbs().maxCoeff();
    report.passed =
        report.max_coord_deviation <= tol && report.prob_sum_deviation <= 1e-10;
    if (!report.passed)
        report.detail = "mean posterior deviates from the prior by " +
                        std::to_string(report.max_coord_deviation);
    return report;
}

}  // namespace contractlab
