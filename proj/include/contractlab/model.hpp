#pragma once

#include <optional>
#include <string>
#include <vector>

#include "contractlab/geometry.hpp"

namespace contractlab {

/// A finite Bayesian decision problem: states, actions, a utility matrix
/// (rows = actions, columns = states) and a full-support prior.
struct DecisionProblem {
    std::vector<std::string> states;
    std::vector<std::string> actions;
    Matrix utility;
    Belief prior;

    Index n_states() const { return static_cast<Index>(states.size()); }
    Index n_actions() const { return static_cast<Index>(actions.size()); }
};

/// Validates label/matrix dimensions and the full-support prior.
DecisionProblem make_decision_problem(std::vector<std::string> states,
                                      std::vector<std::string> actions, Matrix utility,
                                      Belief prior);

struct ValueResult {
    double value = 0.0;
    std::vector<Index> argmax;  // all maximizing actions within 1e-10
};

/// Maximal achievable expected utility at belief p, with the full argmax set.
ValueResult value_function(const DecisionProblem& problem, const Belief& p);

/// Posterior-separable cost primitive c: a continuous, strictly convex
/// function of the posterior with c(reference) = 0. Three kinds:
///  - shannon_entropy: entropy reduction relative to the reference belief,
///    in a configurable log base (natural log by default);
///  - quadratic: squared euclidean distance from a center (defaults to the
///    reference so the normalization holds by construction);
///  - tabulated: values on a simplex grid, interpolated by barycentric
///    weights within grid cells (piecewise affine; convexity only as good
///    as the table).
class CostModel {
  public:
    enum class Kind { shannon_entropy, quadratic, tabulated };

    static CostModel shannon_entropy(Belief reference, double log_base = kNaturalBase);
    static CostModel quadratic(Belief center);
    static CostModel tabulated(Index dim, int resolution, Vector grid_values);

    double operator()(const Belief& p) const;

    Kind kind() const { return kind_; }
    Index dim() const;
    double log_base() const { return log_base_; }
    const Belief& center() const { return center_; }
    int table_resolution() const { return resolution_; }
    const Vector& table_values() const { return values_; }

    static constexpr double kNaturalBase = 2.718281828459045235;

  private:
    CostModel(Kind kind, Belief center) : kind_(kind), center_(std::move(center)) {}
    Kind kind_;
    Belief center_;  // reference/center belief; uniform placeholder for tabulated
    double log_base_ = kNaturalBase;
    double reference_entropy_ = 0.0;
    int resolution_ = 0;
    Vector values_;
};

/// Shannon entropy of a belief in the given log base, with 0*log(0) = 0.
double entropy(const Belief& p, double log_base = CostModel::kNaturalBase);

struct ConvexityCheck {
    bool passed = true;
    int violations = 0;
    double worst_gap = 0.0;  // most positive c(mid) - (c(p)+c(q))/2
};

/// Midpoint strict-convexity spot check over seeded random belief pairs.
ConvexityCheck spot_check_convexity(const CostModel& cost, Index dim, std::uint64_t seed,
                                    int pairs = 64);

/// Researcher type space: strictly decreasing positive cost multipliers
/// (index N-1 is the most efficient type) with a full-support pmf.
struct TypeSpace {
    Vector thetas;
    Vector pmf;

    Index size() const { return thetas.size(); }
};

TypeSpace make_type_space(Vector thetas, Vector pmf);

struct VirtualTypes {
    Vector g;
    bool strictly_increasing = false;  // in theta, i.e. g decreasing in index
};

/// Information-rent-adjusted virtual types: g(theta_N) = theta_N and
/// g(theta_k) = theta_k + F(theta_{k+1})/f(theta_k) * (theta_k - theta_{k+1}),
/// where F(theta_k) is the probability of drawing a type <= theta_k.
VirtualTypes virtual_types(const TypeSpace& types);

/// Finite-support distribution over posteriors. Construction validates
/// positive probabilities summing to one and pairwise-distinct support at
/// belief tolerance; Bayes plausibility is checked against a prior via
/// validate_experiment.
class Experiment {
  public:
    Experiment(std::vector<Belief> support, Vector probs);

    static Experiment point_mass(Belief p);

    const std::vector<Belief>& support() const { return support_; }
    const Vector& probs() const { return probs_; }
    Index size() const { return probs_.size(); }
    Vector mean() const;

  private:
    std::vector<Belief> support_;
    Vector probs_;
};

/// Expected cost of the realized posterior: sum of probs * c(support).
double cost_of_experiment(const CostModel& cost, const Experiment& tau);

/// Structured Bayes-plausibility verdict; never throws.
struct PlausibilityReport {
    bool passed = false;
    double max_coord_deviation = 0.0;  // |mean posterior - prior| in max norm
    double prob_sum_deviation = 0.0;
    std::string detail;
};

PlausibilityReport validate_experiment(const Experiment& tau, const Belief& prior, double tol);

}  // namespace contractlab
