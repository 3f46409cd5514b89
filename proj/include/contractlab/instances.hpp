#pragma once

#include <cstdint>

#include "contractlab/solver.hpp"

namespace contractlab {

/// Seeded random problem instances for the property suites. Three families:
///  - decision instances: random utilities/types/prior to be solved by an
///    engine (virtual types guaranteed strictly increasing);
///  - symmetric instances: constructed choice functions whose support costs
///    are equal within each type (coordinate rotations of a base belief at
///    per-type radii), cost-monotone by construction;
///  - full-dimension instances: random affinely independent supports with
///    the prior strictly inside every hull, Bayes-plausible by construction.

struct DecisionInstance {
    DecisionProblem problem;
    TypeSpace types;
    CostModel cost;
};

DecisionInstance random_decision_instance(std::uint64_t seed, Index n_states, Index n_types,
                                          CostModel::Kind kind);

struct ConstructedInstance {
    Belief prior;
    TypeSpace types;
    CostModel cost;
    ChoiceFunction choice;
};

ConstructedInstance random_symmetric_instance(std::uint64_t seed, Index dim, Index n_types);

ConstructedInstance random_full_dimension_instance(std::uint64_t seed, Index dim, Index n_types,
                                                   CostModel::Kind kind);

/// Base seed for the property suites; the CONTRACT_LAB_SEED environment
/// variable overrides the built-in default.
std::uint64_t property_suite_seed();

}  // namespace contractlab
