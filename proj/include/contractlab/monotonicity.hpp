#pragma once

#include <optional>
#include <string>
#include <vector>

#include "contractlab/solver.hpp"

namespace contractlab {

/// The affine interpolant of the cost function on an experiment's support
/// (H_k in the ordering conditions). Unique for full-dimension supports;
/// minimum-norm coefficients otherwise.
AffineFunctional cost_interpolant(const Experiment& tau, const CostModel& cost);

enum class CheckStatus { pass, fail, skipped };

/// A violated weak inequality between the cost and an affine comparison
/// value at a support posterior. gap is the positive violation magnitude.
struct Violation {
    Index i = -1;  // type owning the posterior (0-based)
    Index j = -1;  // other type of the pair, -1 when not pairwise
    Belief p;
    double lhs = 0.0;  // c(p)
    double rhs = 0.0;  // affine comparison value
    double gap = 0.0;
    std::string requirement;  // human-readable direction, e.g. "c(p) >= H_1(p) on S_2"
};

struct CheckResult {
    CheckStatus status = CheckStatus::skipped;
    std::vector<Violation> witnesses;  // sorted by gap, largest first
    std::string note;

    bool passed() const { return status == CheckStatus::pass; }
    bool failed() const { return status == CheckStatus::fail; }
};

/// Weakly increasing experiment costs toward more efficient types. The
/// result carries the full cost sequence; the witness (if any) is the first
/// violating adjacent pair.
struct CMonotoneResult : CheckResult {
    Vector costs;
};
CMonotoneResult check_c_monotone(const ChoiceFunction& choice, const CostModel& cost);

enum class PairOrder { more_informative, less_informative, incomparable };

struct BlackwellWitness {
    Index i = -1, j = -1;  // posterior of type i outside conv(support of type j)
    Belief p;
    AffineFunctional separator;
    double separation = 0.0;
};

/// Pairwise informativeness ordering via support/hull containment. Exact
/// for affinely independent supports (mean-preserving-spread geometry);
/// pairs with a dependent candidate support are flagged partial, where
/// containment is only a necessary condition.
struct BlackwellResult {
    CheckStatus status = CheckStatus::skipped;
    std::vector<std::vector<PairOrder>> comparability;  // [i][j] for j > i
    std::vector<BlackwellWitness> witnesses;
    bool exact = true;  // false if any pair was decided by the partial test
    std::string note;

    bool passed() const { return status == CheckStatus::pass; }
    bool failed() const { return status == CheckStatus::fail; }
};
BlackwellResult check_blackwell_monotone(const ChoiceFunction& choice);

/// The pairwise system of inequalities comparing the cost to the
/// distance-weighted averages of the support interpolants. Requires full
/// dimension (throws NotFullDimension). Witnesses are sorted by gap so the
/// leading entry is the primary counterexample.
CheckResult check_strong_c_monotone(const ChoiceFunction& choice, const TypeSpace& types,
                                    const CostModel& cost);

/// Nesting of every support inside/outside each interpolant level set:
/// sufficient for the pairwise system. Requires full dimension.
CheckResult check_condition_n(const ChoiceFunction& choice, const CostModel& cost);

/// Adjacent-type nesting: necessary for the pairwise system. Requires full
/// dimension.
CheckResult check_condition_nadj(const ChoiceFunction& choice, const CostModel& cost);

/// Equal cost across every experiment's support, within tol.
struct SymmetryResult {
    CheckStatus status = CheckStatus::skipped;
    Vector levels;   // per-type mean support cost
    Vector spreads;  // per-type max - min support cost
    Index worst_type = -1;

    bool passed() const { return status == CheckStatus::pass; }
};
SymmetryResult check_symmetric(const ChoiceFunction& choice, const CostModel& cost,
                               double tol = 1e-9);

/// Extremeness ordering: posteriors of more efficient types may meet a less
/// efficient hull only at its vertices. Requires affinely independent
/// supports (throws DegenerateSupport).
CheckResult check_comp(const ChoiceFunction& choice);

enum class Region { lower, boundary, upper };  // D_k, boundary, U_k

/// Classifies a belief against c - H_k for each k < N.
std::vector<Region> classify_regions(const Belief& p,
                                     const std::vector<AffineFunctional>& interpolants,
                                     const CostModel& cost, double tol = 1e-9);

/// All verdicts plus the internal implication-chain consistency audit.
/// Checks whose preconditions fail are reported as skipped, not thrown.
struct MonotonicityReport {
    CMonotoneResult c_monotone;
    BlackwellResult blackwell;
    CheckResult strong_c;
    CheckResult cond_n;
    CheckResult cond_nadj;
    SymmetryResult symmetric;
    CheckResult comp;
    bool chain_consistent = true;
    std::string chain_message;
};

MonotonicityReport run_monotonicity_checks(const ChoiceFunction& choice, const TypeSpace& types,
                                           const CostModel& cost);

/// Re-audits the implication chain over the verdicts; used by the report
/// runner and by property tests.
bool implication_chain_consistent(const MonotonicityReport& report, Index n_types,
                                  std::string* message = nullptr);

}  // namespace contractlab
