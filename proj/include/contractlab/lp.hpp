#pragma once

#include <Eigen/Dense>
#include <vector>

#include "contractlab/errors.hpp"

namespace contractlab {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

/// Dense equality-form linear program: maximize objective.dot(x)
/// subject to eq_matrix * x = eq_rhs and x >= 0.
struct LinearProgram {
    Vector objective;
    Matrix eq_matrix;
    Vector eq_rhs;
};

enum class LpStatus { optimal, infeasible, unbounded };

/// Solution of a LinearProgram. When optimal, x is a basic (vertex) solution:
/// at most rank(eq_matrix) strictly positive components, eq_matrix*x = eq_rhs
/// within 1e-8, and dual holds the multipliers of the equality rows extracted
/// from the final basis.
struct LpSolution {
    LpStatus status = LpStatus::infeasible;
    Vector x;
    double objective_value = 0.0;
    std::vector<Index> basis;
    Vector dual;
};

/// Two-phase dense simplex with Bland's anti-cycling rule. Deterministic:
/// entering variable is the lowest improving index, leaving variable breaks
/// ratio ties by lowest basis index. Throws NumericalFailure if pivoting
/// exceeds the iteration cap (1e6).
LpSolution solve_lp(const LinearProgram& lp);

}  // namespace contractlab
