#include "contractlab/lp.hpp"

#include <cmath>
#include <limits>

namespace contractlab {

namespace {

constexpr double kPivotTol = 1e-11;
constexpr double kReducedCostTol = 1e-9;
constexpr long kIterationCap = 1000000;

// Tableau state for the two-phase simplex. Columns are laid out as the
// original variables followed by one artificial per row; the last column is
// the right-hand side. basis[i] is the variable owning row i.
struct Tableau {
    Matrix t;                  // m x (n + m + 1)
    Eigen::RowVectorXd cost_row;  // length n + m, reduced costs
    double cost_shift = 0.0;   // objective value of the current basis
    std::vector<Index> basis;
    Index m = 0, n = 0;
    long iterations = 0;

    double rhs(Index i) const { return t(i, n + m); }

    void pivot(Index row, Index col) {
        const double piv = t(row, col);
        t.row(row) /= piv;
        for (Index i = 0; i < m; ++i) {
            if (i == row) continue;
            const double f = t(i, col);
            if (f != 0.0) t.row(i) -= f * t.row(row);
        }
        const double cf = cost_row(col);
        if (cf != 0.0) {
            cost_row -= cf * t.row(row).head(n + m);
            cost_shift += cf * rhs(row);
        }
        basis[row] = col;
    }

    // Bland: enter the lowest-index improving column among [0, limit).
    Index entering(Index limit) const {
        for (Index j = 0; j < limit; ++j) {
            if (cost_row(j) > kReducedCostTol) return j;
        }
        return -1;
    }

    // Ratio test; ties broken by lowest basis variable index (Bland).
    Index leaving(Index col) const {
        Index best = -1;
        double best_ratio = std::numeric_limits<double>::infinity();
        for (Index i = 0; i < m; ++i) {
            const double a = t(i, col);
            if (a <= kPivotTol) continue;
            const double ratio = rhs(i) / a;
            if (ratio < best_ratio - 1e-12 ||
                (ratio <= best_ratio + 1e-12 && (best < 0 || basis[i] < basis[best]))) {
                best_ratio = std::min(ratio, best_ratio);
                best = i;
            }
        }
        return best;
    }

    // Returns false on unboundedness.
    bool run(Index enter_limit) {
        while (true) {
            if (++iterations > kIterationCap)
                throw NumericalFailure("simplex: iteration cap exceeded");
            const Index col = entering(enter_limit);
            if (col < 0) return true;
            const Index row = leaving(col);
            if (row < 0) return false;
            pivot(row, col);
        }
    }
};

}  // namespace

LpSolution solve_lp(const LinearProgram& lp) {
    const Index m = lp.eq_matrix.rows();
    const Index n = lp.eq_matrix.cols();
    if (lp.objective.size() != n || lp.eq_rhs.size() != m)
        throw DimensionMismatch("solve_lp: inconsistent program dimensions");
    if (!lp.eq_rhs.allFinite() || !lp.objective.allFinite() || !lp.eq_matrix.allFinite())
        throw NumericalFailure("solve_lp: non-finite program data");

    Tableau tb;
    tb.m = m;
    tb.n = n;
    tb.t.setZero(m, n + m + 1);
    Vector row_sign = Vector::Ones(m);
    for (Index i = 0; i < m; ++i) {
        const double s = lp.eq_rhs(i) < 0.0 ? -1.0 : 1.0;
        row_sign(i) = s;
        tb.t.block(i, 0, 1, n) = s * lp.eq_matrix.row(i);
        tb.t(i, n + i) = 1.0;
        tb.t(i, n + m) = s * lp.eq_rhs(i);
        tb.basis.push_back(n + i);
    }

    // Phase 1: maximize -sum(artificials).
    tb.cost_row.setZero(n + m);
    tb.cost_shift = 0.0;
    for (Index j = 0; j < n; ++j) tb.cost_row(j) = tb.t.col(j).sum();
    tb.cost_shift = -tb.t.col(n + m).sum();
    if (!tb.run(n)) throw NumericalFailure("simplex: phase 1 unbounded");

    LpSolution sol;
    const double feas_tol = 1e-8 * (1.0 + lp.eq_rhs.cwiseAbs().maxCoeff());
    if (tb.cost_shift < -feas_tol) {
        sol.status = LpStatus::infeasible;
        return sol;
    }

    // Drive basic artificials out where a usable pivot exists; rows that
    // cannot be cleared are redundant and keep their artificial at level 0.
    for (Index i = 0; i < m; ++i) {
        if (tb.basis[i] < n) continue;
        for (Index j = 0; j < n; ++j) {
            if (std::abs(tb.t(i, j)) > kPivotTol) {
                tb.pivot(i, j);
                break;
            }
        }
    }

    // Phase 2: original objective. Artificial columns never re-enter.
    tb.cost_row.setZero(n + m);
    tb.cost_shift = 0.0;
    tb.cost_row.head(n) = lp.objective;
    for (Index i = 0; i < m; ++i) {
        const Index b = tb.basis[i];
        const double cb = b < n ? lp.objective(b) : 0.0;
        if (cb != 0.0) {
            tb.cost_row -= cb * tb.t.row(i).head(n + m);
            tb.cost_shift += cb * tb.rhs(i);
        }
    }
    if (!tb.run(n)) {
        sol.status = LpStatus::unbounded;
        return sol;
    }

    sol.status = LpStatus::optimal;
    sol.x = Vector::Zero(n);
    for (Index i = 0; i < m; ++i) {
        if (tb.basis[i] < n) sol.x(tb.basis[i]) = tb.rhs(i);
    }
    sol.objective_value = tb.cost_shift;
    sol.basis = tb.basis;

    // Dual from the final basis: solve B^T y = c_B over the original rows,
    // then undo the row sign flips.
    Matrix basis_cols(m, m);
    Vector cb(m);
    for (Index i = 0; i < m; ++i) {
        const Index b = tb.basis[i];
        if (b < n) {
            basis_cols.col(i) = row_sign.asDiagonal() * lp.eq_matrix.col(b);
            cb(i) = lp.objective(b);
        } else {
            basis_cols.col(i) = Vector::Unit(m, b - n);
            cb(i) = 0.0;
        }
    }
    Vector y_flipped = basis_cols.transpose().fullPivLu().solve(cb);
    sol.dual = row_sign.asDiagonal() * y_flipped;
    return sol;
}

}  // namespace contractlab
