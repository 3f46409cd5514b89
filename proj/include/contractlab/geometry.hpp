#pragma once

#include <initializer_list>
#include <utility>
#include <vector>

#include "contractlab/lp.hpp"

namespace contractlab {

/// Max-norm tolerance at which two beliefs count as the same point.
inline constexpr double kBeliefTol = 1e-9;
/// Default tolerance for convex-hull membership.
inline constexpr double kHullTol = 1e-8;
/// Relative singular-value cutoff for affine-independence tests.
inline constexpr double kRankCutoff = 1e-9;

/// A point of the probability simplex over states: non-negative weights
/// summing to one. Construction normalizes the weight vector and rejects
/// vectors with meaningfully negative entries or a non-positive sum.
class Belief {
  public:
    explicit Belief(Vector weights);
    Belief(std::initializer_list<double> weights) : Belief(Vector{weights}) {}

    static Belief uniform(Index dim);
    static Belief vertex(Index dim, Index i);

    Index dim() const { return w_.size(); }
    double operator[](Index i) const { return w_(i); }
    const Vector& weights() const { return w_; }

    /// Max-norm distance to another belief.
    double distance(const Belief& other) const;
    bool almost_equal(const Belief& other, double tol = kBeliefTol) const {
        return distance(other) <= tol;
    }
    /// Lexicographic coordinate order; used for canonical support ordering.
    bool lex_less(const Belief& other) const;

  private:
    Vector w_;
};

/// Affine map on the simplex, represented by one coefficient per state;
/// evaluation is the dot product with the belief weights. Affine (rather
/// than merely linear) because weights sum to one.
class AffineFunctional {
  public:
    AffineFunctional() = default;
    explicit AffineFunctional(Vector coefficients) : c_(std::move(coefficients)) {}

    static AffineFunctional zero(Index dim) { return AffineFunctional(Vector::Zero(dim)); }
    static AffineFunctional constant(Index dim, double value) {
        return AffineFunctional(Vector::Constant(dim, value));
    }

    Index dim() const { return c_.size(); }
    const Vector& coefficients() const { return c_; }
    double operator()(const Belief& p) const { return c_.dot(p.weights()); }
    double operator()(const Vector& weights) const { return c_.dot(weights); }

  private:
    Vector c_;
};

inline AffineFunctional operator*(double s, const AffineFunctional& f) {
    return AffineFunctional(s * f.coefficients());
}
inline AffineFunctional operator+(const AffineFunctional& a, const AffineFunctional& b) {
    return AffineFunctional(a.coefficients() + b.coefficients());
}
inline AffineFunctional operator-(const AffineFunctional& a, const AffineFunctional& b) {
    return AffineFunctional(a.coefficients() - b.coefficients());
}

/// Affine weights expressing a belief over a basis; components sum to one
/// but may be negative.
struct BarycentricCoords {
    Vector alpha;
};

/// Rank test on the matrix of differences, with a relative singular-value
/// cutoff. A single point is vacuously independent.
bool affinely_independent(const std::vector<Belief>& points, double cutoff = kRankCutoff);

/// Unique affine representation of p over an affinely independent basis of
/// |states| beliefs. Throws DimensionMismatch if |basis| != dim, and
/// DegenerateBasis if the basis is affinely dependent.
BarycentricCoords barycentric_coords(const std::vector<Belief>& basis, const Belief& p);

/// Outcome of a hull-membership query. When member, weights are convex
/// coefficients reconstructing the query point; otherwise separator is an
/// affine functional with separator(p) >= separator(point) + separation for
/// every point of the set, separation > tol.
struct HullCertificate {
    bool member = false;
    Vector weights;
    AffineFunctional separator;
    double separation = 0.0;
};

/// Decides membership of p in the convex hull of a finite belief set by a
/// feasibility LP over convex weights; produces a certificate either way.
HullCertificate in_convex_hull(const std::vector<Belief>& points, const Belief& p,
                               double tol = kHullTol);

/// Affine functional through the graph points {(belief, value)}. Anchors
/// must be affinely independent and at most |states| many. With fewer
/// anchors than states the coefficient vector is the minimum-norm solution.
AffineFunctional affine_from_graph(const std::vector<std::pair<Belief, double>>& anchors);

/// All beliefs whose coordinates are integer multiples of 1/resolution, in
/// deterministic lexicographic order (first coordinate descending). Count is
/// C(resolution + dim - 1, dim - 1).
std::vector<Belief> simplex_grid(Index dim, int resolution);

/// Grid beliefs of the given resolution within `window` integer steps of
/// `center` in every coordinate; the local patch used for grid refinement.
/// Same deterministic ordering as simplex_grid.
std::vector<Belief> local_simplex_grid(const Belief& center, int resolution, int window);

}  // namespace contractlab
