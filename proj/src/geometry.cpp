#include "contractlab/geometry.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <limits>

namespace contractlab {

namespace {

constexpr double kNegativeWeightTol = 1e-12;

Matrix difference_matrix(const std::vector<Belief>& points) {
    const Index k = static_cast<Index>(points.size());
    const Index n = points[0].dim();
    Matrix d(k - 1, n);
    for (Index i = 1; i < k; ++i)
        d.row(i - 1) = (points[i].weights() - points[0].weights()).transpose();
    return d;
}

}  // namespace

Belief::Belief(Vector weights) : w_(std::move(weights)) {
    if (w_.size() == 0) throw Error("Belief: empty weight vector");
    if (!w_.allFinite()) throw Error("Belief: non-finite weights");
    double sum = 0.0;
    for (Index i = 0; i < w_.size(); ++i) {
        if (w_(i) < -kNegativeWeightTol)
            throw Error("Belief: negative weight " + std::to_string(w_(i)));
        if (w_(i) < 0.0) w_(i) = 0.0;
        sum += w_(i);
    }
    if (sum <= 0.0) throw Error("Belief: weights sum to zero");
    w_ /= sum;
}

Belief Belief::uniform(Index dim) {
    return Belief(Vector::Constant(dim, 1.0 / static_cast<double>(dim)));
}

Belief Belief::vertex(Index dim, Index i) {
    return Belief(Vector::Unit(dim, i));
}

double Belief::distance(const Belief& other) const {
    if (other.dim() != dim()) throw DimensionMismatch("Belief::distance: dimension mismatch");
    return (w_ - other.w_).cwiseAbs().maxCoeff();
}

bool Belief::lex_less(const Belief& other) const {
    for (Index i = 0; i < w_.size() && i < other.dim(); ++i) {
        if (w_(i) < other.w_(i)) return true;
        if (w_(i) > other.w_(i)) return false;
    }
    return false;
}

bool affinely_independent(const std::vector<Belief>& points, double cutoff) {
    if (points.empty()) return true;
    const Index k = static_cast<Index>(points.size());
    const Index n = points[0].dim();
    if (k == 1) return true;
    if (k > n) return false;
    Matrix d = difference_matrix(points);
    Eigen::JacobiSVD<Matrix> svd(d);
    const Vector& sv = svd.singularValues();
    if (sv.size() == 0 || sv(0) <= 0.0) return false;
    Index rank = 0;
    for (Index i = 0; i < sv.size(); ++i)
        if (sv(i) > cutoff * sv(0)) ++rank;
    return rank == k - 1;
}

BarycentricCoords barycentric_coords(const std::vector<Belief>& basis, const Belief& p) {
    const Index n = p.dim();
    if (static_cast<Index>(basis.size()) != n)
        throw DimensionMismatch("barycentric_coords: need exactly |states| basis beliefs");
    for (const Belief& b : basis)
        if (b.dim() != n) throw DimensionMismatch("barycentric_coords: basis dimension mismatch");
    if (!affinely_independent(basis))
        throw DegenerateBasis("barycentric_coords: affinely dependent basis");

    // Square system: first n-1 coordinate rows plus the sum-to-one row.
    Matrix m(n, n);
    Vector rhs(n);
    for (Index r = 0; r + 1 < n; ++r) {
        for (Index j = 0; j < n; ++j) m(r, j) = basis[static_cast<size_t>(j)][r];
        rhs(r) = p[r];
    }
    m.row(n - 1).setOnes();
    rhs(n - 1) = 1.0;
    Vector alpha = m.fullPivLu().solve(rhs);

    Vector recon = Vector::Zero(n);
    for (Index j = 0; j < n; ++j) recon += alpha(j) * basis[static_cast<size_t>(j)].weights();
    if ((recon - p.weights()).cwiseAbs().maxCoeff() > 1e-9)
        throw NumericalFailure("barycentric_coords: reconstruction residual too large");
    return BarycentricCoords{std::move(alpha)};
}

HullCertificate in_convex_hull(const std::vector<Belief>& points, const Belief& p, double tol) {
    if (points.empty()) throw Error("in_convex_hull: empty point set");
    const Index n = p.dim();
    const Index k = static_cast<Index>(points.size());

    // Vertex fast path keeps the certificate a unit weight vector.
    for (Index i = 0; i < k; ++i) {
        if (points[static_cast<size_t>(i)].almost_equal(p)) {
            HullCertificate cert;
            cert.member = true;
            cert.weights = Vector::Unit(k, i);
            return cert;
        }
    }

    // Minimize the L1 residual of a convex combination:
    //   max -sum(u) - sum(v)  s.t.  X w + u - v = p,  sum(w) = 1,  all >= 0.
    LinearProgram lp;
    const Index cols = k + 2 * n;
    lp.objective = Vector::Zero(cols);
    lp.objective.segment(k, 2 * n).setConstant(-1.0);
    lp.eq_matrix.setZero(n + 1, cols);
    for (Index j = 0; j < k; ++j)
        lp.eq_matrix.block(0, j, n, 1) = points[static_cast<size_t>(j)].weights();
    lp.eq_matrix.block(0, k, n, n) = Matrix::Identity(n, n);
    lp.eq_matrix.block(0, k + n, n, n) = -Matrix::Identity(n, n);
    lp.eq_matrix.block(n, 0, 1, k).setOnes();
    lp.eq_rhs.resize(n + 1);
    lp.eq_rhs.head(n) = p.weights();
    lp.eq_rhs(n) = 1.0;

    LpSolution sol = solve_lp(lp);
    if (sol.status != LpStatus::optimal)
        throw NumericalFailure("in_convex_hull: feasibility LP did not solve");
    const double distance = -sol.objective_value;

    HullCertificate cert;
    if (distance <= tol) {
        cert.member = true;
        cert.weights = sol.x.head(k);
        return cert;
    }
    cert.member = false;
    cert.separator = AffineFunctional(-sol.dual.head(n));
    double gap = std::numeric_limits<double>::infinity();
    const double at_p = cert.separator(p);
    for (const Belief& q : points) gap = std::min(gap, at_p - cert.separator(q));
    cert.separation = gap;
    return cert;
}

AffineFunctional affine_from_graph(const std::vector<std::pair<Belief, double>>& anchors) {
    if (anchors.empty()) throw Error("affine_from_graph: no anchors");
    const Index n = anchors[0].first.dim();
    const Index k = static_cast<Index>(anchors.size());
    std::vector<Belief> basis;
    basis.reserve(anchors.size());
    for (const auto& [b, value] : anchors) {
        (void)value;
        basis.push_back(b);
    }
    if (k > n || !affinely_independent(basis))
        throw DegenerateBasis("affine_from_graph: anchors not affinely independent");

    Matrix m(k, n);
    Vector h(k);
    double scale = 1.0;
    for (Index i = 0; i < k; ++i) {
        m.row(i) = anchors[static_cast<size_t>(i)].first.weights().transpose();
        h(i) = anchors[static_cast<size_t>(i)].second;
        scale = std::max(scale, std::abs(h(i)));
    }
    Vector beta = k == n ? Vector(m.fullPivLu().solve(h))
                         : Vector(m.completeOrthogonalDecomposition().solve(h));
    if ((m * beta - h).cwiseAbs().maxCoeff() > 1e-9 * scale)
        throw NumericalFailure("affine_from_graph: interpolation residual too large");
    return AffineFunctional(std::move(beta));
}

std::vector<Belief> simplex_grid(Index dim, int resolution) {
    if (dim < 2) throw Error("simplex_grid: dim must be at least 2");
    if (resolution < 1) throw Error("simplex_grid: resolution must be at least 1");
    std::vector<Belief> out;
    Vector current = Vector::Zero(dim);
    // First coordinate descending, recursing over the remainder.
    auto recurse = [&](auto&& self, Index coord, int remaining) -> void {
        if (coord == dim - 1) {
            current(coord) = static_cast<double>(remaining) / resolution;
            out.emplace_back(current);
            return;
        }
        for (int v = remaining; v >= 0; --v) {
            current(coord) = static_cast<double>(v) / resolution;
            self(self, coord + 1, remaining - v);
        }
    };
    recurse(recurse, 0, resolution);
    return out;
}

std::vector<Belief> local_simplex_grid(const Belief& center, int resolution, int window) {
    const Index d = center.dim();
    std::vector<int> base(static_cast<size_t>(d));
    for (Index i = 0; i < d; ++i)
        base[static_cast<size_t>(i)] = static_cast<int>(std::lround(center[i] * resolution));
    std::vector<Belief> out;
    std::vector<int> k(static_cast<size_t>(d));
    auto recurse = [&](auto&& self, Index coord, int remaining) -> void {
        const int b = base[static_cast<size_t>(coord)];
        if (coord == d - 1) {
            if (remaining >= std::max(0, b - window) && remaining <= b + window) {
                k[static_cast<size_t>(coord)] = remaining;
                Vector w(d);
                for (Index i = 0; i < d; ++i)
                    w(i) = static_cast<double>(k[static_cast<size_t>(i)]) / resolution;
                out.emplace_back(w);
            }
            return;
        }
        const int lo = std::max(0, b - window);
        const int hi = std::min(remaining, b + window);
        for (int v = hi; v >= lo; --v) {
            k[static_cast<size_t>(coord)] = v;
            self(self, coord + 1, remaining - v);
        }
    };
    recurse(recurse, 0, resolution);
    return out;
}

}  // namespace contractlab
