#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "contractlab/geometry.hpp"
#include "contractlab/random.hpp"
#include "test_support.hpp"

using namespace contractlab;
using testsupport::belief;

namespace {

std::vector<Belief> example1_s1() {
    return {belief({0.3626, 0.4899, 0.1475}), belief({0.0491, 0.7308, 0.2201}),
            belief({0.3626, 0.1475, 0.4899})};
}

std::vector<Belief> example1_s2() {
    return {belief({0.4141, 0.4790, 0.1069}), belief({0.0340, 0.7898, 0.1762}),
            belief({0.4141, 0.1069, 0.4790})};
}

std::vector<Belief> random_affine_basis(Rng& rng, Index dim) {
    for (;;) {
        std::vector<Belief> basis;
        for (Index i = 0; i < dim; ++i) basis.push_back(rng.belief(dim, 0.01));
        if (affinely_independent(basis)) return basis;
    }
}

}  // namespace

TEST_CASE("belief construction normalizes and validates") {
    Belief p(Vector{{2.0, 1.0, 1.0}});
    CHECK(p[0] == doctest::Approx(0.5));
    CHECK(p.weights().sum() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK_THROWS_AS(Belief(Vector{{-0.1, 1.1, 0.0}}), Error);
    CHECK_THROWS_AS(Belief(Vector{{0.0, 0.0}}), Error);
    CHECK(Belief::vertex(3, 1)[1] == 1.0);
    CHECK(Belief::uniform(4)[3] == doctest::Approx(0.25));
    // A -1e-12 underflow is clamped, not rejected.
    Belief q(Vector{{1.0 + 1e-12, -1e-13}});
    CHECK(q[1] == 0.0);
}

TEST_CASE("affine functional is exactly affine on segments") {
    Rng rng(7);
    for (int trial = 0; trial < 50; ++trial) {
        AffineFunctional f(Vector{{rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2)}});
        Belief p = rng.belief(3);
        Belief q = rng.belief(3);
        const double lambda = rng.uniform01();
        Belief mix(lambda * p.weights() + (1.0 - lambda) * q.weights());
        CHECK(f(mix) == doctest::Approx(lambda * f(p) + (1.0 - lambda) * f(q)).epsilon(1e-10));
    }
}

TEST_CASE("barycentric identity and canonical cases") {
    auto basis = example1_s1();
    SUBCASE("basis point maps to a unit vector") {
        Vector alpha = barycentric_coords(basis, basis[1]).alpha;
        CHECK(alpha(0) == doctest::Approx(0.0).epsilon(1e-9));
        CHECK(alpha(1) == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(alpha(2) == doctest::Approx(0.0).epsilon(1e-9));
    }
    SUBCASE("simplex vertices are the canonical basis") {
        std::vector<Belief> vertices{Belief::vertex(3, 0), Belief::vertex(3, 1),
                                     Belief::vertex(3, 2)};
        Vector alpha = barycentric_coords(vertices, Belief::uniform(3)).alpha;
        for (Index i = 0; i < 3; ++i) CHECK(alpha(i) == doctest::Approx(1.0 / 3));
    }
    SUBCASE("matches the independent linear-solve oracle") {
        Vector alpha = barycentric_coords(basis, Belief::uniform(3)).alpha;
        auto expect = testsupport::gauss_barycentric(basis, Belief::uniform(3));
        for (Index i = 0; i < 3; ++i)
            CHECK(alpha(i) == doctest::Approx(expect[static_cast<size_t>(i)]).epsilon(1e-10));
    }
}

TEST_CASE("barycentric errors") {
    auto basis = example1_s1();
    basis.pop_back();
    CHECK_THROWS_AS(barycentric_coords(basis, Belief::uniform(3)), DimensionMismatch);
    std::vector<Belief> degenerate{belief({0.5, 0.25, 0.25}), belief({0.25, 0.375, 0.375}),
                                   belief({0.375, 0.3125, 0.3125})};  // collinear
    CHECK_THROWS_AS(barycentric_coords(degenerate, Belief::uniform(3)), DegenerateBasis);
}

TEST_CASE("barycentric reconstruction round trip") {
    Rng rng(13);
    for (int trial = 0; trial < 40; ++trial) {
        const Index dim = 2 + trial % 3;
        auto basis = random_affine_basis(rng, dim);
        Belief p = rng.belief(dim);
        Vector alpha = barycentric_coords(basis, p).alpha;
        CHECK(alpha.sum() == doctest::Approx(1.0).epsilon(1e-10));
        Vector recon = Vector::Zero(dim);
        for (Index j = 0; j < dim; ++j) recon += alpha(j) * basis[static_cast<size_t>(j)].weights();
        CHECK((recon - p.weights()).cwiseAbs().maxCoeff() <= 1e-9);
    }
}

TEST_CASE("hull membership certificates") {
    auto s2 = example1_s2();
    SUBCASE("a listed point is a member with unit weights") {
        HullCertificate cert = in_convex_hull(s2, s2[1]);
        REQUIRE(cert.member);
        CHECK(cert.weights(1) == doctest::Approx(1.0));
        CHECK(cert.weights.sum() == doctest::Approx(1.0));
    }
    SUBCASE("p1' lies outside conv(S2)") {
        HullCertificate cert = in_convex_hull(s2, belief({0.0491, 0.7308, 0.2201}));
        REQUIRE_FALSE(cert.member);
        CHECK(cert.separation > kHullTol);
        const double at_p = cert.separator(belief({0.0491, 0.7308, 0.2201}));
        for (const Belief& q : s2) CHECK(at_p - cert.separator(q) >= cert.separation - 1e-12);
    }
    SUBCASE("constructed midpoints are members") {
        Belief mid(0.5 * s2[0].weights() + 0.5 * s2[1].weights());
        HullCertificate cert = in_convex_hull(s2, mid);
        REQUIRE(cert.member);
        CHECK(cert.weights.minCoeff() >= -kHullTol);
        CHECK(cert.weights.sum() == doctest::Approx(1.0).epsilon(1e-8));
        Vector recon = Vector::Zero(3);
        for (Index j = 0; j < 3; ++j) recon += cert.weights(j) * s2[static_cast<size_t>(j)].weights();
        CHECK((recon - mid.weights()).cwiseAbs().maxCoeff() <= 1e-7);
    }
}

TEST_CASE("hull membership agrees with barycentric coordinates on full bases") {
    Rng rng(29);
    int members = 0;
    for (int trial = 0; trial < 40; ++trial) {
        const Index dim = 2 + trial % 3;
        auto basis = random_affine_basis(rng, dim);
        Belief p = rng.belief(dim);
        const bool by_alpha = barycentric_coords(basis, p).alpha.minCoeff() >= -kHullTol;
        const bool by_hull = in_convex_hull(basis, p).member;
        CHECK(by_alpha == by_hull);
        members += by_hull;
    }
    CHECK(members > 0);  // the draw should produce both outcomes
    CHECK(members < 40);
}

TEST_CASE("affine interpolation through graph points") {
    auto s1 = example1_s1();
    // Entropy-reduction values at the S1 posteriors.
    Belief uniform = Belief::uniform(3);
    auto cost = [&](const Belief& p) { return entropy(uniform) - entropy(p); };

    std::vector<std::pair<Belief, double>> anchors;
    std::vector<double> values;
    for (const Belief& p : s1) {
        anchors.emplace_back(p, cost(p));
        values.push_back(cost(p));
    }
    AffineFunctional h1 = affine_from_graph(anchors);
    SUBCASE("interpolates every anchor") {
        for (const auto& [p, v] : anchors) CHECK(h1(p) == doctest::Approx(v).epsilon(1e-9));
    }
    SUBCASE("matches the oracle at p2''") {
        Belief p2pp = belief({0.4141, 0.1069, 0.4790});
        CHECK(h1(p2pp) ==
              doctest::Approx(testsupport::gauss_affine_value(s1, values, p2pp)).epsilon(1e-10));
    }
    SUBCASE("anchor order does not matter") {
        std::vector<std::pair<Belief, double>> permuted{anchors[2], anchors[0], anchors[1]};
        AffineFunctional h1p = affine_from_graph(permuted);
        Rng rng(3);
        for (int i = 0; i < 20; ++i) {
            Belief p = rng.belief(3);
            CHECK(h1(p) == doctest::Approx(h1p(p)).epsilon(1e-10));
        }
    }
    SUBCASE("constant anchors give the constant functional") {
        std::vector<std::pair<Belief, double>> flat;
        for (const Belief& p : s1) flat.emplace_back(p, 2.5);
        AffineFunctional c = affine_from_graph(flat);
        Rng rng(4);
        for (int i = 0; i < 20; ++i) CHECK(c(rng.belief(3)) == doctest::Approx(2.5).epsilon(1e-10));
    }
    SUBCASE("degenerate anchors are rejected") {
        std::vector<std::pair<Belief, double>> bad{{belief({0.5, 0.25, 0.25}), 1.0},
                                                   {belief({0.5, 0.25, 0.25}), 2.0}};
        CHECK_THROWS_AS(affine_from_graph(bad), DegenerateBasis);
    }
}

TEST_CASE("underdetermined interpolation returns the minimum-norm coefficients") {
    std::vector<std::pair<Belief, double>> anchors{{belief({0.6, 0.2, 0.2}), 1.0},
                                                   {belief({0.2, 0.6, 0.2}), 2.0}};
    AffineFunctional f = affine_from_graph(anchors);
    for (const auto& [p, v] : anchors) CHECK(f(p) == doctest::Approx(v).epsilon(1e-9));
    // Minimum-norm solutions lie in the row space of the anchor matrix.
    Matrix rows(2, 3);
    rows.row(0) = anchors[0].first.weights().transpose();
    rows.row(1) = anchors[1].first.weights().transpose();
    Vector projected = rows.transpose() *
                       (rows * rows.transpose()).ldlt().solve(rows * f.coefficients());
    CHECK((projected - f.coefficients()).cwiseAbs().maxCoeff() <= 1e-9);
}

TEST_CASE("simplex grid enumeration") {
    SUBCASE("dim 2, resolution 2") {
        auto grid = simplex_grid(2, 2);
        REQUIRE(grid.size() == 3);
        CHECK(grid[0].almost_equal(belief({1.0, 0.0})));
        CHECK(grid[1].almost_equal(belief({0.5, 0.5})));
        CHECK(grid[2].almost_equal(belief({0.0, 1.0})));
    }
    SUBCASE("dim 3, resolution 1 gives the vertices") {
        auto grid = simplex_grid(3, 1);
        REQUIRE(grid.size() == 3);
        CHECK(grid[0].almost_equal(Belief::vertex(3, 0)));
        CHECK(grid[2].almost_equal(Belief::vertex(3, 2)));
    }
    SUBCASE("dim 3, resolution 4 has C(6,2) = 15 points") {
        CHECK(simplex_grid(3, 4).size() == 15);
    }
    SUBCASE("contains vertices and the uniform point when divisible") {
        auto grid = simplex_grid(3, 6);
        bool has_uniform = false;
        int vertices = 0;
        for (const Belief& p : grid) {
            if (p.almost_equal(Belief::uniform(3))) has_uniform = true;
            for (Index i = 0; i < 3; ++i)
                if (p.almost_equal(Belief::vertex(3, i))) ++vertices;
        }
        CHECK(has_uniform);
        CHECK(vertices == 3);
    }
}

TEST_CASE("local simplex grid is a window of the full grid") {
    Belief center = belief({0.5, 0.3, 0.2});
    auto local = local_simplex_grid(center, 16, 2);
    CHECK(!local.empty());
    for (const Belief& p : local) {
        for (Index i = 0; i < 3; ++i) {
            const double steps = std::abs(p[i] - std::round(center[i] * 16) / 16.0) * 16;
            CHECK(steps <= 2.0 + 1e-9);
            CHECK(std::abs(p[i] * 16 - std::round(p[i] * 16)) <= 1e-9);
        }
    }
}
