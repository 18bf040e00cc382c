#include "quench/grid.hpp"

#include <doctest.h>

#include <cmath>
#include <set>

using namespace quench;

TEST_CASE("make_grid basic arithmetic") {
    const auto g = make_grid(1, -1.0, 1.0, 3, 1.0, 1.0);
    CHECK(g.h == doctest::Approx(1.0));
    CHECK(g.levels == 2);
    CHECK(g.time(g.levels - 1) == 0.0);
    CHECK(g.time(0) == doctest::Approx(-1.0));

    CHECK(make_grid(1, 0.0, 1.0, 101, 1.0, 0.5).h == doctest::Approx(0.01));
    CHECK(make_grid(2, -1.0, 1.0, 65, 1.0, 0.5).h == doctest::Approx(0.03125));

    // ceil(T/dt)+1 levels, final level pinned to zero
    const auto g2 = make_grid(1, -1.0, 1.0, 5, 1.0, 0.3);
    CHECK(g2.levels == 5);
    CHECK(g2.dt == doctest::Approx(0.25));
    CHECK(g2.time(g2.levels - 1) == 0.0);
}

TEST_CASE("make_grid rejects bad input") {
    CHECK_THROWS_AS(make_grid(3, -1, 1, 5, 1, 0.1), std::invalid_argument);
    CHECK_THROWS_AS(make_grid(1, 1, -1, 5, 1, 0.1), std::invalid_argument);
    CHECK_THROWS_AS(make_grid(1, -1, 1, 2, 1, 0.1), std::invalid_argument);
    CHECK_THROWS_AS(make_grid(1, -1, 1, 5, -1, 0.1), std::invalid_argument);
    CHECK_THROWS_AS(make_grid(1, -1, 1, 5, 1, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(make_grid(1, -1, 1, 5, std::nan(""), 0.1), std::invalid_argument);
}

TEST_CASE("central differences are exact on low-degree polynomials") {
    const auto g = make_grid(1, -1.0, 1.0, 21, 1.0, 1.0);
    GridFunction affine(g), constant(g), quad(g);
    for (int node = 0; node < g.num_nodes(); ++node) {
        const double x = g.coord(node);
        for (int k = 0; k < g.levels; ++k) {
            affine.at(node, k) = x;
            constant.at(node, k) = 3.5;
            quad.at(node, k) = x * x;
        }
    }
    for (int node = 1; node < g.num_nodes() - 1; ++node) {
        CHECK(discrete_gradient(affine, node, 0)[0] == doctest::Approx(1.0).epsilon(1e-14));
        CHECK(discrete_gradient(constant, node, 0)[0] == 0.0);
        CHECK(discrete_hessian(quad, node, 0).xx == doctest::Approx(2.0).epsilon(1e-12));
    }
    // gradient of x^2 at x = 0.5 with h = 0.1 is exactly 1
    const auto g01 = make_grid(1, 0.0, 1.0, 11, 1.0, 1.0);
    GridFunction q(g01);
    for (int node = 0; node < g01.num_nodes(); ++node) {
        for (int k = 0; k < g01.levels; ++k) q.at(node, k) = g01.coord(node) * g01.coord(node);
    }
    CHECK(discrete_gradient(q, 5, 0)[0] == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("hessian cross stencil is exact on bilinear functions") {
    const auto g = make_grid(2, -1.0, 1.0, 9, 1.0, 1.0);
    GridFunction xy(g);
    for (int node = 0; node < g.num_nodes(); ++node) {
        const auto p = g.point(node);
        for (int k = 0; k < g.levels; ++k) xy.at(node, k) = p[0] * p[1];
    }
    const int node = g.flatten(4, 4);
    const auto h = discrete_hessian(xy, node, 0);
    CHECK(h.xx == doctest::Approx(0.0));
    CHECK(h.yy == doctest::Approx(0.0));
    CHECK(h.xy == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("hessian truncation error is second order") {
    // |D2_h x^4 - 12 x^2| = 2 h^2 at any x; halving h quarters it.
    const auto sample = [](double h) {
        const auto g = make_grid(1, 1.0 - 4 * h, 1.0 + 4 * h, 9, 1.0, 1.0);
        GridFunction f(g);
        for (int node = 0; node < g.num_nodes(); ++node) {
            const double x = g.coord(node);
            for (int k = 0; k < g.levels; ++k) f.at(node, k) = x * x * x * x;
        }
        const int node = 4;
        const double x = g.coord(node);
        return std::abs(discrete_hessian(f, node, 0).xx - 12.0 * x * x);
    };
    const double e1 = sample(0.1);
    const double e2 = sample(0.05);
    CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.05));
}

TEST_CASE("stencils reject boundary nodes") {
    const auto g = make_grid(1, -1.0, 1.0, 5, 1.0, 1.0);
    GridFunction f(g);
    CHECK_THROWS_AS(discrete_gradient(f, 0, 0), std::invalid_argument);
    CHECK_THROWS_AS(discrete_hessian(f, g.num_nodes() - 1, 0), std::invalid_argument);
}

TEST_CASE("cylinder_nodes enumerates the intrinsic cylinder") {
    const auto g = make_grid(1, -1.0, 1.0, 5, 0.25, 0.25);  // h = 0.5, dt = 0.25
    REQUIRE(g.levels == 2);

    SUBCASE("half-open time interval excludes the lower level") {
        const auto nodes = cylinder_nodes(g, {2, 1, 0.5});
        REQUIRE(nodes.size() == 3);
        std::set<int> xs;
        for (const auto& [node, level] : nodes) {
            CHECK(level == 1);
            xs.insert(node);
        }
        CHECK(xs == std::set<int>{1, 2, 3});
    }

    SUBCASE("tiny radius keeps only the center") {
        const auto nodes = cylinder_nodes(g, {2, 1, 0.4});
        REQUIRE(nodes.size() == 1);
        CHECK(nodes[0] == std::pair<int, int>{2, 1});
    }

    SUBCASE("escaping the domain names the face") {
        CHECK_THROWS_WITH_AS(cylinder_nodes(g, {2, 1, 1.5}), doctest::Contains("x_min"),
                             std::invalid_argument);
        CHECK_THROWS_WITH_AS(cylinder_nodes(g, {3, 1, 0.75}), doctest::Contains("x_max"),
                             std::invalid_argument);
        CHECK_THROWS_WITH_AS(cylinder_nodes(g, {2, 1, 0.9}), doctest::Contains("t_min"),
                             std::invalid_argument);
    }
}

TEST_CASE("cylinder_nodes is monotone in the radius") {
    const auto g = make_grid(1, -1.0, 1.0, 33, 0.5, 0.01);
    const int center = 16;
    const int top = g.levels - 1;
    std::vector<std::pair<int, int>> prev;
    for (double rho : {0.05, 0.1, 0.2, 0.4}) {
        auto cur = cylinder_nodes(g, {center, top, rho});
        std::set<std::pair<int, int>> cur_set(cur.begin(), cur.end());
        for (const auto& p : prev) CHECK(cur_set.count(p) == 1);
        prev = cur;
    }
}

TEST_CASE("2D cylinders use euclidean balls") {
    const auto g = make_grid(2, -1.0, 1.0, 9, 0.5, 0.01);
    const int center = g.flatten(4, 4);
    const auto nodes = cylinder_nodes(g, {center, g.levels - 1, 0.3});
    // h = 0.25: the ball of radius 0.3 holds the center and 4 axis neighbours,
    // but not the diagonal ones (distance 0.3536).
    std::set<int> uniq;
    for (const auto& [node, level] : nodes) uniq.insert(node);
    CHECK(uniq.size() == 5);
}

TEST_CASE("discrete_hessian output is bitwise symmetric") {
    const auto g = make_grid(2, -1.0, 1.0, 9, 1.0, 1.0);
    GridFunction f(g);
    for (int node = 0; node < g.num_nodes(); ++node) {
        const auto p = g.point(node);
        f.at(node, 0) = std::sin(3 * p[0]) * std::cos(2 * p[1]);
        f.at(node, 1) = f.at(node, 0);
    }
    const auto h = discrete_hessian(f, g.flatten(3, 5), 1);
    // single stored off-diagonal entry: symmetry is structural
    const auto m = SymMatrix::from_entries(2, h.xx, h.xy, h.xy, h.yy);
    CHECK(m.xy == h.xy);
    CHECK_THROWS_AS(SymMatrix::from_entries(2, 1.0, 0.5, 0.25, 1.0), std::invalid_argument);
}
