#include <doctest.h>

#include "oracles.hpp"
#include "stregion/delaunay.hpp"
#include "stregion/errors.hpp"
#include "stregion/predicates.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace stregion;
using geometry::PlanarPoint;

namespace {

std::vector<PlanarPoint> random_points(std::mt19937_64& rng, std::size_t n) {
    std::uniform_real_distribution<double> u(-10.0, 10.0);
    std::vector<PlanarPoint> pts;
    for (std::uint32_t i = 0; i < n; ++i) pts.push_back({i, u(rng), u(rng)});
    return pts;
}

} // namespace

TEST_CASE("orientation and in-circle signs") {
    using geometry::Point2;
    CHECK(geometry::orient2d({0, 0}, {1, 0}, {0, 1}) == 1);
    CHECK(geometry::orient2d({0, 0}, {0, 1}, {1, 0}) == -1);
    CHECK(geometry::orient2d({0, 0}, {1, 1}, {2, 2}) == 0);
    CHECK(geometry::incircle({0, 0}, {1, 0}, {0, 1}, {0.5, 0.5}) == 1);
    CHECK(geometry::incircle({0, 0}, {1, 0}, {0, 1}, {1, 1}) == 0);
    CHECK(geometry::incircle({0, 0}, {1, 0}, {0, 1}, {2, 2}) == -1);
}

TEST_CASE("predicates stay exact on nearly degenerate input") {
    // Points on the line y = x perturbed in the last bit; a naive
    // determinant gets these wrong.
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.5, 2.0);
    for (int i = 0; i < 2000; ++i) {
        const double a = u(rng), b = u(rng), c = u(rng);
        const double cy = std::nextafter(c, i % 2 ? 10.0 : -10.0);
        const int expected = oracle::orient_sign(a, a, b, b, c, cy);
        CHECK(geometry::orient2d({a, a}, {b, b}, {c, cy}) == expected);
    }
    for (int i = 0; i < 500; ++i) {
        const double r = u(rng), th1 = u(rng), th2 = th1 + 1.3, th3 = th2 + 1.7, th4 = th3 + 0.9;
        geometry::Point2 p[4] = {{r * std::cos(th1), r * std::sin(th1)},
                                 {r * std::cos(th2), r * std::sin(th2)},
                                 {r * std::cos(th3), r * std::sin(th3)},
                                 {r * std::cos(th4), r * std::sin(th4)}};
        CHECK(geometry::incircle(p[0], p[1], p[2], p[3]) ==
              oracle::incircle_sign(p[0].x, p[0].y, p[1].x, p[1].y, p[2].x, p[2].y, p[3].x, p[3].y));
    }
}

TEST_CASE("three non-collinear points make one triangle") {
    std::vector<PlanarPoint> pts{{0, 0, 0}, {1, 1, 0}, {2, 0, 1}};
    const auto g = geometry::build_delaunay(pts);
    CHECK(g.edges().size() == 3);
    CHECK(g.triangles().size() == 1);
    CHECK(g.neighbors(0) == std::vector<LocationIndex>{1, 2});
}

TEST_CASE("unit square has five edges") {
    std::vector<PlanarPoint> pts{{0, 0, 0}, {1, 1, 0}, {2, 1, 1}, {3, 0, 1}};
    const auto g = geometry::build_delaunay(pts);
    CHECK(g.edges().size() == 5);
    CHECK(g.triangles().size() == 2);
    CHECK(oracle::circumcircle_violations(g) == 0);
    // The same input always picks the same diagonal.
    CHECK(oracle::edge_ids(geometry::build_delaunay(pts)) == oracle::edge_ids(g));
}

TEST_CASE("degenerate inputs") {
    SUBCASE("one point") {
        std::vector<PlanarPoint> pts{{4, 1, 1}};
        const auto g = geometry::build_delaunay(pts);
        CHECK(g.size() == 1);
        CHECK(g.edges().empty());
        CHECK(g.neighbors(4).empty());
    }
    SUBCASE("two points") {
        std::vector<PlanarPoint> pts{{0, 0, 0}, {1, 3, 4}};
        const auto g = geometry::build_delaunay(pts);
        REQUIRE(g.edges().size() == 1);
        CHECK(g.edges()[0].length == doctest::Approx(5.0));
        CHECK(g.neighbors(0) == std::vector<LocationIndex>{1});
        CHECK(g.neighbors(1) == std::vector<LocationIndex>{0});
    }
    SUBCASE("collinear points form a path in coordinate order") {
        std::vector<PlanarPoint> pts{{0, 2, 2}, {1, 0, 0}, {2, 3, 3}, {3, 1, 1}};
        const auto g = geometry::build_delaunay(pts);
        CHECK(g.triangles().empty());
        CHECK(oracle::edge_ids(g) == std::set<std::pair<std::uint32_t, std::uint32_t>>{{1, 3}, {0, 3}, {0, 2}});
    }
    SUBCASE("coincident points") {
        std::vector<PlanarPoint> pts{{0, 0, 0}, {1, 1, 0}, {2, 0, 0}};
        CHECK_THROWS_AS(geometry::build_delaunay(pts), DuplicatePoints);
        geometry::DelaunayOptions opts;
        opts.jitter_duplicates = true;
        const auto g = geometry::build_delaunay(pts, opts);
        CHECK(g.size() == 3);
        CHECK(g.components(std::vector<LocationIndex>{0, 1, 2}).size() == 1);
        const auto again = geometry::build_delaunay(pts, opts);
        CHECK(oracle::edge_ids(again) == oracle::edge_ids(g));
        for (std::size_t i = 0; i < 3; ++i) {
            CHECK(std::fabs(g.vertices()[i].x - pts[i].x) <= 1e-9 * std::sqrt(2.0));
            CHECK(std::fabs(g.vertices()[i].y - pts[i].y) <= 1e-9 * std::sqrt(2.0));
        }
    }
    SUBCASE("non-finite and repeated ids") {
        std::vector<PlanarPoint> nan{{0, 0, 0}, {1, NAN, 0}};
        CHECK_THROWS_AS(geometry::build_delaunay(nan), std::invalid_argument);
        std::vector<PlanarPoint> rep{{0, 0, 0}, {0, 1, 0}};
        CHECK_THROWS_AS(geometry::build_delaunay(rep), std::invalid_argument);
    }
}

TEST_CASE("a hub surrounded by seven points has seven neighbours") {
    std::vector<PlanarPoint> pts{{100, 0.0, 0.0}};
    for (std::uint32_t k = 0; k < 7; ++k) {
        const double a = 2.0 * std::numbers::pi * k / 7.0 + 0.1;
        pts.push_back({k, std::cos(a) * (1.0 + 0.05 * k), std::sin(a) * (1.0 + 0.05 * k)});
    }
    const auto g = geometry::build_delaunay(pts);
    CHECK(g.neighbors(100).size() == 7);
}

TEST_CASE("neighbour queries") {
    std::vector<PlanarPoint> pts{{0, 0, 0}, {1, 1, 0}, {2, 0, 1}};
    const auto g = geometry::build_delaunay(pts);
    CHECK_THROWS_AS(g.neighbors(9), UnknownVertex);
    CHECK_THROWS_AS(g.position_of(9), UnknownVertex);
    CHECK(g.edge_length(0, 2) == doctest::Approx(1.0));
    CHECK(g.edge_length(1, 2) == doctest::Approx(std::sqrt(2.0)));
    CHECK_THROWS(g.components(std::vector<LocationIndex>{0, 9}));
}

TEST_CASE("components") {
    // 0 - 1 - 2 on a line with 3 far above the middle.
    std::vector<PlanarPoint> pts{{0, 0, 0}, {1, 1, 0}, {2, 2, 0}, {3, 1, 5}};
    const auto g = geometry::build_delaunay(pts);
    CHECK(g.components(std::vector<LocationIndex>{0, 1, 2, 3}).size() == 1);
    CHECK(g.components(std::vector<LocationIndex>{}).empty());
    const auto split = g.components(std::vector<LocationIndex>{2, 0});
    REQUIRE(split.size() == 2);
    CHECK(split[0] == std::vector<LocationIndex>{0});
    CHECK(split[1] == std::vector<LocationIndex>{2});
}

TEST_CASE("random triangulations satisfy the empty-circumcircle property") {
    std::mt19937_64 rng(42);
    for (std::size_t n = 3; n <= 12; ++n) {
        for (int rep = 0; rep < 40; ++rep) {
            const auto pts = random_points(rng, n);
            const auto g = geometry::build_delaunay(pts);
            CHECK(oracle::circumcircle_violations(g) == 0);
            CHECK(g.edges().size() <= 3 * n - 6);
        }
    }
}

TEST_CASE("integer grids with many co-circular quadruples") {
    std::vector<PlanarPoint> pts;
    std::uint32_t id = 0;
    for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 5; ++j) pts.push_back({id++, static_cast<double>(i), static_cast<double>(j)});
    const auto g = geometry::build_delaunay(pts);
    CHECK(oracle::circumcircle_violations(g) == 0);
    // A triangulated grid of w x h points has 3wh - 2w - 2h + 1 edges.
    CHECK(g.edges().size() == 3 * 30 - 12 - 10 + 1);
    // Input order does not change the result.
    std::vector<PlanarPoint> reversed(pts.rbegin(), pts.rend());
    CHECK(oracle::edge_ids(geometry::build_delaunay(reversed)) == oracle::edge_ids(g));
}

TEST_CASE("graph invariants on larger random sets") {
    std::mt19937_64 rng(5);
    for (std::size_t n : {20u, 100u, 400u}) {
        const auto pts = random_points(rng, n);
        const auto g = geometry::build_delaunay(pts);
        std::vector<LocationIndex> all;
        for (const auto& p : pts) all.push_back(p.id);
        CHECK(g.components(all).size() == 1);
        CHECK(g.edges().size() <= 3 * n - 6);
        for (const auto& p : pts) {
            for (auto nb : g.neighbors(p.id)) {
                const auto back = g.neighbors(nb);
                CHECK(std::binary_search(back.begin(), back.end(), p.id));
                const auto& q = pts[nb];
                CHECK(g.edge_length(p.id, nb) == std::hypot(p.x - q.x, p.y - q.y));
            }
        }
        if (n <= 100) CHECK(oracle::circumcircle_violations(g) == 0);
    }
}
