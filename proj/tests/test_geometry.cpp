#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "enclosure/errors.hpp"
#include "enclosure/geometry.hpp"

using namespace enclosure;

namespace {
const PolygonRegion unit_square({{0, 0}, {1, 0}, {1, 1}, {0, 1}});

// region-to-ellipse distance by brute force over both boundaries
double brute_distance(const PolygonRegion& r, const EllipseDomain& d) {
    double best = 1e300;
    for (std::size_t i = 0; i < r.size(); ++i)
        for (int s = 0; s <= 100; ++s) {
            const Vec2 p = r.vertex(i) + (r.vertex(i + 1) - r.vertex(i)) * (s / 100.0);
            for (int k = 0; k < 20000; ++k) best = std::min(best, norm(p - d.point(2 * std::numbers::pi * k / 20000)));
        }
    return best;
}
}  // namespace

TEST_SUITE("geometry") {
    TEST_CASE("support function of the unit square and a triangle") {
        CHECK(support_function(unit_square, Direction(1, 0)) == doctest::Approx(1.0));
        CHECK(support_function(unit_square, Direction(1, 1)) == doctest::Approx(std::sqrt(2.0)));
        const PolygonRegion tri({{0, 0}, {1, 0}, {0, 1}});
        CHECK(support_function(tri, Direction(0, -1)) == doctest::Approx(0.0));
    }

    TEST_CASE("focal support") {
        CHECK(focal_support(EllipseDomain(2, 1), Direction(1, 0)) == doctest::Approx(std::sqrt(3.0)));
        CHECK(focal_support(EllipseDomain(2, 1), Direction(0, 1)) == doctest::Approx(0.0));
        CHECK(focal_support(EllipseDomain(1, 1), Direction(0.3, 0.7)) == doctest::Approx(0.0));
    }

    TEST_CASE("pair support") {
        const EllipseDomain disc(1, 1);
        const PointPair pq({1, 0}, {-1, 0}, disc);
        CHECK(pair_support(pq, Direction(1, 0)) == doctest::Approx(1.0));
        CHECK(pair_support(pq, Direction(0, 1)) == doctest::Approx(0.0).epsilon(1e-15));
        const PointPair pq2({2, 0}, {0, 1}, EllipseDomain(2, 1));
        CHECK(pair_support(pq2, Direction(1, 1)) == doctest::Approx(std::sqrt(2.0)));
        CHECK_THROWS_AS(PointPair({0.5, 0}, {-1, 0}, disc), InvalidRegion);
    }

    TEST_CASE("regularity") {
        CHECK_FALSE(is_regular(unit_square, Direction(1, 0)));
        CHECK(is_regular(unit_square, Direction(1, 1)));
        const PolygonRegion hex = PolygonRegion::regular(6, 1.0);
        for (std::size_t i = 0; i < hex.size(); ++i) {
            const Vec2 n = hex.edge_normal(i);
            CHECK_FALSE(is_regular(hex, Direction(n.x, n.y)));
        }
        std::mt19937_64 rng(3);
        std::uniform_real_distribution<double> ang(-std::numbers::pi, std::numbers::pi);
        int irregular = 0;
        for (int i = 0; i < 10000; ++i) irregular += !is_regular(hex, Direction::from_angle(ang(rng)));
        CHECK(irregular == 0);
    }

    TEST_CASE("admissibility") {
        const EllipseDomain d(2, 1);
        const PolygonRegion small = PolygonRegion::square(0.2, {0.3, -0.1});
        const Clearance c = clearance(small, d);
        CHECK(c.diameter == doctest::Approx(0.2 * std::sqrt(2.0)));
        CHECK(c.distance == doctest::Approx(brute_distance(small, d)).epsilon(1e-5));
        CHECK(c.admissible());
        CHECK_FALSE(admissibility(PolygonRegion::square(1.0), d));
        CHECK_FALSE(admissibility(PolygonRegion({{1.999, 0}, {1.5, 0.1}, {1.5, -0.1}}), d));
        CHECK_THROWS_AS(clearance(PolygonRegion::square(3.0), d), ContainmentError);
    }

    TEST_CASE("invalid polygons") {
        CHECK_THROWS_AS(PolygonRegion({{0, 0}, {1, 0}, {2, 0}}), InvalidRegion);
        CHECK_THROWS_AS(PolygonRegion({{0, 0}, {1, 0}}), InvalidRegion);
        // clockwise input is reoriented
        const PolygonRegion cw({{0, 0}, {0, 1}, {1, 1}, {1, 0}});
        CHECK(cw.area() == doctest::Approx(1.0));
    }

    TEST_CASE("width and symmetry properties") {
        const EllipseDomain d(2, 1);
        const PolygonRegion tri = PolygonRegion::regular(3, 0.15, {0.0, 0.4}, 0.3);
        double max_jump = 0.0;
        const int n = 4096;
        double prev = support_function(tri, Direction::from_angle(0.0));
        for (int k = 1; k <= n; ++k) {
            const Direction w = Direction::from_angle(2 * std::numbers::pi * k / n);
            CHECK(support_function(tri, w) + support_function(tri, w.flipped()) >= 0.0);
            CHECK(focal_support(d, w) == doctest::Approx(focal_support(d, w.flipped())));
            CHECK(focal_support(d, w) <= d.a());
            const double h = support_function(tri, w);
            max_jump = std::max(max_jump, std::abs(h - prev));
            prev = h;
        }
        // a support function is Lipschitz in the angle with constant max |v|
        CHECK(max_jump <= 0.55 * 2 * std::numbers::pi / n * 1.0001);
    }

    TEST_CASE("ellipse boundary") {
        const EllipseDomain d(2, 1);
        for (double t : {0.0, 0.4, 2.0, 4.5}) {
            CHECK(d.level(d.point(t)) == doctest::Approx(0.0).epsilon(1e-14));
            CHECK(norm(d.normal(t)) == doctest::Approx(1.0));
        }
        CHECK(d.boundary_support({1, 0}) == doctest::Approx(2.0));
        CHECK_THROWS_AS(EllipseDomain(1, 2), InvalidDomain);
    }
}
