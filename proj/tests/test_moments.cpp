#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "enclosure/errors.hpp"
#include "enclosure/moments.hpp"

using namespace enclosure;

namespace {
constexpr double pi = std::numbers::pi;

HarmonicTrace random_trace(std::mt19937_64& rng, int n) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<double> alpha(n + 1), beta(n);
    for (double& x : alpha) x = u(rng);
    for (double& x : beta) x = u(rng);
    return {alpha, beta};
}

// relative distance of two scaled values
double rel_diff(const ScaledComplex& x, const ScaledComplex& y) {
    const double ref = std::max(x.log_scale(), y.log_scale());
    const cdouble dx = x.relative_to(ref), dy = y.relative_to(ref);
    return std::abs(dx - dy) / std::abs(dx);
}

// coefficients straight from the defining formula, as a second opinion;
// C_0 is stated separately and equals half the general expression at m = 0
std::vector<cdouble> coefficients_by_hand(const EllipseDomain& d, const HarmonicTrace& f) {
    const double ap = d.a_plus(), am = d.a_minus();
    const double up = std::sqrt((d.a() + d.b()) / (d.a() - d.b()));
    std::vector<cdouble> c;
    for (int m = 0; m <= f.band_limit() + 1; ++m) {
        c.push_back((m == 0 ? 0.5 : 1.0) * ((am * f.gamma(m - 1) + ap * f.gamma(m + 1)) * std::pow(up, m) +
                    (am * std::conj(f.gamma(m + 1)) + ap * std::conj(f.gamma(m - 1))) * std::pow(1.0 / up, m)));
    }
    return c;
}
}  // namespace

TEST_SUITE("moments") {
    TEST_CASE("coefficients for cos theta on the 2:1 ellipse") {
        const MomentCoefficients c = coefficients(EllipseDomain(2, 1), HarmonicTrace::cosine(1));
        REQUIRE(c.size() == 3);
        CHECK(std::abs(c[0] - cdouble(0.25)) < 1e-15);
        CHECK(std::abs(c[1]) < 1e-15);
        CHECK(std::abs(c[2] - cdouble(-0.25)) < 1e-15);
        CHECK(c[3] == cdouble{});
        const MomentCoefficients zero = coefficients(EllipseDomain(2, 1), HarmonicTrace());
        for (cdouble v : zero.values()) CHECK(v == cdouble{});
        CHECK_THROWS_AS(coefficients(EllipseDomain(1, 1), HarmonicTrace::cosine(1)), CircleBranchError);
    }

    TEST_CASE("coefficients match the formula and sum to zero") {
        std::mt19937_64 rng(21);
        for (double ratio : {1.1, 1.5, 2.0, 4.0}) {
            const EllipseDomain d(ratio, 1.0);
            for (int rep = 0; rep < 10; ++rep) {
                const HarmonicTrace f = random_trace(rng, 1 + rep % 6);
                const MomentCoefficients c = coefficients(d, f);
                const auto ref = coefficients_by_hand(d, f);
                REQUIRE(c.size() == static_cast<int>(ref.size()));
                for (int m = 0; m < c.size(); ++m) CHECK(std::abs(c[m] - ref[m]) <= 1e-13 * c.max_abs());
                CHECK(std::abs(c.sum()) <= 1e-12 * c.max_abs());
            }
        }
    }

    TEST_CASE("circle moment") {
        const EllipseDomain disc(1, 1);
        for (double tau : {0.5, 3.0, 40.0, 900.0}) {
            const cdouble v = moment_series(disc, HarmonicTrace::cosine(1), Direction(0.3, -0.8), tau).value();
            CHECK(std::abs(v - cdouble(pi)) < 1e-13);
        }
        const cdouble q = moment_quadrature(disc, HarmonicTrace::cosine(1), Direction(0, 1), 3.0).value();
        CHECK(std::abs(q - cdouble(pi)) < 1e-10);
        CHECK(moment_series(disc, HarmonicTrace(), Direction(1, 0), 2.0).is_zero());
        CHECK(moment_quadrature(EllipseDomain(2, 1), HarmonicTrace(), Direction(1, 0), 2.0).is_zero());
    }

    TEST_CASE("circle moment grows polynomially") {
        const EllipseDomain disc(1.3, 1.3);
        for (int n = 2; n <= 5; ++n) {
            const HarmonicTrace f = HarmonicTrace::cosine(n) + HarmonicTrace::sine(1, 0.7);
            const Direction w(0.6, 0.8);
            const double t1 = 1e4, t2 = 1e5;
            const double slope = (moment_series(disc, f, w, t2).log_abs() - moment_series(disc, f, w, t1).log_abs()) /
                                 std::log(t2 / t1);
            CHECK(slope == doctest::Approx(n - 1).epsilon(0.05 / (n - 1)));
        }
    }

    TEST_CASE("series against quadrature") {
        const EllipseDomain d(2, 1);
        CHECK(rel_diff(moment_series(d, HarmonicTrace::cosine(1), Direction(1, 0), 5.0),
                       moment_quadrature(d, HarmonicTrace::cosine(1), Direction(1, 0), 5.0)) < 1e-8);
        CHECK(rel_diff(moment_series(d, HarmonicTrace::cosine(2), Direction(1, 1), 8.0),
                       moment_quadrature(d, HarmonicTrace::cosine(2), Direction(1, 1), 8.0)) < 1e-8);

        std::mt19937_64 rng(4);
        std::uniform_real_distribution<double> ang(-pi, pi);
        for (double ratio : {1.0, 1.5, 2.0, 4.0}) {
            const EllipseDomain e(ratio, 1.0);
            for (double tau : {1.0, 5.0, 10.0, 20.0}) {
                const HarmonicTrace f = random_trace(rng, 1 + static_cast<int>(tau) % 6);
                const Direction w = Direction::from_angle(ang(rng));
                const ScaledComplex s = moment_series(e, f, w, tau);
                const ScaledComplex q = moment_quadrature(e, f, w, tau);
                CHECK(rel_diff(s, q) <= 1e-8);
            }
        }
    }

    TEST_CASE("reflection antisymmetry") {
        std::mt19937_64 rng(8);
        std::uniform_real_distribution<double> ang(-pi, pi);
        for (double ratio : {1.0, 2.0, 3.0}) {
            const EllipseDomain d(ratio, 1.0);
            for (int rep = 0; rep < 5; ++rep) {
                const HarmonicTrace f = random_trace(rng, 4);
                const Direction w = Direction::from_angle(ang(rng));
                const double tau = 2.0 + 3 * rep;
                const ScaledComplex lhs = moment_series(d, f, w, tau);
                const ScaledComplex rhs = -moment_series(d, reflect(f), w.flipped(), tau);
                CHECK(rel_diff(lhs, rhs) <= 1e-10);
            }
        }
    }

    TEST_CASE("sum condition") {
        const EllipseDomain d(2, 1);
        CHECK(std::abs(condition_sum(HarmonicTrace::cosine(1), d, +1) - cdouble(-1.0)) < 1e-14);
        const HarmonicTrace tuned = HarmonicTrace::cosine(1) + HarmonicTrace::cosine(2, -std::sqrt(3.0) / 8);
        CHECK(std::abs(condition_sum(tuned, d, +1)) < 1e-14);
        CHECK(std::abs(condition_sum(tuned, d, -1) - cdouble(-2.0)) < 1e-14);
        CHECK(condition_sum(HarmonicTrace(), d, +1) == cdouble{});

        std::mt19937_64 rng(2);
        for (int rep = 0; rep < 20; ++rep) {
            const HarmonicTrace f = random_trace(rng, 1 + rep % 7);
            for (int s : {-1, 1}) {
                const cdouble direct = condition_sum(f, d, s);
                const cdouble closed = condition_sum_closed_form(f, d, s);
                CHECK(std::abs(direct + s * 2.0 / (d.a() * d.b()) * closed) <= 1e-12 * std::max(1.0, std::abs(direct)));
            }
        }
    }

    TEST_CASE("vertical condition") {
        const EllipseDomain d(2, 1);
        // C_m(f*) = -C_m(f) for a single odd harmonic, so the sum is (1 - i) times -1
        const cdouble v = condition_vertical(HarmonicTrace::cosine(1), d, +1);
        CHECK(std::abs(v - cdouble(-1.0, 1.0)) < 1e-14);
        CHECK(std::abs(v) == doctest::Approx(std::sqrt(2.0)));
        CHECK(condition_vertical(HarmonicTrace(), d, +1) == cdouble{});
        CHECK(std::abs(condition_vertical(HarmonicTrace::cosine(2), d, +1)) > 0.1);

        std::mt19937_64 rng(3);
        for (int rep = 0; rep < 20; ++rep) {
            const HarmonicTrace f = random_trace(rng, 1 + rep % 7);
            for (int s : {-1, 1}) {
                const MomentCoefficients c = coefficients(d, f), cr = coefficients(d, reflect(f));
                cdouble direct = 0.0;
                for (int m = 1; m <= f.band_limit() + 1; ++m)
                    direct += double(m * m) * (c[m] + cdouble(0, s) * cr[m]);
                CHECK(std::abs(condition_vertical(f, d, s) - direct) <= 1e-12 * std::max(1.0, std::abs(direct)));
                CHECK(std::abs(direct + 2.0 / (d.a() * d.b()) * condition_vertical_closed_form(f, d, s)) <=
                      1e-12 * std::max(1.0, std::abs(direct)));
            }
        }
    }
}
