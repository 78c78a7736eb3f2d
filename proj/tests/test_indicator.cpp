#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "enclosure/errors.hpp"
#include "enclosure/indicator.hpp"
#include "enclosure/moments.hpp"

using namespace enclosure;

namespace {
constexpr double pi = std::numbers::pi;
using cd = std::complex<double>;

SolverOptions quick() {
    SolverOptions o;
    o.grid_points = 256;
    return o;
}

double rel(cd x, cd y) { return std::abs(x - y) / std::abs(y); }

BoundaryMeasurement empty_ellipse(const HarmonicTrace& f) {
    return solve_cavity(EllipseDomain(2, 1), std::nullopt, f, 1.0, quick());
}
}  // namespace

TEST_SUITE("indicator") {
    TEST_CASE("slope fit recovers an exact model") {
        IndicatorTrace t;
        for (double tau : log_spaced(2.0, 40.0, 24))
            t.add(tau, ScaledComplex::from_polar_log(1.7 * tau - 0.5 * std::log(tau) + 2.0, 0.3 * tau));
        const SlopeEstimate s = slope_fit(t);
        CHECK(s.value == doctest::Approx(1.7).epsilon(1e-9));
        CHECK(s.standard_error >= 0.0);
        CHECK(s.tau_min >= 2.0);
        CHECK(s.tau_max <= 40.0 * (1 + 1e-12));
        CHECK_FALSE(s.unreliable);

        IndicatorTrace few;
        for (double tau : log_spaced(2.0, 40.0, 5)) few.add(tau, ScaledComplex::from_polar_log(tau, 0.0));
        CHECK_THROWS_AS(slope_fit(few), InsufficientSamples);
        IndicatorTrace narrow;
        for (double tau : log_spaced(10.0, 20.0, 20)) narrow.add(tau, ScaledComplex::from_polar_log(tau, 0.0));
        CHECK_THROWS_AS(slope_fit(narrow), InsufficientSamples);
    }

    TEST_CASE("dips are dropped and flagged") {
        IndicatorTrace t;
        const auto taus = log_spaced(2.0, 40.0, 24);
        for (std::size_t k = 0; k < taus.size(); ++k) {
            const double tau = taus[k];
            const double dip = k == 20 ? -40.0 : 0.0;
            t.add(tau, ScaledComplex::from_polar_log(0.9 * tau + dip, 0.0));
        }
        const SlopeEstimate s = slope_fit(t);
        CHECK(s.unreliable);
        CHECK(s.dropped >= 1);
        CHECK(s.value == doctest::Approx(0.9).epsilon(1e-9));
    }

    TEST_CASE("disc with a concentric hole") {
        const BoundaryMeasurement m = analytic_disc(0.5, 1).measurement(128);
        for (double angle : {0.0, 1.1, -2.5})
            for (double tau : {0.5, 3.0, 7.0, 60.0}) {
                const Direction w = Direction::from_angle(angle);
                const cd expect = 0.6 * pi * tau * cd(w.omega().x, w.omega().y);
                double gauge = 0.0;
                const ScaledComplex got = FluxIntegrator(m).flux_moment(w, tau, &gauge);
                // the integrand reaches e^tau while J stays O(tau): past a few
                // units of tau only rounding relative to the gauge is meaningful
                if (tau < 8.0)
                    CHECK(rel(got.value(), expect) < 1e-10);
                else
                    CHECK(std::abs(got.relative_to(gauge) - expect * std::exp(-gauge)) < 1e-13);
            }
        const FluxIntegrator data(m);
        const Direction w = Direction::from_angle(0.4);
        const SlopeEstimate s = slope_fit(generic_indicator(data, w, default_tau_window(m.domain)));
        CHECK(std::abs(s.value) < 0.01);

        BoundaryMeasurement zero = m;
        for (double& g : zero.flux) g = 0.0;
        CHECK(flux_moment(zero, w, 3.0).is_zero());
    }

    TEST_CASE("empty ellipse sees the focal obstruction") {
        const BoundaryMeasurement m = empty_ellipse(HarmonicTrace::cosine(1));
        const FluxIntegrator data(m);
        const SlopeEstimate s = slope_fit(generic_indicator(data, Direction(1, 0), log_spaced(5.0, 40.0, 24)));
        CHECK(s.value == doctest::Approx(std::sqrt(3.0)).epsilon(0.02 / std::sqrt(3.0)));

        // without an obstacle the flux moment is gamma tau (w1 + i w2) times the boundary moment
        for (double tau : {1.0, 6.0, 15.0}) {
            const Direction w = Direction::from_angle(0.7);
            const ScaledComplex lhs = data.flux_moment(w, tau);
            ScaledComplex rhs = moment_series(m.domain, HarmonicTrace::cosine(1), w, tau);
            rhs *= tau * cd(w.omega().x, w.omega().y);
            CHECK(rel(lhs.relative_to(rhs.log_scale()), rhs.mantissa()) < 1e-8);
        }

        CHECK_THROWS_AS(generic_indicator(data, Direction(0, 1), log_spaced(5.0, 40.0, 24)), UndefinedRegime);
        CHECK_THROWS_AS(generic_indicator(data, Direction(1e-9, -1), log_spaced(5.0, 40.0, 24)), UndefinedRegime);
    }

    TEST_CASE("boundary factorization of the normal derivative") {
        // int u dv/dnu ds = tau (w1 + i w2) int u v (nu1 - i nu2) ds, both by quadrature
        const EllipseDomain d(1.7, 1.0);
        const HarmonicTrace f({0.3, 1.0, -0.4, 0.2}, {0.5, 0.0, -0.7});
        const Direction w = Direction::from_angle(2.2);
        const cd zeta(w.omega().x, w.omega().y);
        for (double tau : {0.7, 4.0}) {
            const int n = 4096;
            cd lhs = 0.0;
            for (int k = 0; k < n; ++k) {
                const double t = 2 * pi * k / n;
                const Vec2 x = d.point(t), nu = d.normal(t);
                const cd v = std::exp(tau * (dot(x, w.omega()) + cd(0, 1) * dot(x, w.perp())));
                const cd dv = tau * v * (dot(nu, w.omega()) + cd(0, 1) * dot(nu, w.perp()));
                lhs += evaluate(f, t) * dv * d.speed(t);
            }
            lhs *= 2 * pi / n;
            const cd rhs = tau * zeta * moment_quadrature(d, f, w, tau).value();
            CHECK(rel(lhs, rhs) < 1e-10);
        }
    }

    TEST_CASE("integration by parts with the cavity trace") {
        const EllipseDomain d(2, 1);
        const PolygonRegion cavity = PolygonRegion::regular(4, 0.35, {0.3, 0.1}, 0.2);
        const HarmonicTrace f = HarmonicTrace::cosine(1) + HarmonicTrace::sine(2, 0.5);
        RegionTrace inner;
        const BoundaryMeasurement m = solve_cavity(d, cavity, f, 1.0, quick(), nullptr, &inner);
        const Direction w = Direction::from_angle(0.9);
        const cd zeta(w.omega().x, w.omega().y);
        for (double tau : {1.0, 3.0}) {
            const cd lhs = flux_moment(m, w, tau).value();
            const cd outer = tau * zeta * moment_series(d, f, w, tau).value();
            cd hole = 0.0;
            for (std::size_t k = 0; k < inner.points.size(); ++k) {
                const Vec2 x = inner.points[k], n = inner.normals[k];
                const cd v = std::exp(tau * (dot(x, w.omega()) + cd(0, 1) * dot(x, w.perp())));
                hole += inner.weights[k] * inner.potential[k] * tau * v *
                        (dot(n, w.omega()) + cd(0, 1) * dot(n, w.perp()));
            }
            CHECK(rel(lhs, outer - hole) < 1e-6);
        }
    }

    TEST_CASE("classical indicator") {
        const BoundaryMeasurement m = empty_ellipse(HarmonicTrace::cosine(2));
        const Direction w = Direction::from_angle(0.3);
        const FluxIntegrator data(m);
        for (double tau : {2.0, 10.0}) {
            double gauge = 0.0;
            const ScaledComplex i0 = data.classical(w, tau, 0.0, &gauge);
            CHECK(i0.log_abs() - gauge < std::log(1e-8));
            const ScaledComplex a = classical_indicator(m, w, tau, 0.0);
            const ScaledComplex b = classical_indicator(m, w, tau, 0.3);
            CHECK(b.log_abs() - a.log_abs() == doctest::Approx(-0.3 * tau).epsilon(1e-12));
            CHECK(std::abs(b.arg() - a.arg()) < 1e-12);
        }
        BoundaryMeasurement blind = m;
        blind.gamma_known = false;
        CHECK_THROWS_AS(classical_indicator(blind, w, 2.0, 0.0), ContractViolation);
    }

    TEST_CASE("slope is blind to the conductivity scale") {
        const EllipseDomain d(2, 1);
        const PolygonRegion tri = PolygonRegion::regular(3, 0.15, {0.0, 0.4}, 0.3);
        const BoundaryMeasurement m = solve_cavity(d, tri, HarmonicTrace::cosine(1), 1.0, quick());
        BoundaryMeasurement scaled = m;
        for (double& g : scaled.flux) g *= 3.7;
        const FluxIntegrator a(m), b(scaled);
        for (double angle : {0.5, 1.3, 2.0}) {
            const Direction w = Direction::from_angle(angle);
            const auto taus = default_tau_window(d);
            const double sa = slope_fit(generic_indicator(a, w, taus)).value;
            const double sb = slope_fit(generic_indicator(b, w, taus)).value;
            CHECK(std::abs(sa - sb) <= 1e-12 * std::max(1.0, std::abs(sa)));
        }
    }

    TEST_CASE("shifted indicator decays above the slope and grows below it") {
        const BoundaryMeasurement m = empty_ellipse(HarmonicTrace::cosine(1));
        const FluxIntegrator data(m);
        const IndicatorTrace t = generic_indicator(data, Direction(1, 0), log_spaced(5.0, 40.0, 24));
        const double s = slope_fit(t).value;
        const auto& first = t.samples.front();
        const auto& last = t.samples.back();
        for (double dt : {0.1, -0.1}) {
            const double change = (last.log_abs - (s + dt) * last.tau) - (first.log_abs - (s + dt) * first.tau);
            CHECK((dt > 0 ? change < 0 : change > 0));
        }
    }

    TEST_CASE("discrete vertical sequence") {
        const EllipseDomain d(2, 1);
        const auto seq = discrete_tau_sequence(d, 3);
        REQUIRE(seq.size() == 3);
        CHECK(seq[0] == doctest::Approx(1.81380).epsilon(1e-5));
        CHECK(seq[2] == doctest::Approx(5.44140).epsilon(1e-5));
        CHECK(discrete_tau_sequence(d, 0).empty());
        CHECK_THROWS_AS(discrete_tau_sequence(EllipseDomain(1, 1), 3), UndefinedRegime);

        const BoundaryMeasurement m = empty_ellipse(HarmonicTrace::cosine(1));
        const IndicatorTrace t = vertical_indicator(m, +1, 40);
        CHECK(t.regime == Regime::discrete_vertical);
        CHECK(t.warnings.empty());
        CHECK(std::abs(slope_fit(t).value) < 0.02);

        // harmonics 1 and 2 tuned so that the vertical condition cancels
        const HarmonicTrace tuned = HarmonicTrace::cosine(1) + HarmonicTrace::sine(2, -std::sqrt(3.0) / 10);
        CHECK(std::abs(condition_vertical(tuned, d, +1)) < 1e-14);
        const BoundaryMeasurement mt = empty_ellipse(tuned);
        const FluxIntegrator data(mt);
        CHECK_FALSE(vertical_indicator(data, +1, 20, 1, &tuned).warnings.empty());
        CHECK(vertical_indicator(data, -1, 20, 1, &tuned).warnings.empty());
        CHECK_FALSE(vertical_indicator(mt, +1, 20).warnings.empty());
    }

    TEST_CASE("point difference") {
        const EllipseDomain disc(1, 1);
        const PointPair pq({1, 0}, {-1, 0}, disc);
        for (double tau : {0.5, 3.0, 8.0}) {
            const cd got = point_difference(disc, std::nullopt, MaterialSpec{}, pq, Direction(1, 0), tau).value();
            CHECK(rel(got, cd(2 * std::sinh(tau))) < 1e-8);
        }
        CHECK(point_difference(disc, std::nullopt, MaterialSpec{}, pq, Direction(1, 0), 0.0).is_zero());

        const auto seq = perpendicular_tau_sequence(pq, 2);
        REQUIRE(seq.size() == 3);
        CHECK(seq[0] == doctest::Approx(pi / 4));
        CHECK(seq[2] == doctest::Approx(pi / 2 * 4.5));

        MaterialSpec two;
        two.gamma = 2.0;
        PointDifference op(disc, std::nullopt, two, pq, quick());
        CHECK(op.snap_p() < 1e-12);
        const IndicatorTrace t = point_difference_trace(op, Direction(1, 0), default_tau_window(disc));
        CHECK(t.regime == Regime::point_difference);
        CHECK(slope_fit(t).value == doctest::Approx(1.0).epsilon(0.01));
        // off-grid points snap to the nearest node
        SolverOptions coarse = quick();
        coarse.grid_points = 6;
        const PointDifference snapped(disc, std::nullopt, MaterialSpec{}, PointPair({1, 0}, {0, 1}, disc), coarse);
        CHECK(snapped.snap_q() == doctest::Approx(2 * std::sin(pi / 12)));
    }

    TEST_CASE("trace text format") {
        IndicatorTrace t;
        t.dir = Direction(0, 1);
        t.regime = Regime::discrete_vertical;
        t.provenance = "unit test";
        t.warnings.push_back("condition fails");
        t.add(1.0, ScaledComplex(cd(2.0, 0.0)));
        t.add(2.0, ScaledComplex(cd(0.0, 1.0), 700.0));
        std::ostringstream os;
        write_trace(os, t);
        const std::string text = os.str();
        CHECK(text.find("# regime") != std::string::npos);
        CHECK(text.find("# warning condition fails") != std::string::npos);
        CHECK(text.find("tau logmag phase\n") != std::string::npos);
        CHECK(text.find("\n2 700 1.5707963267948966\n") != std::string::npos);
    }
}
