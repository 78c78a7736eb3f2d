#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "enclosure/boundary_data.hpp"
#include "enclosure/errors.hpp"

using namespace enclosure;

namespace {
constexpr double pi = std::numbers::pi;

std::vector<double> sample(auto&& f, std::size_t n) {
    std::vector<double> v(n);
    for (std::size_t k = 0; k < n; ++k) v[k] = f(2 * pi * k / n);
    return v;
}

HarmonicTrace random_trace(std::mt19937_64& rng, int n) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<double> alpha(n + 1), beta(n);
    for (double& x : alpha) x = u(rng);
    for (double& x : beta) x = u(rng);
    return {alpha, beta};
}
}  // namespace

TEST_SUITE("boundary_data") {
    TEST_CASE("coefficients from samples") {
        const HarmonicTrace c3 = from_samples(sample([](double t) { return std::cos(3 * t); }, 64), 3);
        for (int m = 0; m <= 3; ++m) {
            CHECK(c3.alpha(m) == doctest::Approx(m == 3 ? 1.0 : 0.0).epsilon(1e-12));
            if (m > 0) CHECK(std::abs(c3.beta(m)) < 1e-12);
        }
        CHECK(std::abs(c3.alpha(0)) < 1e-12);

        const HarmonicTrace mix = from_samples(sample([](double t) { return 2 * std::sin(t) + std::cos(2 * t); }, 12), 2);
        CHECK(mix.beta(1) == doctest::Approx(2.0));
        CHECK(mix.alpha(2) == doctest::Approx(1.0));
        CHECK(std::abs(mix.alpha(1)) < 1e-12);

        const HarmonicTrace one = from_samples(sample([](double) { return 1.0; }, 8), 1);
        CHECK(one.alpha(0) == doctest::Approx(2.0));
        CHECK(one.gamma(0).real() == doctest::Approx(1.0));
        CHECK(std::abs(one.alpha(1)) < 1e-14);
    }

    TEST_CASE("band limit violations and undersampling") {
        const auto v = sample([](double t) { return std::cos(t) + 1e-6 * std::cos(5 * t); }, 64);
        CHECK_THROWS_AS(from_samples(v, 2), NotBandLimited);
        CHECK_NOTHROW(from_samples(v, 5));
        CHECK_THROWS(from_samples(sample([](double t) { return std::cos(t); }, 7), 1));
    }

    TEST_CASE("evaluate") {
        const HarmonicTrace c1 = HarmonicTrace::cosine(1);
        CHECK(evaluate(c1, 0.0) == doctest::Approx(1.0));
        CHECK(std::abs(evaluate(c1, pi / 2)) < 1e-15);
        const HarmonicTrace mix = HarmonicTrace::sine(1, 2.0) + HarmonicTrace::cosine(2);
        CHECK(evaluate(mix, pi / 4) == doctest::Approx(std::sqrt(2.0)));
    }

    TEST_CASE("complex coefficients") {
        const HarmonicTrace f({0.4, 1.0, -2.0}, {3.0, 0.5});
        CHECK(f.gamma(0) == cdouble(0.2, 0.0));
        CHECK(f.gamma(1) == cdouble(0.5, -1.5));
        CHECK(f.gamma(-2) == std::conj(f.gamma(2)));
        CHECK(f.gamma(7) == cdouble{});
    }

    TEST_CASE("reflection") {
        CHECK(reflect(HarmonicTrace::cosine(1)).alpha(1) == -1.0);
        CHECK(reflect(HarmonicTrace::cosine(2)).alpha(2) == 1.0);
        CHECK(reflect(HarmonicTrace::cosine(0, 2.0)).gamma(0) == HarmonicTrace::cosine(0, 2.0).gamma(0));
        std::mt19937_64 rng(11);
        for (int rep = 0; rep < 20; ++rep) {
            const HarmonicTrace f = random_trace(rng, 7);
            const HarmonicTrace g = reflect(reflect(f));
            for (int m = -7; m <= 7; ++m) CHECK(g.gamma(m) == f.gamma(m));
            // f*(theta) = f(theta + pi) on the ellipse parametrization
            const HarmonicTrace r = reflect(f);
            for (double t : {0.1, 1.3, 4.0}) CHECK(evaluate(r, t) == doctest::Approx(evaluate(f, t + pi)));
        }
    }

    TEST_CASE("round trip and Parseval on random traces") {
        std::mt19937_64 rng(5);
        for (int rep = 0; rep < 20; ++rep) {
            const int n = 1 + rep % 9;
            const HarmonicTrace f = random_trace(rng, n);
            const auto v = sample([&](double t) { return evaluate(f, t); }, 4 * n + 4 + rep);
            const HarmonicTrace g = from_samples(v, n);
            double vmax = 0.0;
            for (double x : v) vmax = std::max(vmax, std::abs(x));
            for (std::size_t k = 0; k < v.size(); ++k)
                CHECK(std::abs(evaluate(g, 2 * pi * k / v.size()) - v[k]) <= 1e-12 * vmax);

            double energy = f.alpha(0) * f.alpha(0) / 2;
            for (int m = 1; m <= n; ++m) energy += f.alpha(m) * f.alpha(m) + f.beta(m) * f.beta(m);
            const auto fine = sample([&](double t) { return evaluate(f, t); }, 256);
            double integral = 0.0;
            for (double x : fine) integral += x * x;
            integral *= 2 * pi / fine.size() / pi;
            CHECK(integral == doctest::Approx(energy).epsilon(1e-10));
        }
    }

    TEST_CASE("text round trip") {
        const HarmonicTrace f({0.4, 1.0 / 3.0, -2.0}, {3.0, std::sqrt(2.0)});
        std::stringstream ss;
        write_trace(ss, f);
        CHECK(ss.str().rfind("bandlimit 2\n", 0) == 0);
        const HarmonicTrace g = read_trace(ss);
        for (int m = 0; m <= 2; ++m) CHECK(g.gamma(m) == f.gamma(m));
        std::istringstream bad("bandlimit 2\n0 1 0\n1 x 0\n");
        CHECK_THROWS_AS(read_trace(bad), ParseError);
    }
}
