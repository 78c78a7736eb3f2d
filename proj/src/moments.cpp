#include "enclosure/moments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "enclosure/errors.hpp"
#include "enclosure/format.hpp"
#include "enclosure/kernels.hpp"
#include "enclosure/specfun.hpp"

namespace enclosure {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kConsistencyTolerance = 1e-12;
constexpr double kQuadratureTolerance = 1e-10;
constexpr std::size_t kMaxQuadratureNodes = std::size_t{1} << 20;

void require_ellipse(const EllipseDomain& domain, const char* what) {
    if (domain.is_circle())
        throw CircleBranchError(std::string(what) + " needs a > b; use the circle branch of moment_series");
}

// Per-harmonic term T_j = j (a^2-b^2)^{-(j-1)/2} {(a+b)^j g_j - (a-b)^j conj(g_j)}.
cdouble harmonic_term(const HarmonicTrace& trace, const EllipseDomain& domain, int j) {
    const double a = domain.a();
    const double b = domain.b();
    const double c2 = (a - b) * (a + b);
    const cdouble g = trace.gamma(j);
    const double scale = j * std::pow(c2, -0.5 * (j - 1));
    return scale * (std::pow(a + b, j) * g - std::pow(a - b, j) * std::conj(g));
}

void check_agreement(cdouble direct, cdouble closed, double magnitude, const char* what) {
    if (std::abs(direct - closed) > kConsistencyTolerance * std::max(1.0, magnitude))
        throw InternalConsistencyError(std::string(what) + ": direct sum and closed form disagree by " +
                                       format_real(std::abs(direct - closed)));
}

}  // namespace

cdouble MomentCoefficients::sum() const {
    cdouble s{};
    for (const cdouble& c : values_) s += c;
    return s;
}

double MomentCoefficients::max_abs() const {
    double m = 0.0;
    for (const cdouble& c : values_) m = std::max(m, std::abs(c));
    return m;
}

MomentCoefficients coefficients(const EllipseDomain& domain, const HarmonicTrace& trace) {
    require_ellipse(domain, "coefficients");
    const double ap = domain.a_plus();
    const double am = domain.a_minus();
    const double up = std::sqrt((domain.a() + domain.b()) / (domain.a() - domain.b()));
    const int n = trace.band_limit();
    std::vector<cdouble> c(static_cast<std::size_t>(n) + 2);
    c[0] = am * std::conj(trace.gamma(1)) + ap * trace.gamma(1);
    for (int m = 1; m <= n + 1; ++m) {
        const double grow = std::pow(up, m);
        const cdouble lead = am * trace.gamma(m - 1) + ap * trace.gamma(m + 1);
        const cdouble tail = am * std::conj(trace.gamma(m + 1)) + ap * std::conj(trace.gamma(m - 1));
        c[static_cast<std::size_t>(m)] = lead * grow + tail / grow;
    }
    return {domain, std::move(c)};
}

ScaledComplex moment_series(const EllipseDomain& domain, const HarmonicTrace& trace, const Direction& dir,
                            double tau) {
    const cdouble w{dir.omega().x, dir.omega().y};
    ScaledComplex total;
    if (domain.is_circle()) {
        // 2 pi a^2 sum_m {a tau w}^m / m! gamma_{m+1}, each power kept in log form.
        const double a = domain.a();
        const double log_at = std::log(a * tau);
        const double phase = std::arg(w);
        for (int m = 0; m <= trace.band_limit() - 1; ++m) {
            const cdouble g = trace.gamma(m + 1);
            if (g == cdouble{}) continue;
            total += ScaledComplex::from_polar_log(m * log_at - std::lgamma(m + 1.0), m * phase) * g;
        }
        return total * cdouble{2.0 * kPi * a * a, 0.0};
    }
    const MomentCoefficients c = coefficients(domain, trace);
    const cdouble z = cdouble{0.0, -domain.focal_distance() * tau} * w;
    cdouble ipow{1.0, 0.0};
    for (int m = 0; m < c.size(); ++m) {
        if (c[m] != cdouble{}) total += bessel_j_scaled(m, z) * (ipow * c[m]);
        ipow *= cdouble{0.0, 1.0};
    }
    return total * cdouble{2.0 * kPi * domain.a() * domain.b(), 0.0};
}

ScaledComplex moment_quadrature(const EllipseDomain& domain, const HarmonicTrace& trace, const Direction& dir,
                                double tau) {
    const Vec2 w = dir.omega();
    const Vec2 wp = dir.perp();
    const double a = domain.a();
    const double b = domain.b();
    const double s0 = domain.boundary_support(w);

    // Nodes are rebuilt in long double when the sum cancels heavily: the
    // rounding of each term is relative to the gauge sum |c| e^a, not to the result.
    struct Sum {
        cdouble value;
        double gauge;
    };
    bool extended = false;
    auto trapezoid = [&](std::size_t n) -> Sum {
        const long double h = 2.0L * std::numbers::pi_v<long double> / static_cast<long double>(n);
        if (extended) {
            std::complex<long double> acc{};
            long double gauge = 0.0L;
            for (std::size_t j = 0; j < n; ++j) {
                const long double t = h * static_cast<long double>(j);
                const long double ct = std::cos(t);
                const long double st = std::sin(t);
                const long double f = evaluate(trace, t) * h;
                const long double x1 = a * ct;
                const long double x2 = b * st;
                const long double e = std::exp(static_cast<long double>(tau) * (x1 * w.x + x2 * w.y - s0));
                const long double ph = static_cast<long double>(tau) * (x1 * wp.x + x2 * wp.y);
                const std::complex<long double> c{f * b * ct, -f * a * st};
                acc += c * std::polar(e, ph);
                gauge += e * std::abs(c);
            }
            return {cdouble(static_cast<double>(acc.real()), static_cast<double>(acc.imag())),
                    static_cast<double>(gauge)};
        }
        std::vector<double> cr(n), ci(n), ex(n), ph(n);
        for (std::size_t j = 0; j < n; ++j) {
            const double t = static_cast<double>(h) * static_cast<double>(j);
            const double ct = std::cos(t);
            const double st = std::sin(t);
            const double f = evaluate(trace, t) * static_cast<double>(h);
            cr[j] = f * b * ct;
            ci[j] = -f * a * st;
            const Vec2 x{a * ct, b * st};
            ex[j] = tau * (dot(x, w) - s0);
            ph[j] = tau * dot(x, wp);
        }
        const kernels::ExpSum r = kernels::exp_phase_sum(cr, ci, ex, ph);
        return {r.sum, r.magnitude};
    };

    std::size_t n = 64;
    const double reach = 4.0 * (trace.band_limit() + tau * a + 10.0);
    while (static_cast<double>(n) < reach) n *= 2;
    Sum coarse = trapezoid(n);
    if (std::abs(coarse.value) < 1e-4 * coarse.gauge) {
        extended = true;
        coarse = trapezoid(n);
    }
    const double eps = extended ? std::numeric_limits<long double>::epsilon() : std::numeric_limits<double>::epsilon();
    while (n < kMaxQuadratureNodes) {
        n *= 2;
        const Sum fine = trapezoid(n);
        const double change = std::abs(fine.value - coarse.value);
        if (change <= kQuadratureTolerance * std::abs(fine.value) || change <= 64.0 * eps * fine.gauge)
            return ScaledComplex(fine.value, tau * s0);
        coarse = fine;
    }
    throw QuadratureFailure("moment quadrature did not converge with " + std::to_string(n) + " nodes");
}

cdouble condition_sum_closed_form(const HarmonicTrace& trace, const EllipseDomain& domain, int sign) {
    require_ellipse(domain, "condition_sum");
    cdouble s{};
    for (int j = 1; j <= trace.band_limit(); ++j) {
        const double sj = (sign < 0 && j % 2) ? -1.0 : 1.0;
        s += sj * harmonic_term(trace, domain, j);
    }
    return s;
}

cdouble condition_sum(const HarmonicTrace& trace, const EllipseDomain& domain, int sign) {
    const MomentCoefficients c = coefficients(domain, trace);
    cdouble direct{};
    double magnitude = 0.0;
    for (int m = 1; m < c.size(); ++m) {
        const double sm = (sign < 0 && m % 2) ? -1.0 : 1.0;
        const cdouble term = sm * static_cast<double>(m) * m * c[m];
        direct += term;
        magnitude += std::abs(term);
    }
    // sum_m (-1)^m m^2 C_m(f_j) = (-1)^{j-1} sum_m m^2 C_m(f_j), so the relation
    // to the closed form picks up the sign itself.
    const double factor = (sign < 0 ? 2.0 : -2.0) / (domain.a() * domain.b());
    check_agreement(direct, factor * condition_sum_closed_form(trace, domain, sign), magnitude, "condition_sum");
    return direct;
}

cdouble condition_vertical_closed_form(const HarmonicTrace& trace, const EllipseDomain& domain, int sign_w2) {
    require_ellipse(domain, "condition_vertical");
    const cdouble i{0.0, 1.0};
    const double s = sign_w2 < 0 ? -1.0 : 1.0;
    cdouble total{};
    for (int j = 1; j <= trace.band_limit(); ++j) {
        const double pj = (j % 2) ? -1.0 : 1.0;
        total += (1.0 + pj * s * i) * harmonic_term(trace, domain, j);
    }
    return total;
}

cdouble condition_vertical(const HarmonicTrace& trace, const EllipseDomain& domain, int sign_w2) {
    const MomentCoefficients c = coefficients(domain, trace);
    const MomentCoefficients cr = coefficients(domain, reflect(trace));
    const cdouble i{0.0, 1.0};
    const double s = sign_w2 < 0 ? -1.0 : 1.0;
    cdouble direct{};
    double magnitude = 0.0;
    for (int m = 1; m < c.size(); ++m) {
        const cdouble term = static_cast<double>(m) * m * (c[m] + s * i * cr[m]);
        direct += term;
        magnitude += std::abs(term);
    }
    const cdouble closed = -2.0 / (domain.a() * domain.b()) * condition_vertical_closed_form(trace, domain, sign_w2);
    check_agreement(direct, closed, magnitude, "condition_vertical");
    return direct;
}

}  // namespace enclosure
