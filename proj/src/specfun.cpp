#include "enclosure/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "enclosure/errors.hpp"

namespace enclosure {

namespace {

using cd = std::complex<double>;
constexpr double kPi = std::numbers::pi;
constexpr double kEps = 2.220446049250313e-16;

// Acceptable relative rounding error for the series and Hankel branches
// before the recurrence branch takes over.
constexpr double kBranchAccuracy = 1e-13;

// J_m(z) exp(-|Im z|) by Miller's backward recurrence, normalized with
// exp(+-iz) = J_0 + 2 sum_{n>=1} (+-i)^n J_n. The sign is chosen so the
// normalizing exponential is the growing one, which avoids cancellation.
cd miller_scaled(int m, cd z) {
    const double az = std::abs(z);
    const double top = std::max(static_cast<double>(m), az);
    int start = static_cast<int>(std::ceil(top + 30.0 + 6.0 * std::cbrt(top)));
    start += start % 2;

    const bool lower = z.imag() <= 0.0;
    const cd unit = lower ? cd{0.0, 1.0} : cd{0.0, -1.0};

    // (+-i)^n cycles with period 4.
    const cd powers[4] = {cd{1.0, 0.0}, unit, unit * unit, unit * unit * unit};

    cd next{0.0, 0.0};
    cd cur{1e-30, 0.0};
    cd norm_sum{0.0, 0.0};
    cd result{0.0, 0.0};
    const cd two_over_z = 2.0 / z;
    for (int n = start; n >= 0; --n) {
        if (n == m) result = cur;
        norm_sum += (n == 0 ? 1.0 : 2.0) * powers[n % 4] * cur;
        if (n == 0) break;
        const cd prev = static_cast<double>(n) * two_over_z * cur - next;
        next = cur;
        cur = prev;
        if (std::abs(cur) > 1e200) {
            const double s = 1e-200;
            cur *= s;
            next *= s;
            norm_sum *= s;
            result *= s;
        }
    }
    const cd phase = std::polar(1.0, lower ? z.real() : -z.real());
    return result * phase / norm_sum;
}

}  // namespace

HankelCoefficients hankel_terms(int m, int S) {
    if (S < 0 || S > 12)
        throw ContractViolation("Hankel expansion supports 0 <= S <= 12, got " + std::to_string(S));
    HankelCoefficients out;
    out.order = m;
    out.values.resize(static_cast<std::size_t>(S) + 1);
    out.values[0] = 1.0;
    const double mu = 4.0 * static_cast<double>(m) * static_cast<double>(m);
    for (int s = 1; s <= S; ++s) {
        const double odd = 2.0 * s - 1.0;
        out.values[static_cast<std::size_t>(s)] =
            out.values[static_cast<std::size_t>(s) - 1] * (mu - odd * odd) / (8.0 * s);
    }
    return out;
}

std::complex<double> hankel_expansion_scaled(int m, std::complex<double> z, int terms) {
    if (std::abs(std::arg(z)) > kPi - kBranchMargin)
        throw BranchError("Hankel expansion requires |arg z| <= pi - 0.1");
    const auto A = hankel_terms(std::abs(m), terms);
    cd p{0.0, 0.0};
    cd q{0.0, 0.0};
    cd zpow{1.0, 0.0};
    for (int s = 0; s < terms; ++s) {
        const double sign = ((s / 2) % 2 == 0) ? 1.0 : -1.0;
        const cd term = sign * A.values[static_cast<std::size_t>(s)] / zpow;
        if (s % 2 == 0) p += term; else q += term;
        zpow *= z;
    }
    const double shift = std::abs(z.imag());
    const cd chi = z - (static_cast<double>(m) * 0.5 + 0.25) * kPi;
    const cd i{0.0, 1.0};
    const cd up = std::exp(i * chi - shift);
    const cd down = std::exp(-i * chi - shift);
    return std::sqrt(2.0 / (kPi * z)) * 0.5 * (up * (p + i * q) + down * (p - i * q));
}

SeriesValue bessel_j_series(int m, std::complex<double> z) {
    if (z == cd{}) return {m == 0 ? cd{1.0, 0.0} : cd{}, m == 0 ? 1.0 : 0.0};
    const cd half = 0.5 * z;
    cd term = std::exp(static_cast<double>(m) * std::log(half) - std::lgamma(m + 1.0));
    const cd step = -half * half;
    cd sum = term;
    double mag = std::abs(term);
    for (int k = 1; k < 10000; ++k) {
        term *= step / (static_cast<double>(k) * static_cast<double>(m + k));
        sum += term;
        const double t = std::abs(term);
        mag += t;
        if (k > std::abs(half) && t <= 1e-18 * std::abs(sum)) break;
    }
    return {sum, mag};
}

ScaledComplex bessel_j_scaled(int m, std::complex<double> z) {
    double sign = 1.0;
    if (m < 0) {
        m = -m;
        if (m % 2) sign = -sign;
    }
    if (z == cd{}) return ScaledComplex(m == 0 ? cd{1.0, 0.0} : cd{});
    // J_m(-z) = (-1)^m J_m(z) keeps the argument in the right half plane,
    // well away from the branch cut of the asymptotic form.
    if (z.real() < 0.0) {
        z = -z;
        if (m % 2) sign = -sign;
    }
    const double shift = std::abs(z.imag());
    const double az = std::abs(z);

    if (az <= kHankelRadius) {
        const SeriesValue s = bessel_j_series(m, z);
        if (s.magnitude_sum * kEps <= kBranchAccuracy * std::abs(s.value) && std::isfinite(s.magnitude_sum))
            return ScaledComplex(sign * s.value);
    } else {
        const auto A = hankel_terms(m, kHankelTerms);
        if (std::abs(A.values.back()) / std::pow(az, kHankelTerms) < kBranchAccuracy)
            return ScaledComplex(sign * hankel_expansion_scaled(m, z, kHankelTerms), shift);
    }
    return ScaledComplex(sign * miller_scaled(m, z), shift);
}

std::complex<double> bessel_j(int m, std::complex<double> z) { return bessel_j_scaled(m, z).value(); }

}  // namespace enclosure
