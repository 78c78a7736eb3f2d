#pragma once

#include <complex>
#include <vector>

#include "enclosure/scaled.hpp"

namespace enclosure {

/// Coefficients A_s(m) of Hankel's expansion, s = 0..S.
struct HankelCoefficients {
    int order = 0;
    std::vector<double> values;
};

/// A_0(m) = 1, A_s(m) = (4m^2 - 1^2)(4m^2 - 3^2)...(4m^2 - (2s-1)^2) / (s! 8^s).
/// Requires 0 <= S <= 12.
HankelCoefficients hankel_terms(int m, int S);

/// Radius beyond which Hankel's expansion is preferred.
inline constexpr double kHankelRadius = 30.0;
/// Number of Hankel coefficients used (A_0..A_{S-1}).
inline constexpr int kHankelTerms = 8;
/// Half-width of the excluded cone around the negative real axis.
inline constexpr double kBranchMargin = 0.1;

/// Hankel's compound expansion truncated after `terms` coefficients, returned
/// as J_m(z) exp(-|Im z|). Throws BranchError for |arg z| > pi - 0.1.
std::complex<double> hankel_expansion_scaled(int m, std::complex<double> z, int terms = kHankelTerms);

/// J_m(z) for integer m and complex z. Negative orders use J_{-m} = (-1)^m J_m.
/// Overflows once |Im z| exceeds ~700; use bessel_j_scaled there.
std::complex<double> bessel_j(int m, std::complex<double> z);

/// J_m(z) = mantissa * exp(log_scale) with log_scale = |Im z|
/// (= -Im z on the lower half plane, where the moment arguments live).
ScaledComplex bessel_j_scaled(int m, std::complex<double> z);

/// Plain ascending series sum_k (-z^2/4)^k / (k!(m+k)!) (z/2)^m, together with
/// the sum of term magnitudes (a cancellation gauge).
struct SeriesValue {
    std::complex<double> value;
    double magnitude_sum;
};
SeriesValue bessel_j_series(int m, std::complex<double> z);

}  // namespace enclosure
