#pragma once

#include <complex>
#include <vector>

#include "enclosure/boundary_data.hpp"
#include "enclosure/geometry.hpp"
#include "enclosure/scaled.hpp"

namespace enclosure {

/// C_0(f)..C_{N+1}(f) for an ellipse with a > b.
class MomentCoefficients {
public:
    MomentCoefficients(const EllipseDomain& domain, std::vector<cdouble> values)
        : domain_(domain), values_(std::move(values)) {}

    const EllipseDomain& domain() const { return domain_; }
    const std::vector<cdouble>& values() const { return values_; }
    /// C_m, zero outside the stored range.
    cdouble operator[](int m) const {
        return m >= 0 && m < static_cast<int>(values_.size()) ? values_[static_cast<std::size_t>(m)] : cdouble{};
    }
    int size() const { return static_cast<int>(values_.size()); }
    cdouble sum() const;
    double max_abs() const;

private:
    EllipseDomain domain_;
    std::vector<cdouble> values_;
};

/// Throws CircleBranchError when a == b.
MomentCoefficients coefficients(const EllipseDomain& domain, const HarmonicTrace& trace);

/// int_{boundary} f v (nu_1 - i nu_2) ds with v = exp(tau x.(w + i w_perp)),
/// from the closed-form series (power series on the circle, Bessel series on
/// the ellipse).
ScaledComplex moment_series(const EllipseDomain& domain, const HarmonicTrace& trace, const Direction& dir,
                            double tau);

/// Same integral by trapezoidal quadrature, refined until successive halvings
/// agree to 1e-10 relative. Throws QuadratureFailure past 2^20 nodes.
ScaledComplex moment_quadrature(const EllipseDomain& domain, const HarmonicTrace& trace, const Direction& dir,
                                double tau);

/// sum_{m=1}^{N+1} sign^m m^2 C_m(f), cross-checked against the per-harmonic
/// closed form sum_j sign^j j (a^2-b^2)^{-(j-1)/2} {(a+b)^j g_j - (a-b)^j conj(g_j)}
/// through direct = -sign (2/(ab)) closed. Throws InternalConsistencyError on mismatch.
cdouble condition_sum(const HarmonicTrace& trace, const EllipseDomain& domain, int sign);

/// The closed form above on its own.
cdouble condition_sum_closed_form(const HarmonicTrace& trace, const EllipseDomain& domain, int sign);

/// Leading coefficient for directions w = (0, +-1) at tau = l pi / sqrt(a^2-b^2):
/// sum_m m^2 {C_m(f) + i s C_m(f*)} with s = sign of w_2, cross-checked against
/// -(2/(ab)) sum_j {1 + (-1)^j s i} j (a^2-b^2)^{-(j-1)/2} {(a+b)^j g_j - (a-b)^j conj(g_j)}.
cdouble condition_vertical(const HarmonicTrace& trace, const EllipseDomain& domain, int sign_w2);

/// The single-sum closed form of condition_vertical without the -(2/(ab)) factor.
cdouble condition_vertical_closed_form(const HarmonicTrace& trace, const EllipseDomain& domain, int sign_w2);

}  // namespace enclosure
