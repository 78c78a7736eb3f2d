#pragma once

#include <complex>
#include <iosfwd>
#include <span>
#include <vector>

namespace enclosure {

using cdouble = std::complex<double>;

/// Band-limited boundary voltage
///   f(theta) = alpha_0/2 + sum_{m=1}^{N} (alpha_m cos m theta + beta_m sin m theta)
/// on the ellipse parametrization theta -> (a cos theta, b sin theta).
class HarmonicTrace {
public:
    HarmonicTrace() = default;
    /// alpha has N+1 entries (alpha_0..alpha_N); beta has N entries (beta_1..beta_N).
    HarmonicTrace(std::vector<double> alpha, std::vector<double> beta);

    static HarmonicTrace cosine(int m, double amplitude = 1.0);
    static HarmonicTrace sine(int m, double amplitude = 1.0);

    int band_limit() const { return static_cast<int>(alpha_.size()) - 1; }
    double alpha(int m) const;
    double beta(int m) const;
    /// gamma_0 = alpha_0/2, gamma_m = (alpha_m - i beta_m)/2, gamma_{-m} = conj(gamma_m).
    cdouble gamma(int m) const;
    bool is_zero() const;

    HarmonicTrace operator+(const HarmonicTrace& o) const;
    HarmonicTrace operator*(double s) const;

private:
    std::vector<double> alpha_{0.0};
    std::vector<double> beta_;  // beta_[m-1] = beta_m
};

/// Fourier coefficients of uniform periodic samples (trapezoidal rule).
/// Requires samples.size() >= 4N + 4; throws NotBandLimited when a discarded
/// coefficient exceeds 1e-10 of the largest one.
HarmonicTrace from_samples(std::span<const double> samples, int band_limit);

double evaluate(const HarmonicTrace& trace, double theta);
long double evaluate(const HarmonicTrace& trace, long double theta);

/// Coefficients of f*(x) = f(-x): gamma_m -> (-1)^m gamma_m.
HarmonicTrace reflect(const HarmonicTrace& trace);

/// Text form: header `bandlimit N` then lines `m alpha_m beta_m` for m = 0..N.
void write_trace(std::ostream& os, const HarmonicTrace& trace);
HarmonicTrace read_trace(std::istream& is);

}  // namespace enclosure
