#pragma once

#include <cmath>
#include <complex>
#include <limits>

namespace enclosure {

/// mantissa * exp(log_scale). Carries values like e^{tau h} far past the
/// double range; the mantissa is kept in [1e-4, 1e4] (or exactly zero).
class ScaledComplex {
public:
    ScaledComplex() = default;
    ScaledComplex(std::complex<double> mantissa, double log_scale = 0.0)
        : mantissa_(mantissa), log_scale_(log_scale) {
        normalize();
    }
    static ScaledComplex from_polar_log(double log_abs, double phase) {
        return {std::polar(1.0, phase), log_abs};
    }

    std::complex<double> mantissa() const { return mantissa_; }
    double log_scale() const { return log_scale_; }
    bool is_zero() const { return mantissa_ == std::complex<double>{}; }

    /// log|value|; -inf for zero.
    double log_abs() const {
        return is_zero() ? -std::numeric_limits<double>::infinity() : std::log(std::abs(mantissa_)) + log_scale_;
    }
    double arg() const { return std::arg(mantissa_); }
    /// Plain complex value; overflows to inf when the magnitude is out of range.
    std::complex<double> value() const { return is_zero() ? mantissa_ : mantissa_ * std::exp(log_scale_); }
    /// Value relative to exp(reference): mantissa * exp(log_scale - reference).
    std::complex<double> relative_to(double reference) const {
        return is_zero() ? mantissa_ : mantissa_ * std::exp(log_scale_ - reference);
    }

    ScaledComplex& operator+=(const ScaledComplex& o) {
        if (o.is_zero()) return *this;
        if (is_zero()) return *this = o;
        if (o.log_scale_ > log_scale_) {
            mantissa_ = o.mantissa_ + mantissa_ * std::exp(log_scale_ - o.log_scale_);
            log_scale_ = o.log_scale_;
        } else {
            mantissa_ += o.mantissa_ * std::exp(o.log_scale_ - log_scale_);
        }
        normalize();
        return *this;
    }
    ScaledComplex& operator-=(const ScaledComplex& o) { return *this += -o; }
    ScaledComplex operator-() const {
        ScaledComplex r = *this;
        r.mantissa_ = -r.mantissa_;
        return r;
    }
    ScaledComplex& operator*=(const ScaledComplex& o) {
        mantissa_ *= o.mantissa_;
        log_scale_ += o.log_scale_;
        normalize();
        return *this;
    }
    ScaledComplex& operator*=(std::complex<double> c) {
        mantissa_ *= c;
        normalize();
        return *this;
    }
    /// Multiply by exp(s).
    ScaledComplex& scale_exp(double s) {
        if (!is_zero()) log_scale_ += s;
        return *this;
    }

    friend ScaledComplex operator+(ScaledComplex a, const ScaledComplex& b) { return a += b; }
    friend ScaledComplex operator-(ScaledComplex a, const ScaledComplex& b) { return a -= b; }
    friend ScaledComplex operator*(ScaledComplex a, const ScaledComplex& b) { return a *= b; }
    friend ScaledComplex operator*(ScaledComplex a, std::complex<double> c) { return a *= c; }
    friend ScaledComplex operator*(std::complex<double> c, ScaledComplex a) { return a *= c; }

    /// |a - b| / |b| evaluated without leaving the scaled representation.
    friend double relative_difference(const ScaledComplex& a, const ScaledComplex& b) {
        if (b.is_zero()) return a.is_zero() ? 0.0 : std::numeric_limits<double>::infinity();
        const double ref = b.log_abs();
        return std::abs(a.relative_to(ref) - b.relative_to(ref));
    }

private:
    void normalize() {
        if (mantissa_ == std::complex<double>{}) {
            log_scale_ = 0.0;
            return;
        }
        const double r = std::abs(mantissa_);
        if (r < 1e-4 || r > 1e4) {
            mantissa_ /= r;
            log_scale_ += std::log(r);
        }
    }

    std::complex<double> mantissa_{};
    double log_scale_ = 0.0;
};

}  // namespace enclosure
