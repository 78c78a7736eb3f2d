// Compiled with -mavx2 -mfma; only reached after a runtime CPU check.

#include <immintrin.h>

#include <cmath>

#include "enclosure/kernels.hpp"

namespace enclosure::kernels::avx2 {

namespace {

inline __m256d horner(__m256d x, const double* c, int n) {
    __m256d p = _mm256_set1_pd(c[0]);
    for (int i = 1; i < n; ++i) p = _mm256_fmadd_pd(p, x, _mm256_set1_pd(c[i]));
    return p;
}

// exp(x) for x in [-708, 709]; smaller arguments flush to zero.
inline __m256d exp_pd(__m256d x) {
    static constexpr double kTaylor[] = {
        1.0 / 6227020800.0, 1.0 / 479001600.0, 1.0 / 39916800.0, 1.0 / 3628800.0, 1.0 / 362880.0,
        1.0 / 40320.0,      1.0 / 5040.0,      1.0 / 720.0,      1.0 / 120.0,     1.0 / 24.0,
        1.0 / 6.0,          0.5,               1.0,              1.0};
    const __m256d underflow = _mm256_cmp_pd(x, _mm256_set1_pd(-708.0), _CMP_LT_OQ);
    x = _mm256_min_pd(_mm256_max_pd(x, _mm256_set1_pd(-708.0)), _mm256_set1_pd(709.0));
    const __m256d n = _mm256_round_pd(_mm256_mul_pd(x, _mm256_set1_pd(1.4426950408889634)),
                                      _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
    __m256d r = _mm256_fnmadd_pd(n, _mm256_set1_pd(6.93147180369123816490e-01), x);
    r = _mm256_fnmadd_pd(n, _mm256_set1_pd(1.90821492927058770002e-10), r);
    const __m256d p = horner(r, kTaylor, 14);
    const __m256i ni = _mm256_cvtepi32_epi64(_mm256_cvtpd_epi32(n));
    const __m256i bits = _mm256_slli_epi64(_mm256_add_epi64(ni, _mm256_set1_epi64x(1023)), 52);
    const __m256d result = _mm256_mul_pd(p, _mm256_castsi256_pd(bits));
    return _mm256_andnot_pd(underflow, result);
}

// sin and cos of x with Cody-Waite reduction by pi/2 (accurate for |x| < 2^20).
inline void sincos_pd(__m256d x, __m256d& s_out, __m256d& c_out) {
    static constexpr double kSin[] = {1.58969099521155010221e-10, -2.50507602534068634195e-08,
                                      2.75573137070700676789e-06, -1.98412698298579493134e-04,
                                      8.33333333332248946124e-03, -1.66666666666666324348e-01};
    static constexpr double kCos[] = {-1.13596475577881948265e-11, 2.08757232129817482790e-09,
                                      -2.75573143513906633035e-07, 2.48015872894767294178e-05,
                                      -1.38888888888741095749e-03, 4.16666666666666019037e-02};
    const __m256d k = _mm256_round_pd(_mm256_mul_pd(x, _mm256_set1_pd(0.63661977236758134308)),
                                      _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
    __m256d r = _mm256_fnmadd_pd(k, _mm256_set1_pd(1.57079632673412561417e+00), x);
    r = _mm256_fnmadd_pd(k, _mm256_set1_pd(6.07710050650619224932e-11), r);
    const __m256d r2 = _mm256_mul_pd(r, r);

    const __m256d sin_r = _mm256_fmadd_pd(_mm256_mul_pd(r2, r), horner(r2, kSin, 6), r);
    const __m256d cos_r = _mm256_fmadd_pd(_mm256_mul_pd(r2, r2), horner(r2, kCos, 6),
                                          _mm256_fnmadd_pd(_mm256_set1_pd(0.5), r2, _mm256_set1_pd(1.0)));

    const __m256i q = _mm256_cvtepi32_epi64(_mm256_cvtpd_epi32(k));
    const __m256i one = _mm256_set1_epi64x(1);
    const __m256i two = _mm256_set1_epi64x(2);
    const __m256d swap = _mm256_castsi256_pd(_mm256_cmpeq_epi64(_mm256_and_si256(q, one), one));
    const __m256d sin_neg = _mm256_castsi256_pd(_mm256_cmpeq_epi64(_mm256_and_si256(q, two), two));
    const __m256d cos_neg =
        _mm256_castsi256_pd(_mm256_cmpeq_epi64(_mm256_and_si256(_mm256_add_epi64(q, one), two), two));
    const __m256d sign_bit = _mm256_set1_pd(-0.0);

    const __m256d s = _mm256_blendv_pd(sin_r, cos_r, swap);
    const __m256d c = _mm256_blendv_pd(cos_r, sin_r, swap);
    s_out = _mm256_xor_pd(s, _mm256_and_pd(sin_neg, sign_bit));
    c_out = _mm256_xor_pd(c, _mm256_and_pd(cos_neg, sign_bit));
}

inline double hsum(__m256d v) {
    const __m128d lo = _mm256_castpd256_pd128(v);
    const __m128d hi = _mm256_extractf128_pd(v, 1);
    const __m128d s = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

}  // namespace

ExpSum exp_phase_sum(std::span<const double> c_re, std::span<const double> c_im,
                     std::span<const double> a, std::span<const double> b) {
    const std::size_t n = a.size();
    std::size_t j = 0;
    __m256d sr = _mm256_setzero_pd();
    __m256d si = _mm256_setzero_pd();
    __m256d mag = _mm256_setzero_pd();
    for (; j + 4 <= n; j += 4) {
        const __m256d e = exp_pd(_mm256_loadu_pd(&a[j]));
        __m256d s;
        __m256d c;
        sincos_pd(_mm256_loadu_pd(&b[j]), s, c);
        const __m256d cr = _mm256_loadu_pd(&c_re[j]);
        const __m256d ci = _mm256_loadu_pd(&c_im[j]);
        const __m256d re = _mm256_fmsub_pd(cr, c, _mm256_mul_pd(ci, s));
        const __m256d im = _mm256_fmadd_pd(cr, s, _mm256_mul_pd(ci, c));
        sr = _mm256_fmadd_pd(e, re, sr);
        si = _mm256_fmadd_pd(e, im, si);
        const __m256d m = _mm256_sqrt_pd(_mm256_fmadd_pd(cr, cr, _mm256_mul_pd(ci, ci)));
        mag = _mm256_fmadd_pd(e, m, mag);
    }
    ExpSum tail = scalar::exp_phase_sum(c_re.subspan(j), c_im.subspan(j), a.subspan(j), b.subspan(j));
    return {{hsum(sr) + tail.sum.real(), hsum(si) + tail.sum.imag()}, hsum(mag) + tail.magnitude};
}

void dipole_row(double tx, double ty, double nx, double ny, std::span<const double> sx,
                std::span<const double> sy, std::span<const double> w, std::span<double> out) {
    const std::size_t n = sx.size();
    const __m256d vtx = _mm256_set1_pd(tx);
    const __m256d vty = _mm256_set1_pd(ty);
    const __m256d vnx = _mm256_set1_pd(nx);
    const __m256d vny = _mm256_set1_pd(ny);
    const __m256d zero = _mm256_setzero_pd();
    std::size_t k = 0;
    for (; k + 4 <= n; k += 4) {
        const __m256d dx = _mm256_sub_pd(vtx, _mm256_loadu_pd(&sx[k]));
        const __m256d dy = _mm256_sub_pd(vty, _mm256_loadu_pd(&sy[k]));
        const __m256d r2 = _mm256_fmadd_pd(dx, dx, _mm256_mul_pd(dy, dy));
        const __m256d num = _mm256_mul_pd(_mm256_loadu_pd(&w[k]), _mm256_fmadd_pd(dx, vnx, _mm256_mul_pd(dy, vny)));
        const __m256d coincident = _mm256_cmp_pd(r2, zero, _CMP_EQ_OQ);
        const __m256d q = _mm256_div_pd(num, _mm256_blendv_pd(r2, _mm256_set1_pd(1.0), coincident));
        _mm256_storeu_pd(&out[k], _mm256_andnot_pd(coincident, q));
    }
    scalar::dipole_row(tx, ty, nx, ny, sx.subspan(k), sy.subspan(k), w.subspan(k), out.subspan(k));
}

}  // namespace enclosure::kernels::avx2
