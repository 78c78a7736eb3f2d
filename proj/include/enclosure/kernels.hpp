#pragma once

// Data-parallel inner loops. Each kernel has a scalar reference version and
// an AVX2+FMA version; the dispatching entry points pick one at runtime.

#include <complex>
#include <span>

namespace enclosure::kernels {

enum class Isa { scalar, avx2 };

/// Best instruction set supported by the running CPU (and compiled in).
Isa detected_isa();
/// Currently selected instruction set (defaults to detected_isa()).
Isa active_isa();
/// Override the selection; requesting avx2 on an unsupported CPU keeps scalar.
void set_isa(Isa isa);
const char* isa_name(Isa isa);

struct ExpSum {
    std::complex<double> sum;
    double magnitude = 0.0;  // sum_j |c_j| exp(a_j), the rounding gauge
};

/// sum_j (c_re[j] + i c_im[j]) exp(a[j] + i b[j]).
ExpSum exp_phase_sum(std::span<const double> c_re, std::span<const double> c_im,
                     std::span<const double> a, std::span<const double> b);

/// out[k] = w[k] ((tx - sx[k]) nx + (ty - sy[k]) ny) / |t - s_k|^2, the
/// normal derivative of log|t - s| at target t along n, weighted by w.
/// Coincident points yield 0.
void dipole_row(double tx, double ty, double nx, double ny, std::span<const double> sx,
                std::span<const double> sy, std::span<const double> w, std::span<double> out);

namespace scalar {
ExpSum exp_phase_sum(std::span<const double> c_re, std::span<const double> c_im,
                     std::span<const double> a, std::span<const double> b);
void dipole_row(double tx, double ty, double nx, double ny, std::span<const double> sx,
                std::span<const double> sy, std::span<const double> w, std::span<double> out);
}  // namespace scalar

#if defined(ENCLOSURE_HAVE_AVX2)
namespace avx2 {
ExpSum exp_phase_sum(std::span<const double> c_re, std::span<const double> c_im,
                     std::span<const double> a, std::span<const double> b);
void dipole_row(double tx, double ty, double nx, double ny, std::span<const double> sx,
                std::span<const double> sy, std::span<const double> w, std::span<double> out);
}  // namespace avx2
#endif

}  // namespace enclosure::kernels
