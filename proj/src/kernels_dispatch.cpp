#include <atomic>

#include "enclosure/kernels.hpp"

namespace enclosure::kernels {

namespace {

Isa probe() {
#if defined(ENCLOSURE_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
    __builtin_cpu_init();
    if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma")) return Isa::avx2;
#endif
    return Isa::scalar;
}

std::atomic<Isa>& selection() {
    static std::atomic<Isa> isa{detected_isa()};
    return isa;
}

}  // namespace

Isa detected_isa() {
    static const Isa isa = probe();
    return isa;
}

Isa active_isa() { return selection().load(std::memory_order_relaxed); }

void set_isa(Isa isa) {
    if (isa == Isa::avx2 && detected_isa() != Isa::avx2) isa = Isa::scalar;
    selection().store(isa, std::memory_order_relaxed);
}

const char* isa_name(Isa isa) { return isa == Isa::avx2 ? "avx2" : "scalar"; }

ExpSum exp_phase_sum(std::span<const double> c_re, std::span<const double> c_im,
                     std::span<const double> a, std::span<const double> b) {
#if defined(ENCLOSURE_HAVE_AVX2)
    if (active_isa() == Isa::avx2) return avx2::exp_phase_sum(c_re, c_im, a, b);
#endif
    return scalar::exp_phase_sum(c_re, c_im, a, b);
}

void dipole_row(double tx, double ty, double nx, double ny, std::span<const double> sx,
                std::span<const double> sy, std::span<const double> w, std::span<double> out) {
#if defined(ENCLOSURE_HAVE_AVX2)
    if (active_isa() == Isa::avx2) return avx2::dipole_row(tx, ty, nx, ny, sx, sy, w, out);
#endif
    scalar::dipole_row(tx, ty, nx, ny, sx, sy, w, out);
}

}  // namespace enclosure::kernels
