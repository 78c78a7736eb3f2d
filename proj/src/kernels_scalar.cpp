#include <cmath>

#include "enclosure/kernels.hpp"

namespace enclosure::kernels::scalar {

ExpSum exp_phase_sum(std::span<const double> c_re, std::span<const double> c_im,
                     std::span<const double> a, std::span<const double> b) {
    double sr = 0.0;
    double si = 0.0;
    double mag = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) {
        const double e = std::exp(a[j]);
        const double c = std::cos(b[j]);
        const double s = std::sin(b[j]);
        sr += e * (c_re[j] * c - c_im[j] * s);
        si += e * (c_re[j] * s + c_im[j] * c);
        mag += e * std::hypot(c_re[j], c_im[j]);
    }
    return {{sr, si}, mag};
}

void dipole_row(double tx, double ty, double nx, double ny, std::span<const double> sx,
                std::span<const double> sy, std::span<const double> w, std::span<double> out) {
    for (std::size_t k = 0; k < sx.size(); ++k) {
        const double dx = tx - sx[k];
        const double dy = ty - sy[k];
        const double r2 = dx * dx + dy * dy;
        out[k] = r2 > 0.0 ? w[k] * (dx * nx + dy * ny) / r2 : 0.0;
    }
}

}  // namespace enclosure::kernels::scalar
