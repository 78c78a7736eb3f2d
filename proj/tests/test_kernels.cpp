#include <doctest.h>

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "enclosure/kernels.hpp"

using namespace enclosure;

TEST_SUITE("kernels") {
    TEST_CASE("dispatch") {
        const kernels::Isa before = kernels::active_isa();
        kernels::set_isa(kernels::Isa::scalar);
        CHECK(kernels::active_isa() == kernels::Isa::scalar);
        kernels::set_isa(before);
        CHECK(kernels::active_isa() == kernels::detected_isa());
        MESSAGE("active instruction set: " << std::string(kernels::isa_name(kernels::active_isa())));
    }

#if defined(ENCLOSURE_HAVE_AVX2)
    TEST_CASE("vector kernels match the scalar reference") {
        if (kernels::detected_isa() != kernels::Isa::avx2) {
            MESSAGE("CPU lacks AVX2; nothing to compare");
            return;
        }
        std::mt19937_64 rng(17);
        std::uniform_real_distribution<double> u(-1.0, 1.0), e(-30.0, 30.0), ph(-50.0, 50.0);
        for (std::size_t n : {0u, 1u, 3u, 4u, 7u, 64u, 1023u}) {
            std::vector<double> cr(n), ci(n), a(n), b(n);
            for (std::size_t j = 0; j < n; ++j) cr[j] = u(rng), ci[j] = u(rng), a[j] = e(rng), b[j] = ph(rng);
            const auto s = kernels::scalar::exp_phase_sum(cr, ci, a, b);
            const auto v = kernels::avx2::exp_phase_sum(cr, ci, a, b);
            CHECK(std::abs(s.sum - v.sum) <= 1e-13 * s.magnitude + 1e-300);
            CHECK(v.magnitude == doctest::Approx(s.magnitude).epsilon(1e-13));

            std::vector<double> sx(n), sy(n), w(n), out_s(n), out_v(n);
            for (std::size_t j = 0; j < n; ++j) sx[j] = u(rng), sy[j] = u(rng), w[j] = u(rng);
            if (n > 2) sx[2] = 0.25, sy[2] = -0.5;  // coincident with the target
            kernels::scalar::dipole_row(0.25, -0.5, 0.6, 0.8, sx, sy, w, out_s);
            kernels::avx2::dipole_row(0.25, -0.5, 0.6, 0.8, sx, sy, w, out_v);
            for (std::size_t j = 0; j < n; ++j)
                CHECK(out_v[j] == doctest::Approx(out_s[j]).epsilon(1e-13).scale(1e-12));
            if (n > 2) CHECK(out_v[2] == 0.0);
        }
    }
#endif

    TEST_CASE("scalar reference values") {
        const std::vector<double> cr{1.0, 0.5}, ci{0.0, -1.0}, a{0.0, std::log(2.0)}, b{0.0, 0.0};
        const auto s = kernels::scalar::exp_phase_sum(cr, ci, a, b);
        CHECK(s.sum.real() == doctest::Approx(2.0));
        CHECK(s.sum.imag() == doctest::Approx(-2.0));
        std::vector<double> out(1);
        const std::vector<double> sx{0.0}, sy{0.0}, w{2.0};
        kernels::scalar::dipole_row(2.0, 0.0, 1.0, 0.0, sx, sy, w, out);
        CHECK(out[0] == doctest::Approx(1.0));
    }
}
