#include "enclosure/boundary_data.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>
#include <string>

#include "enclosure/errors.hpp"
#include "enclosure/format.hpp"

namespace enclosure {

HarmonicTrace::HarmonicTrace(std::vector<double> alpha, std::vector<double> beta)
    : alpha_(std::move(alpha)), beta_(std::move(beta)) {
    if (alpha_.empty()) alpha_.push_back(0.0);
    if (beta_.size() + 1 != alpha_.size())
        throw ParseError("harmonic trace needs N+1 alpha and N beta coefficients");
}

HarmonicTrace HarmonicTrace::cosine(int m, double amplitude) {
    std::vector<double> a(static_cast<std::size_t>(m) + 1, 0.0);
    std::vector<double> b(static_cast<std::size_t>(m), 0.0);
    a[static_cast<std::size_t>(m)] = m == 0 ? 2.0 * amplitude : amplitude;
    return {std::move(a), std::move(b)};
}

HarmonicTrace HarmonicTrace::sine(int m, double amplitude) {
    std::vector<double> a(static_cast<std::size_t>(m) + 1, 0.0);
    std::vector<double> b(static_cast<std::size_t>(m), 0.0);
    b[static_cast<std::size_t>(m) - 1] = amplitude;
    return {std::move(a), std::move(b)};
}

double HarmonicTrace::alpha(int m) const {
    m = std::abs(m);
    return m <= band_limit() ? alpha_[static_cast<std::size_t>(m)] : 0.0;
}

double HarmonicTrace::beta(int m) const {
    if (m == 0) return 0.0;
    const double sign = m < 0 ? -1.0 : 1.0;
    m = std::abs(m);
    return m <= band_limit() ? sign * beta_[static_cast<std::size_t>(m) - 1] : 0.0;
}

cdouble HarmonicTrace::gamma(int m) const {
    if (m == 0) return {0.5 * alpha(0), 0.0};
    const int k = std::abs(m);
    const cdouble g{0.5 * alpha(k), -0.5 * beta(k)};
    return m > 0 ? g : std::conj(g);
}

bool HarmonicTrace::is_zero() const {
    return std::all_of(alpha_.begin(), alpha_.end(), [](double v) { return v == 0.0; }) &&
           std::all_of(beta_.begin(), beta_.end(), [](double v) { return v == 0.0; });
}

HarmonicTrace HarmonicTrace::operator+(const HarmonicTrace& o) const {
    const int n = std::max(band_limit(), o.band_limit());
    std::vector<double> a(static_cast<std::size_t>(n) + 1);
    std::vector<double> b(static_cast<std::size_t>(n));
    for (int m = 0; m <= n; ++m) a[static_cast<std::size_t>(m)] = alpha(m) + o.alpha(m);
    for (int m = 1; m <= n; ++m) b[static_cast<std::size_t>(m) - 1] = beta(m) + o.beta(m);
    return {std::move(a), std::move(b)};
}

HarmonicTrace HarmonicTrace::operator*(double s) const {
    HarmonicTrace r = *this;
    for (double& v : r.alpha_) v *= s;
    for (double& v : r.beta_) v *= s;
    return r;
}

HarmonicTrace from_samples(std::span<const double> samples, int band_limit) {
    const std::size_t n = samples.size();
    if (band_limit < 0 || n < 4 * static_cast<std::size_t>(band_limit) + 4)
        throw NotBandLimited("need at least 4N+4 samples for band limit " + std::to_string(band_limit));

    // All resolvable harmonics, so energy above the band limit can be detected.
    const int top = static_cast<int>(n / 2) - 1;
    std::vector<double> a(static_cast<std::size_t>(top) + 1, 0.0);
    std::vector<double> b(static_cast<std::size_t>(top) + 1, 0.0);
    for (int m = 0; m <= top; ++m) {
        double sc = 0.0;
        double ss = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            // Index reduction keeps the angle in [0, 2pi) for exact symmetry.
            const std::size_t k = (static_cast<std::size_t>(m) * j) % n;
            const double t = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n);
            sc += samples[j] * std::cos(t);
            ss += samples[j] * std::sin(t);
        }
        a[static_cast<std::size_t>(m)] = 2.0 * sc / static_cast<double>(n);
        b[static_cast<std::size_t>(m)] = 2.0 * ss / static_cast<double>(n);
    }

    double largest = 0.0;
    for (int m = 0; m <= top; ++m)
        largest = std::max({largest, std::abs(a[static_cast<std::size_t>(m)]), std::abs(b[static_cast<std::size_t>(m)])});
    for (int m = band_limit + 1; m <= top; ++m) {
        const double tail = std::max(std::abs(a[static_cast<std::size_t>(m)]), std::abs(b[static_cast<std::size_t>(m)]));
        if (tail > 1e-10 * largest)
            throw NotBandLimited("harmonic " + std::to_string(m) + " carries relative energy " +
                                 format_real(tail / largest) + " above band limit " +
                                 std::to_string(band_limit));
    }

    std::vector<double> alpha(a.begin(), a.begin() + band_limit + 1);
    std::vector<double> beta(b.begin() + 1, b.begin() + band_limit + 1);
    return {std::move(alpha), std::move(beta)};
}

double evaluate(const HarmonicTrace& trace, double theta) {
    double s = 0.5 * trace.alpha(0);
    for (int m = 1; m <= trace.band_limit(); ++m)
        s += trace.alpha(m) * std::cos(m * theta) + trace.beta(m) * std::sin(m * theta);
    return s;
}

long double evaluate(const HarmonicTrace& trace, long double theta) {
    long double s = 0.5L * trace.alpha(0);
    for (int m = 1; m <= trace.band_limit(); ++m)
        s += trace.alpha(m) * std::cos(m * theta) + trace.beta(m) * std::sin(m * theta);
    return s;
}

HarmonicTrace reflect(const HarmonicTrace& trace) {
    const int n = trace.band_limit();
    std::vector<double> a(static_cast<std::size_t>(n) + 1);
    std::vector<double> b(static_cast<std::size_t>(n));
    for (int m = 0; m <= n; ++m) {
        const double sign = (m % 2 == 0) ? 1.0 : -1.0;
        a[static_cast<std::size_t>(m)] = sign * trace.alpha(m);
        if (m > 0) b[static_cast<std::size_t>(m) - 1] = sign * trace.beta(m);
    }
    return {std::move(a), std::move(b)};
}

void write_trace(std::ostream& os, const HarmonicTrace& trace) {
    os << "bandlimit " << trace.band_limit() << '\n';
    for (int m = 0; m <= trace.band_limit(); ++m)
        os << m << ' ' << format_real(trace.alpha(m)) << ' ' << format_real(trace.beta(m)) << '\n';
}

HarmonicTrace read_trace(std::istream& is) {
    std::string line;
    int line_no = 0;
    int n = -1;
    while (std::getline(is, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        std::string key;
        ls >> key >> n;
        if (key != "bandlimit" || !ls || n < 0)
            throw ParseError("line " + std::to_string(line_no) + ": expected `bandlimit N`");
        break;
    }
    if (n < 0) throw ParseError("missing `bandlimit N` header");
    std::vector<double> a(static_cast<std::size_t>(n) + 1, 0.0);
    std::vector<double> b(static_cast<std::size_t>(n), 0.0);
    while (std::getline(is, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        int m = -1;
        double am = 0.0;
        double bm = 0.0;
        if (!(ls >> m >> am >> bm) || m < 0 || m > n)
            throw ParseError("line " + std::to_string(line_no) + ": expected `m alpha_m beta_m` with 0 <= m <= " +
                             std::to_string(n));
        a[static_cast<std::size_t>(m)] = am;
        if (m > 0) b[static_cast<std::size_t>(m) - 1] = bm;
    }
    return {std::move(a), std::move(b)};
}

}  // namespace enclosure
