#include "enclosure/indicator.hpp"

#include <Eigen/Dense>
#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>
#include <string>

#include "enclosure/errors.hpp"
#include "enclosure/format.hpp"
#include "enclosure/kernels.hpp"
#include "enclosure/moments.hpp"

namespace enclosure {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kQuadratureTolerance = 1e-10;
constexpr std::size_t kMaxNodes = std::size_t{1} << 20;

using cvec = std::vector<std::complex<double>>;

cvec spectrum(const std::vector<double>& samples) {
    Eigen::FFT<double> fft;
    cvec out;
    std::vector<double> in = samples;
    fft.fwd(out, in);
    return out;
}

// Band-limited interpolation of n samples onto n * factor points by zero padding.
std::vector<double> upsample(const cvec& spec, std::size_t factor) {
    const std::size_t n = spec.size();
    const std::size_t big = n * factor;
    if (factor == 1) {
        Eigen::FFT<double> fft;
        cvec out;
        cvec in = spec;
        fft.inv(out, in);
        std::vector<double> re(n);
        for (std::size_t j = 0; j < n; ++j) re[j] = out[j].real();
        return re;
    }
    cvec padded(big, {0.0, 0.0});
    const std::size_t half = n / 2;
    for (std::size_t k = 0; k < (n + 1) / 2; ++k) padded[k] = spec[k];
    for (std::size_t k = 1; k < (n + 1) / 2; ++k) padded[big - k] = spec[n - k];
    if (n % 2 == 0) {
        padded[half] = 0.5 * spec[half];
        padded[big - half] = 0.5 * spec[half];
    }
    Eigen::FFT<double> fft;
    cvec out;
    fft.inv(out, padded);
    std::vector<double> re(big);
    for (std::size_t j = 0; j < big; ++j) re[j] = out[j].real() * static_cast<double>(factor);
    return re;
}

double log_sum_gauge(double magnitude, double shift) {
    return magnitude > 0.0 ? std::log(magnitude) + shift : -std::numeric_limits<double>::infinity();
}

}  // namespace

const char* regime_name(Regime regime) {
    switch (regime) {
        case Regime::generic: return "generic";
        case Regime::discrete_vertical: return "discrete-vertical";
        case Regime::point_difference: return "point-difference";
    }
    return "unknown";
}

void IndicatorTrace::add(double tau, const ScaledComplex& value, double log_gauge) {
    if (!samples.empty() && tau <= samples.back().tau)
        throw ContractViolation("indicator samples must have increasing tau");
    samples.push_back({tau, value.log_abs(), value.is_zero() ? 0.0 : value.arg(), log_gauge});
}

SlopeEstimate slope_fit(const IndicatorTrace& trace, const SlopeFitOptions& options) {
    std::vector<IndicatorSample> usable;
    std::size_t dropped = 0;
    const double log_floor = std::log(options.floor);
    for (const IndicatorSample& s : trace.samples) {
        if (!std::isfinite(s.log_abs) || s.log_abs - s.log_gauge < log_floor) {
            ++dropped;
            continue;
        }
        usable.push_back(s);
    }
    if (usable.size() < 8)
        throw InsufficientSamples("slope fit needs 8 usable samples, have " + std::to_string(usable.size()));
    if (usable.back().tau < 3.0 * usable.front().tau)
        throw InsufficientSamples("slope fit needs a tau ratio of at least 3, have " +
                                  format_real(usable.back().tau / usable.front().tau));

    auto fit = [&](std::size_t start, bool with_log, SlopeEstimate& est) -> double {
        std::vector<const IndicatorSample*> window;
        // A dip sits far below the line through its neighbours. Measuring
        // against the window maximum instead would discard the honest low
        // end of any steeply growing trace.
        const double log_dip = std::log(options.dip);
        std::size_t dips = 0;
        for (std::size_t i = start; i < usable.size(); ++i) {
            double expected;
            if (i == start && i + 1 < usable.size()) {
                expected = usable[i + 1].log_abs;
            } else if (i + 1 == usable.size()) {
                expected = usable[i - 1].log_abs;
            } else {
                const IndicatorSample& l = usable[i - 1];
                const IndicatorSample& r = usable[i + 1];
                expected = l.log_abs + (r.log_abs - l.log_abs) * (usable[i].tau - l.tau) / (r.tau - l.tau);
            }
            if (usable[i].log_abs < expected + log_dip) {
                ++dips;
                continue;
            }
            window.push_back(&usable[i]);
        }
        const int cols = with_log ? 3 : 2;
        const auto m = static_cast<Eigen::Index>(window.size());
        if (m < cols) return std::numeric_limits<double>::infinity();
        Eigen::MatrixXd a(m, cols);
        Eigen::VectorXd y(m);
        for (Eigen::Index i = 0; i < m; ++i) {
            const double t = window[static_cast<std::size_t>(i)]->tau;
            a(i, 0) = t;
            if (with_log) a(i, 1) = std::log(t);
            a(i, cols - 1) = 1.0;
            y(i) = window[static_cast<std::size_t>(i)]->log_abs;
        }
        const Eigen::JacobiSVD<Eigen::MatrixXd> svd(a);
        const auto& sv = svd.singularValues();
        const double cond = sv(sv.size() - 1) > 0.0 ? sv(0) / sv(sv.size() - 1) : std::numeric_limits<double>::infinity();
        Eigen::VectorXd x = a.colPivHouseholderQr().solve(y);
        if (with_log && std::abs(x(1)) > options.max_algebraic) {
            // pin c at the bound and refit s, d
            const double c = std::copysign(options.max_algebraic, x(1));
            for (Eigen::Index i = 0; i < m; ++i) y(i) -= c * a(i, 1);
            Eigen::MatrixXd a2(m, 2);
            a2.col(0) = a.col(0);
            a2.col(1) = a.col(2);
            a = a2;
            const Eigen::VectorXd x2 = a.colPivHouseholderQr().solve(y);
            x = x2;
        }
        const double rss = (a * x - y).squaredNorm();
        double var = 0.0;
        if (m > a.cols()) {
            const Eigen::MatrixXd cov = (a.transpose() * a).inverse();
            var = rss / static_cast<double>(m - a.cols()) * cov(0, 0);
        }
        est.value = x(0);
        est.standard_error = std::sqrt(std::max(var, 0.0));
        est.tau_min = window.front()->tau;
        est.tau_max = window.back()->tau;
        est.used = window.size();
        est.algebraic_correction = with_log;
        est.dropped = dropped + dips;
        est.unreliable = dips > 0 || dropped > 0;
        return cond;
    };

    SlopeEstimate est;
    for (std::size_t start = usable.size() / 2;; --start) {
        if (fit(start, true, est) < options.max_condition) return est;
        if (start == 0) break;
    }
    // Even the full range cannot separate tau from log tau: drop the algebraic term.
    fit(usable.size() / 2, false, est);
    return est;
}

struct FluxIntegrator::Grid {
    std::vector<double> cr_flux;  // flux * speed * h
    std::vector<double> dirichlet;
    std::vector<double> theta;
    std::vector<double> ct;
    std::vector<double> st;
};

FluxIntegrator::FluxIntegrator(const BoundaryMeasurement& meas) : meas_(meas) {
    if (meas_.size() < 8) throw ContractViolation("measurement needs at least 8 samples");
    flux_spectrum_ = spectrum(meas_.flux);
    dirichlet_spectrum_ = spectrum(meas_.dirichlet);
}

FluxIntegrator::~FluxIntegrator() = default;

const FluxIntegrator::Grid& FluxIntegrator::grid(std::size_t level) const {
    std::lock_guard lock(mutex_);
    if (grids_.size() <= level) grids_.resize(level + 1);
    if (!grids_[level]) {
        auto g = std::make_unique<Grid>();
        const std::size_t factor = std::size_t{1} << level;
        const std::vector<double> flux = level == 0 ? meas_.flux : upsample(flux_spectrum_, factor);
        g->dirichlet = level == 0 ? meas_.dirichlet : upsample(dirichlet_spectrum_, factor);
        const std::size_t n = flux.size();
        const double h = 2.0 * kPi / static_cast<double>(n);
        g->theta = uniform_theta(n);
        for (std::size_t j = 0; j < n; ++j) {
            g->ct.push_back(std::cos(g->theta[j]));
            g->st.push_back(std::sin(g->theta[j]));
            g->cr_flux.push_back(flux[j] * meas_.domain.speed(g->theta[j]) * h);
        }
        grids_[level] = std::move(g);
    }
    return *grids_[level];
}

ScaledComplex FluxIntegrator::integrate(const Direction& dir, double tau, bool classical, double* log_gauge) const {
    const EllipseDomain& d = meas_.domain;
    const double a = d.a();
    const double b = d.b();
    const Vec2 w = dir.omega();
    const Vec2 wp = dir.perp();
    const double s0 = d.boundary_support(w);

    auto trapezoid = [&](std::size_t level) {
        const Grid& g = grid(level);
        const std::size_t n = g.theta.size();
        const double h = 2.0 * kPi / static_cast<double>(n);
        std::vector<double> cr(n), ci(n, 0.0), ex(n), ph(n);
        for (std::size_t j = 0; j < n; ++j) {
            const Vec2 x{a * g.ct[j], b * g.st[j]};
            cr[j] = g.cr_flux[j];
            if (classical) {
                // nu ds = (b cos, a sin) dtheta
                const Vec2 nus{b * g.ct[j], a * g.st[j]};
                const double gu = meas_.gamma * tau * g.dirichlet[j] * h;
                cr[j] -= gu * dot(nus, w);
                ci[j] = -gu * dot(nus, wp);
            }
            ex[j] = tau * (dot(x, w) - s0);
            ph[j] = tau * dot(x, wp);
        }
        return kernels::exp_phase_sum(cr, ci, ex, ph);
    };

    // Start where the nodes resolve the oscillation of v, then confirm by doubling.
    const double reach = 2.0 * (tau * a + 12.0 * std::sqrt(tau * a) + 40.0);
    std::size_t level = 0;
    while (static_cast<double>(meas_.size() << level) < reach) ++level;
    kernels::ExpSum coarse = trapezoid(level);
    const double eps = std::numeric_limits<double>::epsilon();
    while ((meas_.size() << (level + 1)) <= kMaxNodes) {
        ++level;
        const kernels::ExpSum fine = trapezoid(level);
        const double change = std::abs(fine.sum - coarse.sum);
        if (change <= kQuadratureTolerance * std::abs(fine.sum) || change <= 64.0 * eps * fine.magnitude) {
            if (log_gauge) *log_gauge = log_sum_gauge(fine.magnitude, tau * s0);
            return ScaledComplex(fine.sum, tau * s0);
        }
        coarse = fine;
    }
    throw QuadratureFailure("boundary integral did not converge at " + std::to_string(meas_.size() << level) +
                            " nodes");
}

ScaledComplex FluxIntegrator::flux_moment(const Direction& dir, double tau, double* log_gauge) const {
    return integrate(dir, tau, false, log_gauge);
}

ScaledComplex FluxIntegrator::classical(const Direction& dir, double tau, double t, double* log_gauge) const {
    if (!meas_.gamma_known) throw ContractViolation("classical indicator needs a known conductivity");
    ScaledComplex v = integrate(dir, tau, true, log_gauge);
    v.scale_exp(-tau * t);
    if (log_gauge) *log_gauge -= tau * t;
    return v;
}

ScaledComplex flux_moment(const BoundaryMeasurement& meas, const Direction& dir, double tau) {
    return FluxIntegrator(meas).flux_moment(dir, tau);
}

ScaledComplex classical_indicator(const BoundaryMeasurement& meas, const Direction& dir, double tau, double t) {
    if (!meas.gamma_known) throw ContractViolation("classical indicator needs a known conductivity");
    return FluxIntegrator(meas).classical(dir, tau, t);
}

std::vector<double> log_spaced(double lo, double hi, std::size_t count) {
    if (!(lo > 0.0) || !(hi > lo) || count < 2) throw ContractViolation("log_spaced needs 0 < lo < hi, count >= 2");
    std::vector<double> t(count);
    for (std::size_t i = 0; i < count; ++i)
        t[i] = lo * std::pow(hi / lo, static_cast<double>(i) / static_cast<double>(count - 1));
    return t;
}

std::vector<double> default_tau_window(const EllipseDomain& domain) {
    const double rho = domain.diameter();
    return log_spaced(4.0 / rho, 40.0 / rho, 24);
}

std::vector<double> floor_adaptive_window(const FluxIntegrator& data, const Direction& dir,
                                          const WindowPolicy& policy) {
    const double rho = data.measurement().domain.diameter();
    const double start = 4.0 / rho;
    const double cap = 800.0 / rho;
    const double log_floor = std::log(policy.floor);
    double top = 0.0;
    for (double tau = start; tau <= cap; tau *= policy.growth) {
        double log_gauge = 0.0;
        const ScaledComplex value = data.flux_moment(dir, tau, &log_gauge);
        if (value.log_abs() - log_gauge < log_floor) break;
        top = tau;
    }
    if (top / policy.ratio < start) return default_tau_window(data.measurement().domain);
    return log_spaced(top / policy.ratio, top, policy.count);
}

IndicatorTrace generic_indicator(const FluxIntegrator& data, const Direction& dir, const std::vector<double>& taus) {
    const EllipseDomain& d = data.measurement().domain;
    if (!d.is_circle() && std::abs(dir.omega().x) < 1e-8)
        throw UndefinedRegime("direction is vertical on an ellipse; use the discrete tau sequence");
    IndicatorTrace trace;
    trace.dir = dir;
    trace.regime = Regime::generic;
    trace.provenance = "flux moment";
    for (double tau : taus) {
        double gauge = 0.0;
        const ScaledComplex j = data.flux_moment(dir, tau, &gauge);
        trace.add(tau, j, gauge);
    }
    return trace;
}

std::vector<double> discrete_tau_sequence(const EllipseDomain& domain, int l_max) {
    if (domain.is_circle()) throw UndefinedRegime("discrete tau sequence needs a > b");
    std::vector<double> t;
    for (int l = 1; l <= l_max; ++l) t.push_back(l * kPi / domain.focal_distance());
    return t;
}

HarmonicTrace recover_trace(const BoundaryMeasurement& meas) {
    for (int n = 0; 4 * n + 4 <= static_cast<int>(meas.size()); ++n) {
        try {
            return from_samples(meas.dirichlet, n);
        } catch (const NotBandLimited&) {
        }
    }
    throw NotBandLimited("Dirichlet samples are not band-limited on this grid");
}

IndicatorTrace vertical_indicator(const FluxIntegrator& data, int sign, int l_max, int l_min,
                                  const HarmonicTrace* trace) {
    const EllipseDomain& d = data.measurement().domain;
    const std::vector<double> taus = discrete_tau_sequence(d, l_max);
    IndicatorTrace out;
    out.dir = Direction(0.0, sign < 0 ? -1.0 : 1.0);
    out.regime = Regime::discrete_vertical;
    out.provenance = "flux moment at l pi / sqrt(a^2 - b^2)";

    const HarmonicTrace f = trace ? *trace : recover_trace(data.measurement());
    const cdouble cond = condition_vertical(f, d, sign);
    const MomentCoefficients c = coefficients(d, f);
    const MomentCoefficients cr = coefficients(d, reflect(f));
    double scale = 0.0;
    for (int m = 1; m < c.size(); ++m) scale += static_cast<double>(m) * m * (std::abs(c[m]) + std::abs(cr[m]));
    if (std::abs(cond) <= 1e-10 * scale)
        out.warnings.push_back("vertical non-vanishing condition fails for this voltage");

    for (int l = std::max(l_min, 1); l <= l_max; ++l) {
        double gauge = 0.0;
        const double tau = taus[static_cast<std::size_t>(l - 1)];
        const ScaledComplex j = data.flux_moment(out.dir, tau, &gauge);
        out.add(tau, j, gauge);
    }
    return out;
}

IndicatorTrace vertical_indicator(const BoundaryMeasurement& meas, int sign, int l_max) {
    return vertical_indicator(FluxIntegrator(meas), sign, l_max);
}

PointDifference::PointDifference(const EllipseDomain& domain, std::optional<PolygonRegion> inclusion,
                                 MaterialSpec materials, const PointPair& pair, SolverOptions options)
    : domain_(domain), solver_(domain, std::move(inclusion), materials, options) {
    const std::vector<double>& theta = solver_.theta();
    const std::size_t n = theta.size();
    const double h = 2.0 * kPi / static_cast<double>(n);
    auto snap = [&](Vec2 p, std::size_t& index, double& dist) {
        double t = std::atan2(p.y / domain.b(), p.x / domain.a());
        if (t < 0.0) t += 2.0 * kPi;
        index = static_cast<std::size_t>(std::llround(t / h)) % n;
        dist = norm(p - domain.point(theta[index]));
        const double spacing = domain.speed(theta[index]) * h;
        if (dist > spacing)
            throw SnapError("boundary point snaps " + format_real(dist) + " away, beyond the grid spacing " +
                            format_real(spacing));
    };
    snap(pair.p, ip_, snap_p_);
    snap(pair.q, iq_, snap_q_);
}

ScaledComplex PointDifference::operator()(const Direction& dir, double tau, double* log_gauge) {
    const std::vector<double>& theta = solver_.theta();
    const Vec2 w = dir.omega();
    const Vec2 wp = dir.perp();
    const double s0 = domain_.boundary_support(w);
    std::vector<std::complex<double>> g(theta.size());
    for (std::size_t j = 0; j < theta.size(); ++j) {
        const Vec2 x = domain_.point(theta[j]);
        const Vec2 nu = domain_.normal(theta[j]);
        // dv/dnu = tau ((w + i w_perp) . nu) v, scaled by e^{-tau s0}
        const std::complex<double> v = std::polar(std::exp(tau * (dot(x, w) - s0)), tau * dot(x, wp));
        g[j] = tau * std::complex<double>{dot(nu, w), dot(nu, wp)} * v;
    }
    const std::vector<std::complex<double>> u = solver_.solve(g);
    double peak = 0.0;
    for (const auto& v : u) peak = std::max(peak, std::abs(v));
    if (log_gauge) *log_gauge = log_sum_gauge(peak, tau * s0);
    return ScaledComplex(u[ip_] - u[iq_], tau * s0);
}

ScaledComplex point_difference(const EllipseDomain& domain, const std::optional<PolygonRegion>& inclusion,
                               const MaterialSpec& materials, const PointPair& pair, const Direction& dir,
                               double tau) {
    PointDifference op(domain, inclusion, materials, pair);
    return op(dir, tau);
}

std::vector<double> perpendicular_tau_sequence(const PointPair& pair, int l_max) {
    std::vector<double> t;
    const double d = norm(pair.p - pair.q);
    for (int l = 0; l <= l_max; ++l) t.push_back(kPi / d * (0.5 + 2.0 * l));
    return t;
}

IndicatorTrace point_difference_trace(PointDifference& op, const Direction& dir, const std::vector<double>& taus) {
    IndicatorTrace trace;
    trace.dir = dir;
    trace.regime = Regime::point_difference;
    trace.provenance = "u(P) - u(Q) for flux dv/dnu";
    for (double tau : taus) {
        double gauge = 0.0;
        const ScaledComplex v = op(dir, tau, &gauge);
        trace.add(tau, v, gauge);
    }
    return trace;
}

void write_trace(std::ostream& os, const IndicatorTrace& trace) {
    os << "# omega " << format_real(trace.dir.omega().x) << ' ' << format_real(trace.dir.omega().y) << '\n'
       << "# regime " << regime_name(trace.regime) << '\n'
       << "# provenance " << trace.provenance << '\n';
    for (const std::string& w : trace.warnings) os << "# warning " << w << '\n';
    os << "tau logmag phase\n";
    for (const IndicatorSample& s : trace.samples)
        os << format_real(s.tau) << ' ' << format_real(s.log_abs) << ' ' << format_real(s.phase) << '\n';
}

}  // namespace enclosure
