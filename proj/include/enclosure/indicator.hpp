#pragma once

#include <complex>
#include <iosfwd>
#include <limits>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "enclosure/boundary_data.hpp"
#include "enclosure/forward.hpp"
#include "enclosure/geometry.hpp"
#include "enclosure/scaled.hpp"

namespace enclosure {

enum class Regime { generic, discrete_vertical, point_difference };
const char* regime_name(Regime regime);

struct IndicatorSample {
    double tau = 0.0;
    double log_abs = 0.0;  // log|J|
    double phase = 0.0;    // arg J, recorded only
    double log_gauge = -std::numeric_limits<double>::infinity();  // log sum |integrand| ds: rounding scale of J
};

struct IndicatorTrace {
    Direction dir{1.0, 0.0};
    Regime regime = Regime::generic;
    std::vector<IndicatorSample> samples;  // tau increasing
    std::string provenance;
    std::vector<std::string> warnings;

    void add(double tau, const ScaledComplex& value,
             double log_gauge = -std::numeric_limits<double>::infinity());
};

struct SlopeEstimate {
    double value = 0.0;
    double standard_error = 0.0;
    double tau_min = 0.0;  // window actually fitted
    double tau_max = 0.0;
    std::size_t used = 0;
    bool algebraic_correction = true;  // c log(tau) term fitted
    bool unreliable = false;           // dips or floor samples were dropped
    std::size_t dropped = 0;
};

struct SlopeFitOptions {
    /// Samples with |J| below this fraction of their gauge are rounding noise.
    double floor = 1e-11;
    /// Dips below this fraction of the window maximum are dropped.
    double dip = 1e-12;
    double max_condition = 1e8;
    /// |c| beyond this is not an algebraic factor but curvature from a
    /// crossover between two exponentials; c is then pinned at the bound.
    double max_algebraic = 3.0;
};

/// Least squares log|J| = s tau + c log tau + d over the upper half of the
/// usable samples, extended downward while the design matrix condition
/// number is at least max_condition. Throws InsufficientSamples below 8
/// usable samples or a tau ratio under 3.
SlopeEstimate slope_fit(const IndicatorTrace& trace, const SlopeFitOptions& options = {});

/// Trapezoidal integrals of measured boundary data against
/// v = exp(tau x.(w + i w_perp)). The sampled data are band-limited
/// interpolated onto finer grids until successive grids agree to 1e-10.
/// Safe to share across threads.
class FluxIntegrator {
public:
    explicit FluxIntegrator(const BoundaryMeasurement& meas);
    ~FluxIntegrator();

    const BoundaryMeasurement& measurement() const { return meas_; }
    /// int gamma du/dnu v ds. log_gauge (optional) receives log sum |flux v| ds.
    ScaledComplex flux_moment(const Direction& dir, double tau, double* log_gauge = nullptr) const;
    /// e^{-tau t} int gamma (du/dnu v - u dv/dnu) ds; needs gamma known.
    ScaledComplex classical(const Direction& dir, double tau, double t, double* log_gauge = nullptr) const;

private:
    struct Grid;
    const Grid& grid(std::size_t level) const;
    ScaledComplex integrate(const Direction& dir, double tau, bool classical, double* log_gauge) const;

    BoundaryMeasurement meas_;
    std::vector<std::complex<double>> flux_spectrum_;
    std::vector<std::complex<double>> dirichlet_spectrum_;
    mutable std::mutex mutex_;
    mutable std::vector<std::unique_ptr<Grid>> grids_;
};

ScaledComplex flux_moment(const BoundaryMeasurement& meas, const Direction& dir, double tau);
/// Throws ContractViolation when gamma is flagged unknown.
ScaledComplex classical_indicator(const BoundaryMeasurement& meas, const Direction& dir, double tau, double t);

/// count log-spaced values in [lo, hi].
std::vector<double> log_spaced(double lo, double hi, std::size_t count);
/// [4/rho, 40/rho] with rho the domain diameter, 24 samples.
std::vector<double> default_tau_window(const EllipseDomain& domain);

/// Window that ends where |J| meets the rounding floor of its gauge.
struct WindowPolicy {
    double ratio = 4.0;     // tau_top / tau_bottom
    double floor = 1e-11;   // same meaning as SlopeFitOptions::floor
    std::size_t count = 32;
    double growth = 1.1;    // scan step for tau_top
};

/// Scans tau geometrically from 4/rho (capped at 800/rho) and returns count
/// log-spaced values in [tau_top / ratio, tau_top], tau_top being the last
/// tau above the floor. Falls back to default_tau_window when the usable
/// range is shorter than the ratio.
std::vector<double> floor_adaptive_window(const FluxIntegrator& data, const Direction& dir,
                                          const WindowPolicy& policy = {});

/// Generic-direction trace. Throws UndefinedRegime for |w_1| < 1e-8 on an
/// ellipse with a > b, where only the discrete vertical sequence is valid.
IndicatorTrace generic_indicator(const FluxIntegrator& data, const Direction& dir, const std::vector<double>& taus);

/// l pi / sqrt(a^2 - b^2) for l = 1..l_max; throws UndefinedRegime on a circle.
std::vector<double> discrete_tau_sequence(const EllipseDomain& domain, int l_max);

/// Samples at l pi / sqrt(a^2 - b^2), l = l_min..l_max, for w = (0, sign).
/// Attaches a warning when the vertical non-vanishing condition fails for
/// the Dirichlet data (recovered from the samples when trace is null).
IndicatorTrace vertical_indicator(const FluxIntegrator& data, int sign, int l_max, int l_min = 1,
                                  const HarmonicTrace* trace = nullptr);
IndicatorTrace vertical_indicator(const BoundaryMeasurement& meas, int sign, int l_max);

/// Smallest band limit at which the Dirichlet samples are resolved.
HarmonicTrace recover_trace(const BoundaryMeasurement& meas);

/// u(P) - u(Q) for the Neumann problem with k du/dnu = dv/dnu.
/// P and Q are snapped to the nearest grid nodes; SnapError if a snap
/// exceeds the grid spacing.
class PointDifference {
public:
    PointDifference(const EllipseDomain& domain, std::optional<PolygonRegion> inclusion, MaterialSpec materials,
                    const PointPair& pair, SolverOptions options = {});

    ScaledComplex operator()(const Direction& dir, double tau, double* log_gauge = nullptr);
    double snap_p() const { return snap_p_; }
    double snap_q() const { return snap_q_; }

private:
    EllipseDomain domain_;
    NeumannSolver solver_;
    std::size_t ip_ = 0;
    std::size_t iq_ = 0;
    double snap_p_ = 0.0;
    double snap_q_ = 0.0;
};

ScaledComplex point_difference(const EllipseDomain& domain, const std::optional<PolygonRegion>& inclusion,
                               const MaterialSpec& materials, const PointPair& pair, const Direction& dir,
                               double tau);

/// (pi / |P - Q|)(1/2 + 2l), l = 0..l_max.
std::vector<double> perpendicular_tau_sequence(const PointPair& pair, int l_max);

IndicatorTrace point_difference_trace(PointDifference& op, const Direction& dir, const std::vector<double>& taus);

/// Header (omega, regime, provenance, warnings) then "tau logmag phase" rows.
void write_trace(std::ostream& os, const IndicatorTrace& trace);

}  // namespace enclosure
