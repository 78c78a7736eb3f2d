#pragma once

#include <complex>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "enclosure/boundary_data.hpp"
#include "enclosure/geometry.hpp"

namespace enclosure {

/// Outer conductivity gamma and, for inclusions, the inner one.
struct MaterialSpec {
    double gamma = 1.0;
    std::optional<double> gamma_inner;

    /// Throws ContractViolation unless gamma > 0 and gamma_inner (if set) is
    /// positive and different from gamma.
    void validate() const;
    /// (gamma + gamma~) / (2 (gamma - gamma~)); 1/2 for a cavity.
    double jump_coefficient() const;
    /// gamma~/gamma outside [1e-3, 1e3].
    bool ill_conditioned() const;
};

/// Boundary data on a uniform theta grid of the ellipse: the voltage f and
/// the current density k du/dnu.
struct BoundaryMeasurement {
    EllipseDomain domain{1.0, 1.0};
    std::vector<double> theta;
    std::vector<double> dirichlet;
    std::vector<double> flux;
    double gamma = 1.0;
    bool gamma_known = true;

    std::size_t size() const { return theta.size(); }
    /// Trapezoid of flux ds over the boundary.
    double net_current() const;
};

std::vector<double> uniform_theta(std::size_t n);

struct SolverOptions {
    std::size_t grid_points = 1024;  // output theta grid
    int min_panels = 4;              // per half edge, so at least 8 per edge
    int max_panels = 64;
    int gauss_order = 16;
    double tolerance = 1e-6;         // flux self-convergence, relative
    std::size_t dense_limit = 2048;  // larger systems go to GMRES
};

struct SolveReport {
    int panels = 0;  // per half edge at the accepted level
    std::size_t unknowns = 0;
    std::size_t outer_grid = 0;  // spectral grid on the ellipse
    double self_convergence = 0.0;
    bool ill_conditioned = false;
};

/// Density and geometry on the region boundary after a solve; u and its
/// exterior normal derivative at the quadrature nodes.
struct RegionTrace {
    std::vector<Vec2> points;
    std::vector<Vec2> normals;  // outward from the region
    std::vector<double> weights;
    std::vector<double> potential;
    std::vector<double> normal_derivative;  // from the outer side
};

/// Dirichlet data f on the ellipse, insulating cavity (or none). Returns
/// gamma du/dnu on the output grid.
BoundaryMeasurement solve_cavity(const EllipseDomain& domain, const std::optional<PolygonRegion>& cavity,
                                 const HarmonicTrace& trace, double gamma, const SolverOptions& options = {},
                                 SolveReport* report = nullptr, RegionTrace* region_trace = nullptr);

/// Transmission problem div(k grad u) = 0 with u = f on the ellipse.
BoundaryMeasurement solve_inclusion(const EllipseDomain& domain, const PolygonRegion& inclusion,
                                    const HarmonicTrace& trace, const MaterialSpec& materials,
                                    const SolverOptions& options = {}, SolveReport* report = nullptr,
                                    RegionTrace* region_trace = nullptr);

/// Neumann problem k du/dnu = g on the ellipse. Assembled operators are kept
/// per refinement level, so repeated right-hand sides only pay for the solve.
/// Not thread-safe; use one instance per thread.
class NeumannSolver {
public:
    NeumannSolver(const EllipseDomain& domain, std::optional<PolygonRegion> inclusion, MaterialSpec materials,
                  SolverOptions options = {});
    ~NeumannSolver();
    NeumannSolver(NeumannSolver&&) noexcept;
    NeumannSolver& operator=(NeumannSolver&&) noexcept;

    const std::vector<double>& theta() const { return theta_; }
    /// g sampled on theta(); returns u on theta() with zero arc-length mean.
    /// Throws CompatibilityError when the net current exceeds 1e-10 of sum |g| ds.
    std::vector<double> solve(std::span<const double> g, SolveReport* report = nullptr);
    std::vector<std::complex<double>> solve(std::span<const std::complex<double>> g,
                                            SolveReport* report = nullptr);

private:
    struct Level;
    std::vector<std::complex<double>> solve_columns(std::span<const std::complex<double>> g, SolveReport* report);
    Level& level(int panels);

    EllipseDomain domain_;
    std::optional<PolygonRegion> inclusion_;
    MaterialSpec materials_;
    SolverOptions options_;
    std::vector<double> theta_;
    std::vector<std::unique_ptr<Level>> levels_;
};

std::vector<double> solve_neumann(const EllipseDomain& domain, const std::optional<PolygonRegion>& inclusion,
                                  const MaterialSpec& materials, std::span<const double> g,
                                  const SolverOptions& options = {});

/// Unit disc with a concentric insulating disc of radius R and f = cos(m theta).
class AnalyticDisc {
public:
    /// Throws ContractViolation unless 0 < R < 1 and m >= 1.
    AnalyticDisc(double radius, int harmonic);

    double radius() const { return radius_; }
    int harmonic() const { return m_; }
    /// Ratio of the boundary flux to m cos(m theta) at gamma = 1.
    double flux_factor() const;
    /// gamma c (1 + R^{2m}) / (1 - R^{2m}): every radius then gives the same
    /// gamma du/dnu = c m cos(m theta).
    double matched_gamma(double c = 1.0) const;
    /// u at a point of the annulus R <= |x| <= 1.
    double potential(Vec2 x) const;
    BoundaryMeasurement measurement(std::size_t n, double gamma = 1.0) const;

private:
    double radius_;
    int m_;
};

AnalyticDisc analytic_disc(double radius, int harmonic);

/// Header lines (a, b, gamma, gamma_known, points) then "theta f flux" rows.
void write_measurement(std::ostream& os, const BoundaryMeasurement& meas);
BoundaryMeasurement read_measurement(std::istream& is);

}  // namespace enclosure
