#pragma once

// Shared by forward.cpp and the tests that poke at the discretization.

#include <Eigen/Dense>
#include <complex>
#include <optional>
#include <span>
#include <vector>

#include "enclosure/boundary_data.hpp"
#include "enclosure/forward.hpp"
#include "enclosure/geometry.hpp"
#include "enclosure/quadrature.hpp"

namespace enclosure::detail {

/// Nystrom nodes on a polygon. Each edge is split at its midpoint and each
/// half carries `panels` panels with breakpoints (k/panels)^3 toward the corner.
struct PanelBoundary {
    std::vector<Vec2> points;
    std::vector<Vec2> normals;
    std::vector<double> weights;
    std::vector<int> panel;  // panel index of each node
    std::vector<Vec2> panel_start;
    std::vector<Vec2> panel_end;
    int order = 0;  // nodes per panel

    std::size_t size() const { return points.size(); }
};

PanelBoundary discretize(const PolygonRegion& region, int panels, const GaussRule& rule);

/// Spectral description of functions on the ellipse boundary. Coefficient
/// layout: [c0, cos1, sin1, cos2, sin2, ...], and the basis functions are the
/// harmonic extensions Re R_m / (1 + q^m), Im R_m / (1 - q^m) of cos, sin.
class OuterGrid {
public:
    OuterGrid(const EllipseDomain& domain, std::size_t n);

    const EllipseDomain& domain() const { return domain_; }
    std::size_t size() const { return theta_.size(); }
    int modes() const { return static_cast<int>(theta_.size() / 2) - 1; }
    const std::vector<double>& theta() const { return theta_; }
    const std::vector<Vec2>& points() const { return points_; }
    const std::vector<Vec2>& normals() const { return normals_; }
    const std::vector<double>& speeds() const { return speeds_; }

    /// (2M+1) x n discrete Fourier projection.
    Eigen::MatrixXd projection() const;

private:
    EllipseDomain domain_;
    std::vector<double> theta_;
    std::vector<Vec2> points_;
    std::vector<Vec2> normals_;
    std::vector<double> speeds_;
};

std::vector<double> project(std::span<const double> values);

/// Dirichlet-to-Neumann factor of coefficient slot k (speed included):
/// cos m -> m t_m, sin m -> m / t_m with t_m = (1 - q^m)/(1 + q^m); 0 for k = 0.
double dtn_factor(const EllipseDomain& domain, std::size_t k);

double series_value(std::span<const double> coeffs, double theta);
/// d/dnu of the harmonic extension at boundary angle theta.
double series_normal_derivative(const EllipseDomain& domain, std::span<const double> coeffs, double theta);

struct Extension {
    double value = 0.0;
    Vec2 gradient;
};
Extension extension(const EllipseDomain& domain, std::span<const double> coeffs, Vec2 p);
/// Normal derivatives of every basis function at p along nu.
void basis_normal_row(const EllipseDomain& domain, Vec2 p, Vec2 nu, std::span<double> out);

/// One refinement level of the single-layer formulation
///   (lambda - K' - H) sigma = du0/dn  on the region boundary,
/// where H adds the harmonic correction that restores the outer boundary
/// condition (Dirichlet or Neumann) of the ellipse.
class Operator {
public:
    Operator(const EllipseDomain& domain, const PolygonRegion& region, double lambda, bool neumann, int panels,
             const SolverOptions& options);

    const PanelBoundary& boundary() const { return boundary_; }
    const OuterGrid& outer() const { return outer_; }
    std::size_t size() const { return boundary_.size(); }

    /// sigma for one or more right-hand sides.
    Eigen::MatrixXd solve(const Eigen::MatrixXd& rhs) const;
    Eigen::VectorXd apply(const Eigen::VectorXd& sigma) const;
    /// Coefficients of the outer correction h for each density column.
    Eigen::MatrixXd correction(const Eigen::MatrixXd& sigma) const;

    /// Single-layer potential and its nu-derivative at points off the region.
    double single_layer(Vec2 x, std::span<const double> sigma) const;
    double single_layer_normal(Vec2 x, Vec2 nu, std::span<const double> sigma) const;
    /// Single-layer potential at the nodes themselves, with product
    /// integration on nearby panels.
    std::vector<double> single_layer_on_boundary(std::span<const double> sigma) const;

private:
    void apply_kprime(const double* sigma, double* out) const;

    EllipseDomain domain_;
    PanelBoundary boundary_;
    OuterGrid outer_;
    double lambda_;
    bool neumann_;
    SolverOptions options_;
    Eigen::MatrixXd projection_;  // includes Neumann-to-Dirichlet scaling when neumann_
    Eigen::MatrixXd lift_;        // E * projection
    Eigen::MatrixXd layer_;       // single layer (or its flux density) on the outer grid
    std::optional<Eigen::PartialPivLU<Eigen::MatrixXd>> lu_;
};

}  // namespace enclosure::detail
