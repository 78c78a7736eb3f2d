#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "enclosure/boundary_data.hpp"
#include "enclosure/forward.hpp"
#include "enclosure/geometry.hpp"
#include "enclosure/indicator.hpp"

namespace enclosure {

/// One applied voltage and the boundary data it produced.
struct VoltageSource {
    HarmonicTrace trace;
    const FluxIntegrator* data = nullptr;
};

struct ConditionCheck {
    std::string name;   // "leading", "sum+", "sum-", "vertical+", "vertical-"
    std::size_t source = 0;
    double magnitude = 0.0;  // relative to the size of the summed terms
    bool passed = false;
};

struct ProfileEntry {
    Direction dir{1.0, 0.0};
    Regime regime = Regime::generic;
    std::optional<SlopeEstimate> slope;
    std::optional<IndicatorTrace> trace;
    std::vector<ConditionCheck> checks;
    bool regular = true;          // only meaningful when a truth region was supplied
    std::optional<std::size_t> source;  // voltage used
    std::string excluded_reason;  // empty when the direction is used

    bool excluded() const { return !excluded_reason.empty(); }
};

struct SupportProfile {
    EllipseDomain domain{1.0, 1.0};
    std::vector<ProfileEntry> entries;

    std::size_t used() const;
};

struct SweepOptions {
    std::size_t directions = 64;
    bool adaptive_window = true;  // false: default_tau_window
    WindowPolicy window;
    SlopeFitOptions fit;
    int vertical_l_min = 4;
    int vertical_l_max = 40;
    /// A non-vanishing condition fails when the sum is below this fraction
    /// of the sum of its term magnitudes.
    double condition_tolerance = 1e-10;
    unsigned threads = 0;  // 0: hardware concurrency
    /// Only used to set the regularity flag of each entry.
    std::optional<PolygonRegion> truth_region;
};

/// angle_k = 2 pi (k + 1/2) / M.
std::vector<Direction> sweep_directions(std::size_t count);

/// Slopes of log|J| over M uniformly spaced directions. Per direction the
/// first voltage that passes its non-vanishing condition is used; directions
/// where every voltage fails are excluded with a reason.
SupportProfile sweep(const EllipseDomain& domain, const std::vector<VoltageSource>& sources,
                     const SweepOptions& options = {});

/// Point-difference slopes u(P) - u(Q) over the same directions; directions
/// perpendicular to P - Q use the discrete tau sequence, others the default
/// window. Targets max(h_D, h_{P,Q}).
SupportProfile sweep_point_difference(const EllipseDomain& domain, const std::optional<PolygonRegion>& inclusion,
                                      const MaterialSpec& materials, const PointPair& pair,
                                      const SweepOptions& options = {}, int perpendicular_l_max = 12);

/// Builds a profile from exact support values (testing and dual checks).
SupportProfile exact_profile(const EllipseDomain& domain, const std::vector<Direction>& dirs,
                             const std::vector<double>& support);

struct HullEstimate {
    std::vector<Vec2> vertices;  // counterclockwise, may be degenerate
    std::vector<double> slack;   // s(w) - max_v v.w per profile entry, NaN if excluded

    double support(const Direction& dir) const;
};

/// Intersection of {x : x.w <= s(w)} over the non-excluded entries, with
/// each slope raised to at least the focal-segment support.
/// Throws InsufficientCoverage when fewer than 3 directions remain or they
/// leave an angular gap of at least pi.
HullEstimate intersect_halfplanes(const SupportProfile& profile);

/// conv(region ∪ focal segment); the region may be absent.
std::vector<Vec2> truth_hull(const EllipseDomain& domain, const std::optional<PolygonRegion>& region);

/// Symmetric Hausdorff distance between two convex polygons, measured from
/// 1024 arc-length samples of each boundary to the other filled polygon.
double hausdorff(const std::vector<Vec2>& a, const std::vector<Vec2>& b, std::size_t samples = 1024);
double hull_error(const HullEstimate& estimate, const EllipseDomain& domain,
                  const std::optional<PolygonRegion>& region);

std::vector<Vec2> convex_hull(std::vector<Vec2> points);

/// "omega_angle slope stderr regime excluded_reason" rows.
void write_profile(std::ostream& os, const SupportProfile& profile);
/// One "x y" row per vertex.
void write_hull(std::ostream& os, const HullEstimate& hull);

}  // namespace enclosure
