#pragma once

#include <cmath>
#include <span>
#include <vector>

namespace enclosure {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    constexpr Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
    constexpr Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
    constexpr Vec2 operator-() const { return {-x, -y}; }
    constexpr Vec2 operator*(double s) const { return {x * s, y * s}; }
    constexpr bool operator==(const Vec2&) const = default;
};

constexpr Vec2 operator*(double s, Vec2 v) { return v * s; }
constexpr double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
constexpr double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 v) { return std::hypot(v.x, v.y); }

/// Ellipse {(x/a)^2 + (y/b)^2 < 1} with a >= b > 0, parametrized by
/// theta -> (a cos theta, b sin theta).
class EllipseDomain {
public:
    EllipseDomain(double a, double b);

    double a() const { return a_; }
    double b() const { return b_; }
    bool is_circle() const { return a_ == b_; }

    /// sqrt(a^2 - b^2), the focal half-distance.
    double focal_distance() const;
    /// (1/2)(1/a + 1/b) and (1/2)(1/a - 1/b).
    double a_plus() const { return 0.5 * (1.0 / a_ + 1.0 / b_); }
    double a_minus() const { return 0.5 * (1.0 / a_ - 1.0 / b_); }
    /// (a + b)/2 and (a - b)/2.
    double b_plus() const { return 0.5 * (a_ + b_); }
    double b_minus() const { return 0.5 * (a_ - b_); }
    /// (a - b)/(a + b); zero for the circle.
    double eccentric_ratio() const { return (a_ - b_) / (a_ + b_); }
    double diameter() const { return 2.0 * a_; }

    Vec2 point(double theta) const;
    /// Outward unit normal at parameter theta.
    Vec2 normal(double theta) const;
    /// |x'(theta)|.
    double speed(double theta) const;
    /// Value of (x/a)^2 + (y/b)^2 - 1.
    double level(Vec2 p) const;
    bool contains_strictly(Vec2 p) const { return level(p) < 0.0; }
    /// max over the boundary of x . w for unit w.
    double boundary_support(Vec2 w) const;

private:
    double a_;
    double b_;
};

/// Unit direction w together with w_perp = (w2, -w1).
class Direction {
public:
    /// Normalizes (x, y); throws InvalidRegion on a zero vector.
    Direction(double x, double y);
    static Direction from_angle(double angle);

    Vec2 omega() const { return w_; }
    Vec2 perp() const { return {w_.y, -w_.x}; }
    double angle() const { return std::atan2(w_.y, w_.x); }
    Direction flipped() const { return Direction(-w_.x, -w_.y); }

private:
    Vec2 w_;
};

/// Simple polygon, stored counterclockwise.
class PolygonRegion {
public:
    explicit PolygonRegion(std::vector<Vec2> vertices);

    /// Regular n-gon inscribed in the circle of radius r about center.
    static PolygonRegion regular(int n, double r, Vec2 center = {}, double phase = 0.0);
    /// Axis-aligned square with the given side length.
    static PolygonRegion square(double side, Vec2 center = {});

    std::span<const Vec2> vertices() const { return vertices_; }
    std::size_t size() const { return vertices_.size(); }
    Vec2 vertex(std::size_t i) const { return vertices_[i % vertices_.size()]; }
    double area() const;
    double diameter() const;
    /// Outward unit normal of edge i (from vertex i to vertex i+1).
    Vec2 edge_normal(std::size_t i) const;
    /// Euclidean distance from p to the closed region.
    double distance_to(Vec2 p) const;
    bool contains(Vec2 p) const;

private:
    std::vector<Vec2> vertices_;
};

/// Two distinct points on the boundary of an ellipse.
struct PointPair {
    PointPair(Vec2 p, Vec2 q, const EllipseDomain& domain);
    Vec2 p;
    Vec2 q;
};

double support_function(const PolygonRegion& region, const Direction& dir);
double focal_support(const EllipseDomain& domain, const Direction& dir);
double pair_support(const PointPair& pair, const Direction& dir);

/// True iff the supporting line in direction dir touches a single vertex.
bool is_regular(const PolygonRegion& region, const Direction& dir);

struct Clearance {
    double diameter = 0.0;
    double distance = 0.0;  // dis(D, boundary of the ellipse)
    bool admissible() const { return diameter < distance; }
};

/// Diameter of the region against its distance to the ellipse boundary.
/// Throws ContainmentError if the region is not strictly inside.
Clearance clearance(const PolygonRegion& region, const EllipseDomain& domain);
bool admissibility(const PolygonRegion& region, const EllipseDomain& domain);

}  // namespace enclosure
