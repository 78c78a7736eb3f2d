#include "enclosure/geometry.hpp"

#include <algorithm>
#include <limits>
#include <numbers>
#include <string>

#include "enclosure/errors.hpp"

namespace enclosure {

namespace {

constexpr double kEdgeNormalTolerance = 1e-9;
constexpr int kBoundarySamples = 512;

bool segments_cross(Vec2 p1, Vec2 p2, Vec2 q1, Vec2 q2) {
    auto orient = [](Vec2 a, Vec2 b, Vec2 c) { return cross(b - a, c - a); };
    const double d1 = orient(q1, q2, p1);
    const double d2 = orient(q1, q2, p2);
    const double d3 = orient(p1, p2, q1);
    const double d4 = orient(p1, p2, q2);
    if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0)))
        return true;
    auto on_segment = [](Vec2 a, Vec2 b, Vec2 c) {
        return std::min(a.x, b.x) <= c.x && c.x <= std::max(a.x, b.x) &&
               std::min(a.y, b.y) <= c.y && c.y <= std::max(a.y, b.y);
    };
    if (d1 == 0 && on_segment(q1, q2, p1)) return true;
    if (d2 == 0 && on_segment(q1, q2, p2)) return true;
    if (d3 == 0 && on_segment(p1, p2, q1)) return true;
    if (d4 == 0 && on_segment(p1, p2, q2)) return true;
    return false;
}

double segment_distance(Vec2 p, Vec2 a, Vec2 b) {
    const Vec2 ab = b - a;
    const double len2 = dot(ab, ab);
    const double t = std::clamp(dot(p - a, ab) / len2, 0.0, 1.0);
    return norm(p - (a + t * ab));
}

}  // namespace

// --- EllipseDomain ----------------------------------------------------------

EllipseDomain::EllipseDomain(double a, double b) : a_(a), b_(b) {
    if (!(b > 0.0) || !(a >= b) || !std::isfinite(a))
        throw InvalidDomain("ellipse requires a >= b > 0, got a=" + std::to_string(a) +
                            ", b=" + std::to_string(b));
}

double EllipseDomain::focal_distance() const { return std::sqrt((a_ - b_) * (a_ + b_)); }

Vec2 EllipseDomain::point(double theta) const {
    return {a_ * std::cos(theta), b_ * std::sin(theta)};
}

Vec2 EllipseDomain::normal(double theta) const {
    const Vec2 n{b_ * std::cos(theta), a_ * std::sin(theta)};
    return n * (1.0 / norm(n));
}

double EllipseDomain::speed(double theta) const {
    return std::hypot(a_ * std::sin(theta), b_ * std::cos(theta));
}

double EllipseDomain::level(Vec2 p) const {
    const double u = p.x / a_;
    const double v = p.y / b_;
    return u * u + v * v - 1.0;
}

double EllipseDomain::boundary_support(Vec2 w) const {
    return std::hypot(a_ * w.x, b_ * w.y);
}

// --- Direction --------------------------------------------------------------

Direction::Direction(double x, double y) {
    const double r = std::hypot(x, y);
    if (!(r > 0.0) || !std::isfinite(r)) throw InvalidRegion("direction must be a nonzero vector");
    w_ = {x / r, y / r};
}

Direction Direction::from_angle(double angle) { return Direction(std::cos(angle), std::sin(angle)); }

// --- PolygonRegion ----------------------------------------------------------

PolygonRegion::PolygonRegion(std::vector<Vec2> vertices) : vertices_(std::move(vertices)) {
    const std::size_t n = vertices_.size();
    if (n < 3) throw InvalidRegion("polygon needs at least 3 vertices");
    for (std::size_t i = 0; i < n; ++i) {
        if (!std::isfinite(vertices_[i].x) || !std::isfinite(vertices_[i].y))
            throw InvalidRegion("polygon vertex is not finite");
        if (vertices_[i] == vertices_[(i + 1) % n])
            throw InvalidRegion("polygon has repeated consecutive vertices");
    }
    double twice_area = 0.0;
    for (std::size_t i = 0; i < n; ++i) twice_area += cross(vertices_[i], vertices_[(i + 1) % n]);
    double scale = 0.0;
    for (const Vec2& v : vertices_) scale = std::max(scale, dot(v, v));
    if (std::abs(twice_area) <= 1e-14 * std::max(scale, 1e-300))
        throw InvalidRegion("degenerate polygon (collinear vertices)");
    if (twice_area < 0.0) std::reverse(vertices_.begin(), vertices_.end());

    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const bool adjacent = (j == i + 1) || (i == 0 && j == n - 1);
            if (adjacent) continue;
            if (segments_cross(vertex(i), vertex(i + 1), vertex(j), vertex(j + 1)))
                throw InvalidRegion("polygon is not simple: edges " + std::to_string(i) +
                                    " and " + std::to_string(j) + " intersect");
        }
    }
}

PolygonRegion PolygonRegion::regular(int n, double r, Vec2 center, double phase) {
    std::vector<Vec2> v;
    v.reserve(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) {
        const double t = phase + 2.0 * std::numbers::pi * k / n;
        v.push_back(center + Vec2{r * std::cos(t), r * std::sin(t)});
    }
    return PolygonRegion(std::move(v));
}

PolygonRegion PolygonRegion::square(double side, Vec2 center) {
    const double h = 0.5 * side;
    return PolygonRegion({center + Vec2{-h, -h}, center + Vec2{h, -h}, center + Vec2{h, h},
                          center + Vec2{-h, h}});
}

double PolygonRegion::area() const {
    double s = 0.0;
    for (std::size_t i = 0; i < size(); ++i) s += cross(vertex(i), vertex(i + 1));
    return 0.5 * s;
}

double PolygonRegion::diameter() const {
    double d = 0.0;
    for (std::size_t i = 0; i < size(); ++i)
        for (std::size_t j = i + 1; j < size(); ++j) d = std::max(d, norm(vertex(i) - vertex(j)));
    return d;
}

Vec2 PolygonRegion::edge_normal(std::size_t i) const {
    const Vec2 e = vertex(i + 1) - vertex(i);
    return Vec2{e.y, -e.x} * (1.0 / norm(e));
}

bool PolygonRegion::contains(Vec2 p) const {
    bool inside = false;
    for (std::size_t i = 0, j = size() - 1; i < size(); j = i++) {
        const Vec2 a = vertices_[i];
        const Vec2 b = vertices_[j];
        if ((a.y > p.y) != (b.y > p.y) && p.x < (b.x - a.x) * (p.y - a.y) / (b.y - a.y) + a.x)
            inside = !inside;
    }
    return inside;
}

double PolygonRegion::distance_to(Vec2 p) const {
    if (contains(p)) return 0.0;
    double d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < size(); ++i) d = std::min(d, segment_distance(p, vertex(i), vertex(i + 1)));
    return d;
}

PointPair::PointPair(Vec2 p_, Vec2 q_, const EllipseDomain& domain) : p(p_), q(q_) {
    if (p == q) throw InvalidRegion("point pair requires P != Q");
    if (std::abs(domain.level(p)) > 1e-12 || std::abs(domain.level(q)) > 1e-12)
        throw InvalidRegion("point pair must lie on the ellipse boundary");
}

// --- support functions ------------------------------------------------------

double support_function(const PolygonRegion& region, const Direction& dir) {
    double h = -std::numeric_limits<double>::infinity();
    for (const Vec2& v : region.vertices()) h = std::max(h, dot(v, dir.omega()));
    return h;
}

double focal_support(const EllipseDomain& domain, const Direction& dir) {
    if (domain.is_circle()) return 0.0;
    return domain.focal_distance() * std::abs(dir.omega().x);
}

double pair_support(const PointPair& pair, const Direction& dir) {
    return std::max(dot(pair.p, dir.omega()), dot(pair.q, dir.omega()));
}

bool is_regular(const PolygonRegion& region, const Direction& dir) {
    const double target = dir.angle();
    for (std::size_t i = 0; i < region.size(); ++i) {
        const Vec2 n = region.edge_normal(i);
        double diff = std::abs(std::atan2(n.y, n.x) - target);
        diff = std::min(diff, 2.0 * std::numbers::pi - diff);
        if (diff < kEdgeNormalTolerance) return false;
    }
    return true;
}

// --- admissibility ----------------------------------------------------------

Clearance clearance(const PolygonRegion& region, const EllipseDomain& domain) {
    for (const Vec2& v : region.vertices())
        if (!domain.contains_strictly(v))
            throw ContainmentError("region touches or crosses the ellipse boundary");

    auto dist = [&](double t) { return region.distance_to(domain.point(t)); };

    const double step = 2.0 * std::numbers::pi / kBoundarySamples;
    std::vector<double> samples(kBoundarySamples);
    for (int k = 0; k < kBoundarySamples; ++k) samples[static_cast<std::size_t>(k)] = dist(k * step);

    double best = std::numeric_limits<double>::infinity();
    // Refine around every local minimum of the sampled distance; the distance
    // can have several comparable wells for elongated regions.
    for (int k = 0; k < kBoundarySamples; ++k) {
        const double prev = samples[static_cast<std::size_t>((k + kBoundarySamples - 1) % kBoundarySamples)];
        const double next = samples[static_cast<std::size_t>((k + 1) % kBoundarySamples)];
        const double cur = samples[static_cast<std::size_t>(k)];
        if (cur > prev || cur > next) continue;
        double lo = (k - 1) * step;
        double hi = (k + 1) * step;
        const double g = 0.5 * (std::sqrt(5.0) - 1.0);
        double x1 = hi - g * (hi - lo);
        double x2 = lo + g * (hi - lo);
        double f1 = dist(x1);
        double f2 = dist(x2);
        while (hi - lo > 1e-10 * (1.0 + std::abs(hi))) {
            if (f1 < f2) {
                hi = x2; x2 = x1; f2 = f1;
                x1 = hi - g * (hi - lo); f1 = dist(x1);
            } else {
                lo = x1; x1 = x2; f1 = f2;
                x2 = lo + g * (hi - lo); f2 = dist(x2);
            }
        }
        best = std::min({best, cur, f1, f2});
    }
    return {region.diameter(), best};
}

bool admissibility(const PolygonRegion& region, const EllipseDomain& domain) {
    return clearance(region, domain).admissible();
}

}  // namespace enclosure
