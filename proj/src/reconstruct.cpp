#include "enclosure/reconstruct.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>
#include <exception>
#include <mutex>
#include <thread>

#include "enclosure/errors.hpp"
#include "enclosure/format.hpp"
#include "enclosure/moments.hpp"

namespace enclosure {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kVerticalBand = 1e-8;
constexpr double kParallel = 1e-9;

ConditionCheck leading_check(const HarmonicTrace& f, std::size_t source, double tol) {
    const int n = f.band_limit();
    double largest = 0.0;
    for (int m = 0; m <= n; ++m) largest = std::max(largest, std::abs(f.gamma(m)));
    const double top = n > 0 ? std::abs(f.gamma(n)) : 0.0;
    const double rel = largest > 0.0 ? top / largest : 0.0;
    return {"leading", source, rel, n > 0 && rel > tol};
}

ConditionCheck sum_check(const HarmonicTrace& f, const EllipseDomain& d, int sign, std::size_t source, double tol) {
    const MomentCoefficients c = coefficients(d, f);
    double scale = 0.0;
    for (int m = 1; m < c.size(); ++m) scale += static_cast<double>(m) * m * std::abs(c[m]);
    const double rel = scale > 0.0 ? std::abs(condition_sum(f, d, sign)) / scale : 0.0;
    return {sign > 0 ? "sum+" : "sum-", source, rel, rel > tol};
}

ConditionCheck vertical_check(const HarmonicTrace& f, const EllipseDomain& d, int sign, std::size_t source,
                              double tol) {
    const MomentCoefficients c = coefficients(d, f);
    const MomentCoefficients cr = coefficients(d, reflect(f));
    double scale = 0.0;
    for (int m = 1; m < c.size(); ++m) scale += static_cast<double>(m) * m * (std::abs(c[m]) + std::abs(cr[m]));
    const double rel = scale > 0.0 ? std::abs(condition_vertical(f, d, sign)) / scale : 0.0;
    return {sign > 0 ? "vertical+" : "vertical-", source, rel, rel > tol};
}

ProfileEntry sweep_one(const EllipseDomain& domain, const std::vector<VoltageSource>& sources,
                       const SweepOptions& options, const Direction& dir) {
    ProfileEntry e;
    e.dir = dir;
    if (options.truth_region) e.regular = is_regular(*options.truth_region, dir);

    const Vec2 w = dir.omega();
    const bool vertical = !domain.is_circle() && std::abs(w.x) < kVerticalBand;
    e.regime = vertical ? Regime::discrete_vertical : Regime::generic;

    for (std::size_t i = 0; i < sources.size() && !e.source; ++i) {
        const HarmonicTrace& f = sources[i].trace;
        ConditionCheck check;
        if (domain.is_circle())
            check = leading_check(f, i, options.condition_tolerance);
        else if (vertical)
            check = vertical_check(f, domain, w.y < 0 ? -1 : 1, i, options.condition_tolerance);
        else
            check = sum_check(f, domain, w.x < 0 ? -1 : 1, i, options.condition_tolerance);
        e.checks.push_back(check);
        if (check.passed) e.source = i;
    }
    if (!e.source) {
        e.excluded_reason = "no voltage passes the " + e.checks.front().name + " condition";
        return e;
    }

    const VoltageSource& src = sources[*e.source];
    try {
        e.trace =
            vertical ? vertical_indicator(*src.data, w.y < 0 ? -1 : 1, options.vertical_l_max, options.vertical_l_min,
                                          &src.trace)
                     : generic_indicator(*src.data, dir,
                                                options.adaptive_window
                                                    ? floor_adaptive_window(*src.data, dir, options.window)
                                                    : default_tau_window(domain));
        e.slope = slope_fit(*e.trace, options.fit);
    } catch (const Error& err) {
        e.excluded_reason = err.what();
    }
    return e;
}

// Runs body on `threads` workers sharing one counter; the first exception wins.
template <class Body>
void run_workers(std::size_t count, unsigned threads, Body body) {
    threads = threads ? threads : std::max(1u, std::thread::hardware_concurrency());
    threads = std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(count, 1)));
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        try {
            body(next);
        } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
            next = count;
        }
    };
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    }
    if (failure) std::rethrow_exception(failure);
}

double distance_to_segment(Vec2 p, Vec2 a, Vec2 b) {
    const Vec2 ab = b - a;
    const double len2 = dot(ab, ab);
    const double t = len2 > 0.0 ? std::clamp(dot(p - a, ab) / len2, 0.0, 1.0) : 0.0;
    return norm(p - (a + t * ab));
}

double polygon_area(const std::vector<Vec2>& poly) {
    double s = 0.0;
    for (std::size_t i = 0; i < poly.size(); ++i) s += cross(poly[i], poly[(i + 1) % poly.size()]);
    return 0.5 * s;
}

// Distance from p to the filled convex polygon (counterclockwise).
double distance_to_polygon(Vec2 p, const std::vector<Vec2>& poly) {
    const std::size_t n = poly.size();
    if (n == 1) return norm(p - poly[0]);
    if (n >= 3 && polygon_area(poly) > 0.0) {
        bool inside = true;
        for (std::size_t i = 0; i < n && inside; ++i) inside = cross(poly[(i + 1) % n] - poly[i], p - poly[i]) >= 0.0;
        if (inside) return 0.0;
    }
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) best = std::min(best, distance_to_segment(p, poly[i], poly[(i + 1) % n]));
    return best;
}

std::vector<Vec2> boundary_samples(const std::vector<Vec2>& poly, std::size_t count) {
    const std::size_t n = poly.size();
    double perimeter = 0.0;
    for (std::size_t i = 0; i < n; ++i) perimeter += norm(poly[(i + 1) % n] - poly[i]);
    if (n == 1 || perimeter == 0.0) return std::vector<Vec2>(count, poly[0]);
    std::vector<Vec2> out;
    out.reserve(count);
    std::size_t edge = 0;
    double edge_start = 0.0;
    for (std::size_t k = 0; k < count; ++k) {
        const double s = perimeter * static_cast<double>(k) / static_cast<double>(count);
        double len = norm(poly[(edge + 1) % n] - poly[edge]);
        while (s > edge_start + len && edge + 1 < n) {
            edge_start += len;
            ++edge;
            len = norm(poly[(edge + 1) % n] - poly[edge]);
        }
        const double t = len > 0.0 ? std::clamp((s - edge_start) / len, 0.0, 1.0) : 0.0;
        out.push_back(poly[edge] + t * (poly[(edge + 1) % n] - poly[edge]));
    }
    return out;
}

}  // namespace

std::size_t SupportProfile::used() const {
    return static_cast<std::size_t>(std::count_if(entries.begin(), entries.end(),
                                                  [](const ProfileEntry& e) { return !e.excluded(); }));
}

std::vector<Direction> sweep_directions(std::size_t count) {
    std::vector<Direction> out;
    out.reserve(count);
    for (std::size_t k = 0; k < count; ++k)
        out.push_back(Direction::from_angle(2.0 * kPi * (static_cast<double>(k) + 0.5) / static_cast<double>(count)));
    return out;
}

SupportProfile sweep(const EllipseDomain& domain, const std::vector<VoltageSource>& sources,
                     const SweepOptions& options) {
    if (sources.empty()) throw ContractViolation("sweep needs at least one voltage");
    for (const VoltageSource& s : sources)
        if (!s.data) throw ContractViolation("voltage without boundary data");

    const std::vector<Direction> dirs = sweep_directions(options.directions);
    SupportProfile profile;
    profile.domain = domain;
    profile.entries.resize(dirs.size());

    run_workers(dirs.size(), options.threads, [&](std::atomic<std::size_t>& next) {
        for (std::size_t k; (k = next.fetch_add(1)) < dirs.size();)
            profile.entries[k] = sweep_one(domain, sources, options, dirs[k]);
    });
    return profile;
}

SupportProfile sweep_point_difference(const EllipseDomain& domain, const std::optional<PolygonRegion>& inclusion,
                                      const MaterialSpec& materials, const PointPair& pair,
                                      const SweepOptions& options, int perpendicular_l_max) {
    const std::vector<Direction> dirs = sweep_directions(options.directions);
    SupportProfile profile;
    profile.domain = domain;
    profile.entries.resize(dirs.size());
    const Vec2 pq = pair.p - pair.q;
    run_workers(dirs.size(), options.threads, [&](std::atomic<std::size_t>& next) {
        // the Neumann solver caches factorizations, so each worker owns one
        PointDifference op(domain, inclusion, materials, pair);
        for (std::size_t k; (k = next.fetch_add(1)) < dirs.size();) {
            ProfileEntry& e = profile.entries[k];
            e.dir = dirs[k];
            e.regime = Regime::point_difference;
            e.source = 0;
            if (options.truth_region) e.regular = is_regular(*options.truth_region, e.dir);
            const bool perpendicular = std::abs(dot(e.dir.omega(), pq)) < kVerticalBand * norm(pq);
            try {
                e.trace = point_difference_trace(op, e.dir,
                                                 perpendicular ? perpendicular_tau_sequence(pair, perpendicular_l_max)
                                                               : default_tau_window(domain));
                e.slope = slope_fit(*e.trace, options.fit);
            } catch (const Error& err) {
                e.excluded_reason = err.what();
            }
        }
    });
    return profile;
}

SupportProfile exact_profile(const EllipseDomain& domain, const std::vector<Direction>& dirs,
                             const std::vector<double>& support) {
    if (dirs.size() != support.size()) throw ContractViolation("exact_profile: size mismatch");
    SupportProfile p;
    p.domain = domain;
    for (std::size_t i = 0; i < dirs.size(); ++i) {
        ProfileEntry e;
        e.dir = dirs[i];
        SlopeEstimate s;
        s.value = support[i];
        e.slope = s;
        e.source = 0;
        p.entries.push_back(e);
    }
    return p;
}

double HullEstimate::support(const Direction& dir) const {
    double best = -std::numeric_limits<double>::infinity();
    for (Vec2 v : vertices) best = std::max(best, dot(v, dir.omega()));
    return best;
}

HullEstimate intersect_halfplanes(const SupportProfile& profile) {
    struct Constraint {
        double angle;
        Vec2 w;
        double s;
    };
    std::vector<Constraint> cs;
    for (const ProfileEntry& e : profile.entries) {
        if (e.excluded() || !e.slope) continue;
        double angle = e.dir.angle();
        if (angle < 0.0) angle += 2.0 * kPi;
        // the limit is never below the support of the focal segment
        cs.push_back({angle, e.dir.omega(), std::max(e.slope->value, focal_support(profile.domain, e.dir))});
    }
    std::sort(cs.begin(), cs.end(), [](const Constraint& x, const Constraint& y) {
        return x.angle != y.angle ? x.angle < y.angle : x.s < y.s;
    });
    std::vector<Constraint> kept;
    for (const Constraint& c : cs) {
        if (!kept.empty() && c.angle - kept.back().angle < kParallel) continue;  // sorted: smaller offset first
        kept.push_back(c);
    }
    if (kept.size() > 1 && kept.front().angle + 2.0 * kPi - kept.back().angle < kParallel) {
        if (kept.back().s < kept.front().s) kept.front() = kept.back();
        kept.pop_back();
    }
    if (kept.size() < 3) throw InsufficientCoverage("fewer than 3 usable directions");

    double gap = kept.front().angle + 2.0 * kPi - kept.back().angle;
    for (std::size_t i = 1; i < kept.size(); ++i) gap = std::max(gap, kept[i].angle - kept[i - 1].angle);
    if (gap >= kPi - 1e-12) throw InsufficientCoverage("usable directions leave an angular gap of at least pi");

    double smax = 0.0;
    for (const Constraint& c : kept) smax = std::max(smax, std::abs(c.s));
    const double box = 2.0 * (smax + 1.0) / std::cos(0.5 * gap);
    const double tol = 1e-14 * box;

    std::vector<Vec2> poly{{-box, -box}, {box, -box}, {box, box}, {-box, box}};
    for (const Constraint& c : kept) {
        std::vector<Vec2> next;
        for (std::size_t i = 0; i < poly.size(); ++i) {
            const Vec2 p = poly[i];
            const Vec2 q = poly[(i + 1) % poly.size()];
            const double dp = c.s - dot(p, c.w);
            const double dq = c.s - dot(q, c.w);
            if (dp >= -tol) next.push_back(p);
            if ((dp >= -tol) != (dq >= -tol)) next.push_back(p + (dp / (dp - dq)) * (q - p));
        }
        if (next.empty()) throw InsufficientCoverage("half-plane intersection is empty");
        poly = std::move(next);
    }
    // drop near-duplicate vertices left by constraints through a common point
    std::vector<Vec2> verts;
    for (Vec2 v : poly)
        if (verts.empty() || norm(v - verts.back()) > 1e-12 * box) verts.push_back(v);
    while (verts.size() > 1 && norm(verts.front() - verts.back()) <= 1e-12 * box) verts.pop_back();

    HullEstimate hull;
    hull.vertices = std::move(verts);
    for (const ProfileEntry& e : profile.entries)
        hull.slack.push_back(e.excluded() || !e.slope ? std::numeric_limits<double>::quiet_NaN()
                                                      : e.slope->value - hull.support(e.dir));
    return hull;
}

std::vector<Vec2> convex_hull(std::vector<Vec2> pts) {
    std::sort(pts.begin(), pts.end(), [](Vec2 p, Vec2 q) { return p.x != q.x ? p.x < q.x : p.y < q.y; });
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    if (pts.size() < 3) return pts;
    std::vector<Vec2> h(2 * pts.size());
    std::size_t k = 0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        while (k >= 2 && cross(h[k - 1] - h[k - 2], pts[i] - h[k - 2]) <= 0.0) --k;
        h[k++] = pts[i];
    }
    for (std::size_t i = pts.size() - 1, lower = k + 1; i-- > 0;) {
        while (k >= lower && cross(h[k - 1] - h[k - 2], pts[i] - h[k - 2]) <= 0.0) --k;
        h[k++] = pts[i];
    }
    h.resize(k - 1);
    return h;
}

std::vector<Vec2> truth_hull(const EllipseDomain& domain, const std::optional<PolygonRegion>& region) {
    std::vector<Vec2> pts;
    if (region) pts.assign(region->vertices().begin(), region->vertices().end());
    const double c = domain.focal_distance();
    pts.push_back({-c, 0.0});
    pts.push_back({c, 0.0});
    return convex_hull(std::move(pts));
}

double hausdorff(const std::vector<Vec2>& a, const std::vector<Vec2>& b, std::size_t samples) {
    if (a.empty() || b.empty()) throw ContractViolation("hausdorff: empty polygon");
    double d = 0.0;
    for (Vec2 p : boundary_samples(a, samples)) d = std::max(d, distance_to_polygon(p, b));
    for (Vec2 p : boundary_samples(b, samples)) d = std::max(d, distance_to_polygon(p, a));
    return d;
}

double hull_error(const HullEstimate& estimate, const EllipseDomain& domain,
                  const std::optional<PolygonRegion>& region) {
    return hausdorff(estimate.vertices, truth_hull(domain, region));
}

void write_profile(std::ostream& os, const SupportProfile& profile) {
    os << "omega_angle slope stderr regime excluded_reason\n";
    for (const ProfileEntry& e : profile.entries) {
        os << format_real(e.dir.angle()) << ' ';
        if (e.slope)
            os << format_real(e.slope->value) << ' ' << format_real(e.slope->standard_error);
        else
            os << "nan nan";
        os << ' ' << regime_name(e.regime) << ' ' << (e.excluded() ? e.excluded_reason : "-") << '\n';
    }
}

void write_hull(std::ostream& os, const HullEstimate& hull) {
    os << "x y\n";
    for (Vec2 v : hull.vertices) os << format_real(v.x) << ' ' << format_real(v.y) << '\n';
}

}  // namespace enclosure
