#include "enclosure/forward.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>
#include <string>

#include "enclosure/errors.hpp"
#include "enclosure/format.hpp"
#include "forward_detail.hpp"

namespace enclosure {

using detail::Operator;

namespace {

constexpr double kPi = std::numbers::pi;

std::vector<double> trace_coefficients(const HarmonicTrace& trace) {
    const int n = trace.band_limit();
    std::vector<double> c(2 * static_cast<std::size_t>(n) + 1, 0.0);
    c[0] = 0.5 * trace.alpha(0);
    for (int m = 1; m <= n; ++m) {
        c[2 * static_cast<std::size_t>(m) - 1] = trace.alpha(m);
        c[2 * static_cast<std::size_t>(m)] = trace.beta(m);
    }
    return c;
}

double max_abs(std::span<const double> v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

double max_abs_difference(std::span<const double> a, std::span<const double> b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

double arc_mean(const EllipseDomain& domain, std::span<const double> theta, std::span<const double> u) {
    double num = 0.0;
    double den = 0.0;
    for (std::size_t j = 0; j < theta.size(); ++j) {
        const double s = domain.speed(theta[j]);
        num += u[j] * s;
        den += s;
    }
    return num / den;
}

void require_inside(const EllipseDomain& domain, const PolygonRegion& region) {
    for (const Vec2& v : region.vertices())
        if (!domain.contains_strictly(v))
            throw ContainmentError("region vertex (" + format_real(v.x) + ", " + format_real(v.y) +
                                   ") is not strictly inside the ellipse");
}

// Shared refinement driver for the Dirichlet problems: doubles the panel count
// until the boundary flux moves by less than the tolerance.
BoundaryMeasurement solve_dirichlet(const EllipseDomain& domain, const std::optional<PolygonRegion>& region,
                                    const HarmonicTrace& trace, double gamma, double lambda,
                                    const SolverOptions& options, SolveReport* report, RegionTrace* region_trace) {
    if (!(gamma > 0.0)) throw ContractViolation("conductivity must be positive");
    if (options.grid_points < 8) throw ContractViolation("output grid needs at least 8 points");
    BoundaryMeasurement meas;
    meas.domain = domain;
    meas.theta = uniform_theta(options.grid_points);
    meas.gamma = gamma;
    const std::vector<double> coeffs = trace_coefficients(trace);
    meas.dirichlet.resize(meas.size());
    std::vector<double> base(meas.size());
    for (std::size_t j = 0; j < meas.size(); ++j) {
        meas.dirichlet[j] = evaluate(trace, meas.theta[j]);
        base[j] = detail::series_normal_derivative(domain, coeffs, meas.theta[j]);
    }

    SolveReport local;
    if (!region) {
        meas.flux.resize(meas.size());
        for (std::size_t j = 0; j < meas.size(); ++j) meas.flux[j] = gamma * base[j];
        if (report) *report = local;
        if (region_trace) *region_trace = {};
        return meas;
    }
    require_inside(domain, *region);

    std::vector<double> previous;
    for (int panels = options.min_panels; panels <= options.max_panels; panels *= 2) {
        const Operator op(domain, *region, lambda, false, panels, options);
        const auto& bd = op.boundary();
        const auto n = static_cast<Eigen::Index>(bd.size());
        Eigen::VectorXd rhs(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            const auto k = static_cast<std::size_t>(i);
            rhs(i) = dot(detail::extension(domain, coeffs, bd.points[k]).gradient, bd.normals[k]);
        }
        const Eigen::VectorXd sigma = op.solve(rhs);
        const Eigen::VectorXd h = op.correction(sigma);
        const std::span<const double> sig(sigma.data(), bd.size());
        const std::span<const double> hc(h.data(), static_cast<std::size_t>(h.size()));

        std::vector<double> flux(meas.size());
        for (std::size_t j = 0; j < meas.size(); ++j) {
            const double t = meas.theta[j];
            flux[j] = gamma * (base[j] + op.single_layer_normal(domain.point(t), domain.normal(t), sig) +
                               detail::series_normal_derivative(domain, hc, t));
        }

        const bool converged = !previous.empty() && max_abs_difference(flux, previous) <=
                                                        options.tolerance * std::max(max_abs(flux), 1e-300);
        local.panels = panels;
        local.unknowns = bd.size();
        local.outer_grid = op.outer().size();
        local.self_convergence =
            previous.empty() ? 0.0 : max_abs_difference(flux, previous) / std::max(max_abs(flux), 1e-300);
        if (converged || panels * 2 > options.max_panels) {
            if (!converged)
                throw SolverFailure("boundary flux not self-converged at " + std::to_string(panels) +
                                    " panels per half edge (achieved " + format_real(local.self_convergence) + ")");
            meas.flux = std::move(flux);
            if (region_trace) {
                RegionTrace& rt = *region_trace;
                rt.points = bd.points;
                rt.normals = bd.normals;
                rt.weights = bd.weights;
                rt.potential = op.single_layer_on_boundary(sig);
                rt.normal_derivative.resize(bd.size());
                for (std::size_t k = 0; k < bd.size(); ++k) {
                    rt.potential[k] += detail::extension(domain, coeffs, bd.points[k]).value +
                                       detail::extension(domain, hc, bd.points[k]).value;
                    // d(u0 + h)/dn + K' sigma = lambda sigma by the equation itself.
                    rt.normal_derivative[k] = (lambda - 0.5) * sigma(static_cast<Eigen::Index>(k));
                }
            }
            if (report) *report = local;
            return meas;
        }
        previous = std::move(flux);
    }
    throw SolverFailure("panel refinement range is empty");
}

}  // namespace

void MaterialSpec::validate() const {
    if (!(gamma > 0.0) || !std::isfinite(gamma)) throw ContractViolation("gamma must be positive");
    if (gamma_inner) {
        if (!(*gamma_inner > 0.0) || !std::isfinite(*gamma_inner))
            throw ContractViolation("inclusion conductivity must be positive");
        if (*gamma_inner == gamma) throw ContractViolation("inclusion conductivity must differ from gamma");
    }
}

double MaterialSpec::jump_coefficient() const {
    if (!gamma_inner) return 0.5;
    return 0.5 * (gamma + *gamma_inner) / (gamma - *gamma_inner);
}

bool MaterialSpec::ill_conditioned() const {
    if (!gamma_inner) return false;
    const double r = *gamma_inner / gamma;
    return r < 1e-3 || r > 1e3;
}

double BoundaryMeasurement::net_current() const {
    double s = 0.0;
    for (std::size_t j = 0; j < size(); ++j) s += flux[j] * domain.speed(theta[j]);
    return s * 2.0 * kPi / static_cast<double>(size());
}

std::vector<double> uniform_theta(std::size_t n) {
    std::vector<double> t(n);
    for (std::size_t j = 0; j < n; ++j) t[j] = 2.0 * kPi * static_cast<double>(j) / static_cast<double>(n);
    return t;
}

BoundaryMeasurement solve_cavity(const EllipseDomain& domain, const std::optional<PolygonRegion>& cavity,
                                 const HarmonicTrace& trace, double gamma, const SolverOptions& options,
                                 SolveReport* report, RegionTrace* region_trace) {
    return solve_dirichlet(domain, cavity, trace, gamma, 0.5, options, report, region_trace);
}

BoundaryMeasurement solve_inclusion(const EllipseDomain& domain, const PolygonRegion& inclusion,
                                    const HarmonicTrace& trace, const MaterialSpec& materials,
                                    const SolverOptions& options, SolveReport* report, RegionTrace* region_trace) {
    materials.validate();
    if (!materials.gamma_inner) throw ContractViolation("solve_inclusion needs an inclusion conductivity");
    BoundaryMeasurement meas = solve_dirichlet(domain, inclusion, trace, materials.gamma,
                                               materials.jump_coefficient(), options, report, region_trace);
    if (report) report->ill_conditioned = materials.ill_conditioned();
    return meas;
}

struct NeumannSolver::Level {
    Level(const EllipseDomain& domain, const PolygonRegion& region, double lambda, int panels,
          const SolverOptions& options)
        : op(domain, region, lambda, true, panels, options) {}
    Operator op;
};

NeumannSolver::NeumannSolver(const EllipseDomain& domain, std::optional<PolygonRegion> inclusion,
                             MaterialSpec materials, SolverOptions options)
    : domain_(domain),
      inclusion_(std::move(inclusion)),
      materials_(materials),
      options_(options),
      theta_(uniform_theta(options.grid_points)) {
    materials_.validate();
    if (inclusion_) require_inside(domain_, *inclusion_);
}

NeumannSolver::~NeumannSolver() = default;
NeumannSolver::NeumannSolver(NeumannSolver&&) noexcept = default;
NeumannSolver& NeumannSolver::operator=(NeumannSolver&&) noexcept = default;

NeumannSolver::Level& NeumannSolver::level(int panels) {
    std::size_t index = 0;
    for (int p = options_.min_panels; p < panels; p *= 2) ++index;
    while (levels_.size() <= index) levels_.push_back(nullptr);
    if (!levels_[index])
        levels_[index] = std::make_unique<Level>(domain_, *inclusion_, materials_.jump_coefficient(), panels, options_);
    return *levels_[index];
}

std::vector<double> NeumannSolver::solve(std::span<const double> g, SolveReport* report) {
    std::vector<std::complex<double>> gc(g.begin(), g.end());
    const std::vector<std::complex<double>> u = solve_columns(gc, report);
    std::vector<double> out(u.size());
    for (std::size_t j = 0; j < u.size(); ++j) out[j] = u[j].real();
    return out;
}

std::vector<std::complex<double>> NeumannSolver::solve(std::span<const std::complex<double>> g,
                                                       SolveReport* report) {
    return solve_columns(g, report);
}

std::vector<std::complex<double>> NeumannSolver::solve_columns(std::span<const std::complex<double>> g,
                                                               SolveReport* report) {
    const std::size_t n = theta_.size();
    if (g.size() != n) throw ContractViolation("flux samples must match the solver grid");

    // Per column: g ds in theta-measure, compatibility, and u0 = N(g)/gamma.
    std::vector<double> coeffs[2];
    bool active[2] = {false, false};
    for (int c = 0; c < 2; ++c) {
        std::vector<double> weighted(n);
        double net = 0.0;
        double total = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            const double v = c == 0 ? g[j].real() : g[j].imag();
            weighted[j] = v * domain_.speed(theta_[j]);
            net += weighted[j];
            total += std::abs(weighted[j]);
            if (v != 0.0) active[c] = true;
        }
        if (std::abs(net) > 1e-10 * total)
            throw CompatibilityError("net boundary current " + format_real(net * 2.0 * kPi / n) +
                                     " does not vanish");
        coeffs[c] = detail::project(weighted);
        coeffs[c][0] = 0.0;
        for (std::size_t k = 1; k < coeffs[c].size(); ++k)
            coeffs[c][k] /= detail::dtn_factor(domain_, k) * materials_.gamma;
    }

    std::vector<std::complex<double>> u0(n);
    for (std::size_t j = 0; j < n; ++j)
        u0[j] = {active[0] ? detail::series_value(coeffs[0], theta_[j]) : 0.0,
                 active[1] ? detail::series_value(coeffs[1], theta_[j]) : 0.0};

    auto normalize = [&](std::vector<std::complex<double>>& u) {
        std::vector<double> re(n);
        std::vector<double> im(n);
        for (std::size_t j = 0; j < n; ++j) re[j] = u[j].real(), im[j] = u[j].imag();
        const std::complex<double> mean{arc_mean(domain_, theta_, re), arc_mean(domain_, theta_, im)};
        for (auto& v : u) v -= mean;
    };

    SolveReport local;
    if (!inclusion_ || (!active[0] && !active[1])) {
        normalize(u0);
        if (report) *report = local;
        return u0;
    }

    std::vector<std::complex<double>> previous;
    for (int panels = options_.min_panels; panels <= options_.max_panels; panels *= 2) {
        const Operator& op = level(panels).op;
        const auto& bd = op.boundary();
        const auto nb = static_cast<Eigen::Index>(bd.size());
        Eigen::MatrixXd rhs(nb, 2);
        for (Eigen::Index i = 0; i < nb; ++i) {
            const auto k = static_cast<std::size_t>(i);
            for (int c = 0; c < 2; ++c)
                rhs(i, c) = active[c] ? dot(detail::extension(domain_, coeffs[c], bd.points[k]).gradient, bd.normals[k])
                                      : 0.0;
        }
        const Eigen::MatrixXd sigma = op.solve(rhs);
        const Eigen::MatrixXd h = op.correction(sigma);

        std::vector<std::complex<double>> u(n);
        for (std::size_t j = 0; j < n; ++j) {
            const Vec2 x = domain_.point(theta_[j]);
            double part[2];
            for (int c = 0; c < 2; ++c) {
                const std::span<const double> sig(sigma.col(c).data(), bd.size());
                const std::span<const double> hc(h.col(c).data(), static_cast<std::size_t>(h.rows()));
                part[c] = op.single_layer(x, sig) + detail::series_value(hc, theta_[j]);
            }
            u[j] = u0[j] + std::complex<double>{part[0], part[1]};
        }
        normalize(u);

        double diff = 0.0;
        double scale = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            scale = std::max(scale, std::abs(u[j]));
            if (!previous.empty()) diff = std::max(diff, std::abs(u[j] - previous[j]));
        }
        local.panels = panels;
        local.unknowns = bd.size();
        local.outer_grid = op.outer().size();
        local.self_convergence = previous.empty() ? 0.0 : diff / std::max(scale, 1e-300);
        local.ill_conditioned = materials_.ill_conditioned();
        const bool converged = !previous.empty() && diff <= options_.tolerance * std::max(scale, 1e-300);
        if (converged || panels * 2 > options_.max_panels) {
            if (!converged)
                throw SolverFailure("boundary voltage not self-converged at " + std::to_string(panels) +
                                    " panels per half edge (achieved " + format_real(local.self_convergence) + ")");
            if (report) *report = local;
            return u;
        }
        previous = std::move(u);
    }
    throw SolverFailure("panel refinement range is empty");
}

std::vector<double> solve_neumann(const EllipseDomain& domain, const std::optional<PolygonRegion>& inclusion,
                                  const MaterialSpec& materials, std::span<const double> g,
                                  const SolverOptions& options) {
    SolverOptions opts = options;
    opts.grid_points = g.size();
    NeumannSolver solver(domain, inclusion, materials, opts);
    return solver.solve(g);
}

AnalyticDisc::AnalyticDisc(double radius, int harmonic) : radius_(radius), m_(harmonic) {
    if (!(radius > 0.0 && radius < 1.0)) throw ContractViolation("disc radius must lie in (0, 1)");
    if (harmonic < 1) throw ContractViolation("harmonic must be at least 1");
}

double AnalyticDisc::flux_factor() const {
    const double r2m = std::pow(radius_, 2 * m_);
    return (1.0 - r2m) / (1.0 + r2m);
}

double AnalyticDisc::matched_gamma(double c) const {
    const double r2m = std::pow(radius_, 2 * m_);
    return c * (1.0 + r2m) / (1.0 - r2m);
}

double AnalyticDisc::potential(Vec2 x) const {
    const double r = norm(x);
    const double t = std::atan2(x.y, x.x);
    const double r2m = std::pow(radius_, 2 * m_);
    return (std::pow(r, m_) + r2m * std::pow(r, -m_)) / (1.0 + r2m) * std::cos(m_ * t);
}

BoundaryMeasurement AnalyticDisc::measurement(std::size_t n, double gamma) const {
    BoundaryMeasurement meas;
    meas.domain = EllipseDomain(1.0, 1.0);
    meas.theta = uniform_theta(n);
    meas.gamma = gamma;
    const double factor = gamma * m_ * flux_factor();
    for (double t : meas.theta) {
        meas.dirichlet.push_back(std::cos(m_ * t));
        meas.flux.push_back(factor * std::cos(m_ * t));
    }
    return meas;
}

AnalyticDisc analytic_disc(double radius, int harmonic) { return {radius, harmonic}; }

void write_measurement(std::ostream& os, const BoundaryMeasurement& meas) {
    os << "a " << format_real(meas.domain.a()) << '\n'
       << "b " << format_real(meas.domain.b()) << '\n'
       << "gamma " << format_real(meas.gamma) << '\n'
       << "gamma_known " << (meas.gamma_known ? 1 : 0) << '\n'
       << "points " << meas.size() << '\n'
       << "theta f flux\n";
    for (std::size_t j = 0; j < meas.size(); ++j)
        os << format_real(meas.theta[j]) << ' ' << format_real(meas.dirichlet[j]) << ' '
           << format_real(meas.flux[j]) << '\n';
}

BoundaryMeasurement read_measurement(std::istream& is) {
    std::string line;
    int line_no = 0;
    auto next = [&]() -> std::istringstream {
        if (!std::getline(is, line)) throw ParseError("measurement: unexpected end of input after line " +
                                                      std::to_string(line_no));
        ++line_no;
        return std::istringstream(line);
    };
    auto header = [&](const char* key) {
        std::istringstream ss = next();
        std::string k;
        double v = 0.0;
        if (!(ss >> k >> v) || k != key)
            throw ParseError("measurement line " + std::to_string(line_no) + ": expected '" + key + " <value>'");
        return v;
    };
    const double a = header("a");
    const double b = header("b");
    BoundaryMeasurement meas;
    meas.domain = EllipseDomain(a, b);
    meas.gamma = header("gamma");
    meas.gamma_known = header("gamma_known") != 0.0;
    const double count = header("points");
    if (count < 1 || count != std::floor(count))
        throw ParseError("measurement line " + std::to_string(line_no) + ": bad point count");
    {
        std::istringstream ss = next();
        std::string c1, c2, c3;
        if (!(ss >> c1 >> c2 >> c3) || c1 != "theta" || c2 != "f" || c3 != "flux")
            throw ParseError("measurement line " + std::to_string(line_no) + ": expected 'theta f flux'");
    }
    const auto n = static_cast<std::size_t>(count);
    for (std::size_t j = 0; j < n; ++j) {
        std::istringstream ss = next();
        double t = 0.0, f = 0.0, q = 0.0;
        if (!(ss >> t >> f >> q))
            throw ParseError("measurement line " + std::to_string(line_no) + ": expected three numbers");
        meas.theta.push_back(t);
        meas.dirichlet.push_back(f);
        meas.flux.push_back(q);
    }
    const std::vector<double> expected = uniform_theta(n);
    for (std::size_t j = 0; j < n; ++j)
        if (std::abs(meas.theta[j] - expected[j]) > 1e-12)
            throw ParseError("measurement: theta grid is not uniform at row " + std::to_string(j + 1));
    return meas;
}

}  // namespace enclosure
