#include "forward_detail.hpp"

#include <unsupported/Eigen/IterativeSolvers>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "enclosure/errors.hpp"
#include "enclosure/format.hpp"
#include "enclosure/kernels.hpp"

namespace enclosure::detail {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kInvTwoPi = 0.5 / std::numbers::pi;
constexpr double kTailTolerance = 1e-13;
constexpr std::size_t kMinOuterGrid = 256;
constexpr std::size_t kMaxOuterGrid = 8192;

}  // namespace

class MatrixFreeOperator;

}  // namespace enclosure::detail

namespace Eigen::internal {
template <>
struct traits<enclosure::detail::MatrixFreeOperator> : public traits<Eigen::SparseMatrix<double>> {};
}  // namespace Eigen::internal

namespace enclosure::detail {

// Adapter so Eigen's GMRES can drive Operator::apply without a stored matrix.
class MatrixFreeOperator : public Eigen::EigenBase<MatrixFreeOperator> {
public:
    using Scalar = double;
    using RealScalar = double;
    using StorageIndex = int;
    enum { ColsAtCompileTime = Eigen::Dynamic, MaxColsAtCompileTime = Eigen::Dynamic, IsRowMajor = false };

    explicit MatrixFreeOperator(const Operator& op) : op_(&op) {}
    Eigen::Index rows() const { return static_cast<Eigen::Index>(op_->size()); }
    Eigen::Index cols() const { return static_cast<Eigen::Index>(op_->size()); }

    template <typename Rhs>
    Eigen::Product<MatrixFreeOperator, Rhs, Eigen::AliasFreeProduct> operator*(const Eigen::MatrixBase<Rhs>& x) const {
        return Eigen::Product<MatrixFreeOperator, Rhs, Eigen::AliasFreeProduct>(*this, x.derived());
    }
    const Operator& op() const { return *op_; }

private:
    const Operator* op_;
};

}  // namespace enclosure::detail

namespace Eigen::internal {
template <typename Rhs>
struct generic_product_impl<enclosure::detail::MatrixFreeOperator, Rhs, SparseShape, DenseShape, GemvProduct>
    : generic_product_impl_base<enclosure::detail::MatrixFreeOperator, Rhs,
                                generic_product_impl<enclosure::detail::MatrixFreeOperator, Rhs>> {
    template <typename Dest>
    static void scaleAndAddTo(Dest& dst, const enclosure::detail::MatrixFreeOperator& lhs, const Rhs& rhs,
                              const double& alpha) {
        dst.noalias() += alpha * lhs.op().apply(rhs);
    }
};
}  // namespace Eigen::internal

namespace enclosure::detail {

PanelBoundary discretize(const PolygonRegion& region, int panels, const GaussRule& rule) {
    PanelBoundary bd;
    bd.order = static_cast<int>(rule.nodes.size());
    const std::size_t nv = region.size();
    int panel_id = 0;
    auto add_panel = [&](Vec2 p0, Vec2 p1, Vec2 normal) {
        const double half = 0.5 * norm(p1 - p0);
        for (std::size_t g = 0; g < rule.nodes.size(); ++g) {
            const double u = 0.5 * (rule.nodes[g] + 1.0);
            bd.points.push_back(p0 + u * (p1 - p0));
            bd.normals.push_back(normal);
            bd.weights.push_back(half * rule.weights[g]);
            bd.panel.push_back(panel_id);
        }
        bd.panel_start.push_back(p0);
        bd.panel_end.push_back(p1);
        ++panel_id;
    };
    for (std::size_t i = 0; i < nv; ++i) {
        const Vec2 v0 = region.vertex(i);
        const Vec2 v1 = region.vertex(i + 1);
        const Vec2 mid = 0.5 * (v0 + v1);
        const Vec2 normal = region.edge_normal(i);
        auto grade = [&](int k) { return std::pow(static_cast<double>(k) / panels, 3); };
        for (int k = 0; k < panels; ++k)
            add_panel(v0 + grade(k) * (mid - v0), v0 + grade(k + 1) * (mid - v0), normal);
        for (int k = panels; k > 0; --k)
            add_panel(v1 + grade(k) * (mid - v1), v1 + grade(k - 1) * (mid - v1), normal);
    }
    return bd;
}

OuterGrid::OuterGrid(const EllipseDomain& domain, std::size_t n) : domain_(domain) {
    theta_.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
        theta_[j] = 2.0 * kPi * static_cast<double>(j) / static_cast<double>(n);
        points_.push_back(domain.point(theta_[j]));
        normals_.push_back(domain.normal(theta_[j]));
        speeds_.push_back(domain.speed(theta_[j]));
    }
}

Eigen::MatrixXd OuterGrid::projection() const {
    const int m_max = modes();
    const auto n = static_cast<Eigen::Index>(size());
    Eigen::MatrixXd f(2 * m_max + 1, n);
    const double scale = 2.0 / static_cast<double>(n);
    for (Eigen::Index j = 0; j < n; ++j) {
        f(0, j) = 1.0 / static_cast<double>(n);
        for (int m = 1; m <= m_max; ++m) {
            // m * theta_j reduced exactly on the grid
            const double t = 2.0 * kPi * static_cast<double>((static_cast<long>(m) * j) % n) / static_cast<double>(n);
            f(2 * m - 1, j) = scale * std::cos(t);
            f(2 * m, j) = scale * std::sin(t);
        }
    }
    return f;
}

std::vector<double> project(std::span<const double> values) {
    const std::size_t n = values.size();
    const int m_max = static_cast<int>(n / 2) - 1;
    std::vector<double> c(2 * static_cast<std::size_t>(std::max(m_max, 0)) + 1, 0.0);
    for (std::size_t j = 0; j < n; ++j) c[0] += values[j];
    c[0] /= static_cast<double>(n);
    for (int m = 1; m <= m_max; ++m) {
        double sc = 0.0;
        double ss = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            const double t = 2.0 * kPi * static_cast<double>((static_cast<std::size_t>(m) * j) % n) / static_cast<double>(n);
            sc += values[j] * std::cos(t);
            ss += values[j] * std::sin(t);
        }
        c[2 * m - 1] = 2.0 * sc / static_cast<double>(n);
        c[2 * m] = 2.0 * ss / static_cast<double>(n);
    }
    return c;
}

double dtn_factor(const EllipseDomain& domain, std::size_t k) {
    if (k == 0) return 0.0;
    const int m = static_cast<int>((k + 1) / 2);
    const double qm = std::pow(domain.eccentric_ratio(), m);
    const double t = (1.0 - qm) / (1.0 + qm);
    return (k % 2 == 1) ? m * t : m / t;
}

double series_value(std::span<const double> coeffs, double theta) {
    double s = coeffs.empty() ? 0.0 : coeffs[0];
    for (std::size_t k = 1; k < coeffs.size(); ++k) {
        const double m = static_cast<double>((k + 1) / 2);
        s += coeffs[k] * ((k % 2 == 1) ? std::cos(m * theta) : std::sin(m * theta));
    }
    return s;
}

double series_normal_derivative(const EllipseDomain& domain, std::span<const double> coeffs, double theta) {
    double s = 0.0;
    for (std::size_t k = 1; k < coeffs.size(); ++k) {
        if (coeffs[k] == 0.0) continue;
        const double m = static_cast<double>((k + 1) / 2);
        const double basis = (k % 2 == 1) ? std::cos(m * theta) : std::sin(m * theta);
        s += dtn_factor(domain, k) * coeffs[k] * basis;
    }
    return s / domain.speed(theta);
}

namespace {

// Walks R_m(z) = zeta^m + (q/zeta)^m and R_m'(z) for m = 0, 1, ..., calling
// visit(m, R_m, R_m', q^m).
template <typename Visit>
void walk_basis(const EllipseDomain& domain, Vec2 p, int m_max, Visit&& visit) {
    using cd = std::complex<double>;
    const double kappa = 2.0 / (domain.a() + domain.b());
    const double q = domain.eccentric_ratio();
    const cd z{p.x, p.y};
    cd r_prev{2.0, 0.0};
    cd d_prev{0.0, 0.0};
    visit(0, r_prev, d_prev, 1.0);
    if (m_max < 1) return;
    cd r = kappa * z;
    cd d{kappa, 0.0};
    double qm = q;
    visit(1, r, d, qm);
    for (int m = 1; m < m_max; ++m) {
        const cd r_next = kappa * z * r - q * r_prev;
        const cd d_next = kappa * r + kappa * z * d - q * d_prev;
        r_prev = r;
        d_prev = d;
        r = r_next;
        d = d_next;
        qm *= q;
        visit(m + 1, r, d, qm);
    }
}

}  // namespace

Extension extension(const EllipseDomain& domain, std::span<const double> coeffs, Vec2 p) {
    Extension e;
    const int m_max = static_cast<int>(coeffs.size() / 2);
    walk_basis(domain, p, m_max, [&](int m, std::complex<double> r, std::complex<double> d, double qm) {
        if (m == 0) {
            e.value += coeffs[0];
            return;
        }
        const std::size_t kc = 2 * static_cast<std::size_t>(m) - 1;
        const double cc = coeffs[kc] / (1.0 + qm);
        e.value += cc * r.real();
        e.gradient = e.gradient + cc * Vec2{d.real(), -d.imag()};
        if (kc + 1 < coeffs.size()) {
            const double cs = coeffs[kc + 1] / (1.0 - qm);
            e.value += cs * r.imag();
            e.gradient = e.gradient + cs * Vec2{d.imag(), d.real()};
        }
    });
    return e;
}

void basis_normal_row(const EllipseDomain& domain, Vec2 p, Vec2 nu, std::span<double> out) {
    const int m_max = static_cast<int>(out.size() / 2);
    const std::complex<double> n{nu.x, nu.y};
    out[0] = 0.0;
    walk_basis(domain, p, m_max, [&](int m, std::complex<double>, std::complex<double> d, double qm) {
        if (m == 0) return;
        const std::complex<double> dn = d * n;
        out[2 * m - 1] = dn.real() / (1.0 + qm);
        out[2 * m] = dn.imag() / (1.0 - qm);
    });
}

Operator::Operator(const EllipseDomain& domain, const PolygonRegion& region, double lambda, bool neumann,
                   int panels, const SolverOptions& options)
    : domain_(domain),
      boundary_(discretize(region, panels, gauss_legendre(options.gauss_order))),
      outer_(domain, kMinOuterGrid),
      lambda_(lambda),
      neumann_(neumann),
      options_(options) {
    const auto n = static_cast<Eigen::Index>(boundary_.size());
    std::vector<double> sx(boundary_.size());
    std::vector<double> sy(boundary_.size());
    for (std::size_t k = 0; k < boundary_.size(); ++k) {
        sx[k] = boundary_.points[k].x;
        sy[k] = boundary_.points[k].y;
    }

    // Outer grid fine enough that every column of the layer resolves to the tail tolerance.
    for (std::size_t grid = kMinOuterGrid;; grid *= 2) {
        outer_ = OuterGrid(domain, grid);
        const auto ng = static_cast<Eigen::Index>(grid);
        layer_.resize(ng, n);
        std::vector<double> row(boundary_.size());
        for (Eigen::Index j = 0; j < ng; ++j) {
            const Vec2 x = outer_.points()[static_cast<std::size_t>(j)];
            if (neumann_) {
                const Vec2 nu = outer_.normals()[static_cast<std::size_t>(j)];
                kernels::dipole_row(x.x, x.y, nu.x, nu.y, sx, sy, boundary_.weights, row);
                const double s = -kInvTwoPi * outer_.speeds()[static_cast<std::size_t>(j)];
                for (Eigen::Index k = 0; k < n; ++k) layer_(j, k) = s * row[static_cast<std::size_t>(k)];
            } else {
                for (Eigen::Index k = 0; k < n; ++k) {
                    const Vec2 y = boundary_.points[static_cast<std::size_t>(k)];
                    layer_(j, k) = -kInvTwoPi * std::log(norm(x - y)) * boundary_.weights[static_cast<std::size_t>(k)];
                }
            }
        }
        projection_ = outer_.projection();
        const Eigen::MatrixXd coeffs = projection_ * layer_;
        const int m_max = outer_.modes();
        double tail = 0.0;
        for (Eigen::Index k = 0; k < n; ++k) {
            const double peak = coeffs.col(k).tail(2 * m_max).cwiseAbs().maxCoeff();
            const double end = coeffs.col(k).tail(m_max / 2).cwiseAbs().maxCoeff();
            if (peak > 0.0) tail = std::max(tail, end / peak);
        }
        if (tail <= kTailTolerance) break;
        if (grid >= kMaxOuterGrid)
            throw SolverFailure("outer spectral grid unresolved at " + std::to_string(grid) +
                                " points (tail " + format_real(tail) + "); region too close to the boundary");
    }

    if (neumann_) {
        // Flux density (times speed) -> boundary values, constant mode dropped.
        projection_.row(0).setZero();
        for (Eigen::Index k = 1; k < projection_.rows(); ++k)
            projection_.row(k) /= dtn_factor(domain_, static_cast<std::size_t>(k));
    }

    const int m_max = outer_.modes();
    Eigen::MatrixXd lift_basis(n, 2 * m_max + 1);
    std::vector<double> row(static_cast<std::size_t>(2 * m_max + 1));
    for (Eigen::Index i = 0; i < n; ++i) {
        basis_normal_row(domain_, boundary_.points[static_cast<std::size_t>(i)],
                         boundary_.normals[static_cast<std::size_t>(i)], row);
        for (int k = 0; k < 2 * m_max + 1; ++k) lift_basis(i, k) = row[static_cast<std::size_t>(k)];
    }
    lift_ = lift_basis * projection_;

    if (boundary_.size() <= options_.dense_limit) {
        Eigen::MatrixXd a = lift_ * layer_;
        std::vector<double> kp(boundary_.size());
        for (Eigen::Index i = 0; i < n; ++i) {
            const Vec2 t = boundary_.points[static_cast<std::size_t>(i)];
            const Vec2 nn = boundary_.normals[static_cast<std::size_t>(i)];
            kernels::dipole_row(t.x, t.y, nn.x, nn.y, sx, sy, boundary_.weights, kp);
            for (Eigen::Index k = 0; k < n; ++k) a(i, k) += kInvTwoPi * kp[static_cast<std::size_t>(k)];
            a(i, i) += lambda_;
        }
        lu_.emplace(a);
    }
}

void Operator::apply_kprime(const double* sigma, double* out) const {
    const std::size_t n = boundary_.size();
    std::vector<double> sx(n);
    std::vector<double> sy(n);
    std::vector<double> ws(n);
    for (std::size_t k = 0; k < n; ++k) {
        sx[k] = boundary_.points[k].x;
        sy[k] = boundary_.points[k].y;
        ws[k] = boundary_.weights[k] * sigma[k];
    }
    std::vector<double> row(n);
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2 t = boundary_.points[i];
        const Vec2 nn = boundary_.normals[i];
        kernels::dipole_row(t.x, t.y, nn.x, nn.y, sx, sy, ws, row);
        double s = 0.0;
        for (double v : row) s += v;
        out[i] = -kInvTwoPi * s;
    }
}

Eigen::VectorXd Operator::apply(const Eigen::VectorXd& sigma) const {
    Eigen::VectorXd kp(sigma.size());
    apply_kprime(sigma.data(), kp.data());
    return lambda_ * sigma - kp + lift_ * (layer_ * sigma);
}

Eigen::MatrixXd Operator::solve(const Eigen::MatrixXd& rhs) const {
    if (lu_) return lu_->solve(rhs);
    MatrixFreeOperator op(*this);
    Eigen::GMRES<MatrixFreeOperator, Eigen::IdentityPreconditioner> gmres;
    gmres.setTolerance(1e-13);
    gmres.setMaxIterations(2000);
    gmres.set_restart(200);
    gmres.compute(op);
    Eigen::MatrixXd out(rhs.rows(), rhs.cols());
    for (Eigen::Index c = 0; c < rhs.cols(); ++c) {
        out.col(c) = gmres.solve(rhs.col(c));
        if (gmres.info() != Eigen::Success)
            throw SolverFailure("GMRES stalled after " + std::to_string(gmres.iterations()) +
                                " iterations, residual " + format_real(gmres.error()));
    }
    return out;
}

Eigen::MatrixXd Operator::correction(const Eigen::MatrixXd& sigma) const {
    return -(projection_ * (layer_ * sigma));
}

double Operator::single_layer(Vec2 x, std::span<const double> sigma) const {
    double s = 0.0;
    for (std::size_t k = 0; k < boundary_.size(); ++k)
        s += std::log(norm(x - boundary_.points[k])) * boundary_.weights[k] * sigma[k];
    return -kInvTwoPi * s;
}

double Operator::single_layer_normal(Vec2 x, Vec2 nu, std::span<const double> sigma) const {
    const std::size_t n = boundary_.size();
    std::vector<double> sx(n);
    std::vector<double> sy(n);
    std::vector<double> ws(n);
    for (std::size_t k = 0; k < n; ++k) {
        sx[k] = boundary_.points[k].x;
        sy[k] = boundary_.points[k].y;
        ws[k] = boundary_.weights[k] * sigma[k];
    }
    std::vector<double> row(n);
    kernels::dipole_row(x.x, x.y, nu.x, nu.y, sx, sy, ws, row);
    double s = 0.0;
    for (double v : row) s += v;
    return -kInvTwoPi * s;
}

std::vector<double> Operator::single_layer_on_boundary(std::span<const double> sigma) const {
    const GaussRule base = gauss_legendre(boundary_.order);
    const GaussRule fine = gauss_legendre(24);
    const int order = boundary_.order;
    const std::size_t panels = boundary_.panel_start.size();

    // Barycentric weights for the Gauss nodes.
    std::vector<double> bary(static_cast<std::size_t>(order), 1.0);
    for (int j = 0; j < order; ++j)
        for (int k = 0; k < order; ++k)
            if (k != j) bary[static_cast<std::size_t>(j)] /= base.nodes[static_cast<std::size_t>(j)] - base.nodes[static_cast<std::size_t>(k)];
    auto interpolate = [&](std::size_t p, double u) {
        double num = 0.0;
        double den = 0.0;
        for (int j = 0; j < order; ++j) {
            const double d = u - base.nodes[static_cast<std::size_t>(j)];
            if (d == 0.0) return sigma[p * order + static_cast<std::size_t>(j)];
            const double c = bary[static_cast<std::size_t>(j)] / d;
            num += c * sigma[p * order + static_cast<std::size_t>(j)];
            den += c;
        }
        return num / den;
    };

    std::vector<double> out(boundary_.size());
    for (std::size_t i = 0; i < boundary_.size(); ++i) {
        const Vec2 t = boundary_.points[i];
        double s = 0.0;
        for (std::size_t p = 0; p < panels; ++p) {
            const Vec2 a = boundary_.panel_start[p];
            const Vec2 b = boundary_.panel_end[p];
            const double len = norm(b - a);
            const Vec2 dir = (1.0 / len) * (b - a);
            const double along = std::clamp(dot(t - a, dir) / len, 0.0, 1.0);
            const double dist = norm(t - (a + along * (b - a)));
            if (dist > len) {
                for (int g = 0; g < order; ++g) {
                    const std::size_t k = p * order + static_cast<std::size_t>(g);
                    s += std::log(norm(t - boundary_.points[k])) * boundary_.weights[k] * sigma[k];
                }
                continue;
            }
            // Split at the nearest point and grade both sides as u ~ t^4 there.
            const double u0 = 2.0 * along - 1.0;
            for (const double end : {-1.0, 1.0}) {
                const double span = end - u0;
                if (span == 0.0) continue;
                for (std::size_t g = 0; g < fine.nodes.size(); ++g) {
                    const double r = 0.5 * (fine.nodes[g] + 1.0);
                    const double u = u0 + span * std::pow(r, 4);
                    const double du = std::abs(span) * 4.0 * std::pow(r, 3) * 0.5 * fine.weights[g];
                    const Vec2 y = a + (0.5 * (u + 1.0)) * (b - a);
                    const double d = norm(t - y);
                    if (d == 0.0) continue;
                    s += std::log(d) * interpolate(p, u) * du * 0.5 * len;
                }
            }
        }
        out[i] = -kInvTwoPi * s;
    }
    return out;
}

}  // namespace enclosure::detail
