#include "pumbem/reference.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "pumbem/galerkin.hpp"
#include "pumbem/quadrature.hpp"

namespace pumbem {

namespace signals {

TimeSignal smooth_pulse() {
    return {"t^6 exp(-4t)", [](double t) { return t > 0.0 ? std::pow(t, 6) * std::exp(-4.0 * t) : 0.0; },
            [](double t) { return t > 0.0 ? (6.0 * std::pow(t, 5) - 4.0 * std::pow(t, 6)) * std::exp(-4.0 * t) : 0.0; }};
}

TimeSignal harmonic_pulse() {
    return {"t sin(3t)^2 exp(-t)",
            [](double t) {
                const double s = std::sin(3.0 * t);
                return t > 0.0 ? t * s * s * std::exp(-t) : 0.0;
            },
            [](double t) {
                if (!(t > 0.0)) return 0.0;
                const double s = std::sin(3.0 * t), c = std::cos(3.0 * t);
                return (s * s + 6.0 * t * s * c - t * s * s) * std::exp(-t);
            }};
}

TimeSignal long_pulse() {
    return {"t^4 exp(-2t)", [](double t) { return t > 0.0 ? std::pow(t, 4) * std::exp(-2.0 * t) : 0.0; },
            [](double t) { return t > 0.0 ? (4.0 * std::pow(t, 3) - 2.0 * std::pow(t, 4)) * std::exp(-2.0 * t) : 0.0; }};
}

TimeSignal root_pulse() {
    return {"t^1.5 exp(-t)", [](double t) { return t > 0.0 ? std::pow(t, 1.5) * std::exp(-t) : 0.0; },
            [](double t) { return t > 0.0 ? (1.5 * std::sqrt(t) - std::pow(t, 1.5)) * std::exp(-t) : 0.0; }};
}

TimeSignal oscillating_pulse() {
    return {"-sin(10t) t^3 exp(-48(t-1)^2)",
            [](double t) { return t > 0.0 ? -std::sin(10.0 * t) * t * t * t * std::exp(-48.0 * (t - 1.0) * (t - 1.0)) : 0.0; },
            [](double t) {
                if (!(t > 0.0)) return 0.0;
                const double s = std::sin(10.0 * t), c = std::cos(10.0 * t), e = std::exp(-48.0 * (t - 1.0) * (t - 1.0));
                return -(10.0 * c * t * t * t + 3.0 * t * t * s - 96.0 * (t - 1.0) * t * t * t * s) * e;
            }};
}

TimeSignal zero() {
    return {"0", [](double) { return 0.0; }, [](double) { return 0.0; }};
}

}  // namespace signals

double y10(const Point3& x) {
    const double n = x.norm();
    if (!(n > 0.0)) throw std::invalid_argument("y10: point at the origin");
    return std::sqrt(3.0 / (4.0 * std::numbers::pi)) * x.z() / n;
}

double plane_bump(const Point3& x, double t) {
    const double s = t - x.x();
    return std::cos(s) * std::exp(-6.0 * (s - 5.0) * (s - 5.0));
}

double plane_bump_dot(const Point3& x, double t) {
    const double s = t - x.x();
    return (-std::sin(s) - 12.0 * (s - 5.0) * std::cos(s)) * std::exp(-6.0 * (s - 5.0) * (s - 5.0));
}

double incident_pulse(const Point3& x, double t) {
    const double s = t - x.x();
    return 8.0 * std::cos(s) * std::exp(-1.5 * (s - 5.0) * (s - 5.0));
}

double incident_pulse_dot(const Point3& x, double t) {
    const double s = t - x.x();
    return 8.0 * (-std::sin(s) - 3.0 * (s - 5.0) * std::cos(s)) * std::exp(-1.5 * (s - 5.0) * (s - 5.0));
}

double heaviside_front(const Point3& x, double t) {
    const double s = t - x.x() - 2.0;
    return s > 0.0 ? -std::pow(s, 1.5) / (s * s + 5.0) : 0.0;
}

double heaviside_front_dot(const Point3& x, double t) {
    const double s = t - x.x() - 2.0;
    if (!(s > 0.0)) return 0.0;
    const double d = s * s + 5.0;
    return -(1.5 * std::sqrt(s) * d - 2.0 * std::pow(s, 2.5)) / (d * d);
}

double exact_phi_n0(const std::function<double(double)>& g_dot, double t) {
    double s = 0.0;
    for (double tau = t; tau > 0.0; tau -= 2.0) s += g_dot(tau);
    return 2.0 * s;
}

double exact_phi_n1(const std::function<double(double)>& g_dot, double t, int order, bool memory) {
    double v = 2.0 * g_dot(t);
    if (!memory || !(t > 0.0)) return v;
    const int pieces = 8;
    double conv = 0.0;
    for (int p = 0; p < pieces; ++p)
        conv += integrate(order, t * p / pieces, t * (p + 1) / pieces, [&](double tau) { return std::sinh(tau) * g_dot(t - tau); });
    return v + 2.0 * conv;
}

double Kernel1D::laplace(double s, int n) const {
    return integrate(n, 0.0, 2.0, [&](double tau) { return (*this)(tau) * std::exp(-s * tau); });
}

double bessel_i_half(double s) { return std::sqrt(2.0 / (std::numbers::pi * s)) * std::sinh(s); }
double bessel_k_half(double s) { return std::sqrt(std::numbers::pi / (2.0 * s)) * std::exp(-s); }

// ---------------------------------------------------------------------------

double Solution1D::value(double t) const {
    if (t < 0.0) return 0.0;
    double s = 0.0;
    for (int i : basis.active_at(t)) s += alpha[i] * basis.eval(static_cast<std::size_t>(i), t);
    return s;
}

namespace {

// grid breakpoints together with the breakpoints shifted by the kernel length
std::vector<double> split_points(const TimeGrid& grid) {
    std::vector<double> pts = grid.breakpoints();
    for (double t : grid.breakpoints())
        if (t + 2.0 < grid.horizon()) pts.push_back(t + 2.0);
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end(), [](double a, double b) { return std::abs(a - b) < 1e-13; }), pts.end());
    return pts;
}

}  // namespace

Eigen::MatrixXd assemble_1d(const TemporalBasis& basis, int n) {
    const auto L = static_cast<Eigen::Index>(basis.size());
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(L, L);
    const auto& rule = cached_unit_rule(n);
    const auto pts = split_points(basis.grid());
    for (std::size_t j = 0; j + 1 < pts.size(); ++j) {
        const double a = pts[j], h = pts[j + 1] - pts[j], mid = a + 0.5 * h;
        const auto now = basis.active_at(mid);
        const bool delayed = mid > 2.0;
        const auto before = delayed ? basis.active_at(mid - 2.0) : std::span<const int>{};
        for (std::size_t q = 0; q < rule.order(); ++q) {
            const double t = a + h * rule.nodes[q], w = 0.5 * h * rule.weights[q];
            for (int k : now) {
                const double bk = basis.eval(static_cast<std::size_t>(k), t) * w;
                if (bk == 0.0) continue;
                for (int i : now) A(k, i) += bk * TemporalBasis::integrated_dot(basis[static_cast<std::size_t>(i)], t);
                for (int i : before) A(k, i) -= bk * TemporalBasis::integrated_dot(basis[static_cast<std::size_t>(i)], t - 2.0);
            }
        }
    }
    return A;
}

Eigen::VectorXd rhs_1d(const TemporalBasis& basis, const std::function<double(double)>& g_dot, int n) {
    Eigen::VectorXd b = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(basis.size()));
    const auto& rule = cached_unit_rule(n);
    const auto& t = basis.grid().breakpoints();
    for (std::size_t j = 0; j + 1 < t.size(); ++j) {
        const double a = t[j], h = t[j + 1] - t[j];
        const auto act = basis.active_at(a + 0.5 * h);
        for (std::size_t q = 0; q < rule.order(); ++q) {
            const double tau = a + h * rule.nodes[q];
            const double gw = g_dot(tau) * h * rule.weights[q];
            for (int k : act) b[k] += gw * basis.eval(static_cast<std::size_t>(k), tau);
        }
    }
    return b;
}

Solution1D solve_1d(const TimeGrid& grid, PolyDegree p, const std::function<double(double)>& g_dot) {
    Solution1D s;
    s.basis = TemporalBasis(grid, p);
    Eigen::MatrixXd A = assemble_1d(s.basis);
    const Eigen::VectorXd b = rhs_1d(s.basis, g_dot);
    Eigen::PartialPivLU<Eigen::Ref<Eigen::MatrixXd>> lu(A);
    if (A.size() == 0 || !(A.diagonal().cwiseAbs().minCoeff() >= 1e-300)) throw std::runtime_error("solve_1d: singular system");
    s.alpha = lu.solve(b);
    return s;
}

double residual_1d(const Solution1D& solution, const std::function<double(double)>& g_dot, double t) {
    return 0.5 * (solution.value(t) - solution.value(t - 2.0)) - g_dot(t);
}

Error1D error_1d(const Solution1D& solution, const std::function<double(double)>& exact, const TemporalBasis& fine) {
    const Coefficients approx = refit_to_fine(Coefficients(solution.alpha), solution.basis, fine);
    const Eigen::VectorXd c = project_time(fine, exact);
    const Eigen::MatrixXd A = assemble_1d(fine);
    const Eigen::VectorXd d = Eigen::VectorXd(approx.col(0)) - c;
    const double qd = d.dot(A * d), qc = c.dot(A * c);
    const double tol = 1e-12 * A.norm();
    if (qd < -tol * d.squaredNorm() || qc < -tol * c.squaredNorm()) throw std::runtime_error("error_1d: negative quadratic form");
    Error1D e;
    e.err = std::sqrt(std::max(qd, 0.0));
    e.err_rel = qc > 0.0 ? e.err / std::sqrt(qc) : 0.0;
    return e;
}

TimeGrid common_refinement(std::span<const TimeGrid> grids) {
    if (grids.empty()) throw std::invalid_argument("common_refinement: no grids");
    std::vector<double> pts;
    for (const auto& g : grids) pts.insert(pts.end(), g.breakpoints().begin(), g.breakpoints().end());
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end(), [](double a, double b) { return std::abs(a - b) < 1e-12; }), pts.end());
    const std::size_t l = pts.size();
    for (std::size_t j = 0; j + 1 < l; ++j) pts.push_back(0.5 * (pts[j] + pts[j + 1]));
    std::sort(pts.begin(), pts.end());
    return TimeGrid(std::move(pts));
}

std::optional<double> Adaptive1D::error() const {
    const TemporalBasis fine(common_refinement(std::span<const TimeGrid>(&solution_.basis.grid(), 1)), p_);
    return error_1d(solution_, [this](double t) { return exact_phi_n0(signal_.g_dot, t); }, fine).err;
}

}  // namespace pumbem
