#pragma once

#include <functional>
#include <span>
#include <string>

#include <Eigen/Dense>

#include "pumbem/estimator.hpp"
#include "pumbem/geometry.hpp"
#include "pumbem/timebasis.hpp"

namespace pumbem {

/// Temporal datum g with its derivative; both vanish for t <= 0.
struct TimeSignal {
    std::string name;
    std::function<double(double)> g;
    std::function<double(double)> g_dot;
};

namespace signals {
TimeSignal smooth_pulse();      ///< t^6 e^{-4t}
TimeSignal harmonic_pulse();    ///< t sin(3t)^2 e^{-t}
TimeSignal long_pulse();        ///< t^4 e^{-2t}
TimeSignal root_pulse();        ///< t^{1.5} e^{-t}
TimeSignal oscillating_pulse(); ///< -sin(10t) t^3 e^{-48(t-1)^2}
TimeSignal zero();
}  // namespace signals

/// Y_1^0 at the radial projection of x.
double y10(const Point3& x);

/// Travelling bump cos(s) e^{-6(s-5)^2} with s = t - x_1.
double plane_bump(const Point3& x, double t);
double plane_bump_dot(const Point3& x, double t);
/// Incident pulse 8 cos(s) e^{-1.5(s-5)^2}, s = t - x_1.
double incident_pulse(const Point3& x, double t);
double incident_pulse_dot(const Point3& x, double t);
/// -H(s) s^{1.5} / (s^2 + 5), s = t - x_1 - 2, and its classical time derivative (0 for s <= 0).
double heaviside_front(const Point3& x, double t);
double heaviside_front_dot(const Point3& x, double t);

/// Density on the sphere for g(x, t) = g(t): 2 sum_{j >= 0} g_dot(t - 2j). Equal to
/// 2 g_dot(t) on [0, 2).
double exact_phi_n0(const std::function<double(double)>& g_dot, double t);
/// Density for g(x, t) = g(t) Y_1^0 (temporal factor): 2 g_dot(t) + 2 int_0^t sinh(tau) g_dot(t - tau).
/// The convolution uses `order` Gauss points on each of 8 equal pieces; with
/// `memory` false only 2 g_dot(t) remains.
double exact_phi_n1(const std::function<double(double)>& g_dot, double t, int order = 24, bool memory = true);

/// n = 0 kernel of the decoupled problem: 1/2 on [0, 2], 0 elsewhere.
struct Kernel1D {
    double operator()(double tau) const noexcept { return tau >= 0.0 && tau <= 2.0 ? 0.5 : 0.0; }
    /// int_0^inf K(tau) e^{-s tau} by n-point Gauss on [0, 2].
    double laplace(double s, int n = 30) const;
};

/// Modified Bessel functions of order 1/2 in elementary form.
double bessel_i_half(double s);
double bessel_k_half(double s);

/// Galerkin solution of int_0^t K(tau) phi(t - tau) dtau = g(t), tested against b_k
/// after differentiating in time.
struct Solution1D {
    TemporalBasis basis;
    Eigen::VectorXd alpha;
    double value(double t) const;
};

/// A_ki = int b_k(t) (B_i(t) - B_i(t - 2)) / 2 with B_i the integrated causal derivative.
Eigen::MatrixXd assemble_1d(const TemporalBasis& basis, int n = 20);
Eigen::VectorXd rhs_1d(const TemporalBasis& basis, const std::function<double(double)>& g_dot, int n = 20);
/// Throws std::runtime_error on a singular system.
Solution1D solve_1d(const TimeGrid& grid, PolyDegree p, const std::function<double(double)>& g_dot);
/// (phi_h(t) - phi_h(t - 2)) / 2 - g_dot(t).
double residual_1d(const Solution1D& solution, const std::function<double(double)>& g_dot, double t);

struct Error1D {
    double err = 0.0;
    double err_rel = 0.0;
};
/// Energy-type error against the exact density after projecting both onto `fine`.
Error1D error_1d(const Solution1D& solution, const std::function<double(double)>& exact, const TemporalBasis& fine);

/// Union of the breakpoints with every interval halved.
TimeGrid common_refinement(std::span<const TimeGrid> grids);

/// The decoupled n = 0 problem as an adaptive problem with one observation point.
class Adaptive1D : public AdaptiveProblem {
public:
    Adaptive1D(TimeSignal signal, PolyDegree p) : signal_(std::move(signal)), p_(p) {}
    void solve(const TimeGrid& grid) override { solution_ = solve_1d(grid, p_, signal_.g_dot); }
    std::size_t observation_count() const override { return 1; }
    double residual(std::size_t, double t) const override { return residual_1d(solution_, signal_.g_dot, t); }
    std::optional<double> error() const override;
    const Solution1D& solution() const noexcept { return solution_; }

private:
    TimeSignal signal_;
    PolyDegree p_;
    Solution1D solution_;
};

}  // namespace pumbem
