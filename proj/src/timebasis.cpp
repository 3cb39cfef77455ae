#include "pumbem/timebasis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace pumbem {

namespace {

constexpr double kArtanhClamp = 1.0 - 1e-12;

// affine map of [a, b] onto [-1, 1]
inline double to_reference(double a, double b, double t) noexcept { return 2.0 * (t - a) / (b - a) - 1.0; }

}  // namespace

// ---------------------------------------------------------------------------
// TimeGrid

TimeGrid::TimeGrid(std::vector<double> breakpoints) : t_(std::move(breakpoints)) {
    if (t_.size() < 2) throw std::invalid_argument("TimeGrid: need at least two breakpoints");
    if (t_.front() != 0.0) throw std::invalid_argument("TimeGrid: first breakpoint must be 0");
    for (std::size_t i = 1; i < t_.size(); ++i) {
        if (!(t_[i] > t_[i - 1]))
            throw std::invalid_argument("TimeGrid: breakpoints not strictly increasing at index " + std::to_string(i));
    }
}

TimeGrid TimeGrid::uniform(double horizon, int steps) {
    if (steps < 1 || !(horizon > 0.0)) throw std::invalid_argument("TimeGrid::uniform: need T > 0 and steps >= 1");
    std::vector<double> t(steps + 1);
    for (int j = 0; j <= steps; ++j) t[j] = horizon * j / steps;
    t.back() = horizon;
    return TimeGrid(std::move(t));
}

double TimeGrid::min_step() const noexcept {
    double h = t_[1] - t_[0];
    for (std::size_t i = 2; i < t_.size(); ++i) h = std::min(h, t_[i] - t_[i - 1]);
    return h;
}

double TimeGrid::max_step() const noexcept {
    double h = 0.0;
    for (std::size_t i = 1; i < t_.size(); ++i) h = std::max(h, t_[i] - t_[i - 1]);
    return h;
}

std::size_t TimeGrid::interval_of(double t) const noexcept {
    const auto it = std::upper_bound(t_.begin(), t_.end(), t);
    const auto idx = static_cast<std::ptrdiff_t>(it - t_.begin()) - 1;
    return static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(idx, 0, static_cast<std::ptrdiff_t>(t_.size()) - 2));
}

bool TimeGrid::contains(const TimeGrid& coarse, double tol) const noexcept {
    for (double t : coarse.t_) {
        const auto it = std::lower_bound(t_.begin(), t_.end(), t - tol);
        if (it == t_.end() || std::abs(*it - t) > tol) return false;
    }
    return true;
}

// ---------------------------------------------------------------------------
// scalar building blocks

double f_bump(double t) noexcept {
    if (t <= -1.0) return 0.0;
    if (t >= 1.0) return 1.0;
    const double s = std::clamp(t, -kArtanhClamp, kArtanhClamp);
    return 0.5 * poly::erf(2.0 * std::atanh(s)) + 0.5;
}

double f_bump_dot(double t) noexcept {
    if (t <= -1.0 || t >= 1.0) return 0.0;
    const double s = std::clamp(t, -kArtanhClamp, kArtanhClamp);
    const double a = std::atanh(s);
    return 2.0 * std::numbers::inv_sqrtpi * std::exp(-4.0 * a * a) / (1.0 - s * s);
}

double rho(double a, double b, double c, double t) {
    if (!(a < b && b < c)) throw std::invalid_argument("rho: need a < b < c");
    if (t < a || t > c) return 0.0;
    if (t <= b) return f_bump(to_reference(a, b, t));
    return 1.0 - f_bump(to_reference(b, c, t));
}

double rho_dot(double a, double b, double c, double t) {
    if (!(a < b && b < c)) throw std::invalid_argument("rho_dot: need a < b < c");
    if (t < a || t > c) return 0.0;
    if (t <= b) return f_bump_dot(to_reference(a, b, t)) * 2.0 / (b - a);
    return -f_bump_dot(to_reference(b, c, t)) * 2.0 / (c - b);
}

double pu_value(const TimeGrid& grid, int i, double t) {
    const int l = static_cast<int>(grid.size());
    if (i < 1 || i > l) throw std::out_of_range("pu_value: index out of range");
    if (i == 1) return 1.0 - f_bump(to_reference(grid[0], grid[1], t));
    if (i == l) return f_bump(to_reference(grid[l - 2], grid[l - 1], t));
    return rho(grid[i - 2], grid[i - 1], grid[i], t);
}

std::vector<std::function<double(double)>> pu_functions(const TimeGrid& grid) {
    std::vector<std::function<double(double)>> mu;
    mu.reserve(grid.size());
    for (int i = 1; i <= static_cast<int>(grid.size()); ++i)
        mu.emplace_back([grid, i](double t) { return pu_value(grid, i, t); });
    return mu;
}

// ---------------------------------------------------------------------------
// basis functions

double TemporalBasis::eval_function(const BasisFunction& b, double t) noexcept {
    if (t < b.min() || t > b.max()) return 0.0;
    const auto& k = b.knots;
    switch (b.kind) {
    case BasisKind::LeftEnd: {
        const double mu = 1.0 - f_bump(to_reference(k[0], k[1], t));
        if (b.plain) return mu;
        const double s = (t - k[0]) / (k[1] - k[0]);
        return mu * 8.0 * s * s * poly::legendre(b.degree - 2, 2.0 * s - 1.0);
    }
    case BasisKind::Interior: {
        const double mu = t <= k[1] ? f_bump(to_reference(k[0], k[1], t)) : 1.0 - f_bump(to_reference(k[1], k[2], t));
        return mu * poly::legendre(b.degree, to_reference(k[0], k[2], t));
    }
    case BasisKind::RightEnd: {
        const double mu = f_bump(to_reference(k[0], k[1], t));
        return mu * poly::legendre(b.degree, to_reference(k[0], k[1], t));
    }
    }
    return 0.0;
}

double TemporalBasis::eval_function_dot(const BasisFunction& b, double t) noexcept {
    if (t < b.min() || t > b.max()) return 0.0;
    const auto& k = b.knots;
    switch (b.kind) {
    case BasisKind::LeftEnd: {
        const double h = k[1] - k[0];
        const double x = to_reference(k[0], k[1], t);
        const double mu = 1.0 - f_bump(x);
        const double mu_dot = -f_bump_dot(x) * 2.0 / h;
        if (b.plain) return mu_dot;
        const double s = (t - k[0]) / h;
        const auto leg = poly::legendre_with_derivative(b.degree - 2, 2.0 * s - 1.0);
        const double w = 8.0 * s * s;
        const double w_dot = 16.0 * s / h;
        return mu_dot * w * leg.value + mu * w_dot * leg.value + mu * w * leg.derivative * 2.0 / h;
    }
    case BasisKind::Interior: {
        double mu, mu_dot;
        if (t <= k[1]) {
            const double x = to_reference(k[0], k[1], t);
            mu = f_bump(x);
            mu_dot = f_bump_dot(x) * 2.0 / (k[1] - k[0]);
        } else {
            const double x = to_reference(k[1], k[2], t);
            mu = 1.0 - f_bump(x);
            mu_dot = -f_bump_dot(x) * 2.0 / (k[2] - k[1]);
        }
        const auto leg = poly::legendre_with_derivative(b.degree, to_reference(k[0], k[2], t));
        return mu_dot * leg.value + mu * leg.derivative * 2.0 / (k[2] - k[0]);
    }
    case BasisKind::RightEnd: {
        const double h = k[1] - k[0];
        const double x = to_reference(k[0], k[1], t);
        const auto leg = poly::legendre_with_derivative(b.degree, x);
        return f_bump_dot(x) * 2.0 / h * leg.value + f_bump(x) * leg.derivative * 2.0 / h;
    }
    }
    return 0.0;
}

double TemporalBasis::start_jump(const BasisFunction& b) noexcept { return b.plain ? eval_function(b, b.min()) : 0.0; }

double TemporalBasis::integrated_dot(const BasisFunction& b, double t) noexcept {
    if (t < b.min()) return 0.0;
    return eval_function(b, std::min(t, b.max()));
}

std::size_t basis_count(std::size_t l, int p) noexcept {
    if (l < 2) return 0;
    if (p == 0) return l;
    return static_cast<std::size_t>(std::max(1, p - 1)) + (l - 2) * static_cast<std::size_t>(p + 1) +
           static_cast<std::size_t>(p + 1);
}

TemporalBasis::TemporalBasis(TimeGrid grid, PolyDegree p) : grid_(std::move(grid)), p_(p.value()) {
    const auto& t = grid_.breakpoints();
    const int l = static_cast<int>(t.size());
    if (l < 2) throw std::invalid_argument("TemporalBasis: grid needs at least two breakpoints");

    auto push = [this](BasisFunction b) {
        b.id = static_cast<int>(functions_.size());
        functions_.push_back(b);
    };

    // left end: mu_1 itself for p = 0, else the quadratically damped family
    if (p_ == 0) {
        BasisFunction b;
        b.kind = BasisKind::LeftEnd;
        b.pu_index = 1;
        b.plain = true;
        b.first_breakpoint = 0;
        b.last_breakpoint = 1;
        b.knots = {t[0], t[1], 0.0};
        b.knot_count = 2;
        push(b);
    } else {
        for (int m = 2; m <= std::max(2, p_); ++m) {
            BasisFunction b;
            b.kind = BasisKind::LeftEnd;
            b.pu_index = 1;
            b.degree = m;
            b.first_breakpoint = 0;
            b.last_breakpoint = 1;
            b.knots = {t[0], t[1], 0.0};
            b.knot_count = 2;
            push(b);
        }
    }
    for (int i = 2; i <= l - 1; ++i) {
        for (int m = 0; m <= p_; ++m) {
            BasisFunction b;
            b.kind = BasisKind::Interior;
            b.pu_index = i;
            b.degree = m;
            b.first_breakpoint = i - 2;
            b.last_breakpoint = i;
            b.knots = {t[i - 2], t[i - 1], t[i]};
            b.knot_count = 3;
            push(b);
        }
    }
    for (int m = 0; m <= p_; ++m) {
        BasisFunction b;
        b.kind = BasisKind::RightEnd;
        b.pu_index = l;
        b.degree = m;
        b.first_breakpoint = l - 2;
        b.last_breakpoint = l - 1;
        b.knots = {t[l - 2], t[l - 1], 0.0};
        b.knot_count = 2;
        push(b);
    }

    active_.assign(static_cast<std::size_t>(l - 1), {});
    for (const auto& b : functions_)
        for (int j = b.first_breakpoint; j < b.last_breakpoint; ++j) active_[static_cast<std::size_t>(j)].push_back(b.id);
}

std::size_t TemporalBasis::index_of(int pu_index, int degree) const {
    for (const auto& b : functions_)
        if (b.pu_index == pu_index && b.degree == degree) return static_cast<std::size_t>(b.id);
    throw std::out_of_range("TemporalBasis: no function for mu_" + std::to_string(pu_index) + " with degree " +
                            std::to_string(degree));
}

std::span<const int> TemporalBasis::active_at(double t) const noexcept {
    if (t < grid_[0] || t > grid_.horizon()) return {};
    const auto& a = active_[grid_.interval_of(t)];
    return {a.data(), a.size()};
}

TemporalBasis build_basis(const TimeGrid& grid, PolyDegree p) { return TemporalBasis(grid, p); }

std::vector<double> merged_breakpoints(const BasisFunction& a, const BasisFunction& b, double shift_b) {
    const double lo = std::max(a.min(), b.min() + shift_b);
    const double hi = std::min(a.max(), b.max() + shift_b);
    if (!(hi > lo)) return {};
    std::vector<double> pts{lo, hi};
    for (double x : a.breakpoints())
        if (x > lo && x < hi) pts.push_back(x);
    for (double x : b.breakpoints())
        if (x + shift_b > lo && x + shift_b < hi) pts.push_back(x + shift_b);
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    return pts;
}

}  // namespace pumbem
