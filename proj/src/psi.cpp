#include "pumbem/psi.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "pumbem/quadrature.hpp"

namespace pumbem {

Interval psi_support(const BasisFunction& test, const BasisFunction& trial) noexcept {
    return {test.min() - trial.max(), test.max() - trial.min()};
}

double psi_exact(const BasisFunction& test, const BasisFunction& trial, double r, int n_gauss) {
    const Interval s = psi_support(test, trial);
    if (r < s.lo || r > s.hi) return 0.0;
    const auto pts = merged_breakpoints(test, trial, r);
    double v = 0.0;
    for (std::size_t j = 0; j + 1 < pts.size(); ++j)
        v += integrate(n_gauss, pts[j], pts[j + 1], [&](double t) {
            return TemporalBasis::eval_function_dot(trial, t - r) * TemporalBasis::eval_function(test, t);
        });
    const double jump = TemporalBasis::start_jump(trial);
    if (jump != 0.0) v += jump * TemporalBasis::eval_function(test, trial.min() + r);
    return v;
}

double psi_exact(const TemporalBasis& basis, std::size_t test, std::size_t trial, double r, int n_gauss) {
    return psi_exact(basis[test], basis[trial], r, n_gauss);
}

// ---------------------------------------------------------------------------

std::vector<double> chebyshev_nodes(int q) {
    std::vector<double> x(q);
    for (int k = 0; k < q; ++k) x[k] = std::cos(std::numbers::pi * (k + 0.5) / q);
    return x;
}

std::vector<double> chebyshev_coefficients(std::span<const double> samples) {
    const int q = static_cast<int>(samples.size());
    std::vector<double> c(q, 0.0);
    for (int v = 0; v < q; ++v) {
        double s = 0.0;
        for (int k = 0; k < q; ++k) s += samples[k] * std::cos(std::numbers::pi * v * (k + 0.5) / q);
        c[v] = 2.0 * s / q;
    }
    return c;
}

ChebSurrogate::ChebSurrogate(double a, double b, int m, int q, std::vector<double> coeffs)
    : a_(a), b_(b), h_((b - a) / m), m_(m), q_(q), coeffs_(std::move(coeffs)) {
    if (m < 1 || q < 1) throw std::invalid_argument("ChebSurrogate: need m >= 1 and q >= 1");
    if (!(b > a)) throw std::invalid_argument("ChebSurrogate: empty support");
    if (coeffs_.size() != static_cast<std::size_t>(m) * q) throw std::invalid_argument("ChebSurrogate: coefficient table size");
}

std::span<const double> ChebSurrogate::coefficients(int cell) const {
    if (cell < 0 || cell >= m_) throw std::out_of_range("ChebSurrogate: cell index");
    return {coeffs_.data() + static_cast<std::size_t>(cell) * q_, static_cast<std::size_t>(q_)};
}

double ChebSurrogate::operator()(double r) const {
    if (r < a_ || r > b_ || m_ == 0) return 0.0;
    const int j = std::clamp(static_cast<int>((r - a_) / h_), 0, m_ - 1);
    const double lo = a_ + j * h_;
    const double x = std::clamp(2.0 * (r - lo) / h_ - 1.0, -1.0, 1.0);
    return poly::clenshaw(coefficients(j), x);
}

ChebSurrogate fit_surrogate(const std::function<double(double)>& f, double a, double b, int m, int q) {
    if (m < 1 || q < 1) throw std::invalid_argument("fit_surrogate: need m >= 1 and q >= 1");
    if (!(b > a)) throw std::invalid_argument("fit_surrogate: empty support");
    const double h = (b - a) / m;
    const auto nodes = chebyshev_nodes(q);
    std::vector<double> coeffs;
    coeffs.reserve(static_cast<std::size_t>(m) * q);
    std::vector<double> samples(q);
    for (int j = 0; j < m; ++j) {
        const double lo = a + j * h;
        for (int k = 0; k < q; ++k) samples[k] = f(lo + 0.5 * h * (nodes[k] + 1.0));
        const auto c = chebyshev_coefficients(samples);
        coeffs.insert(coeffs.end(), c.begin(), c.end());
    }
    return ChebSurrogate(a, b, m, q, std::move(coeffs));
}

ChebSurrogate fit_surrogate(const TemporalBasis& basis, std::size_t test, std::size_t trial, int m, int q, int n_gauss) {
    const Interval s = psi_support(basis[test], basis[trial]);
    auto sur = fit_surrogate([&](double r) { return psi_exact(basis[test], basis[trial], r, n_gauss); }, s.lo, s.hi, m, q);
    sur.test = static_cast<int>(test);
    sur.trial = static_cast<int>(trial);
    return sur;
}

double sup_error(const ChebSurrogate& s, const std::function<double(double)>& f, int n_samples) {
    if (n_samples < 100) throw std::invalid_argument("sup_error: need at least 100 samples");
    const Interval sup = s.support();
    double e = 0.0;
    for (int k = 0; k < n_samples; ++k) {
        const double r = sup.lo + sup.width() * k / (n_samples - 1);
        e = std::max(e, std::abs(f(r) - s(r)));
    }
    return e;
}

double sup_error(const ChebSurrogate& s, const TemporalBasis& basis, std::size_t test, std::size_t trial, int n_samples,
                 int n_gauss) {
    return sup_error(s, [&](double r) { return psi_exact(basis[test], basis[trial], r, n_gauss); }, n_samples);
}

// ---------------------------------------------------------------------------

CellSurrogate::CellSurrogate(const std::function<double(double)>& f, double lo, double hi, double cell_width, int q)
    : q_(q), h_(cell_width) {
    if (!(cell_width > 0.0) || q < 1) throw std::invalid_argument("CellSurrogate: need h > 0 and q >= 1");
    if (!(hi > lo)) return;
    first_ = static_cast<int>(std::floor(lo / h_));
    const int last = static_cast<int>(std::ceil(hi / h_));
    count_ = std::max(1, last - first_);
    const auto nodes = chebyshev_nodes(q);
    coeffs_.reserve(static_cast<std::size_t>(count_) * q);
    std::vector<double> samples(q);
    for (int c = 0; c < count_; ++c) {
        const double a = (first_ + c) * h_;
        for (int k = 0; k < q; ++k) samples[k] = f(a + 0.5 * h_ * (nodes[k] + 1.0));
        auto coef = chebyshev_coefficients(samples);
        coef[0] *= 0.5;
        coeffs_.insert(coeffs_.end(), coef.begin(), coef.end());
    }
}

double CellSurrogate::operator()(double r) const {
    const int c = static_cast<int>(std::floor(r / h_));
    if (count_ == 0 || c < first_ || c >= first_ + count_) return 0.0;
    const double x = 2.0 * (r - c * h_) / h_ - 1.0;
    const double* coef = cell(c);
    double b1 = 0.0, b2 = 0.0;
    for (int v = q_ - 1; v >= 1; --v) {
        const double b0 = 2.0 * x * b1 - b2 + coef[v];
        b2 = b1;
        b1 = b0;
    }
    return x * b1 - b2 + coef[0];
}

}  // namespace pumbem
