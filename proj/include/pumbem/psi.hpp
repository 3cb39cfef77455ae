#pragma once

#include <functional>
#include <span>
#include <vector>

#include "pumbem/timebasis.hpp"

namespace pumbem {

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
    double width() const noexcept { return hi - lo; }
    bool empty() const noexcept { return !(hi > lo); }
};

/// supp psi = [min_test - max_trial, max_test - min_trial].
Interval psi_support(const BasisFunction& test, const BasisFunction& trial) noexcept;

/// psi(r) = integral over t of trial'(t - r) * test(t), with the causal derivative
/// of the trial function (see TemporalBasis::start_jump). n-point Gauss per piece
/// between the breakpoints of test and of trial shifted by r.
double psi_exact(const BasisFunction& test, const BasisFunction& trial, double r, int n_gauss = 40);
double psi_exact(const TemporalBasis& basis, std::size_t test, std::size_t trial, double r, int n_gauss = 40);

/// Piecewise Chebyshev approximation of a univariate function on [a, b] with m
/// equal cells and q coefficients per cell. Zero outside [a, b].
class ChebSurrogate {
public:
    ChebSurrogate() = default;
    ChebSurrogate(double a, double b, int m, int q, std::vector<double> coeffs);

    double operator()(double r) const;

    Interval support() const noexcept { return {a_, b_}; }
    int cells() const noexcept { return m_; }
    int degree_count() const noexcept { return q_; }
    double cell_width() const noexcept { return h_; }
    std::span<const double> coefficients(int cell) const;

    int test = -1;   ///< source basis indices, -1 if fitted from a plain function
    int trial = -1;

private:
    double a_ = 0.0, b_ = 0.0, h_ = 1.0;
    int m_ = 0, q_ = 0;
    std::vector<double> coeffs_;
};

/// Chebyshev coefficients c_v = (2/q) sum_k f(x_k) cos(pi v (k - 1/2) / q) from
/// samples at the q Chebyshev nodes x_k = cos(pi (k - 1/2) / q).
std::vector<double> chebyshev_coefficients(std::span<const double> samples);
/// The q Chebyshev nodes on [-1, 1] in the order used by chebyshev_coefficients.
std::vector<double> chebyshev_nodes(int q);

/// Throws std::invalid_argument unless m >= 1, q >= 1 and a < b. Calls f exactly m*q times.
ChebSurrogate fit_surrogate(const std::function<double(double)>& f, double a, double b, int m, int q);
/// Surrogate of psi for (test, trial) on its full support.
ChebSurrogate fit_surrogate(const TemporalBasis& basis, std::size_t test, std::size_t trial, int m, int q, int n_gauss = 40);

/// max |f - s| over n_samples equispaced points of the support. Throws for n_samples < 100.
double sup_error(const ChebSurrogate& s, const std::function<double(double)>& f, int n_samples);
double sup_error(const ChebSurrogate& s, const TemporalBasis& basis, std::size_t test, std::size_t trial, int n_samples,
                 int n_gauss = 40);

/// Chebyshev surrogate on cells [c h, (c + 1) h] of a global grid, used by the
/// assembly so that all kernels share one cell layout. Stored coefficients
/// already carry the halved constant term.
class CellSurrogate {
public:
    CellSurrogate() = default;
    /// Fits on the cells that overlap [lo, hi].
    CellSurrogate(const std::function<double(double)>& f, double lo, double hi, double cell_width, int q);

    int first_cell() const noexcept { return first_; }
    int cell_count() const noexcept { return count_; }
    int degree_count() const noexcept { return q_; }
    const double* cell(int c) const noexcept { return coeffs_.data() + static_cast<std::size_t>(c - first_) * q_; }
    double operator()(double r) const;

private:
    int first_ = 0, count_ = 0, q_ = 0;
    double h_ = 1.0;
    std::vector<double> coeffs_;
};

}  // namespace pumbem
