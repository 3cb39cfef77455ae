#pragma once

#include <array>
#include <functional>
#include <span>
#include <vector>

#include "pumbem/polybasis.hpp"

namespace pumbem {

/// Ordered breakpoints 0 = t_0 < t_1 < ... < t_{l-1} = T.
class TimeGrid {
public:
    TimeGrid() = default;
    /// Throws std::invalid_argument unless t_0 = 0, strictly increasing and l >= 2.
    explicit TimeGrid(std::vector<double> breakpoints);

    static TimeGrid uniform(double horizon, int steps);

    const std::vector<double>& breakpoints() const noexcept { return t_; }
    std::size_t size() const noexcept { return t_.size(); }
    double operator[](std::size_t i) const { return t_[i]; }
    double horizon() const noexcept { return t_.back(); }
    double min_step() const noexcept;
    double max_step() const noexcept;

    /// Index j with t_j <= t < t_{j+1}, clamped to [0, l-2].
    std::size_t interval_of(double t) const noexcept;

    /// True if every breakpoint of `coarse` appears in this grid (within tol).
    bool contains(const TimeGrid& coarse, double tol = 1e-12) const noexcept;

private:
    std::vector<double> t_;
};

enum class BasisKind { LeftEnd, Interior, RightEnd };

/// One member b_i of the partition-of-unity basis.
///
/// Interior functions live on [t_{j-2}, t_j] with joint t_{j-1}; the left end
/// on [t_0, t_1]; the right end on [t_{l-2}, t_{l-1}]. `pu_index` is the
/// 1-based index of the partition-of-unity function mu it is built from.
struct BasisFunction {
    BasisKind kind = BasisKind::Interior;
    int pu_index = 1;
    int degree = 0;           ///< Legendre index m
    bool plain = false;       ///< left end with p = 0: the bare mu_1
    int id = 0;               ///< position in the basis
    int first_breakpoint = 0; ///< window = [t_first, t_last]
    int last_breakpoint = 1;
    std::array<double, 3> knots{};  ///< window breakpoints (2 or 3 used)
    int knot_count = 2;

    double min() const noexcept { return knots[0]; }
    double max() const noexcept { return knots[knot_count - 1]; }
    std::span<const double> breakpoints() const noexcept { return {knots.data(), static_cast<std::size_t>(knot_count)}; }
};

/// C-infinity step f: 0 for t <= -1, 1 for t >= 1, (erf(2 artanh t) + 1)/2 in between.
double f_bump(double t) noexcept;
double f_bump_dot(double t) noexcept;

/// Bump on [a, c] with joint b. Throws std::invalid_argument unless a < b < c.
double rho(double a, double b, double c, double t);
double rho_dot(double a, double b, double c, double t);

/// Partition-of-unity functions mu_1 .. mu_l of a grid (1-based in the returned order).
std::vector<std::function<double(double)>> pu_functions(const TimeGrid& grid);

/// mu_i(t) for 1 <= i <= l, evaluated on [0, T] semantics (mu_1 = 1 left of t_0).
double pu_value(const TimeGrid& grid, int i, double t);

/// The full temporal basis {b_i}. Immutable after construction.
class TemporalBasis {
public:
    TemporalBasis() = default;
    TemporalBasis(TimeGrid grid, PolyDegree p);

    const TimeGrid& grid() const noexcept { return grid_; }
    int p() const noexcept { return p_; }
    std::size_t size() const noexcept { return functions_.size(); }
    const BasisFunction& operator[](std::size_t i) const { return functions_[i]; }
    const std::vector<BasisFunction>& functions() const noexcept { return functions_; }
    /// Position of the function built from mu_{pu_index} with Legendre index `degree`.
    /// Throws std::out_of_range if there is none.
    std::size_t index_of(int pu_index, int degree) const;

    double eval(std::size_t i, double t) const noexcept { return eval_function(functions_[i], t); }
    double eval_dot(std::size_t i, double t) const noexcept { return eval_function_dot(functions_[i], t); }

    /// Basis functions whose closed window contains t.
    std::span<const int> active_at(double t) const noexcept;

    static double eval_function(const BasisFunction& b, double t) noexcept;
    static double eval_function_dot(const BasisFunction& b, double t) noexcept;

    /// Jump of the causal extension at the window start (1 for the bare mu_1, else 0).
    /// The time derivative of b carries this jump as a point mass at min().
    static double start_jump(const BasisFunction& b) noexcept;

    /// Integral of the causal derivative from -inf to t: b(t) inside the window,
    /// the left limit b(max) beyond it, 0 before it.
    static double integrated_dot(const BasisFunction& b, double t) noexcept;

private:
    TimeGrid grid_;
    int p_ = 0;
    std::vector<BasisFunction> functions_;
    std::vector<std::vector<int>> active_;  // per grid interval
};

/// Number of basis functions for a grid of l breakpoints and order p.
std::size_t basis_count(std::size_t l, int p) noexcept;

TemporalBasis build_basis(const TimeGrid& grid, PolyDegree p);

/// Sorted union of the window breakpoints of `a` and of `b` shifted by `shift_b`,
/// clipped to the overlap of the two windows. Empty if they do not overlap.
std::vector<double> merged_breakpoints(const BasisFunction& a, const BasisFunction& b, double shift_b = 0.0);

}  // namespace pumbem
