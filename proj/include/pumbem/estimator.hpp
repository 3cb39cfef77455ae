#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "pumbem/galerkin.hpp"
#include "pumbem/psi.hpp"
#include "pumbem/timebasis.hpp"

namespace pumbem {

/// Window w of a grid with l breakpoints: [t_0, t_1] for w = 0, [t_{w-1}, t_{w+1}]
/// inside, [t_{l-2}, t_{l-1}] for w = l - 1. Window w is centred on breakpoint w.
std::vector<Interval> indicator_windows(const TimeGrid& grid);

/// int_w int_w |r(t) - r(tau)|^2 / |t - tau|^2, folded onto the unit square and
/// Duffy transformed, n x n Gauss points. Throws std::invalid_argument for an
/// empty window or n < 1.
double indicator(const std::function<double(double)>& r, const Interval& window, int n = 16);

/// One indicator per window.
std::vector<double> indicators(const std::function<double(double)>& r, const TimeGrid& grid, int n = 16);

/// Indices with eta >= alpha * max eta; empty if every eta is zero.
/// Throws std::invalid_argument unless 0 < alpha < 1.
std::vector<std::size_t> mark(std::span<const double> eta, double alpha);

/// Inserts the midpoints of the intervals next to every marked breakpoint.
/// `marked` holds one list per observation point; the union is refined.
TimeGrid refine(const TimeGrid& grid, std::span<const std::vector<std::size_t>> marked);
TimeGrid refine(const TimeGrid& grid, std::span<const std::size_t> marked);

/// r(t) = d/dt of the retarded single layer potential of the density at x0 minus g_dot(x0, t).
class LayerResidual {
public:
    /// Throws std::invalid_argument if x0 is farther than 1e-8 from the surface.
    LayerResidual(const SurfaceMesh& mesh, const SpatialBasis& spatial, const Point3& x0, SpaceTimeFunction g_dot,
                  int order = 12);

    /// The solution must use p >= 1 in time.
    double operator()(const GalerkinSolution& solution, double t) const;
    const Point3& point() const noexcept { return potential_.point(); }

private:
    RetardedPotential potential_;
    SpaceTimeFunction g_dot_;
};

/// A problem that the adaptive loop can solve on a given grid.
class AdaptiveProblem {
public:
    virtual ~AdaptiveProblem() = default;
    virtual void solve(const TimeGrid& grid) = 0;
    virtual std::size_t observation_count() const = 0;
    /// Residual at observation point `x` for the last solve.
    virtual double residual(std::size_t x, double t) const = 0;
    /// Error of the last solve, when an exact solution is known.
    virtual std::optional<double> error() const { return std::nullopt; }
};

struct AdaptOptions {
    double alpha = 0.5;
    int max_iter = 10;
    int order = 16;       ///< Gauss points per direction in the indicators
    double target = 0.0;  ///< stop once error() <= target (ignored when 0)
};

struct AdaptIteration {
    TimeGrid grid;
    std::vector<std::vector<double>> eta;     ///< [observation][window]
    std::vector<std::vector<std::size_t>> marked;
    std::optional<double> error;
};

struct AdaptiveState {
    std::vector<AdaptIteration> iterations;  ///< iteration k was solved on iterations[k].grid
    double alpha = 0.5;
    const TimeGrid& grid() const { return iterations.back().grid; }
};

/// Solve, estimate, mark and refine until max_iter solves or the target error.
/// `on_solve` runs after every solve, before the grid is refined.
AdaptiveState adapt_loop(AdaptiveProblem& problem, const TimeGrid& initial, const AdaptOptions& options = {},
                         const std::function<void(const AdaptIteration&)>& on_solve = {});

}  // namespace pumbem
