#include "pumbem/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "pumbem/quadrature.hpp"

namespace pumbem {

std::vector<Interval> indicator_windows(const TimeGrid& grid) {
    const std::size_t l = grid.size();
    std::vector<Interval> w(l);
    for (std::size_t i = 0; i < l; ++i) w[i] = {grid[i == 0 ? 0 : i - 1], grid[i + 1 == l ? l - 1 : i + 1]};
    return w;
}

double indicator(const std::function<double(double)>& r, const Interval& window, int n) {
    if (window.empty()) throw std::invalid_argument("indicator: empty window");
    const auto& rule = cached_unit_rule(n);
    const double c = window.lo, d = window.hi, h = d - c;
    // r~(t, tau) = |r(t) - r(t + tau)|^2 / tau^2
    auto folded = [&](double t, double tau) {
        const double diff = r(t) - r(t + tau);
        return diff * diff / (tau * tau);
    };
    double s = 0.0;
    for (std::size_t a = 0; a < rule.order(); ++a) {
        const double t = rule.nodes[a];
        for (std::size_t b = 0; b < rule.order(); ++b) {
            const double tau = t * rule.nodes[b];
            const double value = folded(-(h * t + c) + c + d, h * tau) + folded(h * t + c, -h * tau);
            s += rule.weights[a] * rule.weights[b] * t * value;
        }
    }
    return h * h * s;
}

std::vector<double> indicators(const std::function<double(double)>& r, const TimeGrid& grid, int n) {
    const auto windows = indicator_windows(grid);
    std::vector<double> eta(windows.size());
    for (std::size_t i = 0; i < windows.size(); ++i) eta[i] = indicator(r, windows[i], n);
    return eta;
}

std::vector<std::size_t> mark(std::span<const double> eta, double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("mark: alpha must lie in (0, 1)");
    const double top = eta.empty() ? 0.0 : *std::max_element(eta.begin(), eta.end());
    std::vector<std::size_t> out;
    if (!(top > 0.0)) return out;
    for (std::size_t i = 0; i < eta.size(); ++i)
        if (eta[i] >= alpha * top) out.push_back(i);
    return out;
}

TimeGrid refine(const TimeGrid& grid, std::span<const std::vector<std::size_t>> marked) {
    const auto& t = grid.breakpoints();
    const std::size_t l = t.size();
    std::vector<bool> split(l - 1, false);
    for (const auto& list : marked)
        for (std::size_t k : list) {
            if (k >= l) throw std::out_of_range("refine: marked breakpoint out of range");
            if (k > 0) split[k - 1] = true;
            if (k + 1 < l) split[k] = true;
        }
    std::vector<double> pts = t;
    for (std::size_t j = 0; j + 1 < l; ++j)
        if (split[j]) pts.push_back(0.5 * (t[j] + t[j + 1]));
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end(), [](double a, double b) { return std::abs(a - b) < 1e-12; }), pts.end());
    return TimeGrid(std::move(pts));
}

TimeGrid refine(const TimeGrid& grid, std::span<const std::size_t> marked) {
    const std::vector<std::vector<std::size_t>> one{std::vector<std::size_t>(marked.begin(), marked.end())};
    return refine(grid, one);
}

LayerResidual::LayerResidual(const SurfaceMesh& mesh, const SpatialBasis& spatial, const Point3& x0, SpaceTimeFunction g_dot, int order)
    : potential_(mesh, spatial, x0, order), g_dot_(std::move(g_dot)) {
    if (potential_.min_distance() > 1e-8) throw std::invalid_argument("LayerResidual: observation point is not on the surface");
}

double LayerResidual::operator()(const GalerkinSolution& solution, double t) const {
    return potential_.derivative(solution, t) - g_dot_(potential_.point(), t);
}

AdaptiveState adapt_loop(AdaptiveProblem& problem, const TimeGrid& initial, const AdaptOptions& options,
                         const std::function<void(const AdaptIteration&)>& on_solve) {
    if (options.max_iter < 1) throw std::invalid_argument("adapt_loop: max_iter must be >= 1");
    if (!(options.alpha > 0.0 && options.alpha < 1.0)) throw std::invalid_argument("adapt_loop: alpha must lie in (0, 1)");
    AdaptiveState state;
    state.alpha = options.alpha;
    TimeGrid grid = initial;
    for (int it = 0; it < options.max_iter; ++it) {
        problem.solve(grid);
        AdaptIteration rec;
        rec.grid = grid;
        rec.error = problem.error();
        for (std::size_t x = 0; x < problem.observation_count(); ++x) {
            rec.eta.push_back(indicators([&](double t) { return problem.residual(x, t); }, grid, options.order));
            rec.marked.push_back(mark(rec.eta.back(), options.alpha));
        }
        if (on_solve) on_solve(rec);
        const bool reached = options.target > 0.0 && rec.error && *rec.error <= options.target;
        const bool nothing = std::all_of(rec.marked.begin(), rec.marked.end(), [](const auto& m) { return m.empty(); });
        state.iterations.push_back(std::move(rec));
        if (reached || nothing || it + 1 == options.max_iter) break;
        grid = refine(grid, state.iterations.back().marked);
    }
    return state;
}

}  // namespace pumbem
