#pragma once

#include <array>
#include <functional>
#include <vector>

#include "pumbem/geometry.hpp"

namespace pumbem {

/// Gauss-Legendre rule on [-1, 1].
struct GaussRule {
    std::vector<double> nodes;
    std::vector<double> weights;
    std::size_t order() const noexcept { return nodes.size(); }
};

/// Throws std::invalid_argument for n < 1.
GaussRule gauss_rule(int n);
/// Shared immutable rule; safe to call concurrently.
const GaussRule& cached_gauss_rule(int n);
/// Shared rule mapped to [0, 1] (weights sum to 1).
const GaussRule& cached_unit_rule(int n);

/// Integral of f over [a, b] with the n-point rule.
template <class F>
double integrate(int n, double a, double b, F&& f) {
    const auto& r = cached_unit_rule(n);
    const double h = b - a;
    double s = 0.0;
    for (std::size_t q = 0; q < r.order(); ++q) s += r.weights[q] * f(a + h * r.nodes[q]);
    return s * h;
}

/// n^4-point tensor Gauss rule on the unit cube [0, 1]^4.
double tensor4(const GaussRule& rule, const std::function<double(double, double, double, double)>& integrand);

/// Number of smooth subdomain maps used for a pair class (6 / 5 / 2 / 1).
int subdomain_count(PairKind kind) noexcept;

/// One image of the unit cube under a regularizing map: local coordinates (u, v)
/// on each reference triangle {u, v >= 0, u + v <= 1} and the Jacobian of the map
/// from the cube (without the panel area factors).
struct CubeImage {
    double xu, xv;
    double yu, yv;
    double jacobian;
};

/// Sauter-Schwab relative coordinates. Shared vertices sit at local vertex 0
/// (vertex pairs) or on the edge between local vertices 0 and 1 (edge pairs).
CubeImage regularized_map(PairKind kind, int subdomain, double xi, double eta1, double eta2, double eta3) noexcept;

/// Quadrature points of the regularized pair rule of order n in local
/// coordinates. Weights include all Jacobians and sum to 1/4.
struct PairPoint {
    double xu, xv;
    double yu, yv;
    double weight;
};
const std::vector<PairPoint>& pair_rule(PairKind kind, int n);

/// A panel pair with its regularizing parametrization.
class RegularizedIntegrand {
public:
    struct Sample {
        Point3 x, y;
        std::array<double, 3> x_bary, y_bary;  ///< w.r.t. the mesh's local vertex order
        double jacobian;                        ///< includes 4 * area(t1) * area(t2)
    };

    RegularizedIntegrand(const SurfaceMesh& mesh, const PanelPairClass& pair, std::size_t t1, std::size_t t2);

    PairKind kind() const noexcept { return kind_; }
    int subdomains() const noexcept { return subdomain_count(kind_); }
    Sample operator()(int subdomain, double xi, double eta1, double eta2, double eta3) const;
    /// Map a local (u, v) of each panel to a sample with the given cube Jacobian.
    Sample at(double xu, double xv, double yu, double yv, double jacobian) const;

private:
    PairKind kind_;
    std::array<Point3, 3> xv_, yv_;
    std::array<int, 3> xperm_, yperm_;
    double scale_;
};

RegularizedIntegrand regularize(const SurfaceMesh& mesh, const PanelPairClass& pair, std::size_t t1, std::size_t t2);

/// Integral over t1 x t2 of basis(sample) * kernel(|x - y|) / (4 pi |x - y|) with
/// the n-point regularized tensor rule.
double panel_pair_integral(const SurfaceMesh& mesh, std::size_t t1, std::size_t t2,
                           const std::function<double(double)>& kernel,
                           const std::function<double(const RegularizedIntegrand::Sample&)>& basis, int n);

/// Collapsed (Duffy) Gauss rule on the reference triangle with apex at local
/// vertex 0: points (u, v) with weights summing to 1/2.
struct TrianglePoint {
    double u, v;
    double weight;
};
const std::vector<TrianglePoint>& triangle_rule(int n);

}  // namespace pumbem
