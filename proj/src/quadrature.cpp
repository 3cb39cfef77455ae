#include "pumbem/quadrature.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <tuple>

namespace pumbem {

GaussRule gauss_rule(int n) {
    if (n < 1) throw std::invalid_argument("gauss_rule: order must be >= 1");
    GaussRule r;
    r.nodes.resize(n);
    r.weights.resize(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 1.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 1; k < n; ++k) {
                const double p2 = ((2 * k + 1) * x * p1 - k * p0) / (k + 1);
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        {
            double p0 = 1.0, p1 = x;
            for (int k = 1; k < n; ++k) {
                const double p2 = ((2 * k + 1) * x * p1 - k * p0) / (k + 1);
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
        }
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        r.nodes[i] = -x;
        r.nodes[n - 1 - i] = x;
        r.weights[i] = w;
        r.weights[n - 1 - i] = w;
    }
    if (n % 2 == 1) r.nodes[n / 2] = 0.0;
    return r;
}

namespace {

template <class Key, class Value, class Make>
const Value& cached(std::map<Key, std::unique_ptr<Value>>& cache, std::mutex& mutex, const Key& key, Make&& make) {
    std::lock_guard<std::mutex> lock(mutex);
    auto it = cache.find(key);
    if (it == cache.end()) it = cache.emplace(key, std::make_unique<Value>(make())).first;
    return *it->second;
}

}  // namespace

const GaussRule& cached_gauss_rule(int n) {
    static std::map<int, std::unique_ptr<GaussRule>> cache;
    static std::mutex mutex;
    if (n < 1) throw std::invalid_argument("gauss_rule: order must be >= 1");
    return cached(cache, mutex, n, [n] { return gauss_rule(n); });
}

const GaussRule& cached_unit_rule(int n) {
    static std::map<int, std::unique_ptr<GaussRule>> cache;
    static std::mutex mutex;
    if (n < 1) throw std::invalid_argument("gauss_rule: order must be >= 1");
    return cached(cache, mutex, n, [n] {
        GaussRule r = gauss_rule(n);
        for (auto& x : r.nodes) x = 0.5 * (x + 1.0);
        for (auto& w : r.weights) w *= 0.5;
        return r;
    });
}

double tensor4(const GaussRule& rule, const std::function<double(double, double, double, double)>& integrand) {
    const std::size_t n = rule.order();
    std::vector<double> x(n), w(n);
    for (std::size_t i = 0; i < n; ++i) {
        x[i] = 0.5 * (rule.nodes[i] + 1.0);
        w[i] = 0.5 * rule.weights[i];
    }
    double s = 0.0;
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b)
            for (std::size_t c = 0; c < n; ++c)
                for (std::size_t d = 0; d < n; ++d) s += w[a] * w[b] * w[c] * w[d] * integrand(x[a], x[b], x[c], x[d]);
    return s;
}

int subdomain_count(PairKind kind) noexcept {
    switch (kind) {
    case PairKind::Identical: return 6;
    case PairKind::CommonEdge: return 5;
    case PairKind::CommonVertex: return 2;
    case PairKind::Disjoint: return 1;
    }
    return 1;
}

CubeImage regularized_map(PairKind kind, int sub, double xi, double e1, double e2, double e3) noexcept {
    // points first in the triangle {0 <= s2 <= s1 <= 1}, then (s1 - s2, s2)
    double x1 = 0, x2 = 0, y1 = 0, y2 = 0, jac = 0;
    switch (kind) {
    case PairKind::Identical:
        jac = xi * xi * xi * e1 * e1 * e2;
        switch (sub) {
        case 0: x1 = xi; x2 = xi * (1 - e1 + e1 * e2); y1 = xi * (1 - e1 * e2 * e3); y2 = xi * (1 - e1); break;
        case 1: x1 = xi * (1 - e1 * e2 * e3); x2 = xi * (1 - e1); y1 = xi; y2 = xi * (1 - e1 + e1 * e2); break;
        case 2: x1 = xi; x2 = xi * e1 * (1 - e2 + e2 * e3); y1 = xi * (1 - e1 * e2); y2 = xi * e1 * (1 - e2); break;
        case 3: x1 = xi * (1 - e1 * e2); x2 = xi * e1 * (1 - e2); y1 = xi; y2 = xi * e1 * (1 - e2 + e2 * e3); break;
        case 4: x1 = xi * (1 - e1 * e2 * e3); x2 = xi * e1 * (1 - e2 * e3); y1 = xi; y2 = xi * e1 * (1 - e2); break;
        default: x1 = xi; x2 = xi * e1 * (1 - e2); y1 = xi * (1 - e1 * e2 * e3); y2 = xi * e1 * (1 - e2 * e3); break;
        }
        break;
    case PairKind::CommonEdge:
        jac = xi * xi * xi * e1 * e1 * e2;
        switch (sub) {
        case 0:
            x1 = xi; x2 = xi * e1 * e3; y1 = xi * (1 - e1 * e2); y2 = xi * e1 * (1 - e2);
            jac = xi * xi * xi * e1 * e1;
            break;
        case 1: x1 = xi; x2 = xi * e1; y1 = xi * (1 - e1 * e2 * e3); y2 = xi * e1 * e2 * (1 - e3); break;
        case 2: x1 = xi * (1 - e1 * e2); x2 = xi * e1 * (1 - e2); y1 = xi; y2 = xi * e1 * e2 * e3; break;
        case 3: x1 = xi * (1 - e1 * e2 * e3); x2 = xi * e1 * e2 * (1 - e3); y1 = xi; y2 = xi * e1; break;
        default: x1 = xi * (1 - e1 * e2 * e3); x2 = xi * e1 * (1 - e2 * e3); y1 = xi; y2 = xi * e1 * e2; break;
        }
        break;
    case PairKind::CommonVertex:
        jac = xi * xi * xi * e2;
        if (sub == 0) {
            x1 = xi; x2 = xi * e1; y1 = xi * e2; y2 = xi * e2 * e3;
        } else {
            x1 = xi * e2; x2 = xi * e2 * e3; y1 = xi; y2 = xi * e1;
        }
        break;
    case PairKind::Disjoint:
        x1 = xi; x2 = xi * e1; y1 = e2; y2 = e2 * e3;
        jac = xi * e2;
        break;
    }
    return {x1 - x2, x2, y1 - y2, y2, jac};
}

const std::vector<PairPoint>& pair_rule(PairKind kind, int n) {
    static std::map<std::pair<int, int>, std::unique_ptr<std::vector<PairPoint>>> cache;
    static std::mutex mutex;
    if (n < 1) throw std::invalid_argument("pair_rule: order must be >= 1");
    return cached(cache, mutex, std::make_pair(static_cast<int>(kind), n), [kind, n] {
        const auto& r = cached_unit_rule(n);
        const int subs = subdomain_count(kind);
        std::vector<PairPoint> pts;
        pts.reserve(static_cast<std::size_t>(subs) * n * n * n * n);
        for (int s = 0; s < subs; ++s)
            for (int a = 0; a < n; ++a)
                for (int b = 0; b < n; ++b)
                    for (int c = 0; c < n; ++c)
                        for (int d = 0; d < n; ++d) {
                            const auto im = regularized_map(kind, s, r.nodes[a], r.nodes[b], r.nodes[c], r.nodes[d]);
                            const double w = r.weights[a] * r.weights[b] * r.weights[c] * r.weights[d] * im.jacobian;
                            pts.push_back({im.xu, im.xv, im.yu, im.yv, w});
                        }
        return pts;
    });
}

RegularizedIntegrand::RegularizedIntegrand(const SurfaceMesh& mesh, const PanelPairClass& pair, std::size_t t1, std::size_t t2)
    : kind_(pair.kind), xperm_(pair.first), yperm_(pair.second), scale_(4.0 * mesh.area(t1) * mesh.area(t2)) {
    const auto a = mesh.corners(t1);
    const auto b = mesh.corners(t2);
    for (int i = 0; i < 3; ++i) {
        xv_[i] = a[xperm_[i]];
        yv_[i] = b[yperm_[i]];
    }
}

RegularizedIntegrand::Sample RegularizedIntegrand::at(double xu, double xv, double yu, double yv, double jacobian) const {
    Sample s;
    s.x = xv_[0] + xu * (xv_[1] - xv_[0]) + xv * (xv_[2] - xv_[0]);
    s.y = yv_[0] + yu * (yv_[1] - yv_[0]) + yv * (yv_[2] - yv_[0]);
    s.x_bary[xperm_[0]] = 1.0 - xu - xv;
    s.x_bary[xperm_[1]] = xu;
    s.x_bary[xperm_[2]] = xv;
    s.y_bary[yperm_[0]] = 1.0 - yu - yv;
    s.y_bary[yperm_[1]] = yu;
    s.y_bary[yperm_[2]] = yv;
    s.jacobian = jacobian * scale_;
    return s;
}

RegularizedIntegrand::Sample RegularizedIntegrand::operator()(int subdomain, double xi, double eta1, double eta2, double eta3) const {
    const auto im = regularized_map(kind_, subdomain, xi, eta1, eta2, eta3);
    return at(im.xu, im.xv, im.yu, im.yv, im.jacobian);
}

RegularizedIntegrand regularize(const SurfaceMesh& mesh, const PanelPairClass& pair, std::size_t t1, std::size_t t2) {
    return RegularizedIntegrand(mesh, pair, t1, t2);
}

double panel_pair_integral(const SurfaceMesh& mesh, std::size_t t1, std::size_t t2, const std::function<double(double)>& kernel,
                           const std::function<double(const RegularizedIntegrand::Sample&)>& basis, int n) {
    const auto pair = classify_pair(mesh, t1, t2);
    const RegularizedIntegrand reg(mesh, pair, t1, t2);
    double s = 0.0;
    for (const auto& p : pair_rule(pair.kind, n)) {
        const auto smp = reg.at(p.xu, p.xv, p.yu, p.yv, p.weight);
        const double r = (smp.x - smp.y).norm();
        const double k = kernel(r);
        if (k == 0.0) continue;
        s += smp.jacobian * basis(smp) * k / (4.0 * std::numbers::pi * r);
    }
    return s;
}

const std::vector<TrianglePoint>& triangle_rule(int n) {
    static std::map<int, std::unique_ptr<std::vector<TrianglePoint>>> cache;
    static std::mutex mutex;
    if (n < 1) throw std::invalid_argument("triangle_rule: order must be >= 1");
    return cached(cache, mutex, n, [n] {
        const auto& r = cached_unit_rule(n);
        std::vector<TrianglePoint> pts;
        pts.reserve(static_cast<std::size_t>(n) * n);
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b) {
                const double s = r.nodes[a], tau = r.nodes[b];
                pts.push_back({s * (1.0 - tau), s * tau, r.weights[a] * r.weights[b] * s});
            }
        return pts;
    });
}

}  // namespace pumbem
