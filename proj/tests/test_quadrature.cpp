#include <cmath>
#include <numbers>

#include "doctest.h"
#include "pumbem/quadrature.hpp"

using namespace pumbem;

namespace {

// unit square split into four triangles around its center
SurfaceMesh square_fan() {
    std::vector<Point3> v{{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0}, {0.5, 0.5, 0}};
    return SurfaceMesh(v, {{0, 1, 4}, {1, 2, 4}, {2, 3, 4}, {3, 0, 4}});
}

// Potential of the uniform density on a planar triangle at an in-plane point x:
// sum over edges of the signed edge distance times log((R+ + s+) / (R- + s-)).
double inplane_potential(const std::array<Point3, 3>& tri, const Point3& x) {
    const Point3 n = (tri[1] - tri[0]).cross(tri[2] - tri[0]).normalized();
    double sum = 0.0;
    for (int e = 0; e < 3; ++e) {
        const Point3& a = tri[e];
        const Point3& b = tri[(e + 1) % 3];
        const Point3 dir = (b - a).normalized();
        const Point3 out = dir.cross(n);
        const double d = (a - x).dot(out);
        const double sm = (a - x).dot(dir), sp = (b - x).dot(dir);
        const double rm = (a - x).norm(), rp = (b - x).norm();
        if (std::abs(d) < 1e-14) continue;
        sum += d * std::log((rp + sp) / (rm + sm));
    }
    return sum;
}

}  // namespace

TEST_CASE("gauss rules") {
    const auto r1 = gauss_rule(1);
    CHECK(r1.nodes[0] == 0.0);
    CHECK(r1.weights[0] == doctest::Approx(2.0));
    const auto r2 = gauss_rule(2);
    CHECK(r2.nodes[1] == doctest::Approx(1.0 / std::sqrt(3.0)).epsilon(1e-15));
    CHECK(r2.weights[0] == doctest::Approx(1.0).epsilon(1e-15));
    CHECK_THROWS_AS(gauss_rule(0), std::invalid_argument);
    for (int n = 1; n <= 40; ++n) {
        const auto r = gauss_rule(n);
        double wsum = 0.0, odd = 0.0, even = 0.0;
        for (int i = 0; i < n; ++i) {
            wsum += r.weights[i];
            odd += r.weights[i] * std::pow(r.nodes[i], 2 * n - 1);
            even += r.weights[i] * std::pow(r.nodes[i], 2 * n - 2);
            CHECK(r.nodes[i] == doctest::Approx(-r.nodes[n - 1 - i]).epsilon(1e-15));
            CHECK(r.weights[i] > 0.0);
        }
        CHECK(wsum == doctest::Approx(2.0).epsilon(1e-14));
        CHECK(std::abs(odd) < 1e-14);
        CHECK(std::abs(even - 2.0 / (2 * n - 1)) < 1e-13);
    }
}

TEST_CASE("tensor rule on the unit cube") {
    CHECK(tensor4(gauss_rule(3), [](double, double, double, double) { return 1.0; }) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(tensor4(gauss_rule(2), [](double a, double b, double c, double d) { return a * b * c * d; }) ==
          doctest::Approx(1.0 / 16.0).epsilon(1e-14));
    CHECK(tensor4(gauss_rule(3), [](double a, double b, double c, double d) { return std::pow(a, 5) * b * b * c * std::pow(d, 4); }) ==
          doctest::Approx(1.0 / 6 / 3 / 2 / 5).epsilon(1e-14));
}

TEST_CASE("pair rule weights sum to a quarter") {
    for (auto kind : {PairKind::Identical, PairKind::CommonEdge, PairKind::CommonVertex, PairKind::Disjoint}) {
        double s = 0.0;
        for (const auto& p : pair_rule(kind, 5)) {
            s += p.weight;
            CHECK(p.xu >= -1e-15);
            CHECK(p.xv >= -1e-15);
            CHECK(p.xu + p.xv <= 1 + 1e-15);
            CHECK(p.yu >= -1e-15);
            CHECK(p.yu + p.yv <= 1 + 1e-15);
        }
        CHECK(s == doctest::Approx(0.25).epsilon(1e-13));
    }
}

TEST_CASE("constant kernel gives the area product") {
    const auto sq = square_fan();
    const auto one = [](const RegularizedIntegrand::Sample&) { return 1.0; };
    for (std::size_t a = 0; a < 4; ++a)
        for (std::size_t b = 0; b < 4; ++b) {
            // kernel r -> 4 pi r turns the weight 1/(4 pi r) into 1
            const double v = panel_pair_integral(sq, a, b, [](double r) { return 4 * std::numbers::pi * r; }, one, 2);
            CHECK(v == doctest::Approx(0.0625).epsilon(1e-13));
        }
    const double zero = panel_pair_integral(sq, 0, 0, [](double) { return 0.0; }, one, 4);
    CHECK(zero == 0.0);
}

TEST_CASE("barycentric coordinates follow the mesh vertex order") {
    const auto sq = square_fan();
    for (std::size_t a = 0; a < 4; ++a)
        for (std::size_t b = 0; b < 4; ++b) {
            const auto pair = classify_pair(sq, a, b);
            const RegularizedIntegrand reg(sq, pair, a, b);
            for (const auto& p : pair_rule(pair.kind, 3)) {
                const auto s = reg.at(p.xu, p.xv, p.yu, p.yv, p.weight);
                const auto ca = sq.corners(a), cb = sq.corners(b);
                const Point3 x = s.x_bary[0] * ca[0] + s.x_bary[1] * ca[1] + s.x_bary[2] * ca[2];
                const Point3 y = s.y_bary[0] * cb[0] + s.y_bary[1] * cb[1] + s.y_bary[2] * cb[2];
                CHECK((x - s.x).norm() < 1e-14);
                CHECK((y - s.y).norm() < 1e-14);
            }
        }
}

TEST_CASE("singular quadrature reproduces the unit square Coulomb integral") {
    // int int 1/|x - y| over the unit square squared = 4 ln(1 + sqrt 2) - 4 (sqrt 2 - 1) / 3
    const double exact = 4 * std::log(1 + std::sqrt(2.0)) - 4 * (std::sqrt(2.0) - 1) / 3;
    CHECK(exact == doctest::Approx(2.9732095982473787).epsilon(1e-15));
    const auto sq = square_fan();
    const auto coulomb = [](double) { return 4 * std::numbers::pi; };
    const auto one = [](const RegularizedIntegrand::Sample&) { return 1.0; };
    double total = 0.0;
    for (std::size_t a = 0; a < 4; ++a)
        for (std::size_t b = 0; b < 4; ++b) total += panel_pair_integral(sq, a, b, coulomb, one, 14);
    CHECK(std::abs(total - exact) < 1e-9);
}

TEST_CASE("identical panel against the in-plane potential oracle") {
    const SurfaceMesh m({{0, 0, 0}, {1, 0, 0}, {1, 1, 0}}, {{0, 1, 2}});
    const auto tri = m.corners(0);
    // outer integral on a 4-level uniformly subdivided triangle with a high-order rule
    double oracle = 0.0;
    const int levels = 16;
    const auto& rule = triangle_rule(12);
    for (int i = 0; i < levels; ++i)
        for (int j = 0; j < levels - i; ++j)
            for (int up = 0; up < 2; ++up) {
                if (up == 1 && i + j == levels - 1) continue;
                Point3 a, b, c;
                auto at = [&](double u, double v) { return Point3(tri[0] + u / levels * (tri[1] - tri[0]) + v / levels * (tri[2] - tri[0])); };
                if (up == 0) {
                    a = at(i, j), b = at(i + 1, j), c = at(i, j + 1);
                } else {
                    a = at(i + 1, j + 1), b = at(i, j + 1), c = at(i + 1, j);
                }
                const double area = 0.5 * (b - a).cross(c - a).norm();
                for (const auto& p : rule) oracle += 2 * area * p.weight * inplane_potential(tri, a + p.u * (b - a) + p.v * (c - a));
            }
    oracle /= 4 * std::numbers::pi;
    const auto one = [](const RegularizedIntegrand::Sample&) { return 1.0; };
    const double reg = panel_pair_integral(m, 0, 0, [](double) { return 1.0; }, one, 10);
    CHECK(std::abs(reg - oracle) < 1e-6);
    const double reg14 = panel_pair_integral(m, 0, 0, [](double) { return 1.0; }, one, 14);
    CHECK(std::abs(reg14 - reg) < 1e-6);
}

TEST_CASE("triangle rule") {
    for (int n : {1, 3, 8}) {
        double s = 0.0, su = 0.0, suv = 0.0;
        for (const auto& p : triangle_rule(n)) {
            s += p.weight;
            su += p.weight * p.u;
            suv += p.weight * p.u * p.v;
        }
        CHECK(s == doctest::Approx(0.5).epsilon(1e-14));
        if (n >= 3) {
            CHECK(su == doctest::Approx(1.0 / 6).epsilon(1e-14));
            CHECK(suv == doctest::Approx(1.0 / 24).epsilon(1e-14));
        }
    }
}
