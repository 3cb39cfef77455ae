#include <cmath>
#include <numbers>

#include "doctest.h"
#include "pumbem/estimator.hpp"
#include "pumbem/quadrature.hpp"
#include "pumbem/reference.hpp"
#include "support/seminorm_oracle.hpp"

using namespace pumbem;


TEST_CASE("indicator identities with injected residuals") {
    const Interval unit{0.0, 1.0};
    CHECK(std::abs(indicator([](double) { return 3.7; }, unit)) < 1e-14);
    CHECK(indicator([](double t) { return t; }, unit) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(indicator([](double t) { return t * t; }, unit) == doctest::Approx(7.0 / 6.0).epsilon(1e-12));
    CHECK(oracle::seminorm([](double t) { return t * t; }, 0.0, 1.0, 16) == doctest::Approx(7.0 / 6.0).epsilon(1e-12));
}

TEST_CASE("indicator against a direct double integral") {
    auto r = [](double t) { return std::sin(3.0 * t) + 0.2 * t * t * t; };
    for (auto w : {Interval{0.0, 1.0}, Interval{0.3, 2.1}, Interval{-1.0, 0.5}})
        CHECK(indicator(r, w, 20) == doctest::Approx(oracle::seminorm(r, w.lo, w.hi, 40)).epsilon(1e-10));
}

TEST_CASE("indicator scaling and translation") {
    auto r = [](double t) { return std::exp(-t) * std::cos(5.0 * t); };
    const Interval w{0.2, 0.9};
    const double eta = indicator(r, w);
    CHECK(eta > 0.0);
    CHECK(indicator([&](double t) { return -3.0 * r(t); }, w) == doctest::Approx(9.0 * eta).epsilon(1e-12));
    CHECK(indicator([&](double t) { return r(t) + 11.0; }, w) == doctest::Approx(eta).epsilon(1e-9));
    CHECK(indicator([&](double t) { return r(t - 5.0); }, {5.2, 5.9}) == doctest::Approx(eta).epsilon(1e-9));
    CHECK_THROWS_AS(indicator(r, {1.0, 1.0}), std::invalid_argument);
}

TEST_CASE("indicator windows") {
    const TimeGrid g({0.0, 1.0, 1.5, 3.0});
    const auto w = indicator_windows(g);
    REQUIRE(w.size() == 4);
    CHECK((w[0].lo == 0.0 && w[0].hi == 1.0));
    CHECK((w[1].lo == 0.0 && w[1].hi == 1.5));
    CHECK((w[2].lo == 1.0 && w[2].hi == 3.0));
    CHECK((w[3].lo == 1.5 && w[3].hi == 3.0));
    const auto eta = indicators([](double t) { return t * t; }, g);
    REQUIRE(eta.size() == 4);
    for (double e : eta) CHECK(e > 0.0);
}

TEST_CASE("marking") {
    const std::vector<double> eta{1.0, 0.5, 0.1};
    CHECK(mark(eta, 0.5) == std::vector<std::size_t>{0, 1});
    CHECK(mark(eta, 0.9) == std::vector<std::size_t>{0});
    CHECK(mark(std::vector<double>(4, 2.0), 0.5).size() == 4);
    CHECK(mark(std::vector<double>(3, 0.0), 0.5).empty());
    const std::vector<double> scaled{7.0, 3.5, 0.7};
    CHECK(mark(scaled, 0.5) == mark(eta, 0.5));
    CHECK_THROWS_AS(mark(eta, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(mark(eta, 0.0), std::invalid_argument);
}

TEST_CASE("refinement by midpoints") {
    const TimeGrid g({0.0, 1.0, 2.0, 3.0});
    CHECK(refine(g, std::vector<std::size_t>{1}).breakpoints() == std::vector<double>{0.0, 0.5, 1.0, 1.5, 2.0, 3.0});
    CHECK(refine(g, std::vector<std::size_t>{0}).breakpoints() == std::vector<double>{0.0, 0.5, 1.0, 2.0, 3.0});
    CHECK(refine(g, std::vector<std::size_t>{3}).breakpoints() == std::vector<double>{0.0, 1.0, 2.0, 2.5, 3.0});
    const std::vector<std::vector<std::size_t>> two{{1}, {2}};
    CHECK(refine(g, two).breakpoints() == std::vector<double>{0.0, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0});
    const std::vector<std::vector<std::size_t>> same{{1}, {1}};
    CHECK(refine(g, same).size() == 6);
    CHECK(refine(g, same).contains(g));
    CHECK_THROWS_AS(refine(g, std::vector<std::size_t>{4}), std::out_of_range);
}

TEST_CASE("layer residual") {
    const auto mesh = make_sphere(1);
    const SpatialBasis spatial(mesh, SpatialKind::P0);
    const Point3 x0 = mesh.vertex(0);
    auto g_dot = [](const Point3& x, double t) { return std::cos(t) + x.x(); };
    const LayerResidual res(mesh, spatial, x0, g_dot);
    GalerkinSolution zero;
    zero.basis = TemporalBasis(TimeGrid::uniform(2.0, 4), PolyDegree(1));
    zero.coefficients = Coefficients::Zero(zero.basis.size(), spatial.size());
    CHECK(res(zero, 0.7) == doctest::Approx(-g_dot(x0, 0.7)));

    GalerkinSolution late = zero;
    late.basis = TemporalBasis(TimeGrid({0.0, 1.0, 1.5, 2.0}), PolyDegree(1));
    late.coefficients = Coefficients::Zero(late.basis.size(), spatial.size());
    late.coefficients.bottomRows(2).setConstant(1.0);
    // functions starting at t = 1.5 cannot reach x0 before t = 1.5
    CHECK(res(late, 0.9) == doctest::Approx(-g_dot(x0, 0.9)));
    CHECK(res(late, 1.7) != doctest::Approx(-g_dot(x0, 1.7)));

    CHECK_THROWS_AS(LayerResidual(mesh, spatial, Point3(0.0, 0.0, 0.0), g_dot), std::invalid_argument);
}

TEST_CASE("layer residual is stable under quadrature refinement") {
    const auto mesh = make_sphere(3);
    const SpatialBasis spatial(mesh, SpatialKind::P1);
    GalerkinSolution sol;
    sol.basis = TemporalBasis(TimeGrid::uniform(2.0, 2), PolyDegree(1));
    sol.spatial_kind = SpatialKind::P1;
    sol.coefficients = Coefficients::Zero(sol.basis.size(), spatial.size());
    for (Eigen::Index i = 0; i < sol.coefficients.size(); ++i) sol.coefficients.data()[i] = std::sin(0.1 * static_cast<double>(i));
    auto g_dot = [](const Point3&, double) { return 0.0; };
    // the bump derivatives are steep, so convergence in the panel order is only algebraic
    for (const Point3& x0 : {mesh.centroid(5), Point3(mesh.vertex(3))}) {
        const LayerResidual a(mesh, spatial, x0, g_dot, 24), b(mesh, spatial, x0, g_dot, 48);
        for (double t : {0.4, 1.1, 1.8}) CHECK(std::abs(a(sol, t) - b(sol, t)) < 1e-6);
    }
}

namespace {

struct Quadratic : AdaptiveProblem {
    TimeGrid last;
    int solves = 0;
    void solve(const TimeGrid& grid) override {
        last = grid;
        ++solves;
    }
    std::size_t observation_count() const override { return 2; }
    double residual(std::size_t x, double t) const override { return x == 0 ? std::exp(-20.0 * t) : 0.0; }
};

}  // namespace

TEST_CASE("adaptive loop bookkeeping") {
    Quadratic q;
    AdaptOptions o;
    o.max_iter = 4;
    int calls = 0;
    const auto st = adapt_loop(q, TimeGrid::uniform(1.0, 4), o, [&](const AdaptIteration&) { ++calls; });
    CHECK(q.solves == 4);
    CHECK(calls == 4);
    REQUIRE(st.iterations.size() == 4);
    for (std::size_t k = 1; k < st.iterations.size(); ++k) CHECK(st.iterations[k].grid.contains(st.iterations[k - 1].grid));
    CHECK(st.grid().breakpoints()[1] < 0.25 / 4.0);
    CHECK(st.iterations[0].marked[1].empty());
    CHECK(!st.iterations[0].error);
    CHECK_THROWS_AS(adapt_loop(q, TimeGrid::uniform(1.0, 4), AdaptOptions{1.5, 3, 16, 0.0}), std::invalid_argument);
}

TEST_CASE("adaptivity concentrates at a singular start") {
    Adaptive1D problem(signals::root_pulse(), PolyDegree(1));
    AdaptOptions o;
    o.max_iter = 6;
    const auto st = adapt_loop(problem, TimeGrid::uniform(1.0, 4), o);
    const auto& t = st.grid().breakpoints();
    double smallest = 1.0;
    std::size_t where = 0;
    for (std::size_t j = 0; j + 1 < t.size(); ++j)
        if (t[j + 1] - t[j] < smallest) {
            smallest = t[j + 1] - t[j];
            where = j;
        }
    CHECK(where == 0);
    for (std::size_t k = 1; k < st.iterations.size(); ++k) {
        CHECK(st.iterations[k].grid.contains(st.iterations[k - 1].grid));
        CHECK(*st.iterations[k].error < *st.iterations[k - 1].error);
    }
}
