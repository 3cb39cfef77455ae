#include <cmath>
#include <numbers>

#include "doctest.h"
#include "pumbem/psi.hpp"
#include "pumbem/quadrature.hpp"

using namespace pumbem;

namespace {

struct ModelPair {
    TemporalBasis basis{TimeGrid({0.0, 2.0, 3.0, 4.5, 7.0}), PolyDegree(3)};
    std::size_t b1 = basis.index_of(2, 0), b2 = basis.index_of(4, 0);
    std::size_t b3 = basis.index_of(2, 3), b4 = basis.index_of(4, 2);
};

}  // namespace

TEST_CASE("psi support and compactness") {
    ModelPair mp;
    const auto s = psi_support(mp.basis[mp.b2], mp.basis[mp.b1]);
    CHECK(s.lo == 0.0);
    CHECK(s.hi == 7.0);
    CHECK(psi_exact(mp.basis, mp.b2, mp.b1, -0.01) == 0.0);
    CHECK(psi_exact(mp.basis, mp.b2, mp.b1, 7.01) == 0.0);
    CHECK(psi_exact(mp.basis, mp.b2, mp.b1, 3.5) != 0.0);
}

TEST_CASE("psi quadrature self-consistency") {
    ModelPair mp;
    for (int s = 0; s < 50; ++s) {
        const double r = 7.0 * (s + 0.5) / 50.0;
        CHECK(std::abs(psi_exact(mp.basis, mp.b2, mp.b1, r, 40) - psi_exact(mp.basis, mp.b2, mp.b1, r, 80)) < 1e-12);
        CHECK(std::abs(psi_exact(mp.basis, mp.b4, mp.b3, r, 40) - psi_exact(mp.basis, mp.b4, mp.b3, r, 80)) < 1e-12);
    }
}

TEST_CASE("psi integrates to zero for interior pairs") {
    ModelPair mp;
    for (auto [k, i] : {std::pair{mp.b2, mp.b1}, std::pair{mp.b4, mp.b3}, std::pair{mp.b1, mp.b3}}) {
        const auto s = psi_support(mp.basis[k], mp.basis[i]);
        double total = 0.0;
        const int pieces = 56;
        for (int j = 0; j < pieces; ++j) {
            const double a = s.lo + s.width() * j / pieces, b = s.lo + s.width() * (j + 1) / pieces;
            total += integrate(20, a, b, [&](double r) { return psi_exact(mp.basis, k, i, r); });
        }
        CHECK(std::abs(total) < 1e-8);
    }
}

TEST_CASE("psi of the bare left-end trial includes the start jump") {
    // bare mu_1 jumps from 0 to 1 at t = 0; that jump contributes b_k(r)
    const TemporalBasis basis(TimeGrid({0.0, 1.0, 2.0}), PolyDegree(0));
    const auto& trial = basis[0];
    const auto& test = basis[1];
    for (double r : {0.1, 0.4, 0.9, 1.5}) {
        const double direct = integrate(200, std::max(0.0, r), std::min(2.0, r + 1.0), [&](double t) {
                                  return TemporalBasis::eval_function_dot(trial, t - r) * TemporalBasis::eval_function(test, t);
                              }) +
                              TemporalBasis::eval_function(test, r);
        CHECK(psi_exact(test, trial, r) == doctest::Approx(direct).epsilon(1e-10));
    }
}

TEST_CASE("chebyshev fit recovers a single mode") {
    auto t3 = [](double x) { return 4 * x * x * x - 3 * x; };
    const auto s = fit_surrogate(t3, -1.0, 1.0, 1, 6);
    const auto c = s.coefficients(0);
    for (int v = 0; v < 6; ++v) CHECK(std::abs(c[v] - (v == 3 ? 1.0 : 0.0)) < 1e-13);
    CHECK(s(0.3) == doctest::Approx(t3(0.3)).epsilon(1e-13));
    CHECK(s(1.5) == 0.0);
    CHECK(s(-1.5) == 0.0);
}

TEST_CASE("fit evaluates the function exactly m*q times") {
    int calls = 0;
    auto f = [&](double x) {
        ++calls;
        return std::sin(x);
    };
    fit_surrogate(f, 0.0, 3.0, 4, 25);
    CHECK(calls == 100);
    CHECK_THROWS_AS(fit_surrogate(f, 0.0, 3.0, 0, 25), std::invalid_argument);
    CHECK_THROWS_AS(fit_surrogate(f, 0.0, 3.0, 4, 0), std::invalid_argument);
    CHECK_THROWS_AS(fit_surrogate(f, 3.0, 3.0, 4, 4), std::invalid_argument);
}

TEST_CASE("surrogate accuracy and continuity") {
    ModelPair mp;
    const auto s = fit_surrogate(mp.basis, mp.b2, mp.b1, 5, 20);
    const double err = sup_error(s, mp.basis, mp.b2, mp.b1, 1000);
    CHECK(err < 2e-7);
    for (int j = 1; j < 5; ++j) {
        const double r = s.support().lo + j * s.cell_width();
        const double exact = psi_exact(mp.basis, mp.b2, mp.b1, r);
        CHECK(std::abs(s(r - 1e-13) - exact) <= 2 * err);
        CHECK(std::abs(s(r + 1e-13) - exact) <= 2 * err);
    }
    CHECK_THROWS_AS(sup_error(s, mp.basis, mp.b2, mp.b1, 99), std::invalid_argument);
}

TEST_CASE("doubling q does not increase the sup error") {
    ModelPair mp;
    for (int m : {2, 5, 10}) {
        const double e1 = sup_error(fit_surrogate(mp.basis, mp.b4, mp.b3, m, 5), mp.basis, mp.b4, mp.b3, 500);
        const double e2 = sup_error(fit_surrogate(mp.basis, mp.b4, mp.b3, m, 10), mp.basis, mp.b4, mp.b3, 500);
        CHECK(e2 <= e1 * 1.01);
    }
}

TEST_CASE("cell surrogate on an aligned grid") {
    auto f = [](double r) { return std::exp(-r) * std::sin(3 * r); };
    const CellSurrogate s(f, 0.35, 2.6, 0.25, 16);
    CHECK(s.first_cell() == 1);
    CHECK(s.cell_count() == 10);
    for (double r = 0.25; r < 2.75; r += 0.01) CHECK(std::abs(s(r) - f(r)) < 1e-12);
    CHECK(s(0.2) == 0.0);
    CHECK(s(2.8) == 0.0);
}
