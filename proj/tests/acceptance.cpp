// One PASS/FAIL line per acceptance criterion. Arguments select criteria by number.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "pumbem/estimator.hpp"
#include "pumbem/experiments.hpp"
#include "pumbem/reference.hpp"
#include "support/assembly_oracle.hpp"
#include "support/seminorm_oracle.hpp"

using namespace pumbem;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what) {
        if (!ok) pass = false;
        if (!detail.empty()) detail += "; ";
        detail += (ok ? "" : "NOT ") + what;
    }
};

std::string fmt(const char* f, double a) {
    char buf[128];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

std::string fmt(const char* f, double a, double b) {
    char buf[160];
    std::snprintf(buf, sizeof buf, f, a, b);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

// ---------------------------------------------------------------------------

Outcome surrogate_table(double budget) {
    // (m, q, psi_1 error, psi_2 error)
    static const double published[8][4] = {{1, 100, 2.72e-8, 4.16e-9}, {2, 50, 4.28e-8, 1.88e-8}, {4, 25, 4.97e-8, 2.60e-8},
                                           {5, 20, 3.87e-8, 1.34e-8},  {10, 10, 1.60e-7, 2.19e-7}, {20, 5, 2.25e-5, 1.14e-5},
                                           {25, 4, 1.14e-4, 4.99e-5},  {50, 2, 3.39e-3, 1.43e-3}};
    const auto start = std::chrono::steady_clock::now();
    const auto res = psi_table(default_config("psi-table"));
    const double elapsed = seconds_since(start);
    const auto& t = res.table("psi_table");
    Outcome o;
    double worst = 1.0;
    bool all_within = true, evaluations = true;
    for (std::size_t r = 0; r < 8; ++r) {
        if (t.number(r, "m") != published[r][0] || t.number(r, "q") != published[r][1]) all_within = false;
        for (int k = 0; k < 2; ++k) {
            const double measured = t.number(r, k == 0 ? "sup_error_psi1" : "sup_error_psi2");
            const double factor = std::max(measured / published[r][2 + k], published[r][2 + k] / measured);
            worst = std::max(worst, factor);
            if (!(factor <= 5.0)) all_within = false;
            if (t.number(r, k == 0 ? "evaluations_psi1" : "evaluations_psi2") != 100.0) evaluations = false;
        }
    }
    o.require(all_within, fmt("all 16 errors within 5x of the published values (worst factor %.2f)", worst));
    o.require(evaluations, "100 evaluations per fit");
    o.require(elapsed < budget, fmt("runtime %.1f s < %.0f s", elapsed, budget));
    return o;
}

Outcome quadrature_cases(double budget) {
    const auto start = std::chrono::steady_clock::now();
    const auto res = quad_cases(default_config("quad-cases"));
    const double elapsed = seconds_since(start);
    const auto& t = res.table("quad_cases");
    auto error_at = [&](int c, int n, const char* column) {
        for (std::size_t r = 0; r < t.rows.size(); ++r)
            if (t.number(r, "case") == c && t.number(r, "n") == n) return t.number(r, column);
        throw std::runtime_error("missing quadrature case row");
    };
    Outcome o;
    std::string ratios;
    bool decay = true;
    for (int c = 1; c <= 4; ++c) {
        const double e6 = error_at(c, 6, "abs_error"), e12 = error_at(c, 12, "abs_error");
        if (!(e12 * 10.0 <= e6)) decay = false;
        ratios += (c > 1 ? ", " : "") + fmt("%.0f", e6 / std::max(e12, 1e-300));
    }
    o.require(decay, "error(n=12) <= error(n=6)/10 in all four cases (ratios " + ratios + ")");
    const double far = error_at(4, 10, "rel_error");
    o.require(far < 1e-6, fmt("case 4 relative error at n=10 %.2e < 1e-6", far));
    const auto s2 = res.summary["case2"]["support"], s3 = res.summary["case3"]["support"];
    o.require(std::abs(s2[0].get<double>() - 0.8) < 1e-12 && std::abs(s2[1].get<double>() - 5.0) < 1e-12, "case 2 support [0.8, 5]");
    o.require(std::abs(s3[0].get<double>() - 1.8) < 1e-12 && std::abs(s3[1].get<double>() - 6.0) < 1e-12, "case 3 support [1.8, 6]");
    o.require(elapsed < budget, fmt("runtime %.1f s < %.0f s", elapsed, budget));
    return o;
}

Outcome assembly_oracle(double budget) {
    const auto start = std::chrono::steady_clock::now();
    const auto mesh = oracle::two_triangles();
    const SpatialBasis spatial(mesh, SpatialKind::P0);
    const TemporalBasis basis(TimeGrid::uniform(2.0, 2), PolyDegree(0));
    const Eigen::MatrixXd brute = oracle::brute_force_matrix(mesh, spatial, basis, 24, 24);
    const Eigen::MatrixXd fast = assemble_matrix(mesh, spatial, basis).dense();
    const double elapsed = seconds_since(start);
    const double deviation = (brute - fast).cwiseAbs().maxCoeff();
    Outcome o;
    o.require(deviation <= 1e-6, fmt("max entry deviation %.2e <= 1e-6 over %.0f entries", deviation, static_cast<double>(brute.size())));
    o.require(elapsed < budget, fmt("runtime %.1f s < %.0f s", elapsed, budget));
    return o;
}

Outcome coercivity() {
    const auto mesh = make_sphere(1);
    const SpatialBasis spatial(mesh, SpatialKind::P1);
    const TemporalBasis basis(TimeGrid::uniform(2.0, 8), PolyDegree(1));
    const auto system = assemble_matrix(mesh, spatial, basis);
    const double norm = system.norm();
    std::mt19937 rng(20240611);
    std::normal_distribution<double> normal;
    double worst = std::numeric_limits<double>::infinity();
    for (int k = 0; k < 200; ++k) {
        Eigen::VectorXd v(static_cast<Eigen::Index>(system.size()));
        for (auto& x : v) x = normal(rng);
        worst = std::min(worst, system.quadratic_form(v) / (norm * v.squaredNorm()));
    }
    Outcome o;
    o.require(worst >= -1e-10, fmt("min v'Av / (|A| |v|^2) = %.3e >= -1e-10 over 200 vectors", worst));
    return o;
}

Outcome sphere_convergence(double budget) {
    const auto start = std::chrono::steady_clock::now();
    const auto res = converge(default_config("converge"));
    const double elapsed = seconds_since(start);
    const auto& t = res.table("converge");
    Outcome o;
    for (int p : {0, 1}) {
        std::vector<double> errs;
        for (std::size_t r = 0; r < t.rows.size(); ++r)
            if (t.number(r, "p") == p) errs.push_back(t.number(r, "err_rel"));
        bool monotone = errs.size() >= 4;
        std::string list;
        for (std::size_t k = 0; k < errs.size(); ++k) {
            if (k > 0 && !(errs[k] < errs[k - 1])) monotone = false;
            list += (k ? " " : "") + fmt("%.2e", errs[k]);
        }
        o.require(monotone, "p=" + std::to_string(p) + " err_rel decreasing over 3 halvings (" + list + ")");
    }
    o.require(elapsed < budget, fmt("runtime %.0f s < %.0f s", elapsed, budget));
    return o;
}

Outcome quadrature_influence(double budget) {
    const auto start = std::chrono::steady_clock::now();
    const auto config = default_config("quad-influence");
    const auto res = quad_influence(config);
    const double elapsed = seconds_since(start);
    const auto& t = res.table("quad_influence");
    Outcome o;
    bool increasing = t.rows.size() == 7;
    std::string list;
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        if (r > 0 && !(t.number(r, "err_rel") > t.number(r - 1, "err_rel"))) increasing = false;
        list += (r ? " " : "") + fmt("%.2e", t.number(r, "err_rel"));
    }
    o.require(increasing, "err_rel strictly increasing down the 7 order triples (" + list + ")");
    const double top = t.number(0, "err_rel");
    const auto triangles = res.summary["triangles"].get<std::size_t>();
    if (triangles >= 616)
        o.require(top >= 1.86e-7 && top <= 1.86e-5, fmt("(10,8,6) err_rel %.2e within 10x of 1.86e-6", top));
    else
        o.detail += fmt("; reduced %.0f-triangle variant, (10,8,6) err_rel %.2e reported only", static_cast<double>(triangles), top);
    o.require(elapsed < budget, fmt("runtime %.0f s < %.0f s", elapsed, budget));
    return o;
}

Outcome kernel_identity() {
    const Kernel1D kernel;
    Outcome o;
    double worst = 0.0;
    for (double s : {0.5, 1.0, 2.0, 5.0}) {
        const double numeric = kernel.laplace(s);
        const double closed = bessel_i_half(s) * bessel_k_half(s);
        const double library = std::cyl_bessel_i(0.5, s) * std::cyl_bessel_k(0.5, s);
        worst = std::max({worst, std::abs(numeric - closed), std::abs(numeric - library), std::abs(numeric - (1.0 - std::exp(-2.0 * s)) / (2.0 * s))});
    }
    o.require(worst <= 1e-10, fmt("max |L[K](s) - I_1/2 K_1/2(s)| = %.2e <= 1e-10 at s = 0.5, 1, 2, 5", worst));
    return o;
}

Outcome adaptivity_1d(double budget) {
    const auto start = std::chrono::steady_clock::now();
    const auto config = default_config("adapt-1d");
    const auto res = adapt_1d(config);
    const double elapsed = seconds_since(start);
    const auto& errors = res.table("adapt_1d_errors");
    Outcome o;
    bool faster = true;
    int levels = 0;
    std::string list;
    for (std::size_t r = 0; r < errors.rows.size(); ++r) {
        if (errors.number(r, "signal") != 1 || errors.number(r, "iteration") < 3) continue;
        ++levels;
        if (!(errors.number(r, "err_adaptive") < errors.number(r, "err_uniform"))) faster = false;
        list += (list.empty() ? "" : " ") + fmt("%.1e/%.1e", errors.number(r, "err_adaptive"), errors.number(r, "err_uniform"));
    }
    o.require(faster && levels > 0, "t^1.5 e^-t: adaptive < uniform error at equal DOF from level 3 on (" + list + ")");

    // first iteration whose grid holds a breakpoint, absent from the initial grid, inside a region
    const auto& grids = res.table("adapt_1d_grids");
    const auto initial = TimeGrid::uniform(4.0, config.steps).breakpoints();
    auto first_in = [&](double lo, double hi) {
        for (std::size_t r = 0; r < grids.rows.size(); ++r) {
            if (grids.number(r, "signal") != 2) continue;
            const double t = grids.number(r, "t");
            const bool fresh = std::none_of(initial.begin(), initial.end(), [&](double b) { return std::abs(b - t) < 1e-12; });
            if (fresh && t >= lo && t <= hi) return static_cast<int>(grids.number(r, "iteration"));
        }
        return 1 << 30;
    };
    const int near1 = first_in(0.5, 1.5), near3 = first_in(2.5, 3.5);
    o.require(near1 < near3, "oscillatory pulse: bump at t=1 refined at iteration " + std::to_string(near1) + ", bump at t=3 at " +
                                 (near3 == 1 << 30 ? std::string("never") : std::to_string(near3)));
    o.require(elapsed < budget, fmt("runtime %.1f s < %.0f s", elapsed, budget));
    return o;
}

Outcome estimator_identities() {
    const Interval unit{0.0, 1.0};
    auto linear = [](double t) { return t; };
    auto square = [](double t) { return t * t; };
    const double eta0 = indicator([](double) { return 2.5; }, unit);
    const double eta1 = indicator(linear, unit);
    const double eta2 = indicator(square, unit);
    const double brute1 = oracle::seminorm(linear, 0.0, 1.0, 40), brute2 = oracle::seminorm(square, 0.0, 1.0, 40);
    Outcome o;
    o.require(std::abs(eta0) <= 1e-8, fmt("constant residual: eta = %.1e", eta0));
    o.require(std::abs(eta1 - 1.0) <= 1e-8 && std::abs(brute1 - 1.0) <= 1e-8, fmt("r = t: eta - 1 = %.1e", eta1 - 1.0));
    o.require(std::abs(eta2 - 7.0 / 6.0) <= 1e-8 && std::abs(eta2 - brute2) <= 1e-8,
              fmt("r = t^2: eta - 7/6 = %.1e, eta - brute force = %.1e", eta2 - 7.0 / 6.0, eta2 - brute2));
    return o;
}

Outcome long_term_stability(double budget) {
    const auto start = std::chrono::steady_clock::now();
    const auto res = long_term(default_config("long-term"));
    const double elapsed = seconds_since(start);
    const double exact = res.summary["exact_max"], tail = res.summary["tail_max"];
    const double before = res.summary["window_max_before_last"], last = res.summary["window_max_last"];
    Outcome o;
    o.require(tail <= 3.0 * exact, fmt("tail max %.3e <= 3 x exact max %.3e", tail, exact));
    o.require(last <= before, fmt("max over [30,40] %.3e <= max over [20,30] %.3e", last, before));
    o.require(elapsed < budget, fmt("runtime %.0f s < %.0f s", elapsed, budget));
    return o;
}

Outcome timebasis_properties(double budget) {
    const auto start = std::chrono::steady_clock::now();
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    double pu = 0.0, pu_dot = 0.0, outside = 0.0, fundamental = 0.0;
    bool positive_inside = true, counts = true;
    for (int trial = 0; trial < 6; ++trial) {
        std::vector<double> t{0.0};
        const int l = 3 + trial;
        for (int j = 1; j < l; ++j) t.push_back(t.back() + 0.2 + 2.0 * unit(rng));
        const TimeGrid grid(t);
        const auto mu = pu_functions(grid);
        const TemporalBasis partition(grid, PolyDegree(0));
        for (int s = 0; s < 400; ++s) {
            const double x = grid.horizon() * unit(rng);
            double sum = 0.0, dsum = 0.0;
            for (const auto& m : mu) sum += m(x);
            for (std::size_t i = 0; i < partition.size(); ++i) dsum += partition.eval_dot(i, x);
            pu = std::max(pu, std::abs(sum - 1.0));
            pu_dot = std::max(pu_dot, std::abs(dsum));
        }
        for (int p = 0; p <= 3; ++p) {
            const TemporalBasis basis(grid, PolyDegree(p));
            if (basis.size() != basis_count(grid.size(), p)) counts = false;
            for (std::size_t i = 0; i < basis.size(); ++i) {
                const auto& b = basis[i];
                for (double d : {1e-9, 0.1, 1.0}) {
                    outside = std::max({outside, std::abs(basis.eval(i, b.min() - d)), std::abs(basis.eval(i, b.max() + d))});
                    outside = std::max({outside, std::abs(basis.eval_dot(i, b.min() - d)), std::abs(basis.eval_dot(i, b.max() + d))});
                }
                const double mid = 0.5 * (b.min() + b.max());
                if (p == 0 && !(basis.eval(i, mid) > 0.0)) positive_inside = false;
                // fundamental theorem across each piece of the window
                const auto knots = b.breakpoints();
                double integral = 0.0;
                for (std::size_t k = 0; k + 1 < knots.size(); ++k)
                    for (int piece = 0; piece < 8; ++piece) {
                        const double a = knots[k] + (knots[k + 1] - knots[k]) * piece / 8.0;
                        const double c = knots[k] + (knots[k + 1] - knots[k]) * (piece + 1) / 8.0;
                        integral += integrate(40, a, c, [&](double x) { return basis.eval_dot(i, x); });
                    }
                const double jump = basis.eval(i, b.max()) - basis.eval(i, b.min());
                fundamental = std::max(fundamental, std::abs(integral - jump));
            }
        }
    }
    const double elapsed = seconds_since(start);
    Outcome o;
    o.require(pu <= 1e-10, fmt("partition of unity max |sum mu - 1| = %.1e", pu));
    o.require(pu_dot <= 1e-10, fmt("max |sum mu'| = %.1e", pu_dot));
    o.require(outside == 0.0, "functions and derivatives vanish outside their windows");
    o.require(positive_inside, "p = 0 functions positive inside");
    o.require(counts, "basis counts");
    o.require(fundamental <= 1e-10, fmt("max |int b' - (b(max) - b(min))| = %.1e", fundamental));
    o.require(elapsed < budget, fmt("runtime %.2f s < %.0f s", elapsed, budget));
    return o;
}

}  // namespace

int main(int argc, char** argv) {
    struct Criterion {
        int id;
        const char* name;
        std::function<Outcome()> run;
    };
    const std::vector<Criterion> criteria{
        {1, "surrogate error table", [] { return surrogate_table(10.0); }},
        {2, "quadrature convergence, cases 1-4", [] { return quadrature_cases(30.0); }},
        {3, "small-instance assembly oracle", [] { return assembly_oracle(10.0); }},
        {4, "coercivity proxy", [] { return coercivity(); }},
        {5, "sphere convergence", [] { return sphere_convergence(20.0 * 60.0); }},
        {6, "quadrature-order influence", [] { return quadrature_influence(30.0 * 60.0); }},
        {7, "1D kernel identity", [] { return kernel_identity(); }},
        {8, "1D adaptivity", [] { return adaptivity_1d(5.0 * 60.0); }},
        {9, "estimator identities", [] { return estimator_identities(); }},
        {10, "long-term stability", [] { return long_term_stability(30.0 * 60.0); }},
        {11, "time basis invariants", [] { return timebasis_properties(5.0); }},
    };
    std::set<int> selected;
    for (int a = 1; a < argc; ++a) selected.insert(std::stoi(argv[a]));
    int failures = 0;
    for (const auto& c : criteria) {
        if (!selected.empty() && !selected.count(c.id)) continue;
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail = std::string("exception: ") + e.what();
        }
        if (!o.pass) ++failures;
        std::printf("criterion %2d %s  %-36s %7.1f s  %s\n", c.id, o.pass ? "PASS" : "FAIL", c.name, seconds_since(start), o.detail.c_str());
        std::fflush(stdout);
    }
    return failures == 0 ? 0 : 1;
}
