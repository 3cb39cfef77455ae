#include "pumbem/experiments.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <memory>
#include <stdexcept>

#include "pumbem/estimator.hpp"
#include "pumbem/quadrature.hpp"
#include "pumbem/reference.hpp"

namespace pumbem {

using nlohmann::json;

// ---------------------------------------------------------------------------
// configuration

AssemblyOptions ExperimentConfig::assembly() const {
    AssemblyOptions o;
    o.orders.singular = n_sing;
    o.orders.near = n_near;
    o.orders.far = n_far;
    o.cells_per_window = cells;
    o.cheb_degree = q;
    return o;
}

void ExperimentConfig::validate() const {
    if (n_sing < 1 || n_near < 1 || n_far < 1) throw std::invalid_argument("config: quadrature orders must be >= 1");
    for (const auto& row : order_table)
        for (int n : row)
            if (n < 1) throw std::invalid_argument("config: quadrature orders must be >= 1");
    for (int n : reference_orders)
        if (n < 1) throw std::invalid_argument("config: quadrature orders must be >= 1");
    if (!(T > 0.0)) throw std::invalid_argument("config: T must be positive");
    if (steps < 1) throw std::invalid_argument("config: steps must be >= 1");
    for (int s : step_sweep)
        if (s < 1) throw std::invalid_argument("config: step_sweep entries must be >= 1");
    if (p < 0) throw std::invalid_argument("config: p must be >= 0");
    for (int d : degrees)
        if (d < 0) throw std::invalid_argument("config: degrees must be >= 0");
    if (cells < 1 || q < 1) throw std::invalid_argument("config: cells and q must be >= 1");
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("config: alpha must lie in (0, 1)");
    if (max_iter < 1) throw std::invalid_argument("config: max_iter must be >= 1");
    if (indicator_order < 1 || residual_order < 1) throw std::invalid_argument("config: orders must be >= 1");
    if (samples < 100) throw std::invalid_argument("config: samples must be >= 100");
    if (!(sample_step > 0.0)) throw std::invalid_argument("config: sample_step must be positive");
    if (threads < 1) throw std::invalid_argument("config: threads must be >= 1");
    if (mesh != "sphere" && mesh != "torus" && mesh != "file") throw std::invalid_argument("config: unknown mesh generator " + mesh);
    spatial_kind_from_string(spatial);
}

void to_json(json& j, const ExperimentConfig& c) {
    j = json{{"experiment", c.experiment},
             {"mesh", c.mesh},
             {"refinement", c.refinement},
             {"mesh_file", c.mesh_file},
             {"torus_major", c.torus_major},
             {"torus_minor", c.torus_minor},
             {"torus_n_major", c.torus_n_major},
             {"torus_n_minor", c.torus_n_minor},
             {"spatial", c.spatial},
             {"T", c.T},
             {"steps", c.steps},
             {"breakpoints", c.breakpoints},
             {"step_sweep", c.step_sweep},
             {"p", c.p},
             {"degrees", c.degrees},
             {"rhs", c.rhs},
             {"n_sing", c.n_sing},
             {"n_near", c.n_near},
             {"n_far", c.n_far},
             {"cells", c.cells},
             {"q", c.q},
             {"order_table", c.order_table},
             {"reference_orders", c.reference_orders},
             {"alpha", c.alpha},
             {"max_iter", c.max_iter},
             {"indicator_order", c.indicator_order},
             {"residual_order", c.residual_order},
             {"observation_points", c.observation_points},
             {"samples", c.samples},
             {"sample_step", c.sample_step},
             {"out", c.out},
             {"threads", c.threads}};
}

void from_json(const json& j, ExperimentConfig& c) {
    const json known = json(c);
    for (const auto& [key, value] : j.items())
        if (!known.contains(key)) throw std::invalid_argument("config: unknown key " + key);
    auto get = [&](const char* key, auto& field) {
        if (j.contains(key)) j.at(key).get_to(field);
    };
    get("experiment", c.experiment);
    get("mesh", c.mesh);
    get("refinement", c.refinement);
    get("mesh_file", c.mesh_file);
    get("torus_major", c.torus_major);
    get("torus_minor", c.torus_minor);
    get("torus_n_major", c.torus_n_major);
    get("torus_n_minor", c.torus_n_minor);
    get("spatial", c.spatial);
    get("T", c.T);
    get("steps", c.steps);
    get("breakpoints", c.breakpoints);
    get("step_sweep", c.step_sweep);
    get("p", c.p);
    get("degrees", c.degrees);
    get("rhs", c.rhs);
    get("n_sing", c.n_sing);
    get("n_near", c.n_near);
    get("n_far", c.n_far);
    get("cells", c.cells);
    get("q", c.q);
    get("order_table", c.order_table);
    get("reference_orders", c.reference_orders);
    get("alpha", c.alpha);
    get("max_iter", c.max_iter);
    get("indicator_order", c.indicator_order);
    get("residual_order", c.residual_order);
    get("observation_points", c.observation_points);
    get("samples", c.samples);
    get("sample_step", c.sample_step);
    get("out", c.out);
    get("threads", c.threads);
}

const std::vector<std::string>& experiment_names() {
    static const std::vector<std::string> names{"psi-table", "quad-cases", "converge", "quad-influence",
                                                "long-term", "torus",      "adapt-1d", "adapt-3d"};
    return names;
}

ExperimentConfig default_config(const std::string& experiment) {
    ExperimentConfig c;
    c.experiment = experiment;
    if (experiment == "psi-table") {
        c.breakpoints = {0.0, 2.0, 3.0, 4.5, 7.0};
        c.T = 7.0;
    } else if (experiment == "quad-cases") {
        c.steps = 20;  // reference order
    } else if (experiment == "converge") {
        c.refinement = 2;
        c.T = 1.0;
        c.step_sweep = {2, 4, 8, 16};
        c.degrees = {0, 1};
        c.rhs = "rhs1";
    } else if (experiment == "quad-influence") {
        c.refinement = 2;
        c.T = 5.0;
        c.steps = 20;
        c.p = 1;
        c.order_table = {{10, 8, 6}, {8, 6, 5}, {6, 5, 4}, {5, 4, 3}, {5, 3, 3}, {4, 3, 3}, {4, 3, 2}};
    } else if (experiment == "long-term") {
        c.refinement = 1;
        c.T = 40.0;
        c.steps = 120;
        c.p = 1;
    } else if (experiment == "torus") {
        c.mesh = "torus";
        c.T = 12.0;
        c.steps = 48;
        c.p = 1;
        c.observation_points = {{0.0, 0.0, 0.0}, {-2.0, 0.0, 0.0}, {0.0, 0.0, 1.0}, {0.0, -2.0, 0.0}};
    } else if (experiment == "adapt-1d") {
        c.steps = 4;
        c.p = 1;
        c.max_iter = 10;
    } else if (experiment == "adapt-3d") {
        c.refinement = 1;
        c.T = 25.0;
        c.steps = 5;
        c.p = 1;
        c.max_iter = 6;
        c.residual_order = 8;
        c.observation_points = {{-1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}, {1.0, 0.0, 0.0}};
    } else {
        throw std::invalid_argument("unknown experiment " + experiment);
    }
    return c;
}

SurfaceMesh build_mesh(const ExperimentConfig& c) {
    if (c.mesh == "sphere") return make_sphere(c.refinement);
    if (c.mesh == "torus") return make_torus(c.torus_major, c.torus_minor, c.torus_n_major, c.torus_n_minor);
    if (c.mesh == "file") return load_mesh(c.mesh_file);
    throw std::invalid_argument("unknown mesh generator " + c.mesh);
}

TimeGrid build_grid(const ExperimentConfig& c) {
    if (!c.breakpoints.empty()) return TimeGrid(c.breakpoints);
    return TimeGrid::uniform(c.T, c.steps);
}

// ---------------------------------------------------------------------------
// tables and output

void Table::add(std::vector<Cell> row) {
    if (row.size() != columns.size()) throw std::invalid_argument("Table: row width does not match the header");
    rows.push_back(std::move(row));
}

std::size_t Table::column(const std::string& name) const {
    const auto it = std::find(columns.begin(), columns.end(), name);
    if (it == columns.end()) throw std::out_of_range("Table: no column " + name);
    return static_cast<std::size_t>(it - columns.begin());
}

double Table::number(std::size_t row, const std::string& name) const {
    const Cell& c = rows.at(row).at(column(name));
    if (const auto* d = std::get_if<double>(&c)) return *d;
    if (const auto* i = std::get_if<long long>(&c)) return static_cast<double>(*i);
    throw std::invalid_argument("Table: column " + name + " is not numeric");
}

std::string Table::to_csv() const {
    std::string s;
    for (std::size_t c = 0; c < columns.size(); ++c) s += (c ? "," : "") + columns[c];
    s += '\n';
    char buf[64];
    for (const auto& row : rows) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (c) s += ',';
            if (const auto* d = std::get_if<double>(&row[c])) {
                std::snprintf(buf, sizeof buf, "%.12e", *d);
                s += buf;
            } else if (const auto* i = std::get_if<long long>(&row[c])) {
                s += std::to_string(*i);
            } else {
                s += std::get<std::string>(row[c]);
            }
        }
        s += '\n';
    }
    return s;
}

const Table& ExperimentResult::table(const std::string& name) const {
    for (const auto& [stem, t] : tables)
        if (stem == name) return t;
    throw std::out_of_range("ExperimentResult: no table " + name);
}

std::string git_blob_hash(const std::string& content) {
    const std::string header = "blob " + std::to_string(content.size()) + '\0';
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int length = 0;
    if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha1(), nullptr) != 1 ||
        EVP_DigestUpdate(ctx.get(), header.data(), header.size()) != 1 ||
        EVP_DigestUpdate(ctx.get(), content.data(), content.size()) != 1 || EVP_DigestFinal_ex(ctx.get(), digest, &length) != 1)
        throw std::runtime_error("git_blob_hash: digest failed");
    static const char* hex = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < length; ++i) {
        out += hex[digest[i] >> 4];
        out += hex[digest[i] & 15];
    }
    return out;
}

json write_outputs(const ExperimentResult& result, const ExperimentConfig& config, const std::string& directory) {
    namespace fs = std::filesystem;
    fs::create_directories(directory);
    json files = json::object();
    std::string listing;
    for (const auto& [stem, table] : result.tables) {
        const std::string name = stem + ".csv";
        const std::string csv = table.to_csv();
        std::ofstream out(fs::path(directory) / name, std::ios::binary);
        if (!(out << csv)) throw std::runtime_error("write_outputs: cannot write " + name);
        const std::string hash = git_blob_hash(csv);
        files[name] = hash;
        listing += hash + ' ' + name + '\n';
    }
    json manifest{{"config", config}, {"summary", result.summary}, {"files", files}, {"content_hash", git_blob_hash(listing)}};
    std::ofstream out(fs::path(directory) / "manifest.json");
    if (!(out << manifest.dump(2) << '\n')) throw std::runtime_error("write_outputs: cannot write manifest.json");
    return manifest;
}

// ---------------------------------------------------------------------------

namespace {

Point3 to_point(const std::array<double, 3>& a) { return {a[0], a[1], a[2]}; }

std::size_t nearest_dof(const SpatialBasis& spatial, const Point3& x) {
    std::size_t best = 0;
    double d = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < spatial.size(); ++j) {
        const double e = (spatial.dof_point(j) - x).norm();
        if (e < d) {
            d = e;
            best = j;
        }
    }
    return best;
}

// nearest mesh vertex, so that the point lies on the surface
Point3 snap_to_vertex(const SurfaceMesh& mesh, const Point3& x) {
    std::size_t best = 0;
    double d = std::numeric_limits<double>::infinity();
    for (std::size_t v = 0; v < mesh.vertex_count(); ++v) {
        const double e = (mesh.vertex(v) - x).norm();
        if (e < d) {
            d = e;
            best = v;
        }
    }
    return mesh.vertex(best);
}

GalerkinSolution solve_problem(const SurfaceMesh& mesh, const SpatialBasis& spatial, const TemporalBasis& basis,
                               BlockSystem& system, const SpaceTimeFunction& g_dot) {
    system.rhs = assemble_rhs(mesh, spatial, basis, g_dot);
    return solve(system, basis, mesh, spatial);
}

json grid_json(const TimeGrid& g) { return json(g.breakpoints()); }

}  // namespace

// ---------------------------------------------------------------------------

ExperimentResult psi_table(const ExperimentConfig& c) {
    c.validate();
    const TemporalBasis basis(build_grid(c), PolyDegree(3));
    const std::size_t b1 = basis.index_of(2, 0), b2 = basis.index_of(4, 0);
    const std::size_t b3 = basis.index_of(2, 3), b4 = basis.index_of(4, 2);
    static const int rows[8][2] = {{1, 100}, {2, 50}, {4, 25}, {5, 20}, {10, 10}, {20, 5}, {25, 4}, {50, 2}};
    Table t{{"m", "q", "sup_error_psi1", "sup_error_psi2", "evaluations_psi1", "evaluations_psi2"}, {}};
    for (const auto& r : rows) {
        long long calls[2] = {0, 0};
        double err[2];
        const std::pair<std::size_t, std::size_t> kernels[2] = {{b2, b1}, {b4, b3}};
        for (int k = 0; k < 2; ++k) {
            const auto [test, trial] = kernels[k];
            const auto s = psi_support(basis[test], basis[trial]);
            auto f = [&, test = test, trial = trial](double x) {
                ++calls[k];
                return psi_exact(basis, test, trial, x);
            };
            const auto sur = fit_surrogate(f, s.lo, s.hi, r[0], r[1]);
            err[k] = sup_error(sur, basis, test, trial, c.samples);
        }
        t.add({static_cast<long long>(r[0]), static_cast<long long>(r[1]), err[0], err[1], calls[0], calls[1]});
    }
    ExperimentResult res;
    res.tables.emplace_back("psi_table", std::move(t));
    const auto s = psi_support(basis[b2], basis[b1]);
    res.summary["support_psi1"] = {s.lo, s.hi};
    return res;
}

// ---------------------------------------------------------------------------

namespace {

struct QuadCase {
    int id;
    std::vector<Point3> vertices;
    std::vector<Triangle> triangles;
    std::vector<double> grid;
    int test_start;  ///< j in psi_{t_0}^{t_j}
    std::size_t t1, t2;
};

std::vector<QuadCase> quad_case_fixtures(bool verbatim_far = false) {
    const Point3 a(0, 0, 0), b(1, 0, 0), c(1, 1, 0);
    std::vector<QuadCase> cases;
    cases.push_back({1, {a, b, c}, {{0, 1, 2}}, {0.0, 1.2, 2.0, 2.9}, 1, 0, 0});
    cases.push_back({2, {a, b, c, Point3(1, -1, 0.5)}, {{0, 1, 2}, {0, 1, 3}}, {0.0, 1.1, 2.1, 2.9, 4.0, 5.0}, 3, 0, 1});
    auto shifted = [&](int id, const Point3& s, std::vector<double> grid) {
        cases.push_back({id, {a, b, c, Point3(1, 0, 0) + s, Point3(1, 0.9, 0) + s, Point3(0, 1, 0.2) + s}, {{0, 1, 2}, {3, 4, 5}},
                         std::move(grid), 3, 0, 1});
    };
    shifted(3, Point3(2, 2, 2), {0.0, 1.2, 2.1, 3.9, 5.1, 6.0});
    // the far pair moved by (20, 20, 20) lies beyond the kernel support [28.4, 32.6];
    // (20, 20, 0) puts its distances across the lower end of the support
    shifted(4, Point3(20, 20, 0), {0.0, 1.2, 2.1, 30.5, 31.6, 32.6});
    if (verbatim_far) cases.back().vertices = {a, b, c, Point3(21, 20, 20), Point3(21, 20.9, 20), Point3(20, 21, 20.2)};
    return cases;
}

}  // namespace

ExperimentResult quad_cases(const ExperimentConfig& c) {
    c.validate();
    const int reference = c.steps;
    Table t{{"case", "n", "value", "abs_error", "rel_error"}, {}};
    ExperimentResult res;
    for (const auto& qc : quad_case_fixtures()) {
        const SurfaceMesh mesh(qc.vertices, qc.triangles);
        const TemporalBasis basis(TimeGrid(qc.grid), PolyDegree(1));
        // b_{t_i} = rho_{t_i, t_{i+1}, t_{i+2}} P_1 is built from mu_{i+2}
        const std::size_t trial = basis.index_of(2, 1), test = basis.index_of(qc.test_start + 2, 1);
        const auto support = psi_support(basis[test], basis[trial]);
        const double lo = std::max(0.0, support.lo);
        const auto kernel = fit_surrogate(basis, test, trial, 60, 24);
        const double kernel_error = sup_error(kernel, basis, test, trial, c.samples);
        auto psi = [&](double r) { return kernel(r); };
        auto one = [](const RegularizedIntegrand::Sample&) { return 1.0; };
        const double ref = panel_pair_integral(mesh, qc.t1, qc.t2, psi, one, reference);
        for (int n = 2; n <= 16; ++n) {
            const double v = panel_pair_integral(mesh, qc.t1, qc.t2, psi, one, n);
            t.add({static_cast<long long>(qc.id), static_cast<long long>(n), v, std::abs(v - ref), std::abs(v - ref) / std::abs(ref)});
        }
        const auto pair = classify_pair(mesh, qc.t1, qc.t2);
        const std::string key = "case" + std::to_string(qc.id);
        res.summary[key] = {{"support", {lo, support.hi}},
                            {"reference", ref},
                            {"reference_order", reference},
                            {"pair", to_string(pair.kind)},
                            {"distance", pair.distance},
                            {"d_min", pair.d_min},
                            {"d_max", pair.d_max},
                            {"kernel_sup_error", kernel_error}};
    }
    {
        const auto far = quad_case_fixtures(true).back();
        const SurfaceMesh mesh(far.vertices, far.triangles);
        const auto pair = classify_pair(mesh, far.t1, far.t2);
        res.summary["case4_verbatim"] = {{"d_min", pair.d_min}, {"d_max", pair.d_max}, {"support", {28.4, 32.6}}};
    }
    res.tables.emplace_back("quad_cases", std::move(t));
    return res;
}

// ---------------------------------------------------------------------------

namespace {

struct SphereData {
    std::function<double(double)> g_dot;
    std::function<double(double)> exact_time;
    std::function<double(const Point3&)> Y;
};

SphereData sphere_data(const std::string& rhs) {
    if (rhs == "rhs1") {
        auto s = signals::smooth_pulse();
        return {s.g_dot, [g = s.g_dot](double t) { return exact_phi_n0(g, t); }, [](const Point3&) { return 1.0; }};
    }
    if (rhs == "rhs2") {
        auto s = signals::harmonic_pulse();
        return {s.g_dot, [g = s.g_dot](double t) { return exact_phi_n1(g, t); }, [](const Point3& x) { return y10(x); }};
    }
    throw std::invalid_argument("unknown right-hand side " + rhs);
}

}  // namespace

ExperimentResult converge(const ExperimentConfig& c) {
    c.validate();
    const auto mesh = build_mesh(c);
    const SpatialBasis spatial(mesh, spatial_kind_from_string(c.spatial));
    const std::vector<int> sweep = c.step_sweep.empty() ? std::vector<int>{c.steps} : c.step_sweep;
    const std::vector<int> degrees = c.degrees.empty() ? std::vector<int>{c.p} : c.degrees;
    const std::vector<std::string> rhs_names = c.rhs == "both" ? std::vector<std::string>{"rhs1", "rhs2"} : std::vector<std::string>{c.rhs};

    std::vector<TimeGrid> grids;
    for (int s : sweep) grids.push_back(TimeGrid::uniform(c.T, s));
    const TimeGrid fine_grid = common_refinement(grids);

    Table t{{"rhs", "p", "steps", "dt", "dof_time", "err", "err_rel", "relative_residual"}, {}};
    for (int p : degrees) {
        std::vector<TemporalBasis> bases;
        for (const auto& g : grids) bases.emplace_back(g, PolyDegree(p));
        bases.emplace_back(fine_grid, PolyDegree(p));
        auto systems = assemble_matrices(mesh, spatial, bases, c.assembly());
        const TemporalBasis& fine = bases.back();
        for (const auto& name : rhs_names) {
            const auto data = sphere_data(name);
            const Coefficients exact = project_exact(mesh, spatial, fine, data.exact_time, data.Y);
            auto g_dot = [&](const Point3& x, double tt) { return data.g_dot(tt) * data.Y(x); };
            for (std::size_t k = 0; k < grids.size(); ++k) {
                const auto sol = solve_problem(mesh, spatial, bases[k], systems[k], g_dot);
                const auto e = energy_error(systems.back(), refit_to_fine(sol, fine), exact);
                t.add({name, static_cast<long long>(p), static_cast<long long>(sweep[k]), c.T / sweep[k],
                       static_cast<long long>(bases[k].size()), e.err, e.err_rel, sol.relative_residual});
            }
        }
    }
    ExperimentResult res;
    res.tables.emplace_back("converge", std::move(t));
    res.summary["triangles"] = mesh.triangle_count();
    res.summary["space_dof"] = spatial.size();
    res.summary["fine_grid_steps"] = fine_grid.size() - 1;
    return res;
}

// ---------------------------------------------------------------------------

ExperimentResult quad_influence(const ExperimentConfig& c) {
    c.validate();
    const auto mesh = build_mesh(c);
    const SpatialBasis spatial(mesh, spatial_kind_from_string(c.spatial));
    const TemporalBasis basis(build_grid(c), PolyDegree(c.p));
    const SpaceTimeFunction g_dot = plane_bump_dot;
    const Eigen::VectorXd rhs = assemble_rhs(mesh, spatial, basis, g_dot);

    auto run = [&](const std::array<int, 3>& orders, BlockSystem* keep) {
        ExperimentConfig o = c;
        o.n_sing = orders[0];
        o.n_near = orders[1];
        o.n_far = orders[2];
        BlockSystem system = assemble_matrix(mesh, spatial, basis, o.assembly());
        system.rhs = rhs;
        auto sol = solve(system, basis, mesh, spatial);
        if (keep) *keep = std::move(system);
        return sol;
    };
    BlockSystem reference_system;
    const auto high = run(c.reference_orders, &reference_system);
    const Eigen::MatrixXd gram = temporal_gram(basis);
    const Eigen::MatrixXd mass = spatial_mass(mesh, spatial);
    const double high_l2 = l2_norm(high.coefficients, gram, mass);

    Table t{{"n_sing", "n_near", "n_far", "err_rel", "l2_rel", "relative_residual"}, {}};
    for (const auto& row : c.order_table) {
        const auto sol = run(row, nullptr);
        const auto e = energy_error(reference_system, sol.coefficients, high.coefficients);
        const Coefficients diff = sol.coefficients - high.coefficients;
        t.add({static_cast<long long>(row[0]), static_cast<long long>(row[1]), static_cast<long long>(row[2]), e.err_rel,
               l2_norm(diff, gram, mass) / high_l2, sol.relative_residual});
    }
    ExperimentResult res;
    res.tables.emplace_back("quad_influence", std::move(t));
    res.summary["triangles"] = mesh.triangle_count();
    res.summary["space_dof"] = spatial.size();
    res.summary["time_dof"] = basis.size();
    res.summary["reference_orders"] = c.reference_orders;
    return res;
}

// ---------------------------------------------------------------------------

ExperimentResult long_term(const ExperimentConfig& c) {
    c.validate();
    const auto mesh = build_mesh(c);
    const SpatialBasis spatial(mesh, spatial_kind_from_string(c.spatial));
    const TemporalBasis basis(build_grid(c), PolyDegree(c.p));
    const auto signal = c.rhs == "zero" ? signals::zero() : signals::long_pulse();
    BlockSystem system = assemble_matrix(mesh, spatial, basis, c.assembly());
    const auto sol = solve_problem(mesh, spatial, basis, system, [&](const Point3&, double t) { return signal.g_dot(t); });

    const std::size_t dof = nearest_dof(spatial, Point3(1.0, 0.0, 0.0));
    Table t{{"t", "phi", "phi_exact"}, {}};
    double exact_max = 0.0, tail_max = 0.0, w1 = 0.0, w2 = 0.0, global_max = 0.0;
    const auto T = basis.grid().horizon();
    const auto count = static_cast<long long>(std::llround(T / c.sample_step));
    for (long long s = 0; s <= count; ++s) {
        const double tt = T * static_cast<double>(s) / static_cast<double>(count);
        const double v = sol.time_trace(dof, tt), e = exact_phi_n0(signal.g_dot, tt);
        t.add({tt, v, e});
        exact_max = std::max(exact_max, std::abs(e));
        global_max = std::max(global_max, std::abs(v));
        if (tt >= 0.5 * T) tail_max = std::max(tail_max, std::abs(v));
        if (tt >= T - 20.0 && tt < T - 10.0) w1 = std::max(w1, std::abs(v));
        if (tt >= T - 10.0) w2 = std::max(w2, std::abs(v));
    }
    ExperimentResult res;
    res.tables.emplace_back("long_term", std::move(t));
    res.summary["dof_point"] = {spatial.dof_point(dof).x(), spatial.dof_point(dof).y(), spatial.dof_point(dof).z()};
    res.summary["exact_max"] = exact_max;
    res.summary["solution_max"] = global_max;
    res.summary["tail_max"] = tail_max;
    res.summary["window_max_before_last"] = w1;
    res.summary["window_max_last"] = w2;
    res.summary["coefficient_norm"] = sol.coefficients.norm();
    res.summary["relative_residual"] = sol.relative_residual;
    res.summary["time_dof"] = basis.size();
    res.summary["space_dof"] = spatial.size();
    return res;
}

// ---------------------------------------------------------------------------

ExperimentResult torus(const ExperimentConfig& c) {
    c.validate();
    const auto mesh = build_mesh(c);
    const SpatialBasis spatial(mesh, spatial_kind_from_string(c.spatial));
    const TemporalBasis basis(build_grid(c), PolyDegree(c.p));
    BlockSystem system = assemble_matrix(mesh, spatial, basis, c.assembly());
    const auto sol = solve_problem(mesh, spatial, basis, system, [](const Point3& x, double t) { return -incident_pulse_dot(x, t); });

    std::vector<RetardedPotential> fields;
    std::vector<std::string> columns{"t"};
    for (std::size_t k = 0; k < c.observation_points.size(); ++k) {
        fields.emplace_back(mesh, spatial, to_point(c.observation_points[k]), c.n_far);
        columns.push_back("u_P" + std::to_string(k + 1));
    }
    Table t{columns, {}};
    const double T = basis.grid().horizon();
    const auto count = static_cast<long long>(std::llround(T / c.sample_step));
    std::vector<double> peak(fields.size(), 0.0), early(fields.size(), 0.0), late(fields.size(), 0.0);
    for (long long s = 0; s <= count; ++s) {
        const double tt = T * static_cast<double>(s) / static_cast<double>(count);
        std::vector<Cell> row{tt};
        for (std::size_t k = 0; k < fields.size(); ++k) {
            const double u = fields[k].value(sol, tt);
            row.emplace_back(u);
            peak[k] = std::max(peak[k], std::abs(u));
            if (tt < 2.0) early[k] = std::max(early[k], std::abs(u));
            if (tt > 10.0) late[k] = std::max(late[k], std::abs(u));
        }
        t.add(std::move(row));
    }
    ExperimentResult res;
    res.tables.emplace_back("torus", std::move(t));
    res.summary["triangles"] = mesh.triangle_count();
    res.summary["relative_residual"] = sol.relative_residual;
    for (std::size_t k = 0; k < fields.size(); ++k)
        res.summary["P" + std::to_string(k + 1)] = {{"point", c.observation_points[k]},
                                                    {"min_distance", fields[k].min_distance()},
                                                    {"max", peak[k]},
                                                    {"max_before_2", early[k]},
                                                    {"max_after_10", late[k]}};
    return res;
}

// ---------------------------------------------------------------------------

ExperimentResult adapt_1d(const ExperimentConfig& c) {
    c.validate();
    struct Run {
        TimeSignal signal;
        double T;
    };
    const std::vector<Run> runs{{signals::root_pulse(), 1.0}, {signals::oscillating_pulse(), 4.0}};
    Table errors{{"signal", "iteration", "breakpoints", "dof", "err_adaptive", "err_uniform"}, {}};
    Table grids{{"signal", "iteration", "t"}, {}};
    Table etas{{"signal", "iteration", "window", "eta", "marked"}, {}};
    ExperimentResult res;
    const PolyDegree p(c.p);
    for (std::size_t r = 0; r < runs.size(); ++r) {
        const auto& run = runs[r];
        Adaptive1D problem(run.signal, p);
        AdaptOptions o;
        o.alpha = c.alpha;
        o.max_iter = c.max_iter;
        o.order = c.indicator_order;
        auto exact = [&](double t) { return exact_phi_n0(run.signal.g_dot, t); };
        const auto label = static_cast<long long>(r + 1);
        long long k = 0;
        adapt_loop(problem, TimeGrid::uniform(run.T, c.steps), o, [&](const AdaptIteration& it) {
            const TimeGrid uniform = TimeGrid::uniform(run.T, static_cast<int>(it.grid.size()) - 1);
            const std::vector<TimeGrid> both{it.grid, uniform};
            const TemporalBasis fine(common_refinement(both), p);
            const double ea = error_1d(problem.solution(), exact, fine).err;
            const double eu = error_1d(solve_1d(uniform, p, run.signal.g_dot), exact, fine).err;
            errors.add({label, k, static_cast<long long>(it.grid.size()), static_cast<long long>(problem.solution().basis.size()), ea, eu});
            for (double t : it.grid.breakpoints()) grids.add({label, k, t});
            for (std::size_t w = 0; w < it.eta[0].size(); ++w) {
                const bool marked = std::find(it.marked[0].begin(), it.marked[0].end(), w) != it.marked[0].end();
                etas.add({label, k, static_cast<long long>(w), it.eta[0][w], static_cast<long long>(marked)});
            }
            ++k;
        });
        res.summary["signal" + std::to_string(r + 1)] = {{"name", run.signal.name}, {"T", run.T}};
    }
    res.tables.emplace_back("adapt_1d_errors", std::move(errors));
    res.tables.emplace_back("adapt_1d_grids", std::move(grids));
    res.tables.emplace_back("adapt_1d_indicators", std::move(etas));
    return res;
}

// ---------------------------------------------------------------------------

namespace {

class SphereProblem : public AdaptiveProblem {
public:
    SphereProblem(const SurfaceMesh& mesh, const SpatialBasis& spatial, PolyDegree p, SpaceTimeFunction g_dot,
                  const std::vector<Point3>& points, AssemblyOptions options, int residual_order)
        : mesh_(mesh), spatial_(spatial), p_(p), g_dot_(std::move(g_dot)), options_(options) {
        for (const auto& x : points) residuals_.emplace_back(mesh, spatial, x, g_dot_, residual_order);
    }
    void solve(const TimeGrid& grid) override {
        const TemporalBasis basis(grid, p_);
        BlockSystem system = assemble_matrix(mesh_, spatial_, basis, options_);
        solution_ = solve_problem(mesh_, spatial_, basis, system, g_dot_);
    }
    std::size_t observation_count() const override { return residuals_.size(); }
    double residual(std::size_t x, double t) const override { return residuals_[x](solution_, t); }
    const GalerkinSolution& solution() const noexcept { return solution_; }

private:
    const SurfaceMesh& mesh_;
    const SpatialBasis& spatial_;
    PolyDegree p_;
    SpaceTimeFunction g_dot_;
    AssemblyOptions options_;
    std::vector<LayerResidual> residuals_;
    GalerkinSolution solution_;
};

}  // namespace

ExperimentResult adapt_3d(const ExperimentConfig& c) {
    c.validate();
    const auto mesh = build_mesh(c);
    const SpatialBasis spatial(mesh, spatial_kind_from_string(c.spatial));
    std::vector<Point3> points;
    for (const auto& a : c.observation_points) points.push_back(snap_to_vertex(mesh, to_point(a)));
    const SpaceTimeFunction g_dot = heaviside_front_dot;
    SphereProblem problem(mesh, spatial, PolyDegree(c.p), g_dot, points, c.assembly(), c.residual_order);

    AdaptOptions o;
    o.alpha = c.alpha;
    o.max_iter = c.max_iter;
    o.order = c.indicator_order;
    Table grids{{"iteration", "t"}, {}};
    Table etas{{"iteration", "point", "window", "eta", "marked"}, {}};
    long long iteration = 0;
    const auto state = adapt_loop(problem, build_grid(c), o, [&](const AdaptIteration& it) {
        for (double t : it.grid.breakpoints()) grids.add({iteration, t});
        for (std::size_t x = 0; x < it.eta.size(); ++x)
            for (std::size_t w = 0; w < it.eta[x].size(); ++w) {
                const bool marked = std::find(it.marked[x].begin(), it.marked[x].end(), w) != it.marked[x].end();
                etas.add({iteration, static_cast<long long>(x), static_cast<long long>(w), it.eta[x][w], static_cast<long long>(marked)});
            }
        ++iteration;
    });

    const TimeGrid& final_grid = state.grid();
    const TimeGrid uniform_grid = TimeGrid::uniform(final_grid.horizon(), static_cast<int>(final_grid.size()) - 1);
    SphereProblem uniform(mesh, spatial, PolyDegree(c.p), g_dot, {}, c.assembly(), c.residual_order);
    uniform.solve(uniform_grid);

    const std::size_t minus = nearest_dof(spatial, Point3(-1.0, 0.0, 0.0)), plus = nearest_dof(spatial, Point3(1.0, 0.0, 0.0));
    Table traces{{"t", "adaptive_minus", "adaptive_plus", "uniform_minus", "uniform_plus"}, {}};
    const double T = final_grid.horizon();
    const auto count = static_cast<long long>(std::llround(T / c.sample_step));
    for (long long s = 0; s <= count; ++s) {
        const double t = T * static_cast<double>(s) / static_cast<double>(count);
        traces.add({t, problem.solution().time_trace(minus, t), problem.solution().time_trace(plus, t),
                    uniform.solution().time_trace(minus, t), uniform.solution().time_trace(plus, t)});
    }

    ExperimentResult res;
    res.tables.emplace_back("adapt_3d_grids", std::move(grids));
    res.tables.emplace_back("adapt_3d_indicators", std::move(etas));
    res.tables.emplace_back("adapt_3d_traces", std::move(traces));
    json pts = json::array();
    for (const auto& x : points) pts.push_back({x.x(), x.y(), x.z()});
    res.summary["observation_points"] = pts;
    res.summary["final_grid"] = grid_json(final_grid);
    res.summary["iterations"] = state.iterations.size();
    res.summary["triangles"] = mesh.triangle_count();
    return res;
}

// ---------------------------------------------------------------------------

ExperimentResult run_experiment(const ExperimentConfig& c) {
    const auto& e = c.experiment;
    if (e == "psi-table") return psi_table(c);
    if (e == "quad-cases") return quad_cases(c);
    if (e == "converge") return converge(c);
    if (e == "quad-influence") return quad_influence(c);
    if (e == "long-term") return long_term(c);
    if (e == "torus") return torus(c);
    if (e == "adapt-1d") return adapt_1d(c);
    if (e == "adapt-3d") return adapt_3d(c);
    throw std::invalid_argument("unknown experiment " + e);
}

}  // namespace pumbem
