#include "pumbem/galerkin.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <stdexcept>

#include "json.hpp"

#include "pumbem/quadrature.hpp"

namespace pumbem {

void QuadOrders::validate() const {
    if (singular < 1 || near < 1 || far < 1) throw std::invalid_argument("QuadOrders: all orders must be >= 1");
    if (!(admissibility > 0.0)) throw std::invalid_argument("QuadOrders: admissibility must be positive");
}

// ---------------------------------------------------------------------------
// BlockSystem

BlockSystem::BlockSystem(std::size_t time_size, std::size_t space_size)
    : rhs(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(time_size * space_size))),
      L_(time_size),
      M_(space_size),
      index_(time_size * time_size, -1) {}

int BlockSystem::add_block(Eigen::MatrixXd block) {
    return add_block(std::make_shared<const Eigen::MatrixXd>(std::move(block)));
}

int BlockSystem::add_block(std::shared_ptr<const Eigen::MatrixXd> block) {
    if (!block || block->rows() != static_cast<Eigen::Index>(M_) || block->cols() != static_cast<Eigen::Index>(M_))
        throw std::invalid_argument("BlockSystem: block must be M x M");
    blocks_.push_back(std::move(block));
    return static_cast<int>(blocks_.size()) - 1;
}

void BlockSystem::set_block(std::size_t k, std::size_t i, int id) {
    if (k >= L_ || i >= L_) throw std::out_of_range("BlockSystem: block index");
    if (id < -1 || id >= static_cast<int>(blocks_.size())) throw std::out_of_range("BlockSystem: block id");
    index_[k * L_ + i] = id;
}

Eigen::MatrixXd BlockSystem::block(std::size_t k, std::size_t i) const {
    const int id = block_id(k, i);
    if (id < 0) return Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(M_), static_cast<Eigen::Index>(M_));
    return stored(id);
}

Eigen::MatrixXd BlockSystem::dense() const {
    const auto M = static_cast<Eigen::Index>(M_);
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(size()), static_cast<Eigen::Index>(size()));
    for (std::size_t k = 0; k < L_; ++k)
        for (std::size_t i = 0; i < L_; ++i) {
            const int id = block_id(k, i);
            if (id >= 0) A.block(static_cast<Eigen::Index>(k) * M, static_cast<Eigen::Index>(i) * M, M, M) = stored(id);
        }
    return A;
}

Eigen::VectorXd BlockSystem::apply(const Eigen::VectorXd& v) const {
    if (v.size() != static_cast<Eigen::Index>(size())) throw std::invalid_argument("BlockSystem::apply: size mismatch");
    const auto M = static_cast<Eigen::Index>(M_);
    Eigen::VectorXd y = Eigen::VectorXd::Zero(v.size());
    for (std::size_t k = 0; k < L_; ++k)
        for (std::size_t i = 0; i < L_; ++i) {
            const int id = block_id(k, i);
            if (id >= 0) y.segment(static_cast<Eigen::Index>(k) * M, M).noalias() += stored(id) * v.segment(static_cast<Eigen::Index>(i) * M, M);
        }
    return y;
}

double BlockSystem::quadratic_form(const Eigen::VectorXd& v) const { return v.dot(apply(v)); }

double BlockSystem::norm() const {
    std::vector<double> sq(blocks_.size());
    for (std::size_t b = 0; b < blocks_.size(); ++b) sq[b] = blocks_[b]->squaredNorm();
    double s = 0.0;
    for (int id : index_)
        if (id >= 0) s += sq[static_cast<std::size_t>(id)];
    return std::sqrt(s);
}

// ---------------------------------------------------------------------------
// assembly

namespace {

// psi depends only on the shapes of both functions and their relative offset
struct PsiKey {
    std::array<std::int64_t, 10> v{};
    auto operator<=>(const PsiKey&) const = default;
};

PsiKey make_key(const BasisFunction& test, const BasisFunction& trial) {
    const double origin = trial.min();
    auto quantize = [](double x) { return static_cast<std::int64_t>(std::llround(x * 1e9)); };
    PsiKey key;
    int n = 0;
    for (const BasisFunction* b : {&test, &trial}) {
        key.v[n++] = static_cast<int>(b->kind) * 1000 + b->degree * 2 + (b->plain ? 1 : 0);
        key.v[n++] = b->knot_count;
        for (int j = 0; j < 3; ++j) key.v[n++] = j < b->knot_count ? quantize(b->knots[j] - origin) : 0;
    }
    return key;
}

struct KernelEntry {
    BasisFunction test, trial;
    CellSurrogate surrogate;
    int first = 0, last = -1;
    std::shared_ptr<Eigen::MatrixXd> spatial;
};

double mesh_span(const SurfaceMesh& mesh) {
    double d = 0.0;
    const auto& v = mesh.vertices();
    for (std::size_t a = 0; a < v.size(); ++a)
        for (std::size_t b = a + 1; b < v.size(); ++b) d = std::max(d, (v[a] - v[b]).squaredNorm());
    return std::sqrt(d);
}

}  // namespace

std::vector<BlockSystem> assemble_matrices(const SurfaceMesh& mesh, const SpatialBasis& spatial,
                                           std::span<const TemporalBasis> bases, const AssemblyOptions& options) {
    options.orders.validate();
    if (options.cells_per_window < 1 || options.cheb_degree < 1 || options.psi_gauss < 1)
        throw std::invalid_argument("assemble: surrogate parameters must be >= 1");
    if (bases.empty()) return {};
    const auto M = static_cast<Eigen::Index>(spatial.size());
    const double span = mesh_span(mesh);
    double min_step = std::numeric_limits<double>::infinity();
    for (const auto& b : bases) min_step = std::min(min_step, b.grid().min_step());
    const double h = 4.0 * min_step / options.cells_per_window;
    const int q = options.cheb_degree;

    // distinct kernels whose support meets [0, span]
    std::map<PsiKey, int> key_index;
    std::vector<KernelEntry> kernels;
    std::vector<std::vector<int>> system_keys(bases.size());
    for (std::size_t s = 0; s < bases.size(); ++s) {
        const auto& basis = bases[s];
        const std::size_t L = basis.size();
        system_keys[s].assign(L * L, -1);
        for (std::size_t k = 0; k < L; ++k)
            for (std::size_t i = 0; i < L; ++i) {
                const Interval sup = psi_support(basis[k], basis[i]);
                if (!(sup.hi > 0.0) || sup.lo >= span) continue;
                const auto key = make_key(basis[k], basis[i]);
                auto [it, inserted] = key_index.try_emplace(key, static_cast<int>(kernels.size()));
                if (inserted) kernels.push_back({basis[k], basis[i], {}, 0, -1, nullptr});
                system_keys[s][k * L + i] = it->second;
            }
    }
    for (auto& e : kernels) {
        const Interval sup = psi_support(e.test, e.trial);
        const int n_gauss = options.psi_gauss;
        e.surrogate = CellSurrogate([&](double r) { return psi_exact(e.test, e.trial, r, n_gauss); }, std::max(sup.lo, 0.0),
                                    std::min(sup.hi, span), h, q);
        e.first = e.surrogate.first_cell();
        e.last = e.first + e.surrogate.cell_count() - 1;
        e.spatial = std::make_shared<Eigen::MatrixXd>(Eigen::MatrixXd::Zero(M, M));
    }

    const int nl = spatial.local_count();
    const int nab = nl * nl;
    std::vector<double> moments, cheb(static_cast<std::size_t>(q)), prod(static_cast<std::size_t>(nab)), acc(static_cast<std::size_t>(nab));
    std::vector<int> touched;
    const std::size_t N = mesh.triangle_count();
    for (std::size_t t1 = 0; t1 < N; ++t1)
        for (std::size_t t2 = t1; t2 < N; ++t2) {
            const auto pair = classify_pair(mesh, t1, t2);
            const int c0 = static_cast<int>(std::floor(pair.d_min / h));
            const int c1 = static_cast<int>(std::floor(pair.d_max / h));
            touched.clear();
            for (int e = 0; e < static_cast<int>(kernels.size()); ++e)
                if (kernels[e].first <= c1 && kernels[e].last >= c0) touched.push_back(e);
            if (touched.empty()) continue;

            int n = options.orders.singular;
            if (pair.kind == PairKind::Disjoint)
                n = near_far(pair, std::max(mesh.diameter(t1), mesh.diameter(t2)), options.orders.admissibility) == FieldRegion::Near
                        ? options.orders.near
                        : options.orders.far;

            const int nc = c1 - c0 + 1;
            moments.assign(static_cast<std::size_t>(nc) * q * nab, 0.0);
            const RegularizedIntegrand reg(mesh, pair, t1, t2);
            for (const auto& p : pair_rule(pair.kind, n)) {
                const auto smp = reg.at(p.xu, p.xv, p.yu, p.yv, p.weight);
                const double r = (smp.x - smp.y).norm();
                if (!(r > 0.0)) continue;
                const int c = std::clamp(static_cast<int>(std::floor(r / h)), c0, c1);
                const double x = 2.0 * (r - c * h) / h - 1.0;
                const double w = smp.jacobian / (4.0 * std::numbers::pi * r);
                const auto fx = spatial.shape_values(smp.x_bary);
                const auto fy = spatial.shape_values(smp.y_bary);
                for (int a = 0; a < nl; ++a)
                    for (int b = 0; b < nl; ++b) prod[a * nl + b] = w * fx[a] * fy[b];
                cheb[0] = 1.0;
                if (q > 1) cheb[1] = x;
                for (int v = 2; v < q; ++v) cheb[v] = 2.0 * x * cheb[v - 1] - cheb[v - 2];
                double* m = moments.data() + static_cast<std::size_t>(c - c0) * q * nab;
                for (int v = 0; v < q; ++v)
                    for (int ab = 0; ab < nab; ++ab) m[v * nab + ab] += cheb[v] * prod[ab];
            }

            for (int e : touched) {
                const auto& ker = kernels[e];
                std::fill(acc.begin(), acc.end(), 0.0);
                for (int c = std::max(c0, ker.first); c <= std::min(c1, ker.last); ++c) {
                    const double* coef = ker.surrogate.cell(c);
                    const double* m = moments.data() + static_cast<std::size_t>(c - c0) * q * nab;
                    for (int v = 0; v < q; ++v)
                        for (int ab = 0; ab < nab; ++ab) acc[ab] += coef[v] * m[v * nab + ab];
                }
                auto& S = *ker.spatial;
                for (int a = 0; a < nl; ++a)
                    for (int b = 0; b < nl; ++b) {
                        const int row = spatial.dof(t1, a), col = spatial.dof(t2, b);
                        S(row, col) += acc[a * nl + b];
                        if (t1 != t2) S(col, row) += acc[a * nl + b];
                    }
            }
        }

    std::vector<BlockSystem> systems;
    systems.reserve(bases.size());
    for (std::size_t s = 0; s < bases.size(); ++s) {
        const std::size_t L = bases[s].size();
        BlockSystem sys(L, spatial.size());
        std::map<int, int> local;
        for (std::size_t k = 0; k < L; ++k)
            for (std::size_t i = 0; i < L; ++i) {
                const int e = system_keys[s][k * L + i];
                if (e < 0) continue;
                auto it = local.find(e);
                if (it == local.end()) it = local.emplace(e, sys.add_block(std::shared_ptr<const Eigen::MatrixXd>(kernels[e].spatial))).first;
                sys.set_block(k, i, it->second);
            }
        systems.push_back(std::move(sys));
    }
    return systems;
}

BlockSystem assemble_matrix(const SurfaceMesh& mesh, const SpatialBasis& spatial, const TemporalBasis& basis,
                            const AssemblyOptions& options) {
    auto v = assemble_matrices(mesh, spatial, std::span<const TemporalBasis>(&basis, 1), options);
    return std::move(v.front());
}

Eigen::VectorXd assemble_rhs(const SurfaceMesh& mesh, const SpatialBasis& spatial, const TemporalBasis& basis,
                             const SpaceTimeFunction& g_dot, const RhsOptions& options) {
    const std::size_t M = spatial.size();
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(basis.size() * M));
    const auto& srule = triangle_rule(options.space_order);
    const auto& trule = cached_unit_rule(options.time_order);
    const auto& t = basis.grid().breakpoints();
    const int nl = spatial.local_count();
    for (std::size_t tri = 0; tri < mesh.triangle_count(); ++tri) {
        const auto c = mesh.corners(tri);
        const double area2 = 2.0 * mesh.area(tri);
        for (const auto& sp : srule) {
            const Point3 x = c[0] + sp.u * (c[1] - c[0]) + sp.v * (c[2] - c[0]);
            const auto shape = spatial.shape_values({1.0 - sp.u - sp.v, sp.u, sp.v});
            const double wx = sp.weight * area2;
            for (std::size_t j = 0; j + 1 < t.size(); ++j) {
                const double a = t[j], h = t[j + 1] - t[j];
                const auto active = basis.active_at(a + 0.5 * h);
                for (std::size_t qn = 0; qn < trule.order(); ++qn) {
                    const double tau = a + h * trule.nodes[qn];
                    const double gd = g_dot(x, tau);
                    if (gd == 0.0) continue;
                    const double wt = wx * h * trule.weights[qn] * gd;
                    for (int k : active) {
                        const double bk = basis.eval(static_cast<std::size_t>(k), tau) * wt;
                        for (int l = 0; l < nl; ++l)
                            rhs[static_cast<Eigen::Index>(static_cast<std::size_t>(k) * M + spatial.dof(tri, l))] += bk * shape[l];
                    }
                }
            }
        }
    }
    return rhs;
}

// ---------------------------------------------------------------------------
// solve

Eigen::VectorXd solve_flat(const BlockSystem& system, const Eigen::VectorXd& rhs, double* relative_residual) {
    if (rhs.size() != static_cast<Eigen::Index>(system.size())) throw std::invalid_argument("solve: rhs size mismatch");
    Eigen::MatrixXd A = system.dense();
    Eigen::PartialPivLU<Eigen::Ref<Eigen::MatrixXd>> lu(A);
    const double pivot = A.size() ? A.diagonal().cwiseAbs().minCoeff() : 0.0;
    if (!(pivot >= 1e-300)) throw std::runtime_error("solve: singular matrix (pivot " + std::to_string(pivot) + ")");
    Eigen::VectorXd x = lu.solve(rhs);
    if (relative_residual) {
        const double nr = rhs.norm();
        const double res = (system.apply(x) - rhs).norm();
        *relative_residual = nr > 0.0 ? res / nr : res;
    }
    return x;
}

GalerkinSolution solve(const BlockSystem& system, const TemporalBasis& basis, const SurfaceMesh& mesh, const SpatialBasis& spatial) {
    if (system.time_size() != basis.size() || system.space_size() != spatial.size())
        throw std::invalid_argument("solve: system does not match the discretization");
    GalerkinSolution sol;
    sol.basis = basis;
    sol.spatial_kind = spatial.kind();
    sol.mesh_checksum = mesh.checksum();
    const Eigen::VectorXd x = solve_flat(system, system.rhs, &sol.relative_residual);
    sol.coefficients = unflatten(x, basis.size(), spatial.size());
    return sol;
}

Coefficients unflatten(const Eigen::VectorXd& v, std::size_t time_size, std::size_t space_size) {
    if (v.size() != static_cast<Eigen::Index>(time_size * space_size)) throw std::invalid_argument("unflatten: size mismatch");
    return Eigen::Map<const Coefficients>(v.data(), static_cast<Eigen::Index>(time_size), static_cast<Eigen::Index>(space_size));
}

double GalerkinSolution::time_trace(std::size_t dof, double t) const {
    double s = 0.0;
    for (int i : basis.active_at(t)) s += coefficients(i, static_cast<Eigen::Index>(dof)) * basis.eval(static_cast<std::size_t>(i), t);
    return s;
}

std::string GalerkinSolution::to_json() const {
    nlohmann::json j;
    j["grid"] = basis.grid().breakpoints();
    j["p"] = basis.p();
    j["spatial_kind"] = to_string(spatial_kind);
    j["mesh_checksum"] = mesh_checksum;
    j["relative_residual"] = relative_residual;
    auto rows = nlohmann::json::array();
    for (Eigen::Index i = 0; i < coefficients.rows(); ++i) {
        std::vector<double> row(coefficients.cols());
        for (Eigen::Index c = 0; c < coefficients.cols(); ++c) row[static_cast<std::size_t>(c)] = coefficients(i, c);
        rows.push_back(row);
    }
    j["coefficients"] = rows;
    return j.dump();
}

// ---------------------------------------------------------------------------
// projections and error measures

Eigen::MatrixXd temporal_gram(const TemporalBasis& basis, int n) {
    return cross_gram(basis, basis, n);
}

Eigen::MatrixXd cross_gram(const TemporalBasis& rows, const TemporalBasis& cols, int n) {
    std::vector<double> pts = rows.grid().breakpoints();
    pts.insert(pts.end(), cols.grid().breakpoints().begin(), cols.grid().breakpoints().end());
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end(), [](double a, double b) { return std::abs(a - b) < 1e-12; }), pts.end());
    const double horizon = std::min(rows.grid().horizon(), cols.grid().horizon());
    const auto& rule = cached_unit_rule(n);
    Eigen::MatrixXd G = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t j = 0; j + 1 < pts.size(); ++j) {
        const double a = pts[j], h = pts[j + 1] - pts[j];
        if (a >= horizon) break;
        const double mid = a + 0.5 * h;
        const auto ra = rows.active_at(mid);
        const auto ca = cols.active_at(mid);
        for (std::size_t qn = 0; qn < rule.order(); ++qn) {
            const double t = a + h * rule.nodes[qn];
            const double w = h * rule.weights[qn];
            for (int r : ra) {
                const double br = rows.eval(static_cast<std::size_t>(r), t) * w;
                for (int c : ca) G(r, c) += br * cols.eval(static_cast<std::size_t>(c), t);
            }
        }
    }
    return G;
}

namespace {

Eigen::LLT<Eigen::MatrixXd> factor_gram(const Eigen::MatrixXd& G) {
    Eigen::LLT<Eigen::MatrixXd> llt(G);
    if (llt.info() != Eigen::Success) throw std::runtime_error("temporal Gram matrix is singular");
    return llt;
}

}  // namespace

Eigen::VectorXd project_time(const TemporalBasis& basis, const std::function<double(double)>& f, int n) {
    const auto& rule = cached_unit_rule(n);
    const auto& t = basis.grid().breakpoints();
    Eigen::VectorXd b = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(basis.size()));
    for (std::size_t j = 0; j + 1 < t.size(); ++j) {
        const double a = t[j], h = t[j + 1] - t[j];
        const auto act = basis.active_at(a + 0.5 * h);
        for (std::size_t qn = 0; qn < rule.order(); ++qn) {
            const double tau = a + h * rule.nodes[qn];
            const double fw = f(tau) * h * rule.weights[qn];
            for (int i : act) b[i] += fw * basis.eval(static_cast<std::size_t>(i), tau);
        }
    }
    return factor_gram(temporal_gram(basis, n)).solve(b);
}

Eigen::MatrixXd spatial_mass(const SurfaceMesh& mesh, const SpatialBasis& spatial) {
    const auto M = static_cast<Eigen::Index>(spatial.size());
    Eigen::MatrixXd mass = Eigen::MatrixXd::Zero(M, M);
    for (std::size_t t = 0; t < mesh.triangle_count(); ++t) {
        const double A = mesh.area(t);
        if (spatial.kind() == SpatialKind::P0) {
            mass(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(t)) += A;
            continue;
        }
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b) mass(spatial.dof(t, a), spatial.dof(t, b)) += A / 12.0 * (a == b ? 2.0 : 1.0);
    }
    return mass;
}

Eigen::VectorXd project_space(const SurfaceMesh&, const SpatialBasis& spatial, const std::function<double(const Point3&)>& Y) {
    Eigen::VectorXd c(static_cast<Eigen::Index>(spatial.size()));
    for (std::size_t j = 0; j < spatial.size(); ++j) {
        Point3 p = spatial.dof_point(j);
        if (spatial.kind() == SpatialKind::P0 && p.norm() > 0.0) p.normalize();
        c[static_cast<Eigen::Index>(j)] = Y(p);
    }
    return c;
}

Coefficients project_exact(const SurfaceMesh& mesh, const SpatialBasis& spatial, const TemporalBasis& fine,
                           const std::function<double(double)>& phi_time, const std::function<double(const Point3&)>& Y) {
    const Eigen::VectorXd ct = project_time(fine, phi_time);
    const Eigen::VectorXd cs = project_space(mesh, spatial, Y);
    return ct * cs.transpose();
}

Coefficients refit_to_fine(const Coefficients& coarse, const TemporalBasis& coarse_basis, const TemporalBasis& fine) {
    if (coarse.rows() != static_cast<Eigen::Index>(coarse_basis.size())) throw std::invalid_argument("refit_to_fine: size mismatch");
    const Eigen::MatrixXd C = cross_gram(fine, coarse_basis);
    const Eigen::MatrixXd rhs = C * coarse;
    return factor_gram(temporal_gram(fine)).solve(rhs);
}

Coefficients refit_to_fine(const GalerkinSolution& solution, const TemporalBasis& fine) {
    return refit_to_fine(solution.coefficients, solution.basis, fine);
}

EnergyError energy_error(const BlockSystem& fine_system, const Coefficients& approx, const Coefficients& exact) {
    if (approx.rows() != exact.rows() || approx.cols() != exact.cols() || static_cast<std::size_t>(approx.size()) != fine_system.size())
        throw std::invalid_argument("energy_error: coefficient arrays do not match the system");
    const Eigen::VectorXd d = flat(approx) - flat(exact);
    const Eigen::VectorXd c = flat(exact);
    const double norm = fine_system.norm();
    auto checked = [&](const Eigen::VectorXd& v, const char* what) {
        const double q = fine_system.quadratic_form(v);
        if (q < -1e-12 * norm * v.squaredNorm())
            throw std::runtime_error(std::string("energy_error: negative quadratic form for ") + what + " (" + std::to_string(q) + ")");
        return std::max(q, 0.0);
    };
    EnergyError e;
    e.err = std::sqrt(checked(d, "the error"));
    const double qc = checked(c, "the reference");
    e.err_rel = qc > 0.0 ? e.err / std::sqrt(qc) : (e.err == 0.0 ? 0.0 : std::numeric_limits<double>::infinity());
    return e;
}

double l2_norm(const Coefficients& c, const Eigen::MatrixXd& gram, const Eigen::MatrixXd& mass) {
    const Eigen::MatrixXd gm = gram * c * mass;
    return std::sqrt(std::max(0.0, gm.cwiseProduct(c).sum()));
}

// ---------------------------------------------------------------------------
// retarded potential at a point

RetardedPotential::RetardedPotential(const SurfaceMesh& mesh, const SpatialBasis& spatial, const Point3& x, int order, double touch_tol)
    : x_(x), min_r_(std::numeric_limits<double>::infinity()), local_(spatial.local_count()) {
    const auto& rule = triangle_rule(order);
    auto add = [&](std::size_t tri, const Point3& y, const std::array<double, 3>& bary, double weight) {
        const double r = (y - x_).norm();
        if (!(r > 1e-300)) return;
        r_.push_back(r);
        w_.push_back(weight / (4.0 * std::numbers::pi * r));
        const auto shape = spatial.shape_values(bary);
        for (int a = 0; a < local_; ++a) {
            dofs_.push_back(spatial.dof(tri, a));
            shape_.push_back(shape[a]);
        }
    };
    for (std::size_t tri = 0; tri < mesh.triangle_count(); ++tri) {
        const auto c = mesh.corners(tri);
        const double dist = point_triangle_distance(x_, c);
        min_r_ = std::min(min_r_, dist);
        if (dist > touch_tol) {
            const double a2 = 2.0 * mesh.area(tri);
            for (const auto& p : rule) add(tri, c[0] + p.u * (c[1] - c[0]) + p.v * (c[2] - c[0]), {1.0 - p.u - p.v, p.u, p.v}, p.weight * a2);
            continue;
        }
        // barycentric coordinates of the foot point, clamped into the panel
        const Point3 e1 = c[1] - c[0], e2 = c[2] - c[0];
        Eigen::Matrix2d G;
        G << e1.dot(e1), e1.dot(e2), e1.dot(e2), e2.dot(e2);
        const Eigen::Vector2d uv = G.ldlt().solve(Eigen::Vector2d(e1.dot(x_ - c[0]), e2.dot(x_ - c[0])));
        std::array<double, 3> apex{std::max(0.0, 1.0 - uv[0] - uv[1]), std::max(0.0, uv[0]), std::max(0.0, uv[1])};
        const double s = apex[0] + apex[1] + apex[2];
        for (auto& v : apex) v /= s;
        const Point3 foot = apex[0] * c[0] + apex[1] * c[1] + apex[2] * c[2];
        for (int e = 0; e < 3; ++e) {
            const int a = e, b = (e + 1) % 3;
            const double sub2 = (c[a] - foot).cross(c[b] - foot).norm();
            if (sub2 < 1e-14 * 2.0 * mesh.area(tri)) continue;
            for (const auto& p : rule) {
                std::array<double, 3> bary{};
                for (int k = 0; k < 3; ++k) bary[k] = (1.0 - p.u - p.v) * apex[k];
                bary[a] += p.u;
                bary[b] += p.v;
                add(tri, foot + p.u * (c[a] - foot) + p.v * (c[b] - foot), bary, p.weight * sub2);
            }
        }
    }
}

template <class Eval>
double RetardedPotential::sum(const GalerkinSolution& solution, double t, Eval&& eval) const {
    const auto& basis = solution.basis;
    const auto& alpha = solution.coefficients;
    double total = 0.0;
    for (std::size_t p = 0; p < r_.size(); ++p) {
        const double tau = t - r_[p];
        if (tau < 0.0) continue;
        const auto act = basis.active_at(tau);
        if (act.empty()) continue;
        double acc = 0.0;
        for (int i : act) {
            const double bi = eval(basis[static_cast<std::size_t>(i)], tau);
            if (bi == 0.0) continue;
            double sp = 0.0;
            for (int a = 0; a < local_; ++a) sp += shape_[p * local_ + a] * alpha(i, dofs_[p * local_ + a]);
            acc += bi * sp;
        }
        total += w_[p] * acc;
    }
    return total;
}

double RetardedPotential::value(const GalerkinSolution& solution, double t) const {
    return sum(solution, t, [](const BasisFunction& b, double tau) { return TemporalBasis::eval_function(b, tau); });
}

double RetardedPotential::derivative(const GalerkinSolution& solution, double t) const {
    if (solution.basis.p() == 0)
        throw std::domain_error("RetardedPotential: the time derivative of the p = 0 basis has a point mass");
    return sum(solution, t, [](const BasisFunction& b, double tau) { return TemporalBasis::eval_function_dot(b, tau); });
}

}  // namespace pumbem
