#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "pumbem/geometry.hpp"
#include "pumbem/psi.hpp"
#include "pumbem/timebasis.hpp"

namespace pumbem {

/// Per-class Gauss orders: singular (identical / edge / vertex pairs), near and far field.
struct QuadOrders {
    int singular = 10;
    int near = 8;
    int far = 6;
    double admissibility = 2.0;

    /// Throws std::invalid_argument unless all orders are >= 1.
    void validate() const;
};

struct AssemblyOptions {
    QuadOrders orders;
    int cells_per_window = 5;  ///< Chebyshev cells across 4 * (smallest time step)
    int cheb_degree = 20;      ///< coefficients per cell
    int psi_gauss = 40;        ///< Gauss points per piece in psi evaluations
};

/// Space-time coefficients: row i = temporal basis function, column j = spatial dof.
using Coefficients = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// L x L grid of M x M blocks. Blocks with the same kernel share one stored matrix;
/// the flattened index of (time i, space j) is i * M + j.
class BlockSystem {
public:
    BlockSystem() = default;
    BlockSystem(std::size_t time_size, std::size_t space_size);

    std::size_t time_size() const noexcept { return L_; }
    std::size_t space_size() const noexcept { return M_; }
    std::size_t size() const noexcept { return L_ * M_; }

    /// Stores a block and returns its id. Shared blocks are not copied.
    int add_block(Eigen::MatrixXd block);
    int add_block(std::shared_ptr<const Eigen::MatrixXd> block);
    void set_block(std::size_t k, std::size_t i, int id);
    /// -1 for blocks known to vanish.
    int block_id(std::size_t k, std::size_t i) const { return index_[k * L_ + i]; }
    std::size_t stored_blocks() const noexcept { return blocks_.size(); }
    Eigen::MatrixXd block(std::size_t k, std::size_t i) const;
    const Eigen::MatrixXd& stored(int id) const { return *blocks_[static_cast<std::size_t>(id)]; }

    Eigen::MatrixXd dense() const;
    Eigen::VectorXd apply(const Eigen::VectorXd& v) const;
    double quadratic_form(const Eigen::VectorXd& v) const;
    /// Frobenius norm of the full matrix.
    double norm() const;

    Eigen::VectorXd rhs;

private:
    std::size_t L_ = 0, M_ = 0;
    std::vector<std::shared_ptr<const Eigen::MatrixXd>> blocks_;
    std::vector<int> index_;
};

/// One assembly pass over all panel pairs, shared by several temporal bases on
/// the same spatial discretization.
std::vector<BlockSystem> assemble_matrices(const SurfaceMesh& mesh, const SpatialBasis& spatial,
                                           std::span<const TemporalBasis> bases, const AssemblyOptions& options = {});
BlockSystem assemble_matrix(const SurfaceMesh& mesh, const SpatialBasis& spatial, const TemporalBasis& basis,
                            const AssemblyOptions& options = {});

/// Time derivative of the Dirichlet data, g_dot(x, t).
using SpaceTimeFunction = std::function<double(const Point3&, double)>;

struct RhsOptions {
    int space_order = 6;  ///< collapsed Gauss order per triangle
    int time_order = 16;  ///< Gauss points per grid interval
};

/// g_k(l) = int int g_dot(x, t) b_k(t) phi_l(x), flattened like the coefficients.
Eigen::VectorXd assemble_rhs(const SurfaceMesh& mesh, const SpatialBasis& spatial, const TemporalBasis& basis,
                             const SpaceTimeFunction& g_dot, const RhsOptions& options = {});

struct GalerkinSolution {
    TemporalBasis basis;
    SpatialKind spatial_kind = SpatialKind::P0;
    Coefficients coefficients;
    double relative_residual = 0.0;
    std::uint64_t mesh_checksum = 0;

    /// phi_j(t) = sum_i alpha_i^j b_i(t).
    double time_trace(std::size_t dof, double t) const;
    std::string to_json() const;
};

/// Dense LU with partial pivoting of the flattened system. Throws std::runtime_error
/// on a pivot below 1e-300. The relative residual uses the block form.
GalerkinSolution solve(const BlockSystem& system, const TemporalBasis& basis, const SurfaceMesh& mesh,
                       const SpatialBasis& spatial);
/// Solve of the flattened system alone.
Eigen::VectorXd solve_flat(const BlockSystem& system, const Eigen::VectorXd& rhs, double* relative_residual = nullptr);

/// G_ab = int b_a b_b dt with n Gauss points per grid interval.
Eigen::MatrixXd temporal_gram(const TemporalBasis& basis, int n = 40);
/// C_ab = int row_a col_b dt, split at the breakpoints of both grids.
Eigen::MatrixXd cross_gram(const TemporalBasis& rows, const TemporalBasis& cols, int n = 40);
/// Coefficients of the best L2 approximation of f. Throws on a singular Gram matrix.
Eigen::VectorXd project_time(const TemporalBasis& basis, const std::function<double(double)>& f, int n = 40);

/// P0: triangle areas on the diagonal; P1: the usual linear mass matrix.
Eigen::MatrixXd spatial_mass(const SurfaceMesh& mesh, const SpatialBasis& spatial);

/// Spatial coefficients of a surface function: values at normalized centroids (P0)
/// or vertices (P1).
Eigen::VectorXd project_space(const SurfaceMesh& mesh, const SpatialBasis& spatial, const std::function<double(const Point3&)>& Y);

/// Coefficients c_i c_j of the separable function phi_time(t) Y(x) on the fine space.
Coefficients project_exact(const SurfaceMesh& mesh, const SpatialBasis& spatial, const TemporalBasis& fine,
                           const std::function<double(double)>& phi_time, const std::function<double(const Point3&)>& Y);

/// Per-dof temporal L2 projection of a solution onto `fine`.
Coefficients refit_to_fine(const GalerkinSolution& solution, const TemporalBasis& fine);
Coefficients refit_to_fine(const Coefficients& coarse, const TemporalBasis& coarse_basis, const TemporalBasis& fine);

struct EnergyError {
    double err = 0.0;
    double err_rel = 0.0;
};

/// err = sqrt((a - c)^T A (a - c)), err_rel = err / sqrt(c^T A c). Throws
/// std::runtime_error if a quadratic form is negative beyond 1e-12 * |A| * |v|^2.
EnergyError energy_error(const BlockSystem& fine_system, const Coefficients& approx, const Coefficients& exact);

/// sqrt of sum alpha_i^j alpha_k^l G_ik Mass_jl.
double l2_norm(const Coefficients& c, const Eigen::MatrixXd& gram, const Eigen::MatrixXd& mass);

inline Eigen::Map<const Eigen::VectorXd> flat(const Coefficients& c) { return {c.data(), c.size()}; }
Coefficients unflatten(const Eigen::VectorXd& v, std::size_t time_size, std::size_t space_size);

/// Quadrature of the retarded single layer potential at a fixed point x:
/// int phi_j(y) w(t - |x - y|) / (4 pi |x - y|) dy. Panels within `touch_tol` of x
/// are split into sub-triangles with apex x.
class RetardedPotential {
public:
    RetardedPotential(const SurfaceMesh& mesh, const SpatialBasis& spatial, const Point3& x, int order,
                      double touch_tol = 1e-8);

    /// sum alpha_i^j int phi_j(y) b_i(t - r) / (4 pi r)
    double value(const GalerkinSolution& solution, double t) const;
    /// Same with the classical time derivative of b_i.
    double derivative(const GalerkinSolution& solution, double t) const;

    const Point3& point() const noexcept { return x_; }
    double min_distance() const noexcept { return min_r_; }
    std::size_t node_count() const noexcept { return r_.size(); }

private:
    template <class Eval>
    double sum(const GalerkinSolution& solution, double t, Eval&& eval) const;

    Point3 x_;
    double min_r_ = 0.0;
    int local_ = 1;
    std::vector<double> r_;
    std::vector<double> w_;     // weight / (4 pi r)
    std::vector<int> dofs_;     // local_ per node
    std::vector<double> shape_; // local_ per node
};

}  // namespace pumbem
