#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace pumbem {

using Point3 = Eigen::Vector3d;
using Triangle = std::array<int, 3>;

/// Flat-triangle surface. Immutable after construction.
class SurfaceMesh {
public:
    SurfaceMesh() = default;
    /// Throws std::invalid_argument on out-of-range indices, degenerate triangles
    /// (area <= 1e-12) or edges shared by more than two triangles.
    SurfaceMesh(std::vector<Point3> vertices, std::vector<Triangle> triangles);

    const std::vector<Point3>& vertices() const noexcept { return vertices_; }
    const std::vector<Triangle>& triangles() const noexcept { return triangles_; }
    std::size_t vertex_count() const noexcept { return vertices_.size(); }
    std::size_t triangle_count() const noexcept { return triangles_.size(); }
    std::size_t edge_count() const noexcept { return edge_count_; }

    const Point3& vertex(std::size_t v) const { return vertices_[v]; }
    const Triangle& triangle(std::size_t t) const { return triangles_[t]; }
    std::array<Point3, 3> corners(std::size_t t) const;

    double area(std::size_t t) const { return area_[t]; }
    double diameter(std::size_t t) const { return diameter_[t]; }
    Point3 centroid(std::size_t t) const;
    Point3 normal(std::size_t t) const;

    double total_area() const noexcept;
    double max_diameter() const noexcept;
    /// Bounding-box diagonal: an upper bound for every |x - y| on the surface.
    double extent() const noexcept { return extent_; }

    /// FNV-1a 64 bit hash of the OFF serialization.
    std::uint64_t checksum() const;

private:
    std::vector<Point3> vertices_;
    std::vector<Triangle> triangles_;
    std::vector<double> area_;
    std::vector<double> diameter_;
    std::size_t edge_count_ = 0;
    double extent_ = 0.0;
};

SurfaceMesh make_sphere(int refinement);
SurfaceMesh make_torus(double major_radius, double minor_radius, int n_major, int n_minor);

std::string to_off(const SurfaceMesh& mesh);
/// Throws std::runtime_error with the offending line number on malformed input.
SurfaceMesh parse_off(std::istream& in);
SurfaceMesh load_mesh(const std::string& path);
void save_mesh(const SurfaceMesh& mesh, const std::string& path);

enum class PairKind { Identical, CommonEdge, CommonVertex, Disjoint };

const char* to_string(PairKind kind) noexcept;

/// Relation of two panels. For shared-vertex classes `first` and `second` list the
/// local vertex indices with the shared ones first, in matching order.
struct PanelPairClass {
    PairKind kind = PairKind::Disjoint;
    int shared = 0;
    std::array<int, 3> first{0, 1, 2};
    std::array<int, 3> second{0, 1, 2};
    double distance = 0.0;  ///< min |x - y| (0 unless disjoint)
    double d_min = 0.0;
    double d_max = 0.0;
};

PanelPairClass classify_pair(const SurfaceMesh& mesh, std::size_t t1, std::size_t t2);

enum class FieldRegion { Near, Far };

/// Near if distance <= admissibility * max_diameter. Throws std::invalid_argument
/// for pairs that are not disjoint.
FieldRegion near_far(const PanelPairClass& pair, double max_diameter, double admissibility = 2.0);

/// Minimum distance between two closed triangles.
double triangle_distance(const std::array<Point3, 3>& a, const std::array<Point3, 3>& b);
/// Minimum distance from a point to a closed triangle.
double point_triangle_distance(const Point3& p, const std::array<Point3, 3>& tri);

enum class SpatialKind { P0, P1 };

const char* to_string(SpatialKind kind) noexcept;
SpatialKind spatial_kind_from_string(const std::string& name);

/// Piecewise constant (one dof per triangle) or continuous piecewise linear
/// (one dof per vertex) functions on a mesh.
class SpatialBasis {
public:
    SpatialBasis() = default;
    SpatialBasis(const SurfaceMesh& mesh, SpatialKind kind);

    SpatialKind kind() const noexcept { return kind_; }
    std::size_t size() const noexcept { return size_; }
    /// Local shape functions per triangle: 1 (P0) or 3 (P1).
    int local_count() const noexcept { return kind_ == SpatialKind::P0 ? 1 : 3; }
    /// Global dof of local shape a on triangle t.
    int dof(std::size_t t, int a) const { return kind_ == SpatialKind::P0 ? static_cast<int>(t) : triangles_[t][a]; }
    /// Local shape values at barycentric coordinates (weights of vertex 0, 1, 2).
    std::array<double, 3> shape_values(const std::array<double, 3>& bary) const noexcept {
        if (kind_ == SpatialKind::P0) return {1.0, 0.0, 0.0};
        return bary;
    }
    /// Centroid (P0) or vertex (P1) attached to dof j.
    const Point3& dof_point(std::size_t j) const { return points_[j]; }

private:
    SpatialKind kind_ = SpatialKind::P0;
    std::size_t size_ = 0;
    std::vector<Triangle> triangles_;
    std::vector<Point3> points_;
};

}  // namespace pumbem
