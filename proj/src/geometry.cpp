#include "pumbem/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <utility>

namespace pumbem {

namespace {

double triangle_area(const Point3& a, const Point3& b, const Point3& c) { return 0.5 * (b - a).cross(c - a).norm(); }

}  // namespace

SurfaceMesh::SurfaceMesh(std::vector<Point3> vertices, std::vector<Triangle> triangles)
    : vertices_(std::move(vertices)), triangles_(std::move(triangles)) {
    const int nv = static_cast<int>(vertices_.size());
    std::map<std::pair<int, int>, int> edge_use;
    area_.reserve(triangles_.size());
    diameter_.reserve(triangles_.size());
    for (std::size_t t = 0; t < triangles_.size(); ++t) {
        const auto& tri = triangles_[t];
        for (int v : tri)
            if (v < 0 || v >= nv) throw std::invalid_argument("SurfaceMesh: triangle " + std::to_string(t) + " has an index out of range");
        if (tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2])
            throw std::invalid_argument("SurfaceMesh: triangle " + std::to_string(t) + " repeats a vertex");
        const Point3 &a = vertices_[tri[0]], &b = vertices_[tri[1]], &c = vertices_[tri[2]];
        const double area = triangle_area(a, b, c);
        if (!(area > 1e-12)) throw std::invalid_argument("SurfaceMesh: triangle " + std::to_string(t) + " is degenerate");
        area_.push_back(area);
        diameter_.push_back(std::max({(a - b).norm(), (b - c).norm(), (a - c).norm()}));
        for (int e = 0; e < 3; ++e) {
            auto key = std::minmax(tri[e], tri[(e + 1) % 3]);
            if (++edge_use[{key.first, key.second}] > 2)
                throw std::invalid_argument("SurfaceMesh: edge shared by more than two triangles at triangle " + std::to_string(t));
        }
    }
    edge_count_ = edge_use.size();

    if (!vertices_.empty()) {
        Point3 lo = vertices_[0], hi = vertices_[0];
        for (const auto& v : vertices_) {
            lo = lo.cwiseMin(v);
            hi = hi.cwiseMax(v);
        }
        extent_ = (hi - lo).norm();
    }
}

std::array<Point3, 3> SurfaceMesh::corners(std::size_t t) const {
    const auto& tri = triangles_[t];
    return {vertices_[tri[0]], vertices_[tri[1]], vertices_[tri[2]]};
}

Point3 SurfaceMesh::centroid(std::size_t t) const {
    const auto c = corners(t);
    return (c[0] + c[1] + c[2]) / 3.0;
}

Point3 SurfaceMesh::normal(std::size_t t) const {
    const auto c = corners(t);
    return (c[1] - c[0]).cross(c[2] - c[0]).normalized();
}

double SurfaceMesh::total_area() const noexcept {
    double s = 0.0;
    for (double a : area_) s += a;
    return s;
}

double SurfaceMesh::max_diameter() const noexcept {
    double d = 0.0;
    for (double x : diameter_) d = std::max(d, x);
    return d;
}

std::uint64_t SurfaceMesh::checksum() const {
    const std::string text = to_off(*this);
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 1099511628211ULL;
    }
    return h;
}

// ---------------------------------------------------------------------------
// generators

SurfaceMesh make_sphere(int refinement) {
    if (refinement < 0) throw std::invalid_argument("make_sphere: refinement must be >= 0");
    const double phi = std::numbers::phi;
    std::vector<Point3> v = {
        {-1, phi, 0}, {1, phi, 0}, {-1, -phi, 0}, {1, -phi, 0}, {0, -1, phi}, {0, 1, phi},
        {0, -1, -phi}, {0, 1, -phi}, {phi, 0, -1}, {phi, 0, 1}, {-phi, 0, -1}, {-phi, 0, 1},
    };
    for (auto& p : v) p.normalize();
    std::vector<Triangle> f = {
        {0, 11, 5}, {0, 5, 1}, {0, 1, 7}, {0, 7, 10}, {0, 10, 11}, {1, 5, 9}, {5, 11, 4},
        {11, 10, 2}, {10, 7, 6}, {7, 1, 8}, {3, 9, 4}, {3, 4, 2}, {3, 2, 6}, {3, 6, 8},
        {3, 8, 9}, {4, 9, 5}, {2, 4, 11}, {6, 2, 10}, {8, 6, 7}, {9, 8, 1},
    };
    for (int level = 0; level < refinement; ++level) {
        std::map<std::pair<int, int>, int> midpoint;
        auto mid = [&](int a, int b) {
            const auto key = std::minmax(a, b);
            auto it = midpoint.find({key.first, key.second});
            if (it != midpoint.end()) return it->second;
            v.push_back(((v[a] + v[b]) * 0.5).normalized());
            const int id = static_cast<int>(v.size()) - 1;
            midpoint.emplace(std::make_pair(key.first, key.second), id);
            return id;
        };
        std::vector<Triangle> next;
        next.reserve(f.size() * 4);
        for (const auto& t : f) {
            const int ab = mid(t[0], t[1]), bc = mid(t[1], t[2]), ca = mid(t[2], t[0]);
            next.push_back({t[0], ab, ca});
            next.push_back({t[1], bc, ab});
            next.push_back({t[2], ca, bc});
            next.push_back({ab, bc, ca});
        }
        f = std::move(next);
    }
    for (auto& t : f) {
        const Point3 n = (v[t[1]] - v[t[0]]).cross(v[t[2]] - v[t[0]]);
        if (n.dot(v[t[0]] + v[t[1]] + v[t[2]]) < 0) std::swap(t[1], t[2]);
    }
    return SurfaceMesh(std::move(v), std::move(f));
}

SurfaceMesh make_torus(double major_radius, double minor_radius, int n_major, int n_minor) {
    if (!(minor_radius > 0.0 && major_radius > minor_radius))
        throw std::invalid_argument("make_torus: need R > r > 0");
    if (n_major < 3 || n_minor < 3) throw std::invalid_argument("make_torus: need at least 3 segments per direction");
    std::vector<Point3> v;
    v.reserve(static_cast<std::size_t>(n_major) * n_minor);
    for (int i = 0; i < n_major; ++i) {
        const double theta = 2.0 * std::numbers::pi * i / n_major;
        for (int j = 0; j < n_minor; ++j) {
            const double phi = 2.0 * std::numbers::pi * j / n_minor;
            const double rho = major_radius + minor_radius * std::cos(phi);
            v.emplace_back(rho * std::cos(theta), rho * std::sin(theta), minor_radius * std::sin(phi));
        }
    }
    auto id = [&](int i, int j) { return ((i % n_major) * n_minor) + (j % n_minor); };
    std::vector<Triangle> f;
    f.reserve(2 * static_cast<std::size_t>(n_major) * n_minor);
    for (int i = 0; i < n_major; ++i)
        for (int j = 0; j < n_minor; ++j) {
            // (theta, phi) ordering gives outward normals
            f.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
            f.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
        }
    return SurfaceMesh(std::move(v), std::move(f));
}

// ---------------------------------------------------------------------------
// OFF io

std::string to_off(const SurfaceMesh& mesh) {
    std::string out = "OFF\n";
    char buf[128];
    std::snprintf(buf, sizeof buf, "%zu %zu 0\n", mesh.vertex_count(), mesh.triangle_count());
    out += buf;
    for (const auto& p : mesh.vertices()) {
        std::snprintf(buf, sizeof buf, "%.17g %.17g %.17g\n", p.x(), p.y(), p.z());
        out += buf;
    }
    for (const auto& t : mesh.triangles()) {
        std::snprintf(buf, sizeof buf, "3 %d %d %d\n", t[0], t[1], t[2]);
        out += buf;
    }
    return out;
}

SurfaceMesh parse_off(std::istream& in) {
    std::string line;
    int line_no = 0;
    auto next_line = [&](const char* what) {
        while (std::getline(in, line)) {
            ++line_no;
            const auto hash = line.find('#');
            if (hash != std::string::npos) line.erase(hash);
            if (line.find_first_not_of(" \t\r") != std::string::npos) return;
        }
        throw std::runtime_error("OFF parse error at line " + std::to_string(line_no + 1) + ": expected " + what);
    };
    auto fail = [&](const std::string& msg) {
        throw std::runtime_error("OFF parse error at line " + std::to_string(line_no) + ": " + msg);
    };

    next_line("header");
    {
        std::istringstream ss(line);
        std::string head;
        ss >> head;
        if (head != "OFF") fail("missing OFF header");
    }
    next_line("counts");
    long nv = -1, nf = -1;
    {
        std::istringstream ss(line);
        if (!(ss >> nv >> nf) || nv < 0 || nf < 0) fail("bad counts line");
    }
    std::vector<Point3> v(static_cast<std::size_t>(nv));
    for (long i = 0; i < nv; ++i) {
        next_line("vertex");
        std::istringstream ss(line);
        double x, y, z;
        if (!(ss >> x >> y >> z)) fail("bad vertex line");
        v[static_cast<std::size_t>(i)] = Point3(x, y, z);
    }
    std::vector<Triangle> f(static_cast<std::size_t>(nf));
    for (long i = 0; i < nf; ++i) {
        next_line("face");
        std::istringstream ss(line);
        int n;
        if (!(ss >> n)) fail("bad face line");
        if (n != 3) fail("face " + std::to_string(i) + " is not a triangle (" + std::to_string(n) + " vertices)");
        Triangle t;
        if (!(ss >> t[0] >> t[1] >> t[2])) fail("bad face line");
        f[static_cast<std::size_t>(i)] = t;
    }
    return SurfaceMesh(std::move(v), std::move(f));
}

SurfaceMesh load_mesh(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open mesh file " + path);
    return parse_off(in);
}

void save_mesh(const SurfaceMesh& mesh, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write mesh file " + path);
    out << to_off(mesh);
}

// ---------------------------------------------------------------------------
// distances

double point_triangle_distance(const Point3& p, const std::array<Point3, 3>& tri) {
    // closest point by Voronoi regions of the triangle
    const Point3 &a = tri[0], &b = tri[1], &c = tri[2];
    const Point3 ab = b - a, ac = c - a, ap = p - a;
    const double d1 = ab.dot(ap), d2 = ac.dot(ap);
    if (d1 <= 0 && d2 <= 0) return ap.norm();
    const Point3 bp = p - b;
    const double d3 = ab.dot(bp), d4 = ac.dot(bp);
    if (d3 >= 0 && d4 <= d3) return bp.norm();
    const double vc = d1 * d4 - d3 * d2;
    if (vc <= 0 && d1 >= 0 && d3 <= 0) return (p - (a + ab * (d1 / (d1 - d3)))).norm();
    const Point3 cp = p - c;
    const double d5 = ab.dot(cp), d6 = ac.dot(cp);
    if (d6 >= 0 && d5 <= d6) return cp.norm();
    const double vb = d5 * d2 - d1 * d6;
    if (vb <= 0 && d2 >= 0 && d6 <= 0) return (p - (a + ac * (d2 / (d2 - d6)))).norm();
    const double va = d3 * d6 - d5 * d4;
    if (va <= 0 && (d4 - d3) >= 0 && (d5 - d6) >= 0)
        return (p - (b + (c - b) * ((d4 - d3) / ((d4 - d3) + (d5 - d6))))).norm();
    const double denom = 1.0 / (va + vb + vc);
    return (p - (a + ab * (vb * denom) + ac * (vc * denom))).norm();
}

namespace {

double segment_distance(const Point3& p1, const Point3& q1, const Point3& p2, const Point3& q2) {
    const Point3 d1 = q1 - p1, d2 = q2 - p2, r = p1 - p2;
    const double a = d1.squaredNorm(), e = d2.squaredNorm(), f = d2.dot(r);
    double s, t;
    const double c = d1.dot(r), b = d1.dot(d2);
    const double denom = a * e - b * b;
    s = denom > 1e-300 ? std::clamp((b * f - c * e) / denom, 0.0, 1.0) : 0.0;
    t = (b * s + f) / e;
    if (t < 0.0) {
        t = 0.0;
        s = std::clamp(-c / a, 0.0, 1.0);
    } else if (t > 1.0) {
        t = 1.0;
        s = std::clamp((b - c) / a, 0.0, 1.0);
    }
    return ((p1 + d1 * s) - (p2 + d2 * t)).norm();
}

}  // namespace

double triangle_distance(const std::array<Point3, 3>& a, const std::array<Point3, 3>& b) {
    double d = std::numeric_limits<double>::infinity();
    for (int i = 0; i < 3; ++i) {
        d = std::min(d, point_triangle_distance(a[i], b));
        d = std::min(d, point_triangle_distance(b[i], a));
        for (int j = 0; j < 3; ++j) d = std::min(d, segment_distance(a[i], a[(i + 1) % 3], b[j], b[(j + 1) % 3]));
    }
    return d;
}

PanelPairClass classify_pair(const SurfaceMesh& mesh, std::size_t t1, std::size_t t2) {
    const auto& a = mesh.triangle(t1);
    const auto& b = mesh.triangle(t2);
    PanelPairClass pc;
    int n = 0;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            if (a[i] == b[j]) {
                pc.first[n] = i;
                pc.second[n] = j;
                ++n;
                break;
            }
    pc.shared = n;
    auto complete = [n](std::array<int, 3>& perm) {
        int k = n;
        for (int i = 0; i < 3 && k < 3; ++i)
            if (std::find(perm.begin(), perm.begin() + k, i) == perm.begin() + k) perm[k++] = i;
    };
    complete(pc.first);
    complete(pc.second);

    const auto ca = mesh.corners(t1);
    const auto cb = mesh.corners(t2);
    double dmax = 0.0;
    for (const auto& p : ca)
        for (const auto& q : cb) dmax = std::max(dmax, (p - q).norm());
    pc.d_max = dmax;
    switch (n) {
    case 3: pc.kind = PairKind::Identical; break;
    case 2: pc.kind = PairKind::CommonEdge; break;
    case 1: pc.kind = PairKind::CommonVertex; break;
    default:
        pc.kind = PairKind::Disjoint;
        pc.distance = triangle_distance(ca, cb);
        pc.d_min = pc.distance;
    }
    return pc;
}

FieldRegion near_far(const PanelPairClass& pair, double max_diameter, double admissibility) {
    if (pair.kind != PairKind::Disjoint) throw std::invalid_argument("near_far: pair is not disjoint");
    return pair.distance <= admissibility * max_diameter ? FieldRegion::Near : FieldRegion::Far;
}

const char* to_string(PairKind kind) noexcept {
    switch (kind) {
    case PairKind::Identical: return "identical";
    case PairKind::CommonEdge: return "common_edge";
    case PairKind::CommonVertex: return "common_vertex";
    case PairKind::Disjoint: return "disjoint";
    }
    return "?";
}

// ---------------------------------------------------------------------------
// spatial basis

SpatialBasis::SpatialBasis(const SurfaceMesh& mesh, SpatialKind kind) : kind_(kind), triangles_(mesh.triangles()) {
    if (kind == SpatialKind::P0) {
        size_ = mesh.triangle_count();
        points_.reserve(size_);
        for (std::size_t t = 0; t < size_; ++t) points_.push_back(mesh.centroid(t));
    } else {
        size_ = mesh.vertex_count();
        points_ = mesh.vertices();
    }
}

const char* to_string(SpatialKind kind) noexcept { return kind == SpatialKind::P0 ? "P0" : "P1"; }

SpatialKind spatial_kind_from_string(const std::string& name) {
    if (name == "P0" || name == "p0") return SpatialKind::P0;
    if (name == "P1" || name == "p1") return SpatialKind::P1;
    throw std::invalid_argument("unknown spatial basis '" + name + "' (expected P0 or P1)");
}

}  // namespace pumbem
