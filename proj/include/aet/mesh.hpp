#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <memory>
#include <string>
#include <vector>

namespace aet {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2& operator+=(const Vec2& o) { x += o.x; y += o.y; return *this; }
    Vec2& operator-=(const Vec2& o) { x -= o.x; y -= o.y; return *this; }
    Vec2& operator*=(double s) { x *= s; y *= s; return *this; }
    friend Vec2 operator+(Vec2 a, const Vec2& b) { return a += b; }
    friend Vec2 operator-(Vec2 a, const Vec2& b) { return a -= b; }
    friend Vec2 operator*(double s, Vec2 a) { return a *= s; }
    friend Vec2 operator*(Vec2 a, double s) { return a *= s; }
    friend bool operator==(const Vec2&, const Vec2&) = default;
};

inline double dot(const Vec2& a, const Vec2& b) { return a.x * b.x + a.y * b.y; }
inline double cross(const Vec2& a, const Vec2& b) { return a.x * b.y - a.y * b.x; }
inline double norm(const Vec2& a) { return std::hypot(a.x, a.y); }
/// Counterclockwise quarter turn, [[0,-1],[1,0]].
inline Vec2 rot90(const Vec2& a) { return {-a.y, a.x}; }

using Triangle = std::array<std::size_t, 3>;

/// Area and constant P1 basis gradients of one triangle.
struct CellGeometry {
    double area = 0.0;
    std::array<Vec2, 3> grads{};
};

CellGeometry triangle_geometry(const Vec2& a, const Vec2& b, const Vec2& c);

/// Conforming P1 triangulation of the closed unit disk.
///
/// Boundary nodes sit exactly on eta(t) = (cos t, sin t). The boundary loop is
/// counterclockwise and starts at t = 0, so `boundary_t` is strictly increasing
/// along it. Geometry is precomputed at construction; a degenerate triangle is a
/// construction-time error.
class TriangleMesh {
public:
    TriangleMesh(std::vector<Vec2> nodes, std::vector<Triangle> triangles,
                 std::vector<std::size_t> boundary_loop, std::vector<double> boundary_t,
                 double spacing);

    std::size_t node_count() const { return nodes_.size(); }
    std::size_t triangle_count() const { return triangles_.size(); }
    std::size_t boundary_count() const { return boundary_loop_.size(); }

    const std::vector<Vec2>& nodes() const { return nodes_; }
    const Vec2& node(std::size_t i) const { return nodes_[i]; }
    const std::vector<Triangle>& triangles() const { return triangles_; }
    const Triangle& triangle(std::size_t c) const { return triangles_[c]; }
    const std::vector<std::size_t>& boundary_loop() const { return boundary_loop_; }
    const std::vector<double>& boundary_t() const { return boundary_t_; }

    /// Nominal spacing used to build the mesh.
    double spacing() const { return spacing_; }
    double max_boundary_edge() const { return max_boundary_edge_; }

    const CellGeometry& cell_geometry(std::size_t c) const;
    double area(std::size_t c) const { return geometry_[c].area; }
    Vec2 centroid(std::size_t c) const;

    bool is_boundary(std::size_t node) const { return boundary_index_[node] >= 0; }
    /// Position of `node` in the boundary loop, or -1 for interior nodes.
    long boundary_position(std::size_t node) const { return boundary_index_[node]; }

    /// Triangles adjacent to each node (CSR layout).
    const std::vector<std::size_t>& node_cell_offsets() const { return node_cell_offsets_; }
    const std::vector<std::size_t>& node_cells() const { return node_cells_; }

private:
    std::vector<Vec2> nodes_;
    std::vector<Triangle> triangles_;
    std::vector<std::size_t> boundary_loop_;
    std::vector<double> boundary_t_;
    double spacing_;
    double max_boundary_edge_ = 0.0;
    std::vector<CellGeometry> geometry_;
    std::vector<long> boundary_index_;
    std::vector<std::size_t> node_cell_offsets_;
    std::vector<std::size_t> node_cells_;
};

using MeshPtr = std::shared_ptr<const TriangleMesh>;

/// Concentric-ring triangulation of the unit disk with nominal spacing `target_h`.
///
/// Rings sit at radii j/n, n = round(1/target_h); the boundary ring carries
/// round(2*pi/target_h) equally spaced nodes starting at t = 0. Deterministic.
TriangleMesh build_disk_mesh(double target_h);
MeshPtr make_disk_mesh(double target_h);

struct ArcEdge {
    std::size_t loop_index;  // edge runs from loop[loop_index] to loop[loop_index + 1]
    std::size_t node_a;
    std::size_t node_b;
    double t_a;
    double t_b;           // t_b = 2*pi for the closing edge
    double clipped_length;  // parameter length of [t_a, min(t_b, ell)]
};

/// Boundary edges making up Gamma = eta([0, ell]). The edge containing ell is kept
/// whole; quadrature truncates it.
struct BoundaryArc {
    double ell = 0.0;
    std::vector<ArcEdge> edges;

    double parameter_length() const;
    double geometric_length(const TriangleMesh& mesh) const;
    bool full_view() const;
};

BoundaryArc select_arc(const TriangleMesh& mesh, double ell);

/// Every mesh invariant violated, one message each; empty when the mesh is valid.
std::vector<std::string> validate_mesh(const TriangleMesh& mesh);

/// Legacy ASCII VTK unstructured grid (POINTS, CELLS of type 5, CELL_TYPES).
void write_mesh_vtk(const TriangleMesh& mesh, const std::string& path);

}  // namespace aet
