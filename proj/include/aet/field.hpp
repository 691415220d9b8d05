#pragma once

#include <functional>
#include <span>
#include <vector>

#include "aet/mesh.hpp"
#include "aet/sparse.hpp"

namespace aet {

/// One real per mesh node.
struct NodalScalarField {
    MeshPtr mesh;
    std::vector<double> values;

    NodalScalarField() = default;
    NodalScalarField(MeshPtr m, std::vector<double> v);
    NodalScalarField(MeshPtr m, double constant);

    static NodalScalarField sample(MeshPtr m, const std::function<double(const Vec2&)>& f);

    std::size_t size() const { return values.size(); }
    double operator[](std::size_t i) const { return values[i]; }
    double& operator[](std::size_t i) { return values[i]; }
    double min() const;
    double max() const;
};

/// One constant 2-vector per triangle.
struct CellVectorField {
    MeshPtr mesh;
    std::vector<Vec2> values;

    CellVectorField() = default;
    CellVectorField(MeshPtr m, std::vector<Vec2> v);

    std::size_t size() const { return values.size(); }
    const Vec2& operator[](std::size_t c) const { return values[c]; }
    Vec2& operator[](std::size_t c) { return values[c]; }
};

/// One 2-vector per node.
struct NodalVectorField {
    MeshPtr mesh;
    std::vector<Vec2> values;

    NodalVectorField() = default;
    NodalVectorField(MeshPtr m, std::vector<Vec2> v);

    std::size_t size() const { return values.size(); }
    const Vec2& operator[](std::size_t i) const { return values[i]; }
    NodalScalarField component(int k) const;
};

/// Symmetric 2x2 power-density matrix per node; only (h11, h12, h22) are stored.
struct PowerDensityField {
    MeshPtr mesh;
    std::vector<double> h11;
    std::vector<double> h12;
    std::vector<double> h22;

    PowerDensityField() = default;
    PowerDensityField(MeshPtr m, std::vector<double> a11, std::vector<double> a12, std::vector<double> a22);

    std::size_t size() const { return h11.size(); }
    double det(std::size_t i) const { return h11[i] * h22[i] - h12[i] * h12[i]; }
    std::vector<double> determinant() const;
};

/// Per-triangle gradient of the P1 interpolant.
CellVectorField cell_gradient(const NodalScalarField& f);

/// Area-weighted average of the adjacent cell values at every node.
NodalVectorField recover_to_nodes(const CellVectorField& g);
NodalScalarField recover_to_nodes(MeshPtr mesh, std::span<const double> cell_values);

/// Average of the three nodal values of each triangle.
std::vector<double> cell_average(const NodalScalarField& f);

/// Point location on a P1 mesh via a uniform bucket grid.
///
/// Points outside every triangle snap to the nearest one and are evaluated by
/// affine extrapolation, which keeps interpolation exact for affine fields.
class PointLocator {
public:
    explicit PointLocator(MeshPtr mesh);

    struct Hit {
        std::size_t cell;
        std::array<double, 3> bary;
        double distance;  // zero when the point lies inside `cell`
    };

    /// Throws when the point is farther than 2h from every triangle.
    Hit locate(const Vec2& p) const;
    double evaluate(std::span<const double> nodal, const Vec2& p) const;

    const MeshPtr& mesh() const { return mesh_; }

private:
    std::array<double, 3> barycentric(std::size_t c, const Vec2& p) const;
    double distance_to_cell(std::size_t c, const Vec2& p) const;
    std::size_t bucket_of(double x, double y, long& ix, long& iy) const;

    MeshPtr mesh_;
    double x0_, y0_, cell_size_;
    long nx_, ny_;
    std::vector<std::size_t> bucket_offsets_;
    std::vector<std::size_t> bucket_cells_;
};

/// Barycentric transfer of a nodal field onto another mesh's nodes.
NodalScalarField interpolate(const NodalScalarField& f, MeshPtr target);
NodalScalarField interpolate(const PointLocator& locator, const NodalScalarField& f, MeshPtr target);

/// Load vector with entries -int_Omega g . grad(phi_v) dx.
std::vector<double> weak_divergence_load(const CellVectorField& g);

/// P1 stiffness matrix for a per-triangle coefficient (empty means 1).
CsrMatrix assemble_laplacian(const TriangleMesh& mesh, std::span<const double> cell_coefficient = {});

/// Consistent P1 mass matrix.
CsrMatrix assemble_mass(const TriangleMesh& mesh);

struct PoissonResult {
    NodalScalarField solution;
    SolveStats stats;
};

/// Solves Delta(w) = div(g) weakly, i.e. K w = -load on interior rows, with
/// w = boundary_values (ordered as the boundary loop) on the boundary.
PoissonResult solve_dirichlet_poisson(MeshPtr mesh, std::span<const double> load,
                                      std::span<const double> boundary_values, const CgOptions& options = {});

/// sign(x) log(1 + |x/c|).
double log_sym(double x, double c = 1e-3);

/// sqrt(v^T M v) with the consistent P1 mass matrix.
double l2_norm(const TriangleMesh& mesh, std::span<const double> v);

/// 100 * ||rec - truth||_L2 / ||truth||_L2 in percent.
double relative_l2_error(const NodalScalarField& rec, const NodalScalarField& truth);

/// sqrt(sum_c area_c |a_c - b_c|^2) for two cell fields on the same mesh.
double cell_l2_distance(const CellVectorField& a, const CellVectorField& b);

}  // namespace aet
