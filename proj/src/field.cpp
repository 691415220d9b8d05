#include "aet/field.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace aet {

namespace {

void require_mesh(const MeshPtr& m, const char* what) {
    if (!m) throw std::invalid_argument(std::string(what) + ": field has no mesh");
}

double segment_distance(const Vec2& p, const Vec2& a, const Vec2& b) {
    const Vec2 ab = b - a;
    const double len2 = dot(ab, ab);
    double s = len2 > 0.0 ? dot(p - a, ab) / len2 : 0.0;
    s = std::clamp(s, 0.0, 1.0);
    return norm(p - (a + s * ab));
}

}  // namespace

NodalScalarField::NodalScalarField(MeshPtr m, std::vector<double> v) : mesh(std::move(m)), values(std::move(v)) {
    require_mesh(mesh, "NodalScalarField");
    if (values.size() != mesh->node_count()) throw std::invalid_argument("NodalScalarField: size mismatch");
    for (double x : values) {
        if (!std::isfinite(x)) throw std::invalid_argument("NodalScalarField: non-finite value");
    }
}

NodalScalarField::NodalScalarField(MeshPtr m, double constant)
    : mesh(std::move(m)), values(mesh ? mesh->node_count() : 0, constant) {
    require_mesh(mesh, "NodalScalarField");
}

NodalScalarField NodalScalarField::sample(MeshPtr m, const std::function<double(const Vec2&)>& f) {
    require_mesh(m, "NodalScalarField::sample");
    std::vector<double> v(m->node_count());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = f(m->node(i));
    return NodalScalarField(std::move(m), std::move(v));
}

double NodalScalarField::min() const { return *std::min_element(values.begin(), values.end()); }
double NodalScalarField::max() const { return *std::max_element(values.begin(), values.end()); }

CellVectorField::CellVectorField(MeshPtr m, std::vector<Vec2> v) : mesh(std::move(m)), values(std::move(v)) {
    require_mesh(mesh, "CellVectorField");
    if (values.size() != mesh->triangle_count()) throw std::invalid_argument("CellVectorField: size mismatch");
}

NodalVectorField::NodalVectorField(MeshPtr m, std::vector<Vec2> v) : mesh(std::move(m)), values(std::move(v)) {
    require_mesh(mesh, "NodalVectorField");
    if (values.size() != mesh->node_count()) throw std::invalid_argument("NodalVectorField: size mismatch");
}

NodalScalarField NodalVectorField::component(int k) const {
    std::vector<double> v(values.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = k == 0 ? values[i].x : values[i].y;
    return NodalScalarField(mesh, std::move(v));
}

PowerDensityField::PowerDensityField(MeshPtr m, std::vector<double> a11, std::vector<double> a12,
                                     std::vector<double> a22)
    : mesh(std::move(m)), h11(std::move(a11)), h12(std::move(a12)), h22(std::move(a22)) {
    require_mesh(mesh, "PowerDensityField");
    const auto n = mesh->node_count();
    if (h11.size() != n || h12.size() != n || h22.size() != n) {
        throw std::invalid_argument("PowerDensityField: size mismatch");
    }
}

std::vector<double> PowerDensityField::determinant() const {
    std::vector<double> d(size());
    for (std::size_t i = 0; i < d.size(); ++i) d[i] = det(i);
    return d;
}

CellVectorField cell_gradient(const NodalScalarField& f) {
    require_mesh(f.mesh, "cell_gradient");
    const auto& mesh = *f.mesh;
    std::vector<Vec2> g(mesh.triangle_count());
    for (std::size_t c = 0; c < g.size(); ++c) {
        const auto& t = mesh.triangle(c);
        const auto& geo = mesh.cell_geometry(c);
        g[c] = f.values[t[0]] * geo.grads[0] + f.values[t[1]] * geo.grads[1] + f.values[t[2]] * geo.grads[2];
    }
    return CellVectorField(f.mesh, std::move(g));
}

NodalVectorField recover_to_nodes(const CellVectorField& g) {
    require_mesh(g.mesh, "recover_to_nodes");
    const auto& mesh = *g.mesh;
    const auto& off = mesh.node_cell_offsets();
    const auto& cells = mesh.node_cells();
    std::vector<Vec2> out(mesh.node_count());
    for (std::size_t i = 0; i < out.size(); ++i) {
        Vec2 acc;
        double w = 0.0;
        for (std::size_t k = off[i]; k < off[i + 1]; ++k) {
            const auto c = cells[k];
            acc += mesh.area(c) * g.values[c];
            w += mesh.area(c);
        }
        out[i] = (1.0 / w) * acc;
    }
    return NodalVectorField(g.mesh, std::move(out));
}

NodalScalarField recover_to_nodes(MeshPtr mesh_ptr, std::span<const double> cell_values) {
    require_mesh(mesh_ptr, "recover_to_nodes");
    const auto& mesh = *mesh_ptr;
    if (cell_values.size() != mesh.triangle_count()) throw std::invalid_argument("recover_to_nodes: size mismatch");
    const auto& off = mesh.node_cell_offsets();
    const auto& cells = mesh.node_cells();
    std::vector<double> out(mesh.node_count());
    for (std::size_t i = 0; i < out.size(); ++i) {
        double acc = 0.0;
        double w = 0.0;
        for (std::size_t k = off[i]; k < off[i + 1]; ++k) {
            const auto c = cells[k];
            acc += mesh.area(c) * cell_values[c];
            w += mesh.area(c);
        }
        out[i] = acc / w;
    }
    return NodalScalarField(std::move(mesh_ptr), std::move(out));
}

std::vector<double> cell_average(const NodalScalarField& f) {
    require_mesh(f.mesh, "cell_average");
    const auto& mesh = *f.mesh;
    std::vector<double> out(mesh.triangle_count());
    for (std::size_t c = 0; c < out.size(); ++c) {
        const auto& t = mesh.triangle(c);
        out[c] = (f.values[t[0]] + f.values[t[1]] + f.values[t[2]]) / 3.0;
    }
    return out;
}

// ---------------------------------------------------------------------------
// PointLocator

PointLocator::PointLocator(MeshPtr mesh) : mesh_(std::move(mesh)) {
    require_mesh(mesh_, "PointLocator");
    const auto& m = *mesh_;
    double xmin = std::numeric_limits<double>::max(), ymin = xmin;
    double xmax = std::numeric_limits<double>::lowest(), ymax = xmax;
    for (const auto& p : m.nodes()) {
        xmin = std::min(xmin, p.x);
        ymin = std::min(ymin, p.y);
        xmax = std::max(xmax, p.x);
        ymax = std::max(ymax, p.y);
    }
    cell_size_ = std::max(m.spacing(), 1e-6);
    x0_ = xmin - cell_size_;
    y0_ = ymin - cell_size_;
    nx_ = static_cast<long>(std::ceil((xmax - x0_ + cell_size_) / cell_size_)) + 1;
    ny_ = static_cast<long>(std::ceil((ymax - y0_ + cell_size_) / cell_size_)) + 1;

    const auto buckets = static_cast<std::size_t>(nx_ * ny_);
    std::vector<std::vector<std::size_t>> lists(buckets);
    for (std::size_t c = 0; c < m.triangle_count(); ++c) {
        const auto& t = m.triangle(c);
        double bx0 = m.node(t[0]).x, bx1 = bx0, by0 = m.node(t[0]).y, by1 = by0;
        for (int k = 1; k < 3; ++k) {
            bx0 = std::min(bx0, m.node(t[k]).x);
            bx1 = std::max(bx1, m.node(t[k]).x);
            by0 = std::min(by0, m.node(t[k]).y);
            by1 = std::max(by1, m.node(t[k]).y);
        }
        long ix0, iy0, ix1, iy1;
        bucket_of(bx0, by0, ix0, iy0);
        bucket_of(bx1, by1, ix1, iy1);
        for (long iy = iy0; iy <= iy1; ++iy) {
            for (long ix = ix0; ix <= ix1; ++ix) lists[static_cast<std::size_t>(iy * nx_ + ix)].push_back(c);
        }
    }
    bucket_offsets_.assign(buckets + 1, 0);
    for (std::size_t b = 0; b < buckets; ++b) {
        bucket_offsets_[b + 1] = bucket_offsets_[b] + lists[b].size();
        bucket_cells_.insert(bucket_cells_.end(), lists[b].begin(), lists[b].end());
    }
}

std::size_t PointLocator::bucket_of(double x, double y, long& ix, long& iy) const {
    ix = std::clamp(static_cast<long>(std::floor((x - x0_) / cell_size_)), 0L, nx_ - 1);
    iy = std::clamp(static_cast<long>(std::floor((y - y0_) / cell_size_)), 0L, ny_ - 1);
    return static_cast<std::size_t>(iy * nx_ + ix);
}

std::array<double, 3> PointLocator::barycentric(std::size_t c, const Vec2& p) const {
    const auto& m = *mesh_;
    const auto& t = m.triangle(c);
    const auto& geo = m.cell_geometry(c);
    // lambda_i is affine with gradient grads[i] and value 1 at its own vertex.
    std::array<double, 3> l{};
    for (int i = 0; i < 3; ++i) l[i] = 1.0 + dot(geo.grads[i], p - m.node(t[i]));
    return l;
}

double PointLocator::distance_to_cell(std::size_t c, const Vec2& p) const {
    const auto l = barycentric(c, p);
    if (l[0] >= -1e-12 && l[1] >= -1e-12 && l[2] >= -1e-12) return 0.0;
    const auto& m = *mesh_;
    const auto& t = m.triangle(c);
    return std::min({segment_distance(p, m.node(t[0]), m.node(t[1])),
                     segment_distance(p, m.node(t[1]), m.node(t[2])),
                     segment_distance(p, m.node(t[2]), m.node(t[0]))});
}

PointLocator::Hit PointLocator::locate(const Vec2& p) const {
    long ix, iy;
    const auto home = bucket_of(p.x, p.y, ix, iy);
    for (std::size_t k = bucket_offsets_[home]; k < bucket_offsets_[home + 1]; ++k) {
        const auto c = bucket_cells_[k];
        const auto l = barycentric(c, p);
        if (l[0] >= -1e-12 && l[1] >= -1e-12 && l[2] >= -1e-12) return {c, l, 0.0};
    }
    const double limit = 2.0 * mesh_->spacing();
    const long reach = static_cast<long>(std::ceil(limit / cell_size_)) + 1;
    double best = std::numeric_limits<double>::max();
    std::size_t best_cell = 0;
    for (long jy = std::max(0L, iy - reach); jy <= std::min(ny_ - 1, iy + reach); ++jy) {
        for (long jx = std::max(0L, ix - reach); jx <= std::min(nx_ - 1, ix + reach); ++jx) {
            const auto b = static_cast<std::size_t>(jy * nx_ + jx);
            for (std::size_t k = bucket_offsets_[b]; k < bucket_offsets_[b + 1]; ++k) {
                const auto c = bucket_cells_[k];
                const double d = distance_to_cell(c, p);
                if (d < best || (d == best && c < best_cell)) {
                    best = d;
                    best_cell = c;
                }
            }
        }
    }
    if (best > limit) {
        std::ostringstream msg;
        msg << "PointLocator: point (" << p.x << ", " << p.y << ") is farther than 2h from the mesh";
        throw std::out_of_range(msg.str());
    }
    return {best_cell, barycentric(best_cell, p), best};
}

double PointLocator::evaluate(std::span<const double> nodal, const Vec2& p) const {
    const auto hit = locate(p);
    const auto& t = mesh_->triangle(hit.cell);
    return hit.bary[0] * nodal[t[0]] + hit.bary[1] * nodal[t[1]] + hit.bary[2] * nodal[t[2]];
}

NodalScalarField interpolate(const PointLocator& locator, const NodalScalarField& f, MeshPtr target) {
    require_mesh(target, "interpolate");
    if (f.mesh != locator.mesh() && f.mesh.get() != locator.mesh().get()) {
        throw std::invalid_argument("interpolate: locator built for a different mesh");
    }
    if (f.mesh == target) return f;
    std::vector<double> out(target->node_count());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = locator.evaluate(f.values, target->node(i));
    return NodalScalarField(std::move(target), std::move(out));
}

NodalScalarField interpolate(const NodalScalarField& f, MeshPtr target) {
    require_mesh(f.mesh, "interpolate");
    if (f.mesh == target) return f;
    return interpolate(PointLocator(f.mesh), f, std::move(target));
}

// ---------------------------------------------------------------------------
// Assembly and solves

std::vector<double> weak_divergence_load(const CellVectorField& g) {
    require_mesh(g.mesh, "weak_divergence_load");
    const auto& mesh = *g.mesh;
    std::vector<double> load(mesh.node_count(), 0.0);
    for (std::size_t c = 0; c < mesh.triangle_count(); ++c) {
        const auto& t = mesh.triangle(c);
        const auto& geo = mesh.cell_geometry(c);
        for (int i = 0; i < 3; ++i) load[t[i]] -= geo.area * dot(g.values[c], geo.grads[i]);
    }
    return load;
}

CsrMatrix assemble_laplacian(const TriangleMesh& mesh, std::span<const double> cell_coefficient) {
    if (!cell_coefficient.empty() && cell_coefficient.size() != mesh.triangle_count()) {
        throw std::invalid_argument("assemble_laplacian: coefficient size mismatch");
    }
    auto k = CsrMatrix::p1_pattern(mesh);
    for (std::size_t c = 0; c < mesh.triangle_count(); ++c) {
        const auto& t = mesh.triangle(c);
        const auto& geo = mesh.cell_geometry(c);
        const double s = (cell_coefficient.empty() ? 1.0 : cell_coefficient[c]) * geo.area;
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) k.add(t[i], t[j], s * dot(geo.grads[i], geo.grads[j]));
        }
    }
    return k;
}

CsrMatrix assemble_mass(const TriangleMesh& mesh) {
    auto m = CsrMatrix::p1_pattern(mesh);
    for (std::size_t c = 0; c < mesh.triangle_count(); ++c) {
        const auto& t = mesh.triangle(c);
        const double a = mesh.area(c) / 12.0;
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) m.add(t[i], t[j], i == j ? 2.0 * a : a);
        }
    }
    return m;
}

PoissonResult solve_dirichlet_poisson(MeshPtr mesh_ptr, std::span<const double> load,
                                      std::span<const double> boundary_values, const CgOptions& options) {
    require_mesh(mesh_ptr, "solve_dirichlet_poisson");
    const auto& mesh = *mesh_ptr;
    if (load.size() != mesh.node_count() || boundary_values.size() != mesh.boundary_count()) {
        throw std::invalid_argument("solve_dirichlet_poisson: size mismatch");
    }
    for (double v : boundary_values) {
        if (!std::isfinite(v)) throw std::invalid_argument("solve_dirichlet_poisson: non-finite boundary value");
    }
    const auto k = assemble_laplacian(mesh);

    std::vector<double> w(mesh.node_count(), 0.0);
    const auto& loop = mesh.boundary_loop();
    for (std::size_t b = 0; b < loop.size(); ++b) w[loop[b]] = boundary_values[b];

    std::vector<std::size_t> interior;
    for (std::size_t i = 0; i < mesh.node_count(); ++i) {
        if (!mesh.is_boundary(i)) interior.push_back(i);
    }
    // rhs = -load - K_ib * w_b on interior rows
    const auto kw = k * std::span<const double>(w);
    std::vector<double> rhs(interior.size());
    for (std::size_t r = 0; r < interior.size(); ++r) rhs[r] = -load[interior[r]] - kw[interior[r]];

    const auto reduced = k.submatrix(interior);
    std::vector<double> x(interior.size(), 0.0);
    PoissonResult result;
    result.stats = conjugate_gradient(reduced, rhs, x, options);
    for (std::size_t r = 0; r < interior.size(); ++r) w[interior[r]] = x[r];
    result.solution = NodalScalarField(std::move(mesh_ptr), std::move(w));
    return result;
}

double log_sym(double x, double c) {
    if (!(c > 0.0)) throw std::invalid_argument("log_sym: C must be positive");
    const double mag = std::log1p(std::abs(x / c));
    return x < 0.0 ? -mag : mag;
}

double l2_norm(const TriangleMesh& mesh, std::span<const double> v) {
    if (v.size() != mesh.node_count()) throw std::invalid_argument("l2_norm: size mismatch");
    double s = 0.0;
    for (std::size_t c = 0; c < mesh.triangle_count(); ++c) {
        const auto& t = mesh.triangle(c);
        const double a = v[t[0]], b = v[t[1]], d = v[t[2]];
        // v^T M_local v with M_local = area/12 [[2,1,1],[1,2,1],[1,1,2]]
        s += mesh.area(c) / 12.0 * (2.0 * (a * a + b * b + d * d) + 2.0 * (a * b + b * d + a * d));
    }
    return std::sqrt(std::max(s, 0.0));
}

double relative_l2_error(const NodalScalarField& rec, const NodalScalarField& truth) {
    require_mesh(rec.mesh, "relative_l2_error");
    if (rec.mesh.get() != truth.mesh.get()) throw std::invalid_argument("relative_l2_error: fields on different meshes");
    const double denom = l2_norm(*truth.mesh, truth.values);
    if (!(denom > 0.0)) throw std::invalid_argument("relative_l2_error: truth has zero norm");
    std::vector<double> diff(rec.size());
    for (std::size_t i = 0; i < diff.size(); ++i) diff[i] = rec.values[i] - truth.values[i];
    return 100.0 * l2_norm(*truth.mesh, diff) / denom;
}

double cell_l2_distance(const CellVectorField& a, const CellVectorField& b) {
    require_mesh(a.mesh, "cell_l2_distance");
    if (a.mesh.get() != b.mesh.get()) throw std::invalid_argument("cell_l2_distance: fields on different meshes");
    double s = 0.0;
    for (std::size_t c = 0; c < a.size(); ++c) {
        const Vec2 d = a.values[c] - b.values[c];
        s += a.mesh->area(c) * dot(d, d);
    }
    return std::sqrt(s);
}

}  // namespace aet
