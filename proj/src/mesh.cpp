#include "aet/mesh.hpp"

#include <algorithm>
#include <map>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "aet/io.hpp"

namespace aet {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kMinArea = 1e-14;

// Zip two concentric rings into a strip of triangles. Angles are unwrapped,
// increasing, and each ring starts within one step of angle zero.
void zip_rings(const std::vector<std::size_t>& inner, const std::vector<double>& inner_angle,
               const std::vector<std::size_t>& outer, const std::vector<double>& outer_angle,
               std::vector<Triangle>& out) {
    const std::size_t m = inner.size();
    const std::size_t n = outer.size();
    auto inner_at = [&](std::size_t i) { return inner[i % m]; };
    auto outer_at = [&](std::size_t k) { return outer[k % n]; };
    auto a = [&](std::size_t i) { return inner_angle[0] + kTwoPi * double(i) / double(m); };
    auto b = [&](std::size_t k) { return outer_angle[0] + kTwoPi * double(k) / double(n); };

    std::size_t i = 0;
    std::size_t k = 0;
    while (i < m || k < n) {
        const bool advance_outer = (i == m) || (k < n && b(k + 1) <= a(i + 1));
        if (advance_outer) {
            out.push_back({inner_at(i), outer_at(k), outer_at(k + 1)});
            ++k;
        } else {
            out.push_back({inner_at(i), outer_at(k), inner_at(i + 1)});
            ++i;
        }
    }
}

}  // namespace

CellGeometry triangle_geometry(const Vec2& a, const Vec2& b, const Vec2& c) {
    const double twice_area = cross(b - a, c - a);
    CellGeometry g;
    g.area = 0.5 * twice_area;
    const double inv = 1.0 / twice_area;
    // grad(lambda_i) = rot(-90) of the opposite edge / (2 area)
    g.grads[0] = {(b.y - c.y) * inv, (c.x - b.x) * inv};
    g.grads[1] = {(c.y - a.y) * inv, (a.x - c.x) * inv};
    g.grads[2] = {(a.y - b.y) * inv, (b.x - a.x) * inv};
    return g;
}

TriangleMesh::TriangleMesh(std::vector<Vec2> nodes, std::vector<Triangle> triangles,
                           std::vector<std::size_t> boundary_loop, std::vector<double> boundary_t,
                           double spacing)
    : nodes_(std::move(nodes)),
      triangles_(std::move(triangles)),
      boundary_loop_(std::move(boundary_loop)),
      boundary_t_(std::move(boundary_t)),
      spacing_(spacing) {
    if (boundary_loop_.size() != boundary_t_.size() || boundary_loop_.size() < 3) {
        throw std::invalid_argument("TriangleMesh: boundary loop and parameters disagree");
    }
    geometry_.reserve(triangles_.size());
    for (std::size_t c = 0; c < triangles_.size(); ++c) {
        const auto& t = triangles_[c];
        for (auto v : t) {
            if (v >= nodes_.size()) throw std::invalid_argument("TriangleMesh: node index out of range");
        }
        auto g = triangle_geometry(nodes_[t[0]], nodes_[t[1]], nodes_[t[2]]);
        if (!(g.area > kMinArea)) {
            std::ostringstream msg;
            msg << "TriangleMesh: degenerate or inverted triangle " << c << " (area " << g.area << ")";
            throw std::invalid_argument(msg.str());
        }
        geometry_.push_back(g);
    }

    boundary_index_.assign(nodes_.size(), -1);
    for (std::size_t k = 0; k < boundary_loop_.size(); ++k) {
        boundary_index_[boundary_loop_[k]] = static_cast<long>(k);
        const auto& a = nodes_[boundary_loop_[k]];
        const auto& b = nodes_[boundary_loop_[(k + 1) % boundary_loop_.size()]];
        max_boundary_edge_ = std::max(max_boundary_edge_, norm(b - a));
    }

    node_cell_offsets_.assign(nodes_.size() + 1, 0);
    for (const auto& t : triangles_) {
        for (auto v : t) ++node_cell_offsets_[v + 1];
    }
    for (std::size_t i = 0; i < nodes_.size(); ++i) node_cell_offsets_[i + 1] += node_cell_offsets_[i];
    node_cells_.resize(node_cell_offsets_.back());
    std::vector<std::size_t> fill(node_cell_offsets_.begin(), node_cell_offsets_.end() - 1);
    for (std::size_t c = 0; c < triangles_.size(); ++c) {
        for (auto v : triangles_[c]) node_cells_[fill[v]++] = c;
    }
}

const CellGeometry& TriangleMesh::cell_geometry(std::size_t c) const {
    if (c >= geometry_.size()) throw std::out_of_range("cell_geometry: triangle index out of range");
    return geometry_[c];
}

Vec2 TriangleMesh::centroid(std::size_t c) const {
    const auto& t = triangles_[c];
    return (1.0 / 3.0) * (nodes_[t[0]] + nodes_[t[1]] + nodes_[t[2]]);
}

TriangleMesh build_disk_mesh(double target_h) {
    if (!(target_h > 0.0) || !(target_h < 0.5)) {
        throw std::invalid_argument("build_disk_mesh: target_h must lie in (0, 0.5)");
    }
    const auto rings = static_cast<std::size_t>(std::max(1.0, std::round(1.0 / target_h)));
    const auto boundary_nodes =
        static_cast<std::size_t>(std::max(6.0, std::round(kTwoPi / target_h)));

    std::vector<Vec2> nodes{{0.0, 0.0}};
    std::vector<Triangle> tris;
    std::vector<std::size_t> prev{0};
    std::vector<double> prev_angle{0.0};

    for (std::size_t j = 1; j <= rings; ++j) {
        const bool last = (j == rings);
        const double r = last ? 1.0 : double(j) / double(rings);
        const std::size_t count =
            last ? boundary_nodes
                 : std::max<std::size_t>(
                       6, static_cast<std::size_t>(std::round(double(boundary_nodes) * double(j) /
                                                              double(rings))));
        // Interior rings alternate a half-step offset; the boundary ring starts at t = 0.
        const double step = kTwoPi / double(count);
        const double offset = (last || j % 2 == 0) ? 0.0 : 0.5 * step;

        std::vector<std::size_t> ring(count);
        std::vector<double> angle(count);
        for (std::size_t k = 0; k < count; ++k) {
            const double t = offset + step * double(k);
            angle[k] = t;
            ring[k] = nodes.size();
            nodes.push_back(last ? Vec2{std::cos(t), std::sin(t)} : Vec2{r * std::cos(t), r * std::sin(t)});
        }
        if (j == 1) {
            for (std::size_t k = 0; k < count; ++k) tris.push_back({0, ring[k], ring[(k + 1) % count]});
        } else {
            zip_rings(prev, prev_angle, ring, angle, tris);
        }
        prev = std::move(ring);
        prev_angle = std::move(angle);
    }

    std::vector<double> bt(prev.size());
    for (std::size_t k = 0; k < prev.size(); ++k) bt[k] = kTwoPi * double(k) / double(prev.size());
    return TriangleMesh(std::move(nodes), std::move(tris), std::move(prev), std::move(bt),
                        1.0 / double(rings));
}

MeshPtr make_disk_mesh(double target_h) {
    return std::make_shared<const TriangleMesh>(build_disk_mesh(target_h));
}

double BoundaryArc::parameter_length() const {
    double s = 0.0;
    for (const auto& e : edges) s += e.clipped_length;
    return s;
}

double BoundaryArc::geometric_length(const TriangleMesh& mesh) const {
    double s = 0.0;
    for (const auto& e : edges) s += norm(mesh.node(e.node_b) - mesh.node(e.node_a));
    return s;
}

bool BoundaryArc::full_view() const { return ell >= kTwoPi; }

BoundaryArc select_arc(const TriangleMesh& mesh, double ell) {
    if (!(ell > 0.0) || ell > kTwoPi + 1e-12) {
        throw std::invalid_argument("select_arc: ell must lie in (0, 2*pi]");
    }
    BoundaryArc arc;
    arc.ell = std::min(ell, kTwoPi);
    const auto& loop = mesh.boundary_loop();
    const auto& bt = mesh.boundary_t();
    const std::size_t n = loop.size();
    for (std::size_t k = 0; k < n; ++k) {
        const double ta = bt[k];
        const double tb = (k + 1 < n) ? bt[k + 1] : kTwoPi;
        if (ta >= arc.ell) break;
        arc.edges.push_back({k, loop[k], loop[(k + 1) % n], ta, tb, std::min(tb, arc.ell) - ta});
    }
    return arc;
}

std::vector<std::string> validate_mesh(const TriangleMesh& mesh) {
    std::vector<std::string> issues;
    auto report = [&](const std::string& s) {
        if (issues.size() < 20) issues.push_back(s);
    };
    for (std::size_t i = 0; i < mesh.node_count(); ++i) {
        if (norm(mesh.node(i)) > 1.0 + 1e-12) report("node outside unit disk: " + std::to_string(i));
    }
    const auto& loop = mesh.boundary_loop();
    const auto& bt = mesh.boundary_t();
    for (std::size_t k = 0; k < loop.size(); ++k) {
        const auto& p = mesh.node(loop[k]);
        if (std::abs(norm(p) - 1.0) > 1e-10) report("boundary node off the circle: " + std::to_string(loop[k]));
        if (norm(p - Vec2{std::cos(bt[k]), std::sin(bt[k])}) > 1e-10) {
            report("boundary parameter does not reproduce position: " + std::to_string(loop[k]));
        }
        if (bt[k] < 0.0 || bt[k] >= kTwoPi) report("boundary parameter outside [0, 2pi)");
    }
    // Strictly increasing after a single cyclic rotation.
    std::size_t descents = 0;
    for (std::size_t k = 0; k < bt.size(); ++k) {
        if (bt[(k + 1) % bt.size()] <= bt[k]) ++descents;
    }
    if (descents != 1) report("boundary parameters are not cyclically increasing");

    for (std::size_t c = 0; c < mesh.triangle_count(); ++c) {
        if (!(mesh.area(c) > 0.0)) report("non-positive triangle area: " + std::to_string(c));
    }

    std::map<std::pair<std::size_t, std::size_t>, int> edge_use;
    for (const auto& t : mesh.triangles()) {
        for (int e = 0; e < 3; ++e) {
            auto a = t[e];
            auto b = t[(e + 1) % 3];
            edge_use[{std::min(a, b), std::max(a, b)}]++;
        }
    }
    std::map<std::pair<std::size_t, std::size_t>, int> boundary_edges;
    for (std::size_t k = 0; k < loop.size(); ++k) {
        auto a = loop[k];
        auto b = loop[(k + 1) % loop.size()];
        boundary_edges[{std::min(a, b), std::max(a, b)}] = 1;
    }
    for (const auto& [edge, uses] : edge_use) {
        const bool on_boundary = boundary_edges.count(edge) > 0;
        if (on_boundary && uses != 1) report("boundary edge not used exactly once");
        if (!on_boundary && uses != 2) report("interior edge not shared by exactly two triangles");
    }
    for (const auto& [edge, _] : boundary_edges) {
        if (!edge_use.count(edge)) report("boundary loop edge missing from triangulation");
    }
    return issues;
}

void write_mesh_vtk(const TriangleMesh& mesh, const std::string& path) {
    VtkWriter(mesh).write(path);
}

}  // namespace aet
