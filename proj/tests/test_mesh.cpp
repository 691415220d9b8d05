#include <doctest.h>

#include <cmath>

#include <map>
#include <numbers>
#include <set>

#include "aet/mesh.hpp"
#include "support.hpp"

using namespace aet;
using aet::test::coarse_mesh;

TEST_CASE("unit right triangle geometry") {
    const auto g = triangle_geometry({0, 0}, {1, 0}, {0, 1});
    CHECK(g.area == doctest::Approx(0.5));
    CHECK(g.grads[0] == Vec2{-1, -1});
    CHECK(g.grads[1] == Vec2{1, 0});
    CHECK(g.grads[2] == Vec2{0, 1});

    const auto t = triangle_geometry({3.5, -2}, {4.5, -2}, {3.5, -1});
    CHECK(t.area == doctest::Approx(0.5));
    for (int k = 0; k < 3; ++k) {
        CHECK(t.grads[k].x == doctest::Approx(g.grads[k].x));
        CHECK(t.grads[k].y == doctest::Approx(g.grads[k].y));
    }
}

TEST_CASE("basis gradients sum to zero on every cell") {
    const auto& mesh = *coarse_mesh();
    for (std::size_t c = 0; c < mesh.triangle_count(); ++c) {
        const auto& g = mesh.cell_geometry(c).grads;
        const Vec2 s = g[0] + g[1] + g[2];
        CHECK(norm(s) < 1e-10 * norm(g[0]));
    }
}

TEST_CASE("disk mesh invariants") {
    for (double h : {0.2, 0.1, 0.05}) {
        const auto mesh = make_disk_mesh(h);
        CAPTURE(h);
        CHECK(validate_mesh(*mesh).empty());

        const auto nb = static_cast<std::size_t>(std::lround(2 * std::numbers::pi / h));
        CHECK(mesh->boundary_count() == nb);
        CHECK(mesh->node(mesh->boundary_loop()[0]) == Vec2{1.0, 0.0});
        CHECK(mesh->boundary_t().front() == 0.0);

        // The triangulation covers exactly the inscribed boundary polygon.
        double area = 0.0;
        for (std::size_t c = 0; c < mesh->triangle_count(); ++c) area += mesh->area(c);
        const double polygon = 0.5 * nb * std::sin(2 * std::numbers::pi / nb);
        CHECK(area == doctest::Approx(polygon).epsilon(1e-12));
        CHECK(std::abs(area - std::numbers::pi) <= 3 * h);

        // Disk topology: V - E + F = 1, interior edges shared twice, boundary edges once.
        std::map<std::pair<std::size_t, std::size_t>, int> edges;
        for (const auto& t : mesh->triangles()) {
            for (int k = 0; k < 3; ++k) {
                auto a = t[k], b = t[(k + 1) % 3];
                if (a > b) std::swap(a, b);
                ++edges[{a, b}];
            }
        }
        const long v = static_cast<long>(mesh->node_count());
        const long e = static_cast<long>(edges.size());
        const long f = static_cast<long>(mesh->triangle_count());
        CHECK(v - e + f == 1);
        std::size_t single = 0;
        for (const auto& [edge, count] : edges) {
            CHECK(count <= 2);
            if (count == 1) {
                ++single;
                CHECK(mesh->is_boundary(edge.first));
                CHECK(mesh->is_boundary(edge.second));
            }
        }
        CHECK(single == nb);
    }
}

TEST_CASE("cell gradients of x1 are exact") {
    const auto& mesh = *coarse_mesh();
    for (std::size_t c = 0; c < mesh.triangle_count(); ++c) {
        const auto& t = mesh.triangle(c);
        const auto& g = mesh.cell_geometry(c).grads;
        Vec2 grad{0, 0};
        for (int k = 0; k < 3; ++k) grad += mesh.node(t[k]).x * g[k];
        CHECK(std::abs(grad.x - 1.0) < 1e-12);
        CHECK(std::abs(grad.y) < 1e-12);
    }
}

TEST_CASE("mesh construction is deterministic and validates its input") {
    const auto a = build_disk_mesh(0.1);
    const auto b = build_disk_mesh(0.1);
    CHECK(a.nodes() == b.nodes());
    CHECK(a.triangles() == b.triangles());
    CHECK_THROWS_AS(build_disk_mesh(0.0), std::invalid_argument);
    CHECK_THROWS_AS(build_disk_mesh(0.5), std::invalid_argument);
    CHECK_THROWS_AS(build_disk_mesh(-1.0), std::invalid_argument);
}

TEST_CASE("degenerate triangle is rejected") {
    std::vector<Vec2> nodes = {{1, 0}, {0, 1}, {-1, 0}, {0, 0}};
    std::vector<Triangle> tris = {{0, 1, 3}, {1, 2, 3}, {0, 3, 0}};
    CHECK_THROWS(TriangleMesh(nodes, tris, {0, 1, 2}, {0.0, 1.5, 3.1}, 1.0));
}

TEST_CASE("desk-scale meshes") {
    const auto data = make_disk_mesh(0.0125);
    const auto recon = make_disk_mesh(1.0 / 62.0);
    CHECK(data->node_count() > 18000);
    CHECK(data->node_count() < 23000);
    CHECK(recon->node_count() >= 12000);
    CHECK(recon->node_count() < 14000);
    CHECK(validate_mesh(*data).empty());
    CHECK(validate_mesh(*recon).empty());
}

TEST_CASE("boundary arcs") {
    const auto mesh = coarse_mesh();
    const double pi = std::numbers::pi;

    SUBCASE("full view uses every boundary edge") {
        const auto arc = select_arc(*mesh, 2 * pi);
        CHECK(arc.full_view());
        CHECK(arc.edges.size() == mesh->boundary_count());
        CHECK(arc.parameter_length() == doctest::Approx(2 * pi));
    }
    SUBCASE("half circle") {
        const auto arc = select_arc(*mesh, pi);
        CHECK_FALSE(arc.full_view());
        CHECK(arc.parameter_length() == doctest::Approx(pi).epsilon(1e-14));
        CHECK(std::abs(arc.geometric_length(*mesh) - pi) <= 2 * mesh->max_boundary_edge());
    }
    SUBCASE("Gamma_1 runs from t = 0 to pi/4") {
        const auto arc = select_arc(*mesh, pi / 4);
        CHECK(arc.edges.front().t_a == 0.0);
        CHECK(arc.edges.back().t_a < pi / 4);
        CHECK(arc.edges.back().t_b >= pi / 4);
        double clipped = 0.0;
        for (const auto& e : arc.edges) clipped += e.clipped_length;
        CHECK(clipped == doctest::Approx(pi / 4).epsilon(1e-14));
    }
    SUBCASE("out of range") {
        CHECK_THROWS_AS(select_arc(*mesh, 0.0), std::invalid_argument);
        CHECK_THROWS_AS(select_arc(*mesh, 7.0), std::invalid_argument);
    }
    CHECK(mesh->boundary_t().back() < 2 * pi);
}
