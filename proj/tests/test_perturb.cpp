#include <doctest.h>

#include <cmath>

#include <random>

#include "aet/perturb.hpp"
#include "support.hpp"

using namespace aet;

namespace {

PowerDensityField smooth_h(const MeshPtr& mesh) {
    std::vector<double> a(mesh->node_count()), b(a.size()), c(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        const auto p = mesh->node(i);
        a[i] = 1.5 + p.x;
        b[i] = 0.3 * p.y;
        c[i] = 2.0 - p.x * p.y;
    }
    return PowerDensityField(mesh, a, b, c);
}

PowerDensityField single_node(double a, double b, double c) {
    static const auto mesh = std::make_shared<const TriangleMesh>(
        std::vector<Vec2>{{1, 0}, {0, 1}, {-1, 0}}, std::vector<Triangle>{{0, 1, 2}}, std::vector<std::size_t>{0, 1, 2},
        std::vector<double>{0.0, 1.57, 3.14}, 1.0);
    return PowerDensityField(mesh, {a, a, a}, {b, b, b}, {c, c, c});
}

}  // namespace

TEST_CASE("counter-based normals") {
    const CounterNormal rng(50);
    CHECK(rng(0, 17) == CounterNormal(50)(0, 17));
    CHECK(rng(0, 17) != rng(1, 17));
    CHECK(rng(0, 17) != CounterNormal(51)(0, 17));
    const int n = 200000;
    double s = 0, s2 = 0;
    for (int k = 0; k < n; ++k) {
        const double x = rng(3, static_cast<std::uint64_t>(k));
        s += x;
        s2 += x * x;
    }
    CHECK(std::abs(s / n) < 4.0 / std::sqrt(n));
    CHECK(s2 / n == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("add_noise") {
    const auto mesh = aet::test::coarse_mesh();
    const auto h = smooth_h(mesh);

    const auto same = add_noise(h, 0.0, 50);
    CHECK(same.h11 == h.h11);
    CHECK(same.h12 == h.h12);
    CHECK(same.h22 == h.h22);

    const auto a = add_noise(h, 5.0, 50);
    const auto b = add_noise(h, 5.0, 50);
    CHECK(a.h11 == b.h11);
    CHECK(a.h22 == b.h22);
    CHECK(add_noise(h, 5.0, 51).h11 != a.h11);
    CHECK_THROWS(add_noise(h, -1.0, 50));

    SUBCASE("perturbation matches the drawn field") {
        for (auto norm_kind : {NoiseNorm::euclidean, NoiseNorm::mass_matrix}) {
            const auto noisy = add_noise(h, 5.0, 50, norm_kind);
            const CounterNormal rng(50);
            std::vector<double> e(h.size());
            for (std::size_t i = 0; i < e.size(); ++i) e[i] = rng(1, i);
            double en = 0.0;
            if (norm_kind == NoiseNorm::euclidean) {
                for (double v : e) en += v * v;
                en = std::sqrt(en);
            } else {
                en = l2_norm(*mesh, e);
            }
            std::vector<double> delta(h.size());
            double hmax = 0.0;
            for (std::size_t i = 0; i < delta.size(); ++i) {
                delta[i] = noisy.h12[i] - h.h12[i];
                CHECK(delta[i] == doctest::Approx(0.05 * e[i] / en * h.h12[i]).epsilon(1e-12));
                hmax = std::max(hmax, std::abs(h.h12[i]));
            }
            CHECK(l2_norm(*mesh, delta) <= 0.05 * hmax * l2_norm(*mesh, e) / en * (1 + 1e-12));
        }
    }
}

TEST_CASE("noise is unbiased") {
    const auto mesh = aet::test::mesh_h(0.2);
    const auto h = smooth_h(mesh);
    const int seeds = 400;
    std::vector<double> sum(h.size(), 0.0), sum2(h.size(), 0.0);
    for (int s = 0; s < seeds; ++s) {
        const auto n = add_noise(h, 10.0, static_cast<std::uint64_t>(s), NoiseNorm::mass_matrix);
        for (std::size_t i = 0; i < h.size(); ++i) {
            sum[i] += n.h11[i];
            sum2[i] += n.h11[i] * n.h11[i];
        }
    }
    int outside = 0;
    for (std::size_t i = 0; i < h.size(); ++i) {
        const double mean = sum[i] / seeds;
        const double var = sum2[i] / seeds - mean * mean;
        const double se = std::sqrt(std::max(var, 0.0) / seeds);
        if (std::abs(mean - h.h11[i]) > 3 * se) ++outside;
    }
    // Three standard errors: about 0.3% of nodes may fall outside by chance.
    CHECK(outside <= static_cast<int>(0.02 * static_cast<double>(h.size())) + 1);
}

TEST_CASE("eigen_floor examples") {
    SUBCASE("forced clamp") {
        const auto f = eigen_floor(single_node(2.0, 0.0, 1e-9), 1e-6);
        CHECK(f.h11[0] == doctest::Approx(2.0));
        CHECK(f.h12[0] == 0.0);
        CHECK(f.h22[0] == doctest::Approx(1e-6).epsilon(1e-12));
    }
    SUBCASE("SPD unchanged") {
        const auto f = eigen_floor(single_node(2.0, 0.5, 1.0), 1e-6);
        CHECK(std::abs(f.h11[0] - 2.0) < 1e-14);
        CHECK(std::abs(f.h12[0] - 0.5) < 1e-14);
        CHECK(std::abs(f.h22[0] - 1.0) < 1e-14);
    }
    SUBCASE("indefinite off-diagonal node") {
        const double a = 1e-3;
        const auto f = eigen_floor(single_node(0.0, a, 0.0), 1e-6);
        const auto [lo, hi] = symmetric_eigenvalues(f.h11[0], f.h12[0], f.h22[0]);
        CHECK(lo == doctest::Approx(1e-6).epsilon(1e-9));
        CHECK(hi == doctest::Approx(1e-3).epsilon(1e-12));
        CHECK(f.h11[0] + f.h22[0] == doctest::Approx(1e-3 + 1e-6).epsilon(1e-12));
        // Eigenvector (1, 1)/sqrt2 of the positive eigenvalue is kept.
        CHECK(f.h11[0] == doctest::Approx(f.h22[0]));
        CHECK(f.h12[0] > 0.0);
    }
    CHECK_THROWS(eigen_floor(single_node(1, 0, 1), 0.0));
}

TEST_CASE("eigen_floor invariants on random matrices") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const double L = 1e-6;
    for (int k = 0; k < 2000; ++k) {
        const double scale = std::pow(10.0, 4 * u(rng));
        const auto h = single_node(scale * u(rng), scale * u(rng), scale * u(rng));
        const auto f = eigen_floor(h, L);
        const auto [lo, hi] = symmetric_eigenvalues(f.h11[0], f.h12[0], f.h22[0]);
        CHECK(lo >= L - 1e-14 * std::max(1.0, hi));
        CHECK(f.det(0) >= L * L - 1e-12 * (f.h11[0] + f.h22[0]));
        const auto g = eigen_floor(f, L);
        CHECK(std::abs(g.h11[0] - f.h11[0]) <= 1e-14 * std::max(1.0, std::abs(f.h11[0])));
        CHECK(std::abs(g.h12[0] - f.h12[0]) <= 1e-14 * std::max(1.0, std::abs(f.h11[0]) + std::abs(f.h22[0])));
        CHECK(std::abs(g.h22[0] - f.h22[0]) <= 1e-14 * std::max(1.0, std::abs(f.h22[0])));
        // The larger eigenvalue survives whenever it was above the floor.
        const auto [lo0, hi0] = symmetric_eigenvalues(h.h11[0], h.h12[0], h.h22[0]);
        if (hi0 > L) CHECK(hi == doctest::Approx(hi0).epsilon(1e-10));
        (void)lo0;
    }
}

TEST_CASE("perturb with alpha 0 is the floor alone") {
    const auto mesh = aet::test::coarse_mesh();
    const auto h = smooth_h(mesh);
    const auto p = perturb(h, {0.0, 50, 1e-6});
    const auto f = eigen_floor(h, 1e-6);
    CHECK(p.h11 == f.h11);
    CHECK(p.h12 == f.h12);
    CHECK(p.h22 == f.h22);
}
