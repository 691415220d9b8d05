#include "aet/perturb.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace aet {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

// Uniform in (0, 1] from the top 53 bits.
double to_unit(std::uint64_t x) { return (double(x >> 11) + 1.0) * 0x1.0p-53; }

std::vector<double> noisy(const TriangleMesh& mesh, const std::vector<double>& values, const CounterNormal& rng,
                          std::uint64_t stream, double alpha, NoiseNorm norm) {
    std::vector<double> e(values.size());
    for (std::size_t i = 0; i < e.size(); ++i) e[i] = rng(stream, i);
    double enorm = 0.0;
    if (norm == NoiseNorm::mass_matrix) {
        enorm = l2_norm(mesh, e);
    } else {
        for (double x : e) enorm += x * x;
        enorm = std::sqrt(enorm);
    }
    std::vector<double> out(values);
    const double scale = alpha / 100.0 / enorm;
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += scale * e[i] * values[i];
    return out;
}

}  // namespace

double CounterNormal::operator()(std::uint64_t stream, std::uint64_t index) const {
    const std::uint64_t key = splitmix64(seed_ ^ splitmix64(stream + 0x632BE59BD9B4E019ULL));
    const double u1 = to_unit(splitmix64(key + 2 * index));
    const double u2 = to_unit(splitmix64(key + 2 * index + 1));
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

PowerDensityField add_noise(const PowerDensityField& h, double alpha, std::uint64_t seed, NoiseNorm norm) {
    if (!(alpha >= 0.0)) throw std::invalid_argument("add_noise: alpha must be non-negative");
    if (alpha == 0.0) return h;
    const CounterNormal rng(seed);
    const auto& mesh = *h.mesh;
    return PowerDensityField(h.mesh, noisy(mesh, h.h11, rng, 0, alpha, norm), noisy(mesh, h.h12, rng, 1, alpha, norm),
                             noisy(mesh, h.h22, rng, 2, alpha, norm));
}

std::pair<double, double> symmetric_eigenvalues(double a, double b, double c) {
    const double mean = 0.5 * (a + c);
    const double radius = std::hypot(0.5 * (a - c), b);
    return {mean - radius, mean + radius};
}

std::array<double, 3> floor_eigenvalues(double a, double b, double c, double floor_l) {
    const auto [lo, hi] = symmetric_eigenvalues(a, b, c);
    if (lo >= floor_l) return {a, b, c};
    const double l1 = std::max(lo, floor_l);
    const double l2 = std::max(hi, floor_l);
    // Unit eigenvector for the larger eigenvalue, taken from the better-conditioned row.
    double vx, vy;
    if (std::abs(a - lo) >= std::abs(c - lo)) {
        vx = a - lo;
        vy = b;
    } else {
        vx = b;
        vy = c - lo;
    }
    const double len = std::hypot(vx, vy);
    if (len == 0.0) return {l1, 0.0, l1};  // multiple of the identity
    vx /= len;
    vy /= len;
    // l2 v v^T + l1 w w^T with w perpendicular to v.
    return {l2 * vx * vx + l1 * vy * vy, (l2 - l1) * vx * vy, l2 * vy * vy + l1 * vx * vx};
}

PowerDensityField eigen_floor(const PowerDensityField& h, double floor_l) {
    if (!(floor_l > 0.0)) throw std::invalid_argument("eigen_floor: L must be positive");
    auto h11 = h.h11;
    auto h12 = h.h12;
    auto h22 = h.h22;
    for (std::size_t i = 0; i < h11.size(); ++i) {
        const auto m = floor_eigenvalues(h11[i], h12[i], h22[i], floor_l);
        h11[i] = m[0];
        h12[i] = m[1];
        h22[i] = m[2];
    }
    return PowerDensityField(h.mesh, std::move(h11), std::move(h12), std::move(h22));
}

PowerDensityField perturb(const PowerDensityField& h, const NoiseSpec& spec) {
    return eigen_floor(add_noise(h, spec.alpha, spec.seed, spec.norm), spec.floor_L);
}

}  // namespace aet
