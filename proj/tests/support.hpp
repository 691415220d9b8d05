#pragma once

#include <cmath>
#include <numeric>
#include <vector>

#include "aet/mesh.hpp"

namespace aet::test {

// Meshes are immutable; share the few sizes the unit tests use.
inline MeshPtr mesh_h(double h) {
    static std::vector<std::pair<double, MeshPtr>> cache;
    for (const auto& [hh, m] : cache) {
        if (hh == h) return m;
    }
    cache.emplace_back(h, make_disk_mesh(h));
    return cache.back().second;
}

inline MeshPtr coarse_mesh() { return mesh_h(0.1); }
inline MeshPtr medium_mesh() { return mesh_h(0.05); }

// Least-squares slope of log(err) against log(h).
inline double fitted_order(const std::vector<double>& h, const std::vector<double>& err) {
    const auto n = static_cast<double>(h.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t k = 0; k < h.size(); ++k) {
        const double x = std::log(h[k]), y = std::log(err[k]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

inline double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

}  // namespace aet::test
