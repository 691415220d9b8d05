#include "aet/forward.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace aet {

namespace {

// 4-point Gauss-Legendre on [a, b]. Oscillating adapted fluxes (omega up to 8)
// need more than two points per edge to keep the discrete load compatible.
struct GaussRule {
    std::array<double, 4> t, w;
};

GaussRule gauss4(double a, double b) {
    static constexpr double x[4] = {-0.8611363115940526, -0.3399810435848563, 0.3399810435848563,
                                    0.8611363115940526};
    static constexpr double w[4] = {0.3478548451374538, 0.6521451548625461, 0.6521451548625461,
                                    0.3478548451374538};
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    GaussRule r;
    for (int k = 0; k < 4; ++k) {
        r.t[k] = mid + half * x[k];
        r.w[k] = half * w[k];
    }
    return r;
}

void require_same_mesh(const NodalScalarField& a, const NodalScalarField& b, const char* what) {
    if (!a.mesh || a.mesh.get() != b.mesh.get()) {
        throw std::invalid_argument(std::string(what) + ": fields must live on one mesh");
    }
}

}  // namespace

CsrMatrix assemble_stiffness(const NodalScalarField& sigma, double lambda) {
    if (!sigma.mesh) throw std::invalid_argument("assemble_stiffness: sigma has no mesh");
    const double smin = sigma.min();
    if (!(smin > 0.0) || smin < lambda) {
        std::ostringstream msg;
        msg << "assemble_stiffness: conductivity " << smin << " is below the ellipticity bound " << lambda;
        throw std::invalid_argument(msg.str());
    }
    return assemble_laplacian(*sigma.mesh, cell_average(sigma));
}

std::vector<double> neumann_load(const TriangleMesh& mesh, const BoundaryArc& arc,
                                 const std::function<double(double)>& flux) {
    std::vector<double> load(mesh.node_count(), 0.0);
    for (const auto& e : arc.edges) {
        const double end = std::min(e.t_b, arc.ell);
        const auto q = gauss4(e.t_a, end);
        if (end >= e.t_b) {
            double total = 0.0;
            for (int k = 0; k < 4; ++k) total += q.w[k] * flux(q.t[k]);
            load[e.node_a] += 0.5 * total;
            load[e.node_b] += 0.5 * total;
        } else {
            const double len = e.t_b - e.t_a;
            for (int k = 0; k < 4; ++k) {
                const double fw = q.w[k] * flux(q.t[k]);
                const double phi_b = (q.t[k] - e.t_a) / len;
                load[e.node_a] += fw * (1.0 - phi_b);
                load[e.node_b] += fw * phi_b;
            }
        }
    }
    return load;
}

NeumannSolution solve_neumann(const NeumannProblem& problem, const CgOptions& options) {
    const auto& mesh_ptr = problem.sigma.mesh;
    if (!mesh_ptr) throw std::invalid_argument("solve_neumann: sigma has no mesh");
    const auto k = assemble_stiffness(problem.sigma, problem.lambda);
    const auto load = neumann_load(*mesh_ptr, problem.arc, problem.flux);

    const double total = std::accumulate(load.begin(), load.end(), 0.0);
    const double scale = std::sqrt(std::inner_product(load.begin(), load.end(), load.begin(), 0.0));
    if (std::abs(total) > 1e-6 * std::max(scale, 1e-300) && std::abs(total) > 1e-14) {
        std::ostringstream msg;
        msg << "solve_neumann: incompatible boundary data, total flux " << total << " (load norm " << scale << ")";
        throw std::invalid_argument(msg.str());
    }

    CgOptions opts = options;
    opts.deflate_constants = true;
    std::vector<double> u(mesh_ptr->node_count(), 0.0);
    NeumannSolution sol;
    sol.stats = conjugate_gradient(k, load, u, opts);
    sol.u = NodalScalarField(mesh_ptr, std::move(u));
    return sol;
}

CellPowerDensity cell_power_density(const NodalScalarField& sigma, const NodalScalarField& u1,
                                    const NodalScalarField& u2) {
    require_same_mesh(sigma, u1, "cell_power_density");
    require_same_mesh(sigma, u2, "cell_power_density");
    const auto g1 = cell_gradient(u1);
    const auto g2 = cell_gradient(u2);
    CellPowerDensity h;
    h.sigma = cell_average(sigma);
    const auto n = h.sigma.size();
    h.h11.resize(n);
    h.h12.resize(n);
    h.h22.resize(n);
    h.det_h.resize(n);
    for (std::size_t c = 0; c < n; ++c) {
        using ld = long double;
        const ld s = h.sigma[c];
        const ld ax = g1[c].x, ay = g1[c].y, bx = g2[c].x, by = g2[c].y;
        const ld a11 = s * (ax * ax + ay * ay);
        const ld a12 = s * (ax * bx + ay * by);
        const ld a22 = s * (bx * bx + by * by);
        h.h11[c] = static_cast<double>(a11);
        h.h12[c] = static_cast<double>(a12);
        h.h22[c] = static_cast<double>(a22);
        h.det_h[c] = static_cast<double>(a11 * a22 - a12 * a12);
    }
    return h;
}

PowerDensityField power_density(const NodalScalarField& sigma, const NodalScalarField& u1,
                                const NodalScalarField& u2) {
    const auto cells = cell_power_density(sigma, u1, u2);
    auto clamp = [](std::vector<double> v) {
        for (auto& x : v) {
            if (x < 0.0 && x >= -1e-12) x = 0.0;
        }
        return v;
    };
    auto h11 = clamp(recover_to_nodes(sigma.mesh, cells.h11).values);
    auto h12 = recover_to_nodes(sigma.mesh, cells.h12).values;
    auto h22 = clamp(recover_to_nodes(sigma.mesh, cells.h22).values);
    return PowerDensityField(sigma.mesh, std::move(h11), std::move(h12), std::move(h22));
}

JacobianDiagnostics jacobian_diagnostics(const NodalScalarField& sigma, const NodalScalarField& u1,
                                         const NodalScalarField& u2) {
    const auto g1 = cell_gradient(u1);
    const auto g2 = cell_gradient(u2);
    const auto cells = cell_power_density(sigma, u1, u2);
    JacobianDiagnostics d;
    const auto n = g1.size();
    d.det_j.resize(n);
    d.det_h_cell.resize(n);
    for (std::size_t c = 0; c < n; ++c) {
        d.det_j[c] = cross(g1[c], g2[c]);
        d.det_h_cell[c] = cells.det(c);
        const double expected = cells.sigma[c] * cells.sigma[c] * d.det_j[c] * d.det_j[c];
        if (expected > 0.0) {
            d.identity_residual = std::max(d.identity_residual, std::abs(d.det_h_cell[c] - expected) / expected);
        }
    }
    const auto h = power_density(sigma, u1, u2);
    d.det_h = NodalScalarField(sigma.mesh, h.determinant());
    return d;
}

std::vector<std::size_t> cells_touching_uncontrolled_boundary(const TriangleMesh& mesh, double ell) {
    std::vector<char> uncontrolled(mesh.node_count(), 0);
    const auto& loop = mesh.boundary_loop();
    const auto& bt = mesh.boundary_t();
    for (std::size_t k = 0; k < loop.size(); ++k) {
        if (bt[k] > ell) uncontrolled[loop[k]] = 1;
    }
    std::vector<std::size_t> cells;
    for (std::size_t c = 0; c < mesh.triangle_count(); ++c) {
        const auto& t = mesh.triangle(c);
        if (uncontrolled[t[0]] || uncontrolled[t[1]] || uncontrolled[t[2]]) cells.push_back(c);
    }
    return cells;
}

}  // namespace aet
