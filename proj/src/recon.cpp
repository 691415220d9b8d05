#include "aet/recon.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace aet {

namespace {

constexpr double pi = std::numbers::pi;

// J = [[0, -1], [1, 0]], U = diag(1, -1), JU = [[0, 1], [1, 0]].
Vec2 apply_j(const Vec2& v) { return {-v.y, v.x}; }
Vec2 apply_u(const Vec2& v) { return {v.x, -v.y}; }
Vec2 apply_ju(const Vec2& v) { return {v.y, v.x}; }

std::vector<double> cell_mean(const TriangleMesh& mesh, const std::vector<double>& nodal) {
    std::vector<double> out(mesh.triangle_count());
    for (std::size_t c = 0; c < out.size(); ++c) {
        const auto& t = mesh.triangle(c);
        out[c] = (nodal[t[0]] + nodal[t[1]] + nodal[t[2]]) / 3.0;
    }
    return out;
}

CellVectorField gradient_of(const MeshPtr& mesh, const std::vector<double>& nodal) {
    return cell_gradient(NodalScalarField(mesh, nodal));
}

std::vector<double> unwrap(std::vector<double> a) {
    for (std::size_t k = 1; k < a.size(); ++k) {
        double step = a[k] - a[k - 1];
        const double turns = std::round(step / (2.0 * pi));
        a[k] -= turns * 2.0 * pi;
    }
    return a;
}

}  // namespace

TransferData transfer_matrix(const PowerDensityField& h) {
    if (!h.mesh) throw std::invalid_argument("transfer_matrix: H has no mesh");
    const auto n = h.size();
    TransferData td;
    td.mesh = h.mesh;
    td.d.resize(n);
    td.t11.resize(n);
    td.t21.resize(n);
    td.t22.resize(n);
    td.s11.resize(n);
    td.s21.resize(n);
    td.s22.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double a = h.h11[i], b = h.h12[i];
        const double det = h.det(i);
        if (!(a > 0.0) || !(det > 0.0)) {
            std::ostringstream msg;
            msg << "transfer_matrix: H is not positive definite at node " << i << " (h11 = " << a
                << ", det = " << det << "); apply eigen_floor first";
            throw std::domain_error(msg.str());
        }
        const double ra = std::sqrt(a);
        const double d = std::sqrt(det);
        td.d[i] = d;
        td.t11[i] = 1.0 / ra;
        td.t21[i] = -b / (ra * d);
        td.t22[i] = ra / d;
        td.s11[i] = ra;
        td.s21[i] = b / ra;
        td.s22[i] = d / ra;
    }

    const auto& mesh = *h.mesh;
    const auto g11 = gradient_of(h.mesh, td.t11);
    const auto g21 = gradient_of(h.mesh, td.t21);
    const auto g22 = gradient_of(h.mesh, td.t22);
    const auto c11 = cell_mean(mesh, td.s11);
    const auto c21 = cell_mean(mesh, td.s21);
    const auto c22 = cell_mean(mesh, td.s22);
    const auto nc = mesh.triangle_count();
    std::vector<Vec2> v11(nc), v12(nc, Vec2{0.0, 0.0}), v21(nc), v22(nc);
    for (std::size_t c = 0; c < nc; ++c) {
        v11[c] = g11[c] * c11[c];
        v21[c] = g21[c] * c11[c] + g22[c] * c21[c];
        v22[c] = g22[c] * c22[c];
    }
    td.v11 = CellVectorField(h.mesh, std::move(v11));
    td.v12 = CellVectorField(h.mesh, std::move(v12));
    td.v21 = CellVectorField(h.mesh, std::move(v21));
    td.v22 = CellVectorField(h.mesh, std::move(v22));
    return td;
}

CellVectorField theta_rhs(const TransferData& td) {
    std::vector<double> log_d(td.d.size());
    for (std::size_t i = 0; i < log_d.size(); ++i) log_d[i] = std::log(td.d[i]);
    const auto glog = gradient_of(td.mesh, log_d);
    std::vector<Vec2> f(glog.size());
    for (std::size_t c = 0; c < f.size(); ++c) {
        f[c] = (td.v12[c] - td.v21[c] - apply_j(glog[c])) * 0.5;
    }
    return CellVectorField(td.mesh, std::move(f));
}

std::size_t clamp_to_percentile(CellVectorField& f, double percentile) {
    if (!(percentile > 0.0 && percentile <= 100.0)) {
        throw std::invalid_argument("clamp_to_percentile: percentile must be in (0, 100]");
    }
    if (f.size() == 0) return 0;
    std::vector<double> mags(f.size());
    for (std::size_t c = 0; c < f.size(); ++c) mags[c] = norm(f[c]);
    auto sorted = mags;
    const auto k = std::min(sorted.size() - 1, static_cast<std::size_t>(std::ceil(percentile / 100.0 * sorted.size())) - 1);
    std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(k), sorted.end());
    const double cap = sorted[k];
    std::size_t touched = 0;
    for (std::size_t c = 0; c < f.size(); ++c) {
        if (mags[c] > cap) {
            f[c] = f[c] * (cap / mags[c]);
            ++touched;
        }
    }
    return touched;
}

BoundaryTraces boundary_theta(const NodalScalarField& u1_truth, const NodalScalarField& sigma_truth,
                              const MeshPtr& recon_mesh) {
    if (!u1_truth.mesh || u1_truth.mesh != sigma_truth.mesh) {
        throw std::invalid_argument("boundary_theta: u1 and sigma must share a mesh");
    }
    const auto grad = recover_to_nodes(cell_gradient(u1_truth));
    const auto gx = grad.component(0);
    const auto gy = grad.component(1);
    const PointLocator locator(u1_truth.mesh);

    const auto& loop = recon_mesh->boundary_loop();
    const auto m = loop.size();
    BoundaryTraces tr;
    tr.theta.assign(m, 0.0);
    tr.log_sigma.resize(m);
    std::vector<char> valid(m, 0);
    for (std::size_t k = 0; k < m; ++k) {
        const Vec2 p = recon_mesh->node(loop[k]);
        const double dx = locator.evaluate(gx.values, p);
        const double dy = locator.evaluate(gy.values, p);
        if (std::hypot(dx, dy) >= 1e-10) {
            tr.theta[k] = std::atan2(dy, dx);
            valid[k] = 1;
        }
        const double s = locator.evaluate(sigma_truth.values, p);
        if (!(s > 0.0)) throw std::domain_error("boundary_theta: conductivity trace is not positive");
        tr.log_sigma[k] = std::log(s);
    }

    // Nearest valid neighbour along the loop for degenerate gradients.
    if (std::none_of(valid.begin(), valid.end(), [](char v) { return v != 0; })) {
        throw std::domain_error("boundary_theta: grad u1 vanishes on the whole boundary");
    }
    for (std::size_t k = 0; k < m; ++k) {
        if (valid[k]) continue;
        for (std::size_t off = 1; off <= m / 2; ++off) {
            const std::size_t fwd = (k + off) % m;
            const std::size_t bwd = (k + m - off) % m;
            if (valid[fwd]) {
                tr.theta[k] = tr.theta[fwd];
                break;
            }
            if (valid[bwd]) {
                tr.theta[k] = tr.theta[bwd];
                break;
            }
        }
        ++tr.repaired;
    }
    tr.theta = unwrap(std::move(tr.theta));
    return tr;
}

NodalScalarField theta_truth(const NodalScalarField& u1_truth, const MeshPtr& target) {
    const auto grad = recover_to_nodes(cell_gradient(u1_truth));
    const auto gx = interpolate(grad.component(0), target);
    const auto gy = interpolate(grad.component(1), target);
    std::vector<double> theta(target->node_count());
    for (std::size_t i = 0; i < theta.size(); ++i) theta[i] = std::atan2(gy[i], gx[i]);
    return NodalScalarField(target, std::move(theta));
}

PoissonResult solve_theta(const CellVectorField& f, const BoundaryTraces& traces, const CgOptions& options) {
    return solve_dirichlet_poisson(f.mesh, weak_divergence_load(f), traces.theta, options);
}

CellVectorField sigma_rhs(const TransferData& td, const NodalScalarField& theta, GFormula formula) {
    if (theta.mesh.get() != td.mesh.get()) throw std::invalid_argument("sigma_rhs: theta lives on another mesh");
    const auto th = cell_average(theta);
    std::vector<Vec2> g(th.size());
    for (std::size_t c = 0; c < g.size(); ++c) {
        const double cs = std::cos(2.0 * th[c]);
        const double sn = std::sin(2.0 * th[c]);
        const Vec2 a = td.v11[c] - td.v22[c];
        const Vec2 k = apply_u(a) + apply_ju(td.v12[c] - td.v21[c]);
        switch (formula) {
            case GFormula::antisymmetric:
                g[c] = k * (cs + sn);
                break;
            case GFormula::j_rotated:
                g[c] = k * cs + apply_j(k) * sn;
                break;
            case GFormula::u_reflected:
                g[c] = k * cs + apply_u(k) * sn;
                break;
            case GFormula::swapped:
                g[c] = k * cs + (apply_ju(a) + apply_u(td.v12[c] - td.v21[c])) * sn;
                break;
            case GFormula::consistent: {
                const Vec2 kc = apply_u(a) + apply_ju(td.v12[c] + td.v21[c]);
                g[c] = kc * cs + apply_j(kc) * sn;
                break;
            }
        }
    }
    return CellVectorField(td.mesh, std::move(g));
}

PoissonResult solve_sigma(const CellVectorField& g, const BoundaryTraces& traces, const CgOptions& options) {
    auto res = solve_dirichlet_poisson(g.mesh, weak_divergence_load(g), traces.log_sigma, options);
    for (auto& v : res.solution.values) v = std::exp(v);
    return res;
}

Reconstruction reconstruct(const PowerDensityField& h, const BoundaryTraces& traces, const ReconOptions& options) {
    Reconstruction r;
    r.transfer = transfer_matrix(h);
    r.f = theta_rhs(r.transfer);
    if (options.f_clamp_percentile > 0.0) r.clamped_cells = clamp_to_percentile(r.f, options.f_clamp_percentile);
    try {
        auto th = solve_theta(r.f, traces, options.cg);
        r.theta = std::move(th.solution);
        r.theta_stats = th.stats;
    } catch (const SolverError& e) {
        throw SolverError(std::string("theta step: ") + e.what(), e.stats());
    }
    r.g = sigma_rhs(r.transfer, r.theta, options.formula);
    try {
        auto sg = solve_sigma(r.g, traces, options.cg);
        r.sigma = std::move(sg.solution);
        r.sigma_stats = sg.stats;
    } catch (const SolverError& e) {
        throw SolverError(std::string("sigma step: ") + e.what(), e.stats());
    }
    return r;
}

}  // namespace aet
