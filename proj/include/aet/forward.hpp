#pragma once

#include <functional>
#include <vector>

#include "aet/boundary.hpp"
#include "aet/field.hpp"
#include "aet/mesh.hpp"
#include "aet/sparse.hpp"

namespace aet {

/// Limited-view Neumann problem: -div(sigma grad u) = 0, sigma du/dn = f on
/// Gamma = eta([0, ell]) and 0 on the rest of the boundary.
struct NeumannProblem {
    NodalScalarField sigma;
    BoundaryArc arc;
    std::function<double(double)> flux;
    double lambda = 0.5;
};

/// P1 stiffness with per-triangle sigma taken as the mean of its three nodal values.
/// Throws std::invalid_argument if sigma drops below `lambda` (or is not positive).
CsrMatrix assemble_stiffness(const NodalScalarField& sigma, double lambda = 0.0);

/// Boundary load for flux f on the arc, zero elsewhere.
///
/// Each boundary edge's flux int f dt is computed with 4-point Gauss in the
/// boundary parameter. Edges fully inside Gamma split it equally between their end
/// nodes (exact on the polygonal boundary for the coordinate fluxes); the edge
/// containing ell is truncated at ell and weighted by the hat functions.
std::vector<double> neumann_load(const TriangleMesh& mesh, const BoundaryArc& arc,
                                 const std::function<double(double)>& flux);

struct NeumannSolution {
    NodalScalarField u;
    SolveStats stats;
};

/// Solves on the complement of the constants; the result has zero nodal mean.
/// Throws std::invalid_argument for incompatible data and SolverError on stagnation.
NeumannSolution solve_neumann(const NeumannProblem& problem, const CgOptions& options = {});

/// H evaluated cellwise, sigma_c grad(u_i) . grad(u_j), before nodal recovery.
struct CellPowerDensity {
    std::vector<double> h11, h12, h22;
    std::vector<double> sigma;  // cell conductivity used
    /// h11 h22 - h12^2 with the entries formed and combined in extended precision;
    /// the subtraction cancels badly where grad u1 and grad u2 are nearly parallel.
    std::vector<double> det_h;

    double det(std::size_t c) const { return det_h[c]; }
};

CellPowerDensity cell_power_density(const NodalScalarField& sigma, const NodalScalarField& u1,
                                    const NodalScalarField& u2);

/// Power densities recovered to the nodes; tiny negative diagonal entries are clamped to 0.
PowerDensityField power_density(const NodalScalarField& sigma, const NodalScalarField& u1,
                                const NodalScalarField& u2);

struct JacobianDiagnostics {
    std::vector<double> det_j;       // per cell, det[grad u1  grad u2]
    std::vector<double> det_h_cell;  // per cell, before recovery
    NodalScalarField det_h;          // from the recovered nodal H
    /// max_c |detH_c - sigma_c^2 detJ_c^2| / (sigma_c^2 detJ_c^2) over cells with detJ != 0
    double identity_residual = 0.0;
};

JacobianDiagnostics jacobian_diagnostics(const NodalScalarField& sigma, const NodalScalarField& u1,
                                         const NodalScalarField& u2);

/// Cells with at least one vertex on the uncontrolled boundary (t strictly beyond ell).
std::vector<std::size_t> cells_touching_uncontrolled_boundary(const TriangleMesh& mesh, double ell);

}  // namespace aet
