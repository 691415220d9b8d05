#pragma once

#include <vector>

#include "aet/field.hpp"
#include "aet/sparse.hpp"

namespace aet {

/// Gram-Schmidt transfer matrix T = [[t11, 0], [t21, t22]] with its inverse
/// Tinv = [[s11, 0], [s21, s22]] at the nodes, and the derivative fields
/// V_ij = grad(T_i1) Tinv_1j + grad(T_i2) Tinv_2j per cell.
struct TransferData {
    MeshPtr mesh;
    std::vector<double> d;  // sqrt(det H)
    std::vector<double> t11, t21, t22;
    std::vector<double> s11, s21, s22;
    CellVectorField v11, v12, v21, v22;
};

/// Throws std::domain_error if some node has h11 <= 0 or det H <= 0.
TransferData transfer_matrix(const PowerDensityField& h);

/// F = (V12 - V21 - J grad log D) / 2 with J the rotation by +pi/2.
CellVectorField theta_rhs(const TransferData& td);

/// Rescales every cell vector longer than the given percentile of |F| down to
/// that length. Returns the number of cells touched.
std::size_t clamp_to_percentile(CellVectorField& f, double percentile);

struct BoundaryTraces {
    std::vector<double> theta;      // unwrapped, ordered as the boundary loop
    std::vector<double> log_sigma;  // ordered as the boundary loop
    std::size_t repaired = 0;       // nodes where |grad u1| was too small for an angle
};

/// Dirichlet traces for the reconstruction mesh from a ground-truth forward solve
/// on another (finer) mesh: theta = atan2 of the recovered grad u1, log sigma sampled.
BoundaryTraces boundary_theta(const NodalScalarField& u1_truth, const NodalScalarField& sigma_truth,
                              const MeshPtr& recon_mesh);

/// Angle of the recovered grad u1 of a truth field, evaluated at every node of
/// `target` (wrapped to (-pi, pi]).
NodalScalarField theta_truth(const NodalScalarField& u1_truth, const MeshPtr& target);

PoissonResult solve_theta(const CellVectorField& f, const BoundaryTraces& traces, const CgOptions& options = {});

/// Companion-field variants for G = cos(2 theta) K + sin(2 theta) K~.
///   antisymmetric: K~ = K with K = U(V11 - V22) + JU(V12 - V21)
///   j_rotated:  K~ = J K
///   u_reflected: K~ = U K
///   swapped:    K~ = JU(V11 - V22) + U(V12 - V21)
///   consistent: K = U(V11 - V22) + JU(V12 + V21), K~ = J K
/// Only `consistent` reproduces grad log sigma; the others are kept so the
/// regression test can keep checking that they do not.
enum class GFormula { antisymmetric, j_rotated, u_reflected, swapped, consistent };

CellVectorField sigma_rhs(const TransferData& td, const NodalScalarField& theta,
                          GFormula formula = GFormula::consistent);

/// Solves Delta(log sigma) = div G and returns sigma = exp(log sigma).
PoissonResult solve_sigma(const CellVectorField& g, const BoundaryTraces& traces, const CgOptions& options = {});

struct ReconOptions {
    double f_clamp_percentile = 0.0;  // 0 disables the clamp, otherwise e.g. 99.9
    GFormula formula = GFormula::consistent;
    CgOptions cg;
};

struct Reconstruction {
    TransferData transfer;
    CellVectorField f;
    CellVectorField g;
    NodalScalarField theta;
    NodalScalarField sigma;
    SolveStats theta_stats;
    SolveStats sigma_stats;
    std::size_t clamped_cells = 0;
};

/// Both steps on the mesh of `h`.
Reconstruction reconstruct(const PowerDensityField& h, const BoundaryTraces& traces, const ReconOptions& options = {});

}  // namespace aet
