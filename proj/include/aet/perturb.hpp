#pragma once

#include <array>
#include <cstdint>

#include "aet/field.hpp"

namespace aet {

/// How the standard-normal noise field e is normalized before scaling.
enum class NoiseNorm {
    mass_matrix,  // continuous L2 norm through the P1 mass matrix
    euclidean,    // plain vector norm of the nodal values
};

struct NoiseSpec {
    double alpha = 0.0;  // percent
    std::uint64_t seed = 50;
    double floor_L = 1e-6;
    NoiseNorm norm = NoiseNorm::euclidean;
};

/// Counter-based standard normals: the value depends only on (seed, stream, index).
/// SplitMix64 hashing feeds a Box-Muller transform.
class CounterNormal {
public:
    explicit CounterNormal(std::uint64_t seed) : seed_(seed) {}
    double operator()(std::uint64_t stream, std::uint64_t index) const;

private:
    std::uint64_t seed_;
};

/// H~_ij = H_ij + (alpha/100) (e_ij / ||e_ij||) H_ij with independent e11, e12, e22.
PowerDensityField add_noise(const PowerDensityField& h, double alpha, std::uint64_t seed,
                            NoiseNorm norm = NoiseNorm::euclidean);

/// Clamp both eigenvalues of every nodal 2x2 matrix to at least `floor_l`,
/// keeping the eigenvectors.
PowerDensityField eigen_floor(const PowerDensityField& h, double floor_l);

/// One node of eigen_floor: (h11, h12, h22) of the floored matrix.
std::array<double, 3> floor_eigenvalues(double a, double b, double c, double floor_l);

/// Eigenvalues (ascending) of [[a, b], [b, c]].
std::pair<double, double> symmetric_eigenvalues(double a, double b, double c);

/// add_noise followed by eigen_floor.
PowerDensityField perturb(const PowerDensityField& h, const NoiseSpec& spec);

}  // namespace aet
