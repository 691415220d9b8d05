#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "aet/mesh.hpp"

namespace aet {

/// Compressed sparse row matrix with sorted column indices.
class CsrMatrix {
public:
    CsrMatrix() = default;
    CsrMatrix(std::size_t rows, std::vector<std::size_t> row_ptr, std::vector<std::size_t> cols);

    /// Square matrix with the node-adjacency pattern of a P1 mesh (diagonal included).
    static CsrMatrix p1_pattern(const TriangleMesh& mesh);

    std::size_t rows() const { return rows_; }
    std::size_t nonzeros() const { return vals_.size(); }
    const std::vector<std::size_t>& row_ptr() const { return row_ptr_; }
    const std::vector<std::size_t>& cols() const { return cols_; }
    std::vector<double>& values() { return vals_; }
    const std::vector<double>& values() const { return vals_; }

    /// Position of (r, c) in `values()`; throws if (r, c) is outside the pattern.
    std::size_t find(std::size_t r, std::size_t c) const;
    void add(std::size_t r, std::size_t c, double v) { vals_[find(r, c)] += v; }
    double at(std::size_t r, std::size_t c) const;

    void multiply(std::span<const double> x, std::span<double> y) const;
    std::vector<double> operator*(std::span<const double> x) const;
    std::vector<double> diagonal() const;

    /// Rows/columns restricted to `keep` (given in ascending order).
    CsrMatrix submatrix(const std::vector<std::size_t>& keep) const;

private:
    std::size_t rows_ = 0;
    std::vector<std::size_t> row_ptr_{0};
    std::vector<std::size_t> cols_;
    std::vector<double> vals_;
};

struct SolveStats {
    std::size_t iterations = 0;
    double relative_residual = 0.0;
};

class SolverError : public std::runtime_error {
public:
    SolverError(const std::string& what, SolveStats stats) : std::runtime_error(what), stats_(stats) {}
    const SolveStats& stats() const { return stats_; }

private:
    SolveStats stats_;
};

struct CgOptions {
    double relative_tolerance = 1e-10;
    /// Zero selects the default cap 20 * sqrt(unknowns).
    std::size_t max_iterations = 0;
    /// Work on the complement of the constant vector (singular Neumann systems).
    bool deflate_constants = false;
};

/// Jacobi-preconditioned conjugate gradients for SPD (or SPSD with deflation) systems.
/// `x` holds the initial guess on entry. Throws SolverError when the cap is reached.
SolveStats conjugate_gradient(const CsrMatrix& a, std::span<const double> b, std::span<double> x,
                              const CgOptions& options = {});

}  // namespace aet
