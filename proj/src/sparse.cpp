#include "aet/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace aet {

CsrMatrix::CsrMatrix(std::size_t rows, std::vector<std::size_t> row_ptr, std::vector<std::size_t> cols)
    : rows_(rows), row_ptr_(std::move(row_ptr)), cols_(std::move(cols)), vals_(cols_.size(), 0.0) {
    if (row_ptr_.size() != rows_ + 1 || row_ptr_.back() != cols_.size()) {
        throw std::invalid_argument("CsrMatrix: inconsistent row pointer");
    }
}

CsrMatrix CsrMatrix::p1_pattern(const TriangleMesh& mesh) {
    const std::size_t n = mesh.node_count();
    std::vector<std::vector<std::size_t>> adj(n);
    for (const auto& t : mesh.triangles()) {
        for (auto a : t) {
            for (auto b : t) adj[a].push_back(b);
        }
    }
    std::vector<std::size_t> row_ptr(n + 1, 0);
    std::vector<std::size_t> cols;
    for (std::size_t i = 0; i < n; ++i) {
        auto& r = adj[i];
        std::sort(r.begin(), r.end());
        r.erase(std::unique(r.begin(), r.end()), r.end());
        cols.insert(cols.end(), r.begin(), r.end());
        row_ptr[i + 1] = cols.size();
    }
    return CsrMatrix(n, std::move(row_ptr), std::move(cols));
}

std::size_t CsrMatrix::find(std::size_t r, std::size_t c) const {
    auto first = cols_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[r]);
    auto last = cols_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[r + 1]);
    auto it = std::lower_bound(first, last, c);
    if (it == last || *it != c) throw std::out_of_range("CsrMatrix: entry outside sparsity pattern");
    return static_cast<std::size_t>(it - cols_.begin());
}

double CsrMatrix::at(std::size_t r, std::size_t c) const {
    auto first = cols_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[r]);
    auto last = cols_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[r + 1]);
    auto it = std::lower_bound(first, last, c);
    if (it == last || *it != c) return 0.0;
    return vals_[static_cast<std::size_t>(it - cols_.begin())];
}

void CsrMatrix::multiply(std::span<const double> x, std::span<double> y) const {
    for (std::size_t r = 0; r < rows_; ++r) {
        double s = 0.0;
        for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) s += vals_[k] * x[cols_[k]];
        y[r] = s;
    }
}

std::vector<double> CsrMatrix::operator*(std::span<const double> x) const {
    std::vector<double> y(rows_);
    multiply(x, y);
    return y;
}

std::vector<double> CsrMatrix::diagonal() const {
    std::vector<double> d(rows_, 0.0);
    for (std::size_t r = 0; r < rows_; ++r) d[r] = at(r, r);
    return d;
}

CsrMatrix CsrMatrix::submatrix(const std::vector<std::size_t>& keep) const {
    constexpr auto kDropped = static_cast<std::size_t>(-1);
    std::vector<std::size_t> remap(rows_, kDropped);
    for (std::size_t i = 0; i < keep.size(); ++i) remap[keep[i]] = i;
    std::vector<std::size_t> row_ptr(keep.size() + 1, 0);
    std::vector<std::size_t> cols;
    std::vector<double> vals;
    for (std::size_t i = 0; i < keep.size(); ++i) {
        const auto r = keep[i];
        for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) {
            if (remap[cols_[k]] == kDropped) continue;
            cols.push_back(remap[cols_[k]]);
            vals.push_back(vals_[k]);
        }
        row_ptr[i + 1] = cols.size();
    }
    CsrMatrix sub(keep.size(), std::move(row_ptr), std::move(cols));
    sub.vals_ = std::move(vals);
    return sub;
}

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
    return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

void remove_mean(std::span<double> v) {
    if (v.empty()) return;
    const double mean = std::accumulate(v.begin(), v.end(), 0.0) / double(v.size());
    for (auto& x : v) x -= mean;
}

}  // namespace

SolveStats conjugate_gradient(const CsrMatrix& a, std::span<const double> b, std::span<double> x,
                              const CgOptions& options) {
    const std::size_t n = a.rows();
    if (b.size() != n || x.size() != n) throw std::invalid_argument("conjugate_gradient: size mismatch");
    SolveStats stats;
    if (n == 0) return stats;

    const std::size_t cap = options.max_iterations > 0
                                ? options.max_iterations
                                : static_cast<std::size_t>(std::ceil(20.0 * std::sqrt(double(n))));

    std::vector<double> rhs(b.begin(), b.end());
    if (options.deflate_constants) {
        remove_mean(rhs);
        remove_mean(x);
    }
    const double bnorm = std::sqrt(dot(rhs, rhs));
    if (bnorm == 0.0) {
        std::fill(x.begin(), x.end(), 0.0);
        return stats;
    }

    auto inv_diag = a.diagonal();
    for (auto& d : inv_diag) d = d > 0.0 ? 1.0 / d : 1.0;

    std::vector<double> r(n), z(n), p(n), q(n);
    auto true_residual = [&] {
        a.multiply(x, q);
        for (std::size_t i = 0; i < n; ++i) r[i] = rhs[i] - q[i];
        if (options.deflate_constants) remove_mean(r);
        return std::sqrt(dot(r, r)) / bnorm;
    };
    auto precondition = [&] {
        for (std::size_t i = 0; i < n; ++i) z[i] = inv_diag[i] * r[i];
        if (options.deflate_constants) remove_mean(z);
    };

    stats.relative_residual = true_residual();
    // The recursive residual drifts from the true one at tight tolerances, so
    // CG restarts from the current iterate until the true residual agrees.
    while (stats.relative_residual > options.relative_tolerance && stats.iterations < cap) {
        precondition();
        p = z;
        double rz = dot(r, z);
        while (stats.iterations < cap) {
            a.multiply(p, q);
            const double pq = dot(p, q);
            if (!(pq > 0.0)) break;
            const double alpha = rz / pq;
            for (std::size_t i = 0; i < n; ++i) {
                x[i] += alpha * p[i];
                r[i] -= alpha * q[i];
            }
            if (options.deflate_constants) remove_mean(r);
            ++stats.iterations;
            if (std::sqrt(dot(r, r)) / bnorm <= 0.5 * options.relative_tolerance) break;
            precondition();
            const double rz_next = dot(r, z);
            const double beta = rz_next / rz;
            rz = rz_next;
            for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
        }
        const double previous = stats.relative_residual;
        stats.relative_residual = true_residual();
        if (!(stats.relative_residual < previous)) break;
    }
    if (options.deflate_constants) remove_mean(x);

    if (stats.relative_residual > options.relative_tolerance) {
        std::ostringstream msg;
        msg << "conjugate gradients did not converge: relative residual " << stats.relative_residual
            << " after " << stats.iterations << " iterations (cap " << cap << ")";
        throw SolverError(msg.str(), stats);
    }
    return stats;
}

}  // namespace aet
