#pragma once

// Small dense real linear algebra backing the auxiliary subproblems: row
// centering, cyclic-Jacobi symmetric eigendecomposition, seeded orthonormal
// completion, and the closed-form maximizer of tr(A^T X) over the centered
// orthogonal set {X : X1 = 0, XX^T = N I}.
//
// Sizes here are k x k with k <= 512 and k x N with N up to a few tens of
// thousands; O(k^2 N + k^3) routines are plenty.

#include <cstddef>
#include <cstdint>
#include <vector>

namespace dkge {

// Row-major dense matrix of doubles.
class Matrix {
public:
    Matrix() = default;
    Matrix(size_t rows, size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), v_(rows * cols, fill) {}

    static Matrix identity(size_t n);

    double& at(size_t r, size_t c) { return v_[r * cols_ + c]; }
    double at(size_t r, size_t c) const { return v_[r * cols_ + c]; }
    size_t rows() const { return rows_; }
    size_t cols() const { return cols_; }
    double* data() { return v_.data(); }
    const double* data() const { return v_.data(); }

    bool operator==(const Matrix&) const = default;

private:
    size_t rows_ = 0;
    size_t cols_ = 0;
    std::vector<double> v_;
};

struct EigenResult {
    std::vector<double> eigenvalues;  // descending
    Matrix eigenvectors;              // column i pairs with eigenvalues[i]
};

// A - (1/N) A 1 1^T: every row of the result sums to zero.
Matrix row_center(const Matrix& a);

// Cyclic Jacobi on a symmetric matrix. Throws if the input is asymmetric
// beyond 1e-9 relative. Residual contract: ||S U - U diag(L)||_max <=
// 1e-8 (1 + ||S||_max) and ||U^T U - I||_max <= 1e-10.
EigenResult sym_eigen(const Matrix& s);

// Returns `want` unit columns orthogonal to the columns of `basis` and to
// each other: seeded random draws + modified Gram-Schmidt with one
// re-orthogonalization pass. Deterministic given the seed. Throws if the
// basis is not orthonormal, if want exceeds the dimensions available, or if
// repeated draws stay numerically rank-deficient.
Matrix orthonormal_complete(const Matrix& basis, size_t want, uint64_t seed);

// Maximizes tr(A^T X) subject to X1 = 0, XX^T = N I, for A of shape k x N.
// rank_tol < 0 selects the scale-aware default 1e-8 * lambda_max * k.
//
// When N <= k the constraint set is empty (XX^T = N I needs rank k <= N-1);
// the returned X then uses every direction that exists, still attains the
// optimal value sqrt(N) * nuclear_norm(row_center(A)), and satisfies X1 = 0,
// but XX^T/N has zero blocks in the missing directions.
Matrix solve_orthogonal_auxiliary(const Matrix& a, double rank_tol = -1.0,
                                  uint64_t seed = 0x6f727468u);

}  // namespace dkge
