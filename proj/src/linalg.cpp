#include "dkge/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "dkge/rng.hpp"

namespace dkge {

namespace {

double max_abs(const Matrix& a) {
    double m = 0.0;
    const double* p = a.data();
    const size_t n = a.rows() * a.cols();
    for (size_t i = 0; i < n; ++i) m = std::max(m, std::abs(p[i]));
    return m;
}

void check_finite(const Matrix& a, const char* what) {
    const double* p = a.data();
    const size_t n = a.rows() * a.cols();
    for (size_t i = 0; i < n; ++i)
        if (!std::isfinite(p[i])) throw std::runtime_error(std::string(what) + ": non-finite entry");
}

}  // namespace

Matrix Matrix::identity(size_t n) {
    Matrix m(n, n, 0.0);
    for (size_t i = 0; i < n; ++i) m.at(i, i) = 1.0;
    return m;
}

Matrix row_center(const Matrix& a) {
    if (a.cols() == 0) throw std::invalid_argument("row_center: need at least one column");
    Matrix out(a.rows(), a.cols());
    for (size_t i = 0; i < a.rows(); ++i) {
        double sum = 0.0;
        for (size_t j = 0; j < a.cols(); ++j) sum += a.at(i, j);
        const double mean = sum / static_cast<double>(a.cols());
        for (size_t j = 0; j < a.cols(); ++j) out.at(i, j) = a.at(i, j) - mean;
    }
    return out;
}

EigenResult sym_eigen(const Matrix& s) {
    const size_t k = s.rows();
    if (s.cols() != k) throw std::invalid_argument("sym_eigen: matrix not square");
    const double scale = max_abs(s);
    for (size_t i = 0; i < k; ++i)
        for (size_t j = i + 1; j < k; ++j)
            if (std::abs(s.at(i, j) - s.at(j, i)) > 1e-9 * std::max(1.0, scale))
                throw std::invalid_argument("sym_eigen: matrix not symmetric");

    Matrix a = s;
    Matrix v = Matrix::identity(k);
    const double eps = 1e-13 * std::max(scale, 1e-300);

    // Cyclic-by-rows Jacobi sweeps; k <= 512 keeps this comfortably cheap.
    for (int sweep = 0; sweep < 64; ++sweep) {
        double off = 0.0;
        for (size_t p = 0; p + 1 < k; ++p)
            for (size_t q = p + 1; q < k; ++q) off = std::max(off, std::abs(a.at(p, q)));
        if (off <= eps) break;

        for (size_t p = 0; p + 1 < k; ++p) {
            for (size_t q = p + 1; q < k; ++q) {
                const double apq = a.at(p, q);
                if (std::abs(apq) <= eps) continue;
                const double theta = (a.at(q, q) - a.at(p, p)) / (2.0 * apq);
                const double t = (theta >= 0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double sn = t * c;
                for (size_t i = 0; i < k; ++i) {
                    const double aip = a.at(i, p);
                    const double aiq = a.at(i, q);
                    a.at(i, p) = c * aip - sn * aiq;
                    a.at(i, q) = sn * aip + c * aiq;
                }
                for (size_t i = 0; i < k; ++i) {
                    const double api = a.at(p, i);
                    const double aqi = a.at(q, i);
                    a.at(p, i) = c * api - sn * aqi;
                    a.at(q, i) = sn * api + c * aqi;
                }
                for (size_t i = 0; i < k; ++i) {
                    const double vip = v.at(i, p);
                    const double viq = v.at(i, q);
                    v.at(i, p) = c * vip - sn * viq;
                    v.at(i, q) = sn * vip + c * viq;
                }
            }
        }
    }

    std::vector<size_t> order(k);
    std::iota(order.begin(), order.end(), size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](size_t x, size_t y) { return a.at(x, x) > a.at(y, y); });

    EigenResult res;
    res.eigenvalues.resize(k);
    res.eigenvectors = Matrix(k, k);
    for (size_t c = 0; c < k; ++c) {
        res.eigenvalues[c] = a.at(order[c], order[c]);
        for (size_t i = 0; i < k; ++i) res.eigenvectors.at(i, c) = v.at(i, order[c]);
    }
    check_finite(res.eigenvectors, "sym_eigen");
    return res;
}

Matrix orthonormal_complete(const Matrix& basis, size_t want, uint64_t seed) {
    const size_t dim = basis.rows();
    const size_t p = basis.cols();
    for (size_t a = 0; a < p; ++a) {
        for (size_t b = a; b < p; ++b) {
            double dot = 0.0;
            for (size_t i = 0; i < dim; ++i) dot += basis.at(i, a) * basis.at(i, b);
            const double expect = a == b ? 1.0 : 0.0;
            if (std::abs(dot - expect) > 1e-8)
                throw std::invalid_argument("orthonormal_complete: basis not orthonormal");
        }
    }
    if (want + p > dim)
        throw std::invalid_argument("orthonormal_complete: not enough dimensions to complete");

    Matrix out(dim, want);
    if (want == 0) return out;

    Rng rng(seed);
    std::vector<double> cand(dim);
    size_t accepted = 0;
    int retries = 0;
    constexpr int kMaxRetries = 256;
    while (accepted < want) {
        for (size_t i = 0; i < dim; ++i) cand[i] = rng.uniform(-1.0, 1.0);
        // Two MGS passes against the basis and the accepted columns.
        for (int pass = 0; pass < 2; ++pass) {
            for (size_t c = 0; c < p; ++c) {
                double dot = 0.0;
                for (size_t i = 0; i < dim; ++i) dot += cand[i] * basis.at(i, c);
                for (size_t i = 0; i < dim; ++i) cand[i] -= dot * basis.at(i, c);
            }
            for (size_t c = 0; c < accepted; ++c) {
                double dot = 0.0;
                for (size_t i = 0; i < dim; ++i) dot += cand[i] * out.at(i, c);
                for (size_t i = 0; i < dim; ++i) cand[i] -= dot * out.at(i, c);
            }
        }
        double norm2 = 0.0;
        for (size_t i = 0; i < dim; ++i) norm2 += cand[i] * cand[i];
        const double norm = std::sqrt(norm2);
        if (norm < 1e-7 * std::sqrt(static_cast<double>(dim))) {
            if (++retries > kMaxRetries)
                throw std::runtime_error("orthonormal_complete: draws stayed rank-deficient");
            continue;
        }
        for (size_t i = 0; i < dim; ++i) out.at(i, accepted) = cand[i] / norm;
        ++accepted;
    }
    return out;
}

Matrix solve_orthogonal_auxiliary(const Matrix& a, double rank_tol, uint64_t seed) {
    const size_t k = a.rows();
    const size_t n = a.cols();
    if (n < 2) throw std::invalid_argument("solve_orthogonal_auxiliary: need at least 2 columns");

    const Matrix centered = row_center(a);

    // Gram matrix of the centered rows; k x k, exactly symmetric.
    Matrix gram(k, k);
    for (size_t i = 0; i < k; ++i) {
        for (size_t j = i; j < k; ++j) {
            double dot = 0.0;
            for (size_t c = 0; c < n; ++c) dot += centered.at(i, c) * centered.at(j, c);
            gram.at(i, j) = dot;
            gram.at(j, i) = dot;
        }
    }

    const EigenResult eig = sym_eigen(gram);
    const double lambda_max = eig.eigenvalues.empty() ? 0.0 : std::max(eig.eigenvalues[0], 0.0);
    const double tol = rank_tol < 0 ? 1e-8 * lambda_max * static_cast<double>(k) : rank_tol;
    size_t rank = 0;
    while (rank < k && eig.eigenvalues[rank] > tol) ++rank;

    // Left factor: data eigenvectors M plus a seeded completion M_hat.
    const size_t avail = n - 1 >= rank ? n - 1 - rank : 0;  // directions orthogonal to N_f and 1
    const size_t extra = std::min(k - rank, avail);

    Matrix left(k, rank + extra);
    for (size_t c = 0; c < rank; ++c)
        for (size_t i = 0; i < k; ++i) left.at(i, c) = eig.eigenvectors.at(i, c);
    {
        Matrix m(k, rank);
        for (size_t c = 0; c < rank; ++c)
            for (size_t i = 0; i < k; ++i) m.at(i, c) = eig.eigenvectors.at(i, c);
        const Matrix m_hat = orthonormal_complete(m, extra, seed);
        for (size_t c = 0; c < extra; ++c)
            for (size_t i = 0; i < k; ++i) left.at(i, rank + c) = m_hat.at(i, c);
    }

    // Right factor: N_f = centered^T M Sigma^{-1}, completed orthogonally to
    // [N_f | 1/sqrt(n) 1] so that X 1 = 0 survives the completion.
    Matrix right(n, rank + extra);
    for (size_t c = 0; c < rank; ++c) {
        const double sigma = std::sqrt(eig.eigenvalues[c]);
        for (size_t j = 0; j < n; ++j) {
            double dot = 0.0;
            for (size_t i = 0; i < k; ++i) dot += centered.at(i, j) * eig.eigenvectors.at(i, c);
            right.at(j, c) = dot / sigma;
        }
    }
    if (extra > 0) {
        Matrix span(n, rank + 1);
        for (size_t c = 0; c < rank; ++c)
            for (size_t j = 0; j < n; ++j) span.at(j, c) = right.at(j, c);
        const double inv_sqrt_n = 1.0 / std::sqrt(static_cast<double>(n));
        for (size_t j = 0; j < n; ++j) span.at(j, rank) = inv_sqrt_n;
        const Matrix n_hat = orthonormal_complete(span, extra, seed ^ 0x517cc1b727220a95ull);
        for (size_t c = 0; c < extra; ++c)
            for (size_t j = 0; j < n; ++j) right.at(j, rank + c) = n_hat.at(j, c);
    }

    const double sqrt_n = std::sqrt(static_cast<double>(n));
    Matrix x(k, n);
    const size_t frame = rank + extra;
    for (size_t i = 0; i < k; ++i) {
        for (size_t j = 0; j < n; ++j) {
            double dot = 0.0;
            for (size_t c = 0; c < frame; ++c) dot += left.at(i, c) * right.at(j, c);
            x.at(i, j) = sqrt_n * dot;
        }
    }
    check_finite(x, "solve_orthogonal_auxiliary");
    return x;
}

}  // namespace dkge
