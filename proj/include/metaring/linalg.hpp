#ifndef METARING_LINALG_HPP
#define METARING_LINALG_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace metaring {

using Vec = std::vector<double>;

/// Dense row-major matrix, sized for the small systems this project needs
/// (N is a lattice size of a few hundred at most).
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> a;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), a(r * c, 0.0) {}

    double& operator()(std::size_t i, std::size_t j) { return a[i * cols + j]; }
    double operator()(std::size_t i, std::size_t j) const { return a[i * cols + j]; }

    static Matrix identity(std::size_t n) {
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }
};

inline Matrix transpose(const Matrix& m) {
    Matrix t(m.cols, m.rows);
    for (std::size_t i = 0; i < m.rows; ++i)
        for (std::size_t j = 0; j < m.cols; ++j) t(j, i) = m(i, j);
    return t;
}

inline Matrix matmul(const Matrix& x, const Matrix& y) {
    if (x.cols != y.rows) throw std::invalid_argument("matmul: shape mismatch");
    Matrix z(x.rows, y.cols);
    for (std::size_t i = 0; i < x.rows; ++i)
        for (std::size_t k = 0; k < x.cols; ++k) {
            const double xik = x(i, k);
            if (xik == 0.0) continue;
            for (std::size_t j = 0; j < y.cols; ++j) z(i, j) += xik * y(k, j);
        }
    return z;
}

inline Vec matvec(const Matrix& m, const Vec& v) {
    if (m.cols != v.size()) throw std::invalid_argument("matvec: shape mismatch");
    Vec out(m.rows, 0.0);
    for (std::size_t i = 0; i < m.rows; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < m.cols; ++j) s += m(i, j) * v[j];
        out[i] = s;
    }
    return out;
}

inline double max_abs(const Vec& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

/// Solve A x = b by partial-pivot LU. A is copied; throws on (near-)singular A.
inline Vec lu_solve(Matrix m, Vec b) {
    const std::size_t n = m.rows;
    if (m.cols != n || b.size() != n) throw std::invalid_argument("lu_solve: shape mismatch");
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t piv = k;
        for (std::size_t i = k + 1; i < n; ++i)
            if (std::abs(m(i, k)) > std::abs(m(piv, k))) piv = i;
        if (std::abs(m(piv, k)) < 1e-300) throw std::runtime_error("lu_solve: singular matrix");
        if (piv != k) {
            for (std::size_t j = 0; j < n; ++j) std::swap(m(k, j), m(piv, j));
            std::swap(b[k], b[piv]);
        }
        for (std::size_t i = k + 1; i < n; ++i) {
            const double f = m(i, k) / m(k, k);
            m(i, k) = 0.0;
            for (std::size_t j = k + 1; j < n; ++j) m(i, j) -= f * m(k, j);
            b[i] -= f * b[k];
        }
    }
    Vec x(n);
    for (std::size_t i = n; i-- > 0;) {
        double s = b[i];
        for (std::size_t j = i + 1; j < n; ++j) s -= m(i, j) * x[j];
        x[i] = s / m(i, i);
    }
    return x;
}

namespace detail {

inline double offdiag_norm(const Matrix& m) {
    double s = 0.0;
    for (std::size_t i = 0; i < m.rows; ++i)
        for (std::size_t j = 0; j < m.cols; ++j)
            if (i != j) s += m(i, j) * m(i, j);
    return std::sqrt(s);
}

}  // namespace detail

struct EigenResult {
    Vec values;      // ascending
    Matrix vectors;  // column k is the eigenvector of values[k]
};

/// Cyclic Jacobi rotations on a symmetric matrix. Iterates sweeps until the
/// off-diagonal Frobenius norm drops below tol (relative to the diagonal).
inline EigenResult jacobi_eigen(Matrix m, double tol = 1e-13, int max_sweeps = 100) {
    const std::size_t n = m.rows;
    if (m.cols != n) throw std::invalid_argument("jacobi_eigen: matrix not square");
    double scale = 0.0;
    for (std::size_t i = 0; i < n; ++i) scale = std::max(scale, std::abs(m(i, i)));
    scale = std::max(scale, 1.0);

    Matrix v = Matrix::identity(n);
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        if (detail::offdiag_norm(m) <= tol * scale) break;
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = m(p, q);
                if (std::abs(apq) < 1e-300) continue;
                const double theta = (m(q, q) - m(p, p)) / (2.0 * apq);
                const double t = (theta >= 0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                const double tau = s / (1.0 + c);
                const double app = m(p, p), aqq = m(q, q);
                m(p, p) = app - t * apq;
                m(q, q) = aqq + t * apq;
                m(p, q) = m(q, p) = 0.0;
                for (std::size_t r = 0; r < n; ++r) {
                    if (r != p && r != q) {
                        const double arp = m(r, p), arq = m(r, q);
                        m(r, p) = m(p, r) = arp - s * (arq + tau * arp);
                        m(r, q) = m(q, r) = arq + s * (arp - tau * arq);
                    }
                    const double vrp = v(r, p), vrq = v(r, q);
                    v(r, p) = vrp - s * (vrq + tau * vrp);
                    v(r, q) = vrq + s * (vrp - tau * vrq);
                }
            }
        }
    }

    EigenResult res;
    res.values.resize(n);
    for (std::size_t i = 0; i < n; ++i) res.values[i] = m(i, i);
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t i, std::size_t j) { return res.values[i] < res.values[j]; });
    Vec sorted(n);
    Matrix vs(n, n);
    for (std::size_t k = 0; k < n; ++k) {
        sorted[k] = res.values[order[k]];
        for (std::size_t r = 0; r < n; ++r) vs(r, k) = v(r, order[k]);
    }
    res.values = std::move(sorted);
    res.vectors = std::move(vs);
    return res;
}

/// Modified Gram-Schmidt on the columns of m; returns a matrix with
/// orthonormal columns spanning the same space.
inline Matrix orthonormalize_columns(Matrix m) {
    for (std::size_t j = 0; j < m.cols; ++j) {
        for (std::size_t k = 0; k < j; ++k) {
            double dot = 0.0;
            for (std::size_t i = 0; i < m.rows; ++i) dot += m(i, j) * m(i, k);
            for (std::size_t i = 0; i < m.rows; ++i) m(i, j) -= dot * m(i, k);
        }
        double nrm = 0.0;
        for (std::size_t i = 0; i < m.rows; ++i) nrm += m(i, j) * m(i, j);
        nrm = std::sqrt(nrm);
        if (nrm < 1e-12) throw std::runtime_error("orthonormalize_columns: rank deficient");
        for (std::size_t i = 0; i < m.rows; ++i) m(i, j) /= nrm;
    }
    return m;
}

}  // namespace metaring

#endif  // METARING_LINALG_HPP
