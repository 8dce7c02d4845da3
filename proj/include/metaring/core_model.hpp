#ifndef METARING_CORE_MODEL_HPP
#define METARING_CORE_MODEL_HPP

#include <cmath>
#include <stdexcept>
#include <string>

#include "linalg.hpp"

namespace metaring {

/// Thrown when a numeric routine cannot deliver a trustworthy answer
/// (degenerate Hessian, failed continuation, ...).
struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Model parameters: ring size n, coupling gamma, noise strength eps.
struct Params {
    int n = 8;
    double gamma = 0.0;
    double eps = 0.1;

    void validate() const {
        if (n < 4) throw std::invalid_argument("n must be >= 4");
        if (n % 2 != 0) throw std::invalid_argument("n must be even");
        if (n % 3 == 0) throw std::invalid_argument("n must not be divisible by 3");
        if (gamma < 0.0) throw std::invalid_argument("gamma must be >= 0");
        if (eps <= 0.0) throw std::invalid_argument("eps must be > 0");
    }

    int half() const { return n / 2; }
};

inline double mean(const Vec& x) {
    double s = 0.0;
    for (double v : x) s += v;
    return s / static_cast<double>(x.size());
}

/// Remove the mean so the configuration lies in the zero-sum hyperplane.
inline Vec project_to_s(Vec x) {
    const double m = mean(x);
    for (double& v : x) v -= m;
    return x;
}

/// On-site double well u(x) = x^4/4 - x^2/2.
inline double onsite(double x) { return 0.25 * x * x * x * x - 0.5 * x * x; }
inline double onsite_d1(double x) { return x * x * x - x; }
inline double onsite_d2(double x) { return 3.0 * x * x - 1.0; }

/// V(x) = sum_i u(x_i) + (gamma/4) sum_i (x_{i+1} - x_i)^2 on a periodic ring.
inline double potential(double gamma, const Vec& x) {
    const std::size_t n = x.size();
    double v = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = x[(i + 1) % n] - x[i];
        v += onsite(x[i]) + 0.25 * gamma * d * d;
    }
    return v;
}

inline Vec unconstrained_gradient(double gamma, const Vec& x) {
    const std::size_t n = x.size();
    Vec g(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double left = x[(i + n - 1) % n];
        const double right = x[(i + 1) % n];
        g[i] = onsite_d1(x[i]) + 0.5 * gamma * (2.0 * x[i] - left - right);
    }
    return g;
}

/// Drift of the conservative dynamics: -grad V projected onto the zero-sum
/// hyperplane (the Lagrange term enforcing mass conservation).
inline Vec constrained_drift(double gamma, const Vec& x) {
    Vec g = unconstrained_gradient(gamma, x);
    const double m = mean(g);
    for (double& v : g) v = -(v - m);
    return g;
}

inline Matrix full_hessian(double gamma, const Vec& x) {
    const std::size_t n = x.size();
    Matrix h(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        h(i, i) = onsite_d2(x[i]) + gamma;
        h(i, (i + 1) % n) += -0.5 * gamma;
        h(i, (i + n - 1) % n) += -0.5 * gamma;
    }
    return h;
}

/// Fixed orthonormal basis of the zero-sum hyperplane: mean-removed canonical
/// vectors e_1..e_{n-1}, Gram-Schmidt orthonormalized. Deterministic, so
/// reduced Hessians are reproducible across runs.
inline Matrix s_basis(std::size_t n) {
    Matrix b(n, n - 1);
    for (std::size_t j = 0; j + 1 < n; ++j) {
        for (std::size_t i = 0; i < n; ++i) b(i, j) = (i == j ? 1.0 : 0.0) - 1.0 / double(n);
    }
    return orthonormalize_columns(std::move(b));
}

struct ConstrainedHessian {
    Matrix reduced;  // (n-1) x (n-1), symmetric
    Matrix basis;    // n x (n-1), orthonormal columns spanning the hyperplane
};

/// Hessian of V restricted to the zero-sum hyperplane: B^T (grad^2 V) B.
inline ConstrainedHessian constrained_hessian(double gamma, const Vec& x) {
    ConstrainedHessian ch;
    ch.basis = s_basis(x.size());
    Matrix h = full_hessian(gamma, x);
    ch.reduced = matmul(transpose(ch.basis), matmul(h, ch.basis));
    // symmetrize away roundoff
    for (std::size_t i = 0; i < ch.reduced.rows; ++i)
        for (std::size_t j = i + 1; j < ch.reduced.cols; ++j) {
            const double s = 0.5 * (ch.reduced(i, j) + ch.reduced(j, i));
            ch.reduced(i, j) = ch.reduced(j, i) = s;
        }
    return ch;
}

/// Number of negative eigenvalues of the constrained Hessian. Eigenvalues
/// within tol of zero mean the point is degenerate and the index undefined.
inline int morse_index(const ConstrainedHessian& ch, double tol = 1e-8) {
    EigenResult e = jacobi_eigen(ch.reduced);
    int idx = 0;
    for (double v : e.values) {
        if (std::abs(v) <= tol)
            throw NumericError("morse_index: degenerate stationary point (eigenvalue " +
                               std::to_string(v) + " within tol of zero)");
        if (v < 0.0) ++idx;
    }
    return idx;
}

inline double det_constrained_hessian(const ConstrainedHessian& ch) {
    EigenResult e = jacobi_eigen(ch.reduced);
    double d = 1.0;
    for (double v : e.values) d *= v;
    return d;
}

}  // namespace metaring

#endif  // METARING_CORE_MODEL_HPP
