#ifndef METARING_RATES_HPP
#define METARING_RATES_HPP

#include <cmath>
#include <string>
#include <vector>

#include "hierarchy.hpp"

namespace metaring {

inline constexpr const char* kAsymptoticErrorNote =
    "prefactor carries an O(eps^{1/2}|log eps|^{3/2}) relative error; not folded into the value";

/// An Eyring-Kramers quantity: mean time = symmetry_factor * prefactor *
/// exp(arrhenius / eps); rate is its inverse.
struct RateEstimate {
    double arrhenius = 0;       // energy barrier
    double prefactor = 0;       // 2*pi/|lambda_-| * sqrt(|det_z|/det_x), symmetry excluded
    double symmetry_factor = 1; // stabiliser ratio multiplying the mean time
    std::string error_note = kAsymptoticErrorNote;

    double time_at(double eps) const {
        return symmetry_factor * prefactor * std::exp(arrhenius / eps);
    }
    double rate_at(double eps) const { return 1.0 / time_at(eps); }
};

struct HessianClosedForms {
    double det_min;       // at a B_k-type minimum, value 2^{N-1}
    double det_saddle;    // at the C_1 saddle (negative)
    double lambda_minus;  // unstable eigenvalue at the saddle
};

inline HessianClosedForms hessian_closed_forms(int M) {
    if (M < 4) throw std::invalid_argument("hessian_closed_forms: M >= 4 required");
    const double q = double(M) * M - 3.0 * M + 3.0;
    HessianClosedForms f;
    f.det_min = std::pow(2.0, 2 * M - 1);
    f.det_saddle = -std::pow(double(M), M - 2) * std::pow(double(M - 3), M) *
                   std::pow(double(2 * M - 3), 2 * M - 2) / std::pow(q, 2 * M - 2);
    f.lambda_minus = -(M - 3.0) * (2.0 * M - 3.0) / (2.0 * q);
    return f;
}

/// Mean transition time from a minimum over a 1-saddle:
/// (2 pi / |lambda_-|) sqrt(|det H(z)| / det H(x)) exp((V(z)-V(x))/eps).
/// Determinants come from numeric constrained Hessians.
inline RateEstimate kramers_time(const StationaryPoint& min, const StationaryPoint& saddle,
                                 double /*eps*/ = 0.0) {
    if (min.gamma != saddle.gamma)
        throw std::invalid_argument("kramers_time: points at different gamma");
    if (min.morse_index != 0 || saddle.morse_index != 1)
        throw std::invalid_argument("kramers_time: need index-0 minimum and index-1 saddle");
    EigenResult ex = jacobi_eigen(constrained_hessian(min.gamma, min.coords).reduced);
    EigenResult ez = jacobi_eigen(constrained_hessian(saddle.gamma, saddle.coords).reduced);
    double det_x = 1.0, det_z = 1.0;
    for (double v : ex.values) det_x *= v;
    for (double v : ez.values) det_z *= v;
    const double lam_minus = ez.values.front();
    if (lam_minus >= 0 || det_x <= 0)
        throw NumericError("kramers_time: unexpected Hessian signature");
    RateEstimate r;
    r.arrhenius = saddle.potential - min.potential;
    r.prefactor = 2.0 * M_PI / std::abs(lam_minus) * std::sqrt(std::abs(det_z) / det_x);
    return r;
}

/// Mean first-hitting time of B_{k-1} from a symmetrised start on B_k: the
/// single-saddle time divided by the M+k equivalent exit saddles.
inline RateEstimate symmetric_transition_time(int n, int k, double eps) {
    (void)eps;
    const int m = n / 2;
    if (k < 1 || k > k_max(n)) throw std::invalid_argument("symmetric_transition_time: k range");
    TransitionGraph g = build_transition_graph(n, false);
    RateEstimate r = kramers_time(g.nodes[k], g.saddles[k - 1]);
    r.symmetry_factor = 1.0 / double(m + k);
    return r;
}

/// Irreducible representation of the symmetry group of the ring dynamics
/// (dihedral rotations/reflections r, s plus global sign flip c; order 4N).
struct IrrepSpec {
    bool two_dim = false;
    int rho = 1, sigma = 1, tau = 1;  // one-dim: character rho^i sigma^j tau^k
    int ell = 0, parity = 1;          // two-dim: 2cos(2 pi i ell/N) d_{j0} parity^k
    int n = 0;

    double chi(int i, int j, int k) const {
        if (!two_dim) {
            double v = 1.0;
            if (i % 2 != 0 && rho < 0) v = -v;
            if (j % 2 != 0 && sigma < 0) v = -v;
            if (k % 2 != 0 && tau < 0) v = -v;
            return v;
        }
        if (j % 2 != 0) return 0.0;
        double v = 2.0 * std::cos(2.0 * M_PI * double(i) * ell / n);
        if (k % 2 != 0 && parity < 0) v = -v;
        return v;
    }
    int dim() const { return two_dim ? 2 : 1; }
    std::string name() const {
        auto pm = [](int x) { return x > 0 ? "+" : "-"; };
        if (!two_dim) return std::string("pi_") + pm(rho) + pm(sigma) + pm(tau);
        return "chi_" + std::to_string(ell) + pm(parity);
    }
};

inline std::vector<IrrepSpec> irreps(int n) {
    if (n % 2 != 0) throw std::invalid_argument("irreps: n must be even");
    std::vector<IrrepSpec> out;
    for (int rho : {+1, -1})
        for (int sigma : {+1, -1})
            for (int tau : {+1, -1}) {
                IrrepSpec s;
                s.rho = rho;
                s.sigma = sigma;
                s.tau = tau;
                s.n = n;
                out.push_back(s);
            }
    for (int ell = 1; ell <= n / 2 - 1; ++ell)
        for (int parity : {+1, -1}) {
            IrrepSpec s;
            s.two_dim = true;
            s.ell = ell;
            s.parity = parity;
            s.n = n;
            out.push_back(s);
        }
    return out;
}

/// Character averaged over a stabiliser: positive average means the orbit
/// contributes a block to the reduced generator for that representation.
struct OrbitActivity {
    double alpha_x = 0, alpha_y = 0;
    bool x_active = false, y_active = false;
};

inline OrbitActivity active_orbits(const IrrepSpec& pi, int n) {
    const int m = n / 2;
    // stabilisers of the block minimum, the one-cluster-short minimum, and
    // the saddle, as (i,j,k) words r^i s^j c^k
    const std::array<std::array<int, 3>, 4> gx{{{0, 0, 0}, {m, 1, 0}, {m, 0, 1}, {0, 1, 1}}};
    const std::array<std::array<int, 3>, 2> gy{{{0, 0, 0}, {m - 1, 1, 0}}};
    OrbitActivity a;
    for (const auto& h : gx) a.alpha_x += pi.chi(h[0], h[1], h[2]);
    a.alpha_x /= 4.0;
    for (const auto& h : gy) a.alpha_y += pi.chi(h[0], h[1], h[2]);
    a.alpha_y /= 2.0;
    a.x_active = a.alpha_x > 1e-12;
    a.y_active = a.alpha_y > 1e-12;
    return a;
}

/// The 2x2 blocks of the generator restricted to a two-dimensional
/// representation, in the projected basis (u^x, u^rx, u^y, u^ry).
struct ReducedBlock {
    Matrix l_xx, l_yy, l_xy, l_yx;  // each 2x2
    double q_x, q_y;
    double schur_eigenvalue;  // of l_xx - l_xy l_yy^{-1} l_yx (a multiple of I)
};

inline ReducedBlock reduced_block(const IrrepSpec& pi, double q_x, double q_y) {
    if (!pi.two_dim) throw std::invalid_argument("reduced_block: two-dim representation required");
    if (q_x <= 0 || q_y <= 0) throw std::invalid_argument("reduced_block: rates must be positive");
    const double chir = pi.chi(1, 0, 0);  // 2 cos(2 pi ell / N)
    ReducedBlock b;
    b.q_x = q_x;
    b.q_y = q_y;
    b.l_xx = Matrix(2, 2);
    b.l_yy = Matrix(2, 2);
    b.l_xy = Matrix(2, 2);
    b.l_yx = Matrix(2, 2);
    b.l_xx(0, 0) = b.l_xx(1, 1) = -4.0 * q_x;
    b.l_yy(0, 0) = b.l_yy(1, 1) = -2.0 * q_y;
    b.l_xy(0, 0) = 2.0 * (chir + 1.0) * q_x;
    b.l_xy(0, 1) = 2.0 * q_x;
    b.l_xy(1, 0) = -2.0 * q_x;
    b.l_xy(1, 1) = 2.0 * q_x;
    b.l_yx(0, 0) = q_y;
    b.l_yx(0, 1) = -q_y;
    b.l_yx(1, 0) = q_y;
    b.l_yx(1, 1) = (chir + 1.0) * q_y;
    // l_yy is -2 q_y I, so the Schur complement is l_xx + l_xy l_yx / (2 q_y)
    Matrix prod = matmul(b.l_xy, b.l_yx);
    b.schur_eigenvalue = b.l_xx(0, 0) + prod(0, 0) / (2.0 * q_y);
    return b;
}

inline Matrix schur_complement(const ReducedBlock& b) {
    Matrix prod = matmul(b.l_xy, b.l_yx);
    Matrix s = b.l_xx;
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 2; ++j) s(i, j) += prod(i, j) / (2.0 * b.q_y);
    return s;
}

/// Symmetrized two-orbit jump generator on the N block states and the 2N
/// intermediate states bridging adjacent blocks (two bridges per adjacent
/// pair). Eigenvalues equal those of the reversible generator with rates
/// q_x (block -> bridge) and q_y (bridge -> block).
inline Matrix two_orbit_generator_symmetrized(int n, double q_x, double q_y) {
    if (q_x <= 0 || q_y <= 0) throw std::invalid_argument("two_orbit_generator: rates positive");
    const int total = 3 * n;  // n block states, then 2n bridge states
    Matrix s(total, total);
    const double coupling = std::sqrt(q_x * q_y);
    for (int i = 0; i < n; ++i) s(i, i) = -4.0 * q_x;
    for (int j = 0; j < 2 * n; ++j) s(n + j, n + j) = -2.0 * q_y;
    for (int i = 0; i < n; ++i)
        for (int d = 0; d < 4; ++d) {
            const int j = (2 * i + d) % (2 * n);
            s(i, n + j) = s(n + j, i) = coupling;
        }
    return s;
}

/// Spectral gap of the full diffusion generator via the symmetry-reduced
/// Eyring-Kramers formula: slow translations of the single-cluster ground
/// state through the three-boundary saddle.
struct SpectralGapResult {
    RateEstimate rate;          // gap = rate.rate_at(eps) ... gap itself stored below
    double gap = 0;             // 4 sin^2(pi/N) * kappa * exp(-barrier/eps)
    double exponent = 0;        // V_gamma(z*) - V_gamma(x*), numeric
    double exponent_h0 = 0;     // zero-coupling barrier M(M-1)/(4(M^2-3M+3))
    double exponent_first_order = 0;  // H0 + gamma * H1 (three-boundary saddle class)
    double prefactor_ratio = 0;       // |lambda_-| sqrt(det_x/|det_z|)
    double prefactor_ratio_limit = 1.4142135623730951;  // large-N limit sqrt(2)
};

inline SpectralGapResult spectral_gap(int n, double gamma, double eps) {
    Params p{n, gamma, eps};
    p.validate();
    const int m = n / 2;
    const double q = double(m) * m - 3.0 * m + 3.0;

    // gamma = 0 representatives: block minimum and the saddle whose word has
    // three root boundaries (alpha'_1 x (M-1), alpha'_0, alpha'_2 x M)
    std::vector<int> wx(n, 2), wz(n, 2);
    for (int i = 0; i < m; ++i) wx[i] = 1;
    for (int i = 0; i < m - 1; ++i) wz[i] = 1;
    wz[m - 1] = 0;
    StationaryPoint x = make_gamma0_point(n, Triple{0, m, m}, wx, +1);
    StationaryPoint z = make_gamma0_point(n, Triple{1, m - 1, m}, wz, +1);
    if (gamma > 0) {
        x = continue_to_gamma(x, gamma);
        z = continue_to_gamma(z, gamma);
    }

    EigenResult ex = jacobi_eigen(constrained_hessian(gamma, x.coords).reduced);
    EigenResult ez = jacobi_eigen(constrained_hessian(gamma, z.coords).reduced);
    double det_x = 1.0, det_z = 1.0;
    for (double v : ex.values) det_x *= v;
    for (double v : ez.values) det_z *= v;
    const double lam_minus = ez.values.front();

    SpectralGapResult res;
    res.exponent = z.potential - x.potential;
    res.exponent_h0 = b0_barrier_h0(n);
    res.exponent_first_order =
        res.exponent_h0 + gamma * (saddle_first_order(SaddleInterfaceTriple{1, 1, 1}, n) - 2.0);
    res.prefactor_ratio = std::abs(lam_minus) * std::sqrt(det_x / std::abs(det_z));
    res.rate.arrhenius = res.exponent;
    res.rate.prefactor = 2.0 * M_PI / std::abs(lam_minus) * std::sqrt(std::abs(det_z) / det_x);
    res.rate.symmetry_factor = 1.0 / (4.0 * std::pow(std::sin(M_PI / n), 2));
    res.gap = 4.0 * std::pow(std::sin(M_PI / n), 2) * res.prefactor_ratio / (2.0 * M_PI) *
              std::exp(-res.exponent / eps);
    (void)q;
    return res;
}

/// Closed-form large-N diagnostics for the gap at gamma = 0.
inline double gap_exponent_closed_form(int n) { return b0_barrier_h0(n); }

inline double gap_prefactor_ratio_closed_form(int n) {
    const int m = n / 2;
    const double q = double(m) * m - 3.0 * m + 3.0;
    return std::sqrt(2.0) * std::pow(q / ((m - 1.5) * std::sqrt(double(m) * (m - 3))), m - 2);
}

}  // namespace metaring

#endif  // METARING_RATES_HPP
