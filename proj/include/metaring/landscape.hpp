#ifndef METARING_LANDSCAPE_HPP
#define METARING_LANDSCAPE_HPP

#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "core_model.hpp"

namespace metaring {

inline constexpr double kLambdaC = 2.0 / (3.0 * 1.7320508075688772935);  // 2/(3*sqrt(3))

/// Occupancy triple (a0 <= a1 <= a2, a0+a1+a2 = n) of a stationary point at
/// zero coupling: how many sites sit on each root of x^3 - x = lambda.
struct Triple {
    int a0 = 0, a1 = 0, a2 = 0;

    int n() const { return a0 + a1 + a2; }
    bool operator==(const Triple& o) const { return a0 == o.a0 && a1 == o.a1 && a2 == o.a2; }
    bool operator<(const Triple& o) const {
        if (a0 != o.a0) return a0 < o.a0;
        if (a1 != o.a1) return a1 < o.a1;
        return a2 < o.a2;
    }
};

/// Stability index of the triple's stationary point (number of unstable
/// directions of the constrained Hessian at zero coupling).
inline int classify_triple_index(const Triple& t) {
    if (t.n() % 3 == 0) throw std::invalid_argument("triple: n divisible by 3 unsupported");
    if (2 * t.a1 > t.a0 + t.a2) return t.a0;
    return t.a2 - 1;  // covers (0,0,n) -> n-1
}

inline std::vector<std::pair<Triple, int>> enumerate_triples(int n) {
    if (n % 3 == 0) throw std::invalid_argument("enumerate_triples: n divisible by 3 unsupported");
    std::vector<std::pair<Triple, int>> out;
    for (int a0 = 0; 3 * a0 <= n; ++a0)
        for (int a1 = a0; a0 + 2 * a1 <= n; ++a1) {
            Triple t{a0, a1, n - a0 - a1};
            if (t.a2 < t.a1) continue;
            out.emplace_back(t, classify_triple_index(t));
        }
    return out;
}

/// The three roots of x^3 - x = lambda carried by a triple; both sign
/// branches exist, selected by sign = +1/-1.
struct AlphaRoots {
    double alpha0 = 0, alpha1 = 0, alpha2 = 0;
    double lambda = 0;
    int sign = +1;

    double root(int j) const { return j == 0 ? alpha0 : (j == 1 ? alpha1 : alpha2); }
};

inline AlphaRoots alpha_from_triple(const Triple& t, int sign) {
    if (t.a0 == 0 && t.a1 == 0) throw std::invalid_argument("alpha_from_triple: triple (0,0,n)");
    const double denom = double(t.a0) * t.a0 + double(t.a1) * t.a1 + double(t.a2) * t.a2 -
                         double(t.a0) * t.a1 - double(t.a0) * t.a2 - double(t.a1) * t.a2;
    if (denom <= 0.0) throw NumericError("alpha_from_triple: nonpositive R denominator");
    const double sr = sign / std::sqrt(denom);
    AlphaRoots r;
    r.sign = sign;
    r.alpha0 = (t.a1 - t.a2) * sr;
    r.alpha1 = (t.a2 - t.a0) * sr;
    r.alpha2 = (t.a0 - t.a1) * sr;
    r.lambda = r.alpha1 * r.alpha1 * r.alpha1 - r.alpha1;
    return r;
}

enum class Family { B, C, Other };

inline std::string family_name(Family f, int k, int index = -1) {
    switch (f) {
        case Family::B: return "B" + std::to_string(k);
        case Family::C: return "C" + std::to_string(k);
        default: return "other(index " + std::to_string(index) + ")";
    }
}

inline int k_max(int n) { return n / 6; }

/// Classify a triple into the B_k / C_k families (n >= 8).
inline Family classify_family(int n, const Triple& t, int& k_out) {
    const int m = n / 2;
    if (t.a0 == 0 && t.a1 <= m) {
        k_out = m - t.a1;
        if (t.a2 == m + k_out && k_out <= k_max(n)) return Family::B;
    }
    if (t.a0 == 1 && t.a1 <= m) {
        k_out = m - t.a1;
        if (t.a2 == m + k_out - 1 && k_out >= 1 && k_out <= k_max(n)) return Family::C;
    }
    k_out = -1;
    return Family::Other;
}

inline std::uint64_t binomial_u64(int n, int k) {
    if (k < 0 || k > n) return 0;
    k = std::min(k, n - k);
    unsigned __int128 r = 1;
    for (int i = 1; i <= k; ++i) {
        r = r * (unsigned)(n - k + i) / (unsigned)i;
        if (r > (unsigned __int128)UINT64_MAX)
            throw std::overflow_error("binomial_u64: value exceeds 64 bits");
    }
    return (std::uint64_t)r;
}

/// |B_0| = C(2M,M); |B_k| = 2 C(2M,M+k); |C_k| = 2 (2M)!/((M-k)!(M+k-1)!).
inline std::uint64_t family_cardinality(int n, int k, Family fam) {
    const int m = n / 2;
    if (fam == Family::B) {
        if (k < 0 || k > k_max(n)) throw std::invalid_argument("family_cardinality: k out of range");
        if (k == 0) return binomial_u64(n, m);
        return 2 * binomial_u64(n, m + k);
    }
    if (fam == Family::C) {
        if (k < 1 || k > k_max(n)) throw std::invalid_argument("family_cardinality: k out of range");
        // multinomial (2M)! / (1! (M-k)! (M+k-1)!) = C(2M, M+k-1) * C(M-k+1, 1) * ...
        unsigned __int128 r = binomial_u64(n, m + k - 1);
        r *= (unsigned)(m - k + 1);  // choose the alpha0 site among the remaining m-k+1
        if (r > (unsigned __int128)UINT64_MAX)
            throw std::overflow_error("family_cardinality: value exceeds 64 bits");
        return 2 * (std::uint64_t)r;
    }
    throw std::invalid_argument("family_cardinality: unsupported family");
}

/// A critical point of the constrained potential, with its combinatorial data.
struct StationaryPoint {
    Vec coords;
    Triple triple;
    Family family = Family::Other;
    int k = -1;
    int morse_index = -1;
    double lambda = 0.0;
    double gamma = 0.0;
    double potential = 0.0;
    std::vector<int> word;  // site -> root index (0/1/2), empty if unknown
    int sign = +1;
};

/// Assemble a zero-coupling stationary point from a root-index word.
inline StationaryPoint make_gamma0_point(int n, const Triple& t, const std::vector<int>& word,
                                         int sign) {
    if ((int)word.size() != n) throw std::invalid_argument("make_gamma0_point: word size");
    AlphaRoots r = alpha_from_triple(t, sign);
    StationaryPoint p;
    p.coords.resize(n);
    std::array<int, 3> count{0, 0, 0};
    for (int i = 0; i < n; ++i) {
        if (word[i] < 0 || word[i] > 2) throw std::invalid_argument("make_gamma0_point: bad label");
        ++count[word[i]];
        p.coords[i] = r.root(word[i]);
    }
    if (count[0] != t.a0 || count[1] != t.a1 || count[2] != t.a2)
        throw std::invalid_argument("make_gamma0_point: word does not match triple");
    p.triple = t;
    p.word = word;
    p.sign = sign;
    p.lambda = r.lambda;
    p.gamma = 0.0;
    p.potential = potential(0.0, p.coords);
    p.family = classify_family(n, t, p.k);
    p.morse_index = classify_triple_index(t);
    return p;
}

/// Two descending endpoints of a 1-saddle in C_k at zero coupling.
/// Lower endpoint lies in B_{k-1}: sites carrying alpha'_0 or alpha'_1 move to
/// the new alpha_1, alpha'_2 sites to the new alpha_2. Upper endpoint lies in
/// B_k: alpha'_1 sites keep the alpha_1 role, alpha'_0 joins the alpha_2 block.
inline std::pair<StationaryPoint, StationaryPoint> connect_saddle(const StationaryPoint& z) {
    const int n = (int)z.coords.size();
    if (z.family != Family::C || z.gamma != 0.0 || z.word.empty())
        throw std::invalid_argument("connect_saddle: need a gamma=0 C_k saddle with word");
    const int m = n / 2, k = z.k;

    Triple lower_t{0, m - k + 1, m + k - 1};
    std::vector<int> lw(n);
    for (int i = 0; i < n; ++i) lw[i] = (z.word[i] == 2) ? 2 : 1;
    StationaryPoint lower = make_gamma0_point(n, lower_t, lw, z.sign);

    Triple upper_t{0, m - k, m + k};
    std::vector<int> uw(n);
    for (int i = 0; i < n; ++i) uw[i] = (z.word[i] == 1) ? 1 : 2;
    StationaryPoint upper = make_gamma0_point(n, upper_t, uw, z.sign);

    for (const StationaryPoint* p : {&lower, &upper}) {
        if (max_abs(constrained_drift(0.0, p->coords)) > 1e-10)
            throw NumericError("connect_saddle: endpoint not stationary");
    }
    return {lower, upper};
}

struct TransitionGraph {
    struct Edge {
        std::size_t saddle;  // index into saddles
        std::size_t lower;   // index into nodes (B_{k-1} side)
        std::size_t upper;   // index into nodes (B_k side)
    };
    std::vector<StationaryPoint> nodes;    // index-0 points
    std::vector<StationaryPoint> saddles;  // index-1 points
    std::vector<Edge> edges;
    std::vector<std::uint64_t> node_orbit_size;    // orbit-quotient mode only
    std::vector<std::uint64_t> saddle_orbit_size;  // orbit-quotient mode only
    bool quotient = false;
};

namespace detail {

inline std::vector<std::vector<int>> words_with_counts(int n, std::array<int, 3> count) {
    std::vector<std::vector<int>> out;
    std::vector<int> w(n);
    auto rec = [&](auto&& self, int pos, std::array<int, 3> left) -> void {
        if (pos == n) {
            out.push_back(w);
            return;
        }
        for (int lab = 0; lab < 3; ++lab)
            if (left[lab] > 0) {
                --left[lab];
                w[pos] = lab;
                self(self, pos + 1, left);
                ++left[lab];
            }
    };
    rec(rec, 0, count);
    return out;
}

inline std::vector<double> rounded_key(const Vec& x) {
    std::vector<double> k(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) k[i] = std::round(x[i] * 1e9) / 1e9;
    return k;
}

}  // namespace detail

/// Canonical form of a coordinate word under the ring symmetries: rotations,
/// reflections, and the global sign flip. Lexicographically smallest image.
inline Vec canonical_orbit_key(const Vec& x) {
    const int n = (int)x.size();
    Vec best;
    for (int sgn : {+1, -1})
        for (int refl = 0; refl < 2; ++refl)
            for (int rot = 0; rot < n; ++rot) {
                Vec cand(n);
                for (int i = 0; i < n; ++i) {
                    int src = refl ? (rot - i + 2 * n) % n : (rot + i) % n;
                    cand[i] = sgn * x[src];
                }
                if (best.empty() || cand < best) best = cand;
            }
    return best;
}

/// Build the minima/saddle transition graph at gamma = 0.
/// full mode enumerates every site assignment (guarded to n <= 10);
/// quotient mode keeps one representative per family with orbit sizes.
inline TransitionGraph build_transition_graph(int n, bool full) {
    Params{n, 0.0, 1.0}.validate();
    TransitionGraph g;
    g.quotient = !full;
    const int m = n / 2;

    if (n == 4) {
        // Minima are the balanced +-1 words; saddles are the (1,-1,0,0)
        // patterns, each connecting the two minima obtained by splitting
        // +-1 across its two zero sites.
        if (!full) throw std::invalid_argument("build_transition_graph: n=4 supports full mode");
        std::map<std::vector<double>, std::size_t> node_ix;
        for (int mask = 0; mask < 16; ++mask) {
            if (__builtin_popcount(mask) != 2) continue;
            Vec x(4);
            for (int i = 0; i < 4; ++i) x[i] = (mask >> i) & 1 ? 1.0 : -1.0;
            StationaryPoint p;
            p.coords = x;
            p.triple = Triple{0, 2, 2};
            p.family = Family::B;
            p.k = 0;
            p.morse_index = 0;
            p.potential = potential(0.0, x);
            node_ix[detail::rounded_key(x)] = g.nodes.size();
            g.nodes.push_back(std::move(p));
        }
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) {
                if (i == j) continue;
                Vec x(4, 0.0);
                x[i] = 1.0;
                x[j] = -1.0;
                StationaryPoint z;
                z.coords = x;
                z.triple = Triple{1, 1, 2};
                z.family = Family::Other;
                z.morse_index = 1;
                z.potential = potential(0.0, x);
                std::size_t zi = g.saddles.size();
                g.saddles.push_back(std::move(z));
                int u = -1, v = -1;
                for (int s = 0; s < 4; ++s)
                    if (s != i && s != j) (u < 0 ? u : v) = s;
                Vec ya = x, yb = x;
                ya[u] = 1.0;
                ya[v] = -1.0;
                yb[u] = -1.0;
                yb[v] = 1.0;
                // both endpoints live in B_0; lower/upper just name the two
                g.edges.push_back({zi, node_ix.at(detail::rounded_key(ya)),
                                   node_ix.at(detail::rounded_key(yb))});
            }
        return g;
    }

    if (full) {
        if (n > 10) throw std::invalid_argument("build_transition_graph: full mode limited to n<=10");
        std::map<std::vector<double>, std::size_t> node_ix;
        auto add_minimum = [&](const StationaryPoint& p) {
            auto key = detail::rounded_key(p.coords);
            auto it = node_ix.find(key);
            if (it != node_ix.end()) return it->second;
            node_ix[key] = g.nodes.size();
            g.nodes.push_back(p);
            return g.nodes.size() - 1;
        };
        for (int k = 0; k <= k_max(n); ++k) {
            Triple t{0, m - k, m + k};
            for (const auto& w : detail::words_with_counts(n, {0, m - k, m + k}))
                for (int sgn : {+1, -1}) add_minimum(make_gamma0_point(n, t, w, sgn));
        }
        for (int k = 1; k <= k_max(n); ++k) {
            Triple t{1, m - k, m + k - 1};
            std::set<std::vector<double>> seen;
            for (const auto& w : detail::words_with_counts(n, {1, m - k, m + k - 1}))
                for (int sgn : {+1, -1}) {
                    StationaryPoint z = make_gamma0_point(n, t, w, sgn);
                    if (!seen.insert(detail::rounded_key(z.coords)).second) continue;
                    auto [lo, up] = connect_saddle(z);
                    std::size_t li = add_minimum(lo), ui = add_minimum(up);
                    std::size_t zi = g.saddles.size();
                    g.saddles.push_back(std::move(z));
                    g.edges.push_back({zi, li, ui});
                }
        }
        return g;
    }

    // orbit-quotient: one block-form representative per family
    auto block_word = [&](int n0, int n1) {
        std::vector<int> w(n, 2);
        int pos = 0;
        for (int i = 0; i < n0; ++i) w[pos++] = 0;
        for (int i = 0; i < n1; ++i) w[pos++] = 1;
        return w;
    };
    std::map<int, std::size_t> b_ix;
    for (int k = 0; k <= k_max(n); ++k) {
        Triple t{0, m - k, m + k};
        b_ix[k] = g.nodes.size();
        g.nodes.push_back(make_gamma0_point(n, t, block_word(0, m - k), +1));
        g.node_orbit_size.push_back(family_cardinality(n, k, Family::B));
    }
    for (int k = 1; k <= k_max(n); ++k) {
        Triple t{1, m - k, m + k - 1};
        StationaryPoint z = make_gamma0_point(n, t, block_word(1, m - k), +1);
        std::size_t zi = g.saddles.size();
        g.saddles.push_back(std::move(z));
        g.saddle_orbit_size.push_back(family_cardinality(n, k, Family::C));
        g.edges.push_back({zi, b_ix.at(k - 1), b_ix.at(k)});
    }
    return g;
}

/// Sorted roots of x^3 - x = q for |q| < lambda_c (three real roots).
inline std::array<double, 3> cubic_three_roots(double q) {
    if (std::abs(q) >= kLambdaC) throw std::invalid_argument("cubic_three_roots: |q| >= lambda_c");
    const double theta = std::acos(1.5 * std::sqrt(3.0) * q);
    std::array<double, 3> r;
    for (int j = 0; j < 3; ++j)
        r[j] = (2.0 / std::sqrt(3.0)) * std::cos((theta - 2.0 * M_PI * j) / 3.0);
    std::sort(r.begin(), r.end());
    return r;
}

struct HorseshoeDomain {
    double gamma = 0, lambda = 0;
    bool in_D = false, in_Dprime = false;
    // per-symbol x-intervals for the minus / center / plus strips
    std::array<std::pair<double, double>, 3> strips;
};

inline HorseshoeDomain check_domain(double gamma, double lambda) {
    if (gamma < 0.0 || gamma > 0.25 || std::abs(lambda) > kLambdaC)
        throw std::invalid_argument("check_domain: (gamma, lambda) outside declared rectangle");
    HorseshoeDomain d;
    d.gamma = gamma;
    d.lambda = lambda;
    const double al = std::abs(lambda);
    const double alpha_hat = cubic_three_roots(std::min(al, kLambdaC * (1 - 1e-14)))[2];
    d.in_D = al + gamma * alpha_hat <= kLambdaC * std::pow(1.0 - gamma, 1.5);
    d.in_Dprime = gamma <= 2.0 / 9.0 && al <= kLambdaC * (1.0 - 4.5 * gamma);
    auto roots = cubic_three_roots(lambda);
    const double w = std::sqrt(gamma);
    d.strips[0] = {roots[0], roots[0] + w};
    d.strips[1] = {roots[1] - w, roots[1] + w};
    d.strips[2] = {roots[2] - w, roots[2]};
    return d;
}

/// Two-dimensional recurrence whose period-n orbits are the solutions of
/// grad V_gamma = lambda * 1: T(x,y) = (2x - y - (2/gamma) f(x), x) with
/// f(x) = x - x^3 + lambda.
inline std::pair<double, double> horseshoe_map(double gamma, double lambda, double x, double y) {
    if (gamma <= 0.0) throw NumericError("horseshoe_map: singular at gamma=0");
    const double f = x - x * x * x + lambda;
    return {2.0 * x - y - 2.0 / gamma * f, x};
}

inline std::pair<double, double> horseshoe_map_inverse(double gamma, double lambda, double x,
                                                       double y) {
    if (gamma <= 0.0) throw NumericError("horseshoe_map: singular at gamma=0");
    const double f = y - y * y * y + lambda;
    return {y, 2.0 * y - x - 2.0 / gamma * f};
}

namespace detail {

/// Damped Newton for grad V_gamma(x) = lambda*1. Returns true on residual
/// <= tol; x is updated in place.
inline bool newton_lagrange(double gamma, double lambda, Vec& x, double tol = 1e-12,
                            int max_iter = 100) {
    const std::size_t n = x.size();
    auto resid = [&](const Vec& v) {
        Vec g = unconstrained_gradient(gamma, v);
        for (double& gi : g) gi -= lambda;
        return g;
    };
    Vec f = resid(x);
    double fn = max_abs(f);
    for (int it = 0; it < max_iter; ++it) {
        if (fn <= tol) return true;
        Matrix jac = full_hessian(gamma, x);
        Vec step;
        try {
            step = lu_solve(jac, f);
        } catch (const std::runtime_error&) {
            return false;
        }
        double scale = 1.0;
        for (int h = 0; h <= 30; ++h) {
            Vec trial(n);
            for (std::size_t i = 0; i < n; ++i) trial[i] = x[i] - scale * step[i];
            Vec ft = resid(trial);
            const double ftn = max_abs(ft);
            if (ftn < fn || ftn <= tol) {
                x = std::move(trial);
                f = std::move(ft);
                fn = ftn;
                break;
            }
            scale *= 0.5;
            if (h == 30) return false;
        }
    }
    return fn <= tol;
}

}  // namespace detail

/// Count distinct solutions of grad V_gamma(x) = lambda*1 by Newton iteration
/// seeded from every length-n word over the three uncoupled roots.
inline std::vector<Vec> horseshoe_solutions(int n, double gamma, double lambda) {
    if (n < 2 || n > 10) throw std::invalid_argument("horseshoe_solutions: n out of range");
    auto roots = cubic_three_roots(lambda);
    std::vector<Vec> sols;
    std::vector<int> w(n, 0);
    long total = 1;
    for (int i = 0; i < n; ++i) total *= 3;
    for (long code = 0; code < total; ++code) {
        long c = code;
        Vec x(n);
        for (int i = 0; i < n; ++i) {
            x[i] = roots[c % 3];
            c /= 3;
        }
        if (!detail::newton_lagrange(gamma, lambda, x)) continue;
        bool dup = false;
        for (const Vec& s : sols) {
            double d = 0;
            for (int i = 0; i < n; ++i) d = std::max(d, std::abs(s[i] - x[i]));
            if (d <= 1e-6) {
                dup = true;
                break;
            }
        }
        if (!dup) sols.push_back(std::move(x));
    }
    return sols;
}

/// Continuation failure: carries the last coupling at which the point was
/// still tracked successfully.
struct ContinuationError : NumericError {
    double last_good_gamma;
    explicit ContinuationError(const std::string& msg, double g)
        : NumericError(msg + " (last good gamma = " + std::to_string(g) + ")"),
          last_good_gamma(g) {}
};

namespace detail {

/// Solve for the stationary point at (gamma, lambda) from seed; returns mean
/// of the solution through *sum_out; false if Newton failed.
inline bool sigma_at(double gamma, double lambda, const Vec& seed, Vec& x_out, double* sum_out) {
    Vec x = seed;
    if (!newton_lagrange(gamma, lambda, x)) return false;
    *sum_out = mean(x);
    x_out = std::move(x);
    return true;
}

/// Newton for grad V = lambda*1 restricted to the zero-mean hyperplane
/// (reduced coordinates in the s_basis). Unlike the lambda sweep this tracks
/// a stationary point through folds of the unconstrained x*(lambda) family,
/// which exist even where the constrained branch is perfectly regular.
inline bool constrained_newton(double gamma, Vec& x) {
    const Matrix B = s_basis(x.size());
    x = project_to_s(x);
    for (int it = 0; it < 60; ++it) {
        Vec d = constrained_drift(gamma, x);
        if (max_abs(d) <= 1e-12) return true;
        ConstrainedHessian ch = constrained_hessian(gamma, x);
        Vec du;
        try {
            du = lu_solve(ch.reduced, matvec(transpose(B), d));
        } catch (const std::runtime_error&) {
            return false;
        }
        Vec dx = matvec(B, du);
        const double sz = max_abs(dx);
        if (!std::isfinite(sz) || sz > 0.5) return false;
        // d is the drift -P grad V, so the Newton correction is +H^{-1} d
        for (std::size_t i = 0; i < x.size(); ++i) x[i] += dx[i];
    }
    return max_abs(constrained_drift(gamma, x)) <= 1e-12;
}

}  // namespace detail

/// Track a zero-coupling stationary point to gamma_target.
/// Outer loop: gamma stepped in increments <= gamma_step. At each gamma the
/// multiplier lambda is re-solved by bisection on lambda -> mean(x*(lambda))
/// until |mean| <= 1e-12; inner solves are damped Newton on
/// grad V = lambda*1. Index changes or solver failures raise
/// ContinuationError naming the last good gamma.
inline StationaryPoint continue_to_gamma(const StationaryPoint& p0, double gamma_target,
                                         double gamma_step = 0.01) {
    if (gamma_target < 0) throw std::invalid_argument("continue_to_gamma: gamma_target < 0");
    StationaryPoint p = p0;
    if (gamma_target == p0.gamma) return p;
    double g = p0.gamma;
    Vec x = p0.coords;
    double lam = p0.lambda;
    double last_good = g;
    double step = gamma_step;

    while (g < gamma_target - 1e-15) {
        const double gn = std::min(g + step, gamma_target);
        // retryable step: on any failure halve the gamma increment
        auto fail = [&](const char* msg) {
            step *= 0.5;
            if (step < 1e-6) throw ContinuationError(std::string("continue_to_gamma: ") + msg,
                                                     last_good);
        };

        Vec xs;
        double lam_s = lam;
        // primary solve: bracketed bisection on Sigma(lambda) = mean(x*(lambda))
        auto lambda_sweep = [&]() -> const char* {
            double sum_mid;
            Vec x_mid;
            if (!detail::sigma_at(gn, lam, x, x_mid, &sum_mid)) return "Newton failed";
            // Sigma is locally increasing in lambda, so expand the bracket only
            // toward the sign change; the base lambda stays as the other endpoint.
            double lo = lam, hi = lam, slo = sum_mid, shi = sum_mid;
            Vec xlo = x_mid;
            double width = 1e-4;
            while (slo * shi > 0.0 && std::abs(sum_mid) > 1e-12) {
                const double probe = sum_mid > 0.0 ? lam - width : lam + width;
                if (std::abs(probe) >= kLambdaC || width > 0.5) return "lambda bracket failure";
                Vec xp;
                double sp;
                if (!detail::sigma_at(gn, probe, x, xp, &sp)) return "lambda bracket failure";
                if (sum_mid > 0.0) {
                    lo = probe;
                    slo = sp;
                    xlo = std::move(xp);
                } else {
                    hi = probe;
                    shi = sp;
                }
                width *= 4.0;
            }
            if (std::abs(sum_mid) <= 1e-12) {
                xs = std::move(x_mid);
                lam_s = lam;
                return nullptr;
            }
            for (int it = 0; it < 200; ++it) {
                const double mid = 0.5 * (lo + hi);
                double sm;
                Vec xm;
                if (!detail::sigma_at(gn, mid, xlo, xm, &sm)) return "Newton failed in bisection";
                if (std::abs(sm) <= 1e-12 || hi - lo < 1e-15) {
                    xlo = std::move(xm);
                    lo = hi = mid;
                    slo = sm;
                    break;
                }
                if (sm * slo <= 0.0) {
                    hi = mid;
                    shi = sm;
                } else {
                    lo = mid;
                    slo = sm;
                    xlo = std::move(xm);
                }
            }
            if (std::abs(mean(xlo)) > 1e-12) return "|mean| tolerance not met";
            xs = std::move(xlo);
            lam_s = lo;
            return nullptr;
        };

        if (const char* why = lambda_sweep()) {
            // the lambda sweep dead-ends when the previous multiplier sits past
            // a fold of the unconstrained family; retry directly on the
            // zero-mean manifold from the last good coordinates
            Vec xr = x;
            if (detail::constrained_newton(gn, xr) && std::abs(mean(xr)) <= 1e-12) {
                lam_s = mean(unconstrained_gradient(gn, xr));
                xs = std::move(xr);
            } else {
                fail(why);
                continue;
            }
        }

        // a solution that lands far from the previous coordinates has hopped
        // to a different branch (typical just past a saddle-node fold, where
        // the seeded Newton converges to the surviving partner)
        double moved = 0;
        for (std::size_t i = 0; i < xs.size(); ++i)
            moved = std::max(moved, std::abs(xs[i] - x[i]));
        if (moved > 0.25) {
            fail("branch jump detected");
            continue;
        }
        if (max_abs(constrained_drift(gn, xs)) > 1e-10) {
            fail("drift residual too large");
            continue;
        }
        int idx = -1;
        try {
            idx = morse_index(constrained_hessian(gn, xs));
        } catch (const NumericError&) {
        }
        if (idx != p0.morse_index) {
            fail(idx < 0 ? "degenerate Hessian" : "Morse index changed");
            continue;
        }

        x = std::move(xs);
        lam = lam_s;
        g = gn;
        last_good = g;
        step = std::min(step * 2.0, gamma_step);
    }

    p.coords = x;
    p.gamma = gamma_target;
    p.lambda = lam;
    p.potential = potential(gamma_target, x);
    p.morse_index = p0.morse_index;
    return p;
}

}  // namespace metaring

#endif  // METARING_LANDSCAPE_HPP
