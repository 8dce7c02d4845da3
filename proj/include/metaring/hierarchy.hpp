#ifndef METARING_HIERARCHY_HPP
#define METARING_HIERARCHY_HPP

#include <algorithm>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "landscape.hpp"

namespace metaring {

/// V0(B_k) with a = M-k.
inline double family_potential(int n, int k, Family fam) {
    const double N = n;
    const int m = n / 2;
    if (fam == Family::B) {
        if (k < 0 || k > k_max(n)) throw std::invalid_argument("family_potential: k out of range");
        const double a = m - k;
        return -a * N * (N - a) / (4.0 * (N * N - 3 * a * N + 3 * a * a));
    }
    if (fam == Family::C) {
        if (k < 1 || k > k_max(n)) throw std::invalid_argument("family_potential: k out of range");
        const double a = m - k + 1;  // the C_k value comes with a = M-(k-1)
        return -(a * N * N - (a * a + 8 * a - 8) * N + 9 * a * (a - 1)) /
               (4.0 * (N * N - 3 * a * N + 3 * a * a - 3 * a + 3));
    }
    throw std::invalid_argument("family_potential: unsupported family");
}

/// Barrier closed forms in the cluster size a, N/3 < a <= N/2:
/// h1(a) = climb out of B_{M-a} upward, h2(a) = drop out of B_{M-a} downward.
struct BarrierPair {
    double h1, h2;
};

inline BarrierPair barrier_functions(int n, int a) {
    const double N = n, A = a;
    if (3 * a <= n || 2 * a > n) throw std::invalid_argument("barrier_functions: a out of range");
    const double qa = N * N - 3 * A * N + 3 * A * A;
    const double h1 = (A - 1) * std::pow(2 * N - 3 * A, 3) / (4.0 * qa * (qa - 3 * A + 3));
    const double qa1 = N * N - 3 * (A + 1) * N + 3 * (A + 1) * (A + 1);
    const double h2 = (N - A - 1) * std::pow(3 * A - N, 3) / (4.0 * qa * (qa1 - 3 * (A + 1) + 3));
    return {h1, h2};
}

struct HierarchyReport {
    struct Block {
        std::string name;
        double escape_height;  // lowest barrier out of the block
    };
    std::vector<Block> blocks;  // most stable first
    double theta = 0.0;
    bool ok = false;
};

/// Check the metastable order B_0 < B_1 < ... < B_kmax: each family escapes
/// downward below the lowest escape of every more stable family; theta is the
/// worst margin. gamma > 0 uses continued potential values.
inline HierarchyReport verify_Bk_hierarchy(int n, double gamma) {
    Params{n, gamma, 1.0}.validate();
    const int km = k_max(n);
    HierarchyReport rep;

    std::vector<double> vb(km + 1), vc(km + 1);  // vc[k] = V(C_k), k>=1
    if (gamma == 0.0) {
        for (int k = 0; k <= km; ++k) vb[k] = family_potential(n, k, Family::B);
        for (int k = 1; k <= km; ++k) vc[k] = family_potential(n, k, Family::C);
    } else {
        TransitionGraph g = build_transition_graph(n, false);
        for (int k = 0; k <= km; ++k)
            vb[k] = continue_to_gamma(g.nodes[k], gamma).potential;
        for (int k = 1; k <= km; ++k)
            vc[k] = continue_to_gamma(g.saddles[k - 1], gamma).potential;
    }

    auto escape = [&](int k) {
        double e = std::numeric_limits<double>::infinity();
        if (k >= 1) e = std::min(e, vc[k] - vb[k]);            // drop toward B_{k-1}
        if (k + 1 <= km) e = std::min(e, vc[k + 1] - vb[k]);   // climb toward B_{k+1}
        return e;
    };

    double theta = std::numeric_limits<double>::infinity();
    double min_prev_escape = std::numeric_limits<double>::infinity();
    bool ok = true;
    for (int k = 0; k <= km; ++k) {
        const double e = escape(k);
        rep.blocks.push_back({family_name(Family::B, k), e});
        if (k >= 1) {
            const double drop = vc[k] - vb[k];
            theta = std::min(theta, min_prev_escape - drop);
            if (drop >= min_prev_escape) ok = false;
        }
        min_prev_escape = std::min(min_prev_escape, e);
    }
    rep.theta = (km >= 1) ? theta : std::numeric_limits<double>::infinity();
    rep.ok = ok && (km == 0 || theta > 0);
    return rep;
}

/// A balanced +-1 word with its interface count p and class tag.
struct InterfaceState {
    std::vector<int> bits;  // +1 / -1, balanced
    int p = 0;
    int isolated_count = 0;
    bool prime = false;  // A'_p (no isolated sites, 4 <= p <= M)

    std::string klass() const {
        return std::string("A") + (prime ? "'" : "") + std::to_string(p);
    }
    bool operator==(const InterfaceState& o) const { return bits == o.bits; }
};

inline InterfaceState classify_B0_state(const std::vector<int>& bits) {
    const int n = (int)bits.size();
    int sum = 0;
    for (int b : bits) {
        if (b != 1 && b != -1) throw std::invalid_argument("classify_B0_state: bits must be +-1");
        sum += b;
    }
    if (sum != 0) throw std::invalid_argument("classify_B0_state: unbalanced word");
    InterfaceState s;
    s.bits = bits;
    for (int i = 0; i < n; ++i) {
        if (bits[i] != bits[(i + 1) % n]) ++s.p;
        if (bits[i] != bits[(i + 1) % n] && bits[i] != bits[(i + n - 1) % n]) ++s.isolated_count;
    }
    s.prime = (s.p >= 4 && s.p <= n / 2 && s.isolated_count == 0);
    return s;
}

/// Interface counts of a 1-saddle word by root-pair type:
/// i01 between alpha'_0/alpha'_1 sites, i02 between alpha'_0/alpha'_2,
/// i12 between alpha'_1/alpha'_2.
struct SaddleInterfaceTriple {
    int i01 = 0, i02 = 0, i12 = 0;
};

/// First-order (in gamma) potential of a C_1 saddle class.
inline double saddle_first_order(const SaddleInterfaceTriple& z, int n) {
    if (z.i01 + z.i02 != 2) throw std::invalid_argument("saddle_first_order: i01+i02 must be 2");
    const double M = n / 2;
    const double w2 = 1.0 / (M * M - 3 * M + 3);
    return 0.25 * w2 *
           (M * M * z.i01 + (M - 3) * (M - 3) * z.i02 + (2 * M - 3) * (2 * M - 3) * z.i12);
}

/// Communication height of a particle/hole exchange: H0 + gamma*H1 where H0
/// is the common zero-order barrier out of B_0 and H1 comes from the
/// dominating saddle class of the move's two-step path.
struct CommHeight {
    double h0 = 0;
    double h1 = 0;
    std::string transition_type;  // I, II.a-c, III, IV.a-d, V.a-c, VI
    int delta_p = 0;
    SaddleInterfaceTriple saddle_class;
    bool grouped = false;  // V and VI reuse the row-IV height

    double value(double gamma) const { return h0 + gamma * h1; }
};

inline double b0_barrier_h0(int n) {
    const double M = n / 2;
    return M * (M - 1) / (4.0 * (M * M - 3 * M + 3));
}

struct Move {
    int site_i = 0;  // particle
    int site_j = 0;  // hole
    CommHeight height;
};

namespace detail {

inline int interfaces_at(const std::vector<int>& bits, int s) {
    const int n = (int)bits.size();
    int c = 0;
    if (bits[s] != bits[(s + 1) % n]) ++c;
    if (bits[s] != bits[(s + n - 1) % n]) ++c;
    return c;
}

inline int count_p(const std::vector<int>& bits) {
    const int n = (int)bits.size();
    int p = 0;
    for (int i = 0; i < n; ++i)
        if (bits[i] != bits[(i + 1) % n]) ++p;
    return p;
}

}  // namespace detail

/// Every particle/hole exchange out of a B_0 word, with its transition type,
/// interface-count change and first-order communication height.
inline std::vector<Move> allowed_moves(const InterfaceState& state) {
    const int n = (int)state.bits.size();
    const int p = state.p;
    std::vector<Move> moves;
    for (int i = 0; i < n; ++i) {
        if (state.bits[i] != 1) continue;
        for (int j = 0; j < n; ++j) {
            if (state.bits[j] != -1) continue;
            std::vector<int> img = state.bits;
            std::swap(img[i], img[j]);
            const int dp = detail::count_p(img) - p;
            const bool adj = (j == (i + 1) % n) || (i == (j + 1) % n);
            const int ii = detail::interfaces_at(state.bits, i);
            const int ij = detail::interfaces_at(state.bits, j);

            std::string type;
            if (!adj) {
                if (ii == 0 && ij == 0) type = "I";
                else if (ii == 0 && ij == 1) type = "II.a";
                else if (ii == 1 && ij == 0) type = "II.b";
                else if (ii == 1 && ij == 1) type = "III";
                else if (ii == 0 && ij == 2) type = "IV.a";
                else if (ii == 2 && ij == 0) type = "IV.b";
                else if (ii == 1 && ij == 2) type = "V.a";
                else if (ii == 2 && ij == 1) type = "V.b";
                else type = "VI";
            } else {
                if (ii == 1 && ij == 1) type = "II.c";
                else if (ii == 1 && ij == 2) type = "IV.c";
                else if (ii == 2 && ij == 1) type = "IV.d";
                else type = "V.c";  // (2,2) adjacent
            }

            CommHeight h;
            h.h0 = b0_barrier_h0(n);
            h.transition_type = type;
            h.delta_p = dp;
            // dominating saddle class per row: I [0,2,p+2], II [0,2,p],
            // III [1,1,p-1], IV/V/VI [0,2,p-2]
            if (type == "I") h.saddle_class = {0, 2, p + 2};
            else if (type.rfind("II.", 0) == 0) h.saddle_class = {0, 2, p};
            else if (type == "III") h.saddle_class = {1, 1, p - 1};
            else {
                h.saddle_class = {0, 2, p - 2};
                h.grouped = (type[0] == 'V');  // V and VI share the IV row
            }
            h.h1 = saddle_first_order(h.saddle_class, n) - p;
            moves.push_back({i, j, h});
        }
    }
    return moves;
}

/// First-order escape heights of the A-classes and their metastable order
/// A2 < A'4 < ... < A'_{M'} < A4 < ... < A_N (escape heights decreasing).
inline HierarchyReport verify_A_hierarchy(int n) {
    if (n < 8) throw std::invalid_argument("verify_A_hierarchy: n >= 8 required");
    Params{n, 0.0, 1.0}.validate();
    const double M = n / 2;
    const int mprime = (n / 2) % 2 == 0 ? n / 2 : n / 2 - 1;
    const double q4 = 4.0 * (M * M - 3 * M + 3);
    HierarchyReport rep;
    // heights are the gamma-linear coefficients (H0 is common to all moves)
    rep.blocks.push_back({"A2", (10 * M * M - 36 * M + 36 - 6) / q4});
    for (int p = 4; p <= mprime; p += 2)
        rep.blocks.push_back({"A'" + std::to_string(p), (-2 * M * M + 6 * M - 3 * p) / q4});
    for (int p = 4; p <= n; p += 2)
        rep.blocks.push_back({"A" + std::to_string(p), (-6 * M * M + 12 * M - 3 * p) / q4});

    double theta = std::numeric_limits<double>::infinity();
    bool ok = true;
    for (std::size_t i = 1; i < rep.blocks.size(); ++i) {
        const double gap = rep.blocks[i - 1].escape_height - rep.blocks[i].escape_height;
        theta = std::min(theta, gap);
        if (gap <= 0) ok = false;
    }
    rep.theta = theta;
    rep.ok = ok;
    return rep;
}

/// Disconnectivity tree by union-find: minima are leaves; scanning saddles in
/// order of increasing potential, the first saddle joining two components
/// becomes their merge node. Deterministic: ties broken by name.
struct DisconnectivityTree {
    struct Node {
        std::string name;  // minimum or saddle label
        double v = 0;
        std::vector<int> children;  // empty for leaves
    };
    std::vector<Node> nodes;
    std::vector<int> roots;  // 1 entry if connected, several -> forest
    bool forest = false;
};

struct SaddleLink {
    std::string name;
    double v;
    int a, b;  // minima indices
};

inline DisconnectivityTree disconnectivity_tree(std::vector<std::pair<std::string, double>> minima,
                                                std::vector<SaddleLink> saddles) {
    DisconnectivityTree t;
    const int nm = (int)minima.size();
    std::vector<int> comp(nm);  // minimum -> current tree node of its component
    for (int i = 0; i < nm; ++i) {
        t.nodes.push_back({minima[i].first, minima[i].second, {}});
        comp[i] = i;
    }
    std::vector<int> parent(nm);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    std::sort(saddles.begin(), saddles.end(), [](const SaddleLink& u, const SaddleLink& v) {
        if (u.v != v.v) return u.v < v.v;
        return u.name < v.name;
    });
    for (const auto& s : saddles) {
        int ra = find(s.a), rb = find(s.b);
        if (ra == rb) continue;
        int node = (int)t.nodes.size();
        t.nodes.push_back({s.name, s.v, {comp[ra], comp[rb]}});
        parent[rb] = ra;
        comp[find(ra)] = node;
    }
    std::vector<int> seen;
    for (int i = 0; i < nm; ++i) {
        int r = find(i);
        if (std::find(seen.begin(), seen.end(), r) == seen.end()) {
            seen.push_back(r);
            t.roots.push_back(comp[r]);
        }
    }
    t.forest = t.roots.size() > 1;
    return t;
}

/// The two-step path realizing a particle/hole exchange x -> x' through an
/// intermediate higher minimum: x -> z1 -> y -> z2 -> x'. Both sign branches
/// are produced; the realized communication height is the smaller of the two
/// branch maxima.
struct TwoStepPath {
    StationaryPoint x, x_prime;
    StationaryPoint z1_plus, y_plus, z2_plus;
    StationaryPoint z1_minus, y_minus, z2_minus;
};

inline TwoStepPath two_step_path(const std::vector<int>& bits, int i, int j) {
    const int n = (int)bits.size();
    const int m = n / 2;
    if (bits[i] != 1 || bits[j] != -1)
        throw std::invalid_argument("two_step_path: need particle at i, hole at j");
    Triple b0{0, m, m}, c1{1, m - 1, m};

    auto word_from_bits = [&](const std::vector<int>& b, int flip) {
        // flip=+1: particles (+1) get label 1, holes label 2; flip=-1 swaps roles
        std::vector<int> w(n);
        for (int s = 0; s < n; ++s) w[s] = (b[s] == flip) ? 1 : 2;
        return w;
    };

    TwoStepPath path;
    std::vector<int> bits2 = bits;
    std::swap(bits2[i], bits2[j]);
    {
        std::vector<int> wx = word_from_bits(bits, +1);
        path.x = make_gamma0_point(n, b0, wx, +1);
        path.x_prime = make_gamma0_point(n, b0, word_from_bits(bits2, +1), +1);
    }
    // plus branch: the alpha'_0 site visits the particle side
    {
        std::vector<int> w1 = word_from_bits(bits, +1);
        w1[i] = 0;
        path.z1_plus = make_gamma0_point(n, c1, w1, +1);
        std::vector<int> wy(n, 2);
        for (int s = 0; s < n; ++s)
            if (bits[s] == 1 && s != i) wy[s] = 1;
        path.y_plus = make_gamma0_point(n, Triple{0, m - 1, m + 1}, wy, +1);
        std::vector<int> w2 = wy;
        w2[j] = 0;
        path.z2_plus = make_gamma0_point(n, c1, w2, +1);
    }
    // minus branch: roles of particles and holes exchanged, sign flipped
    {
        std::vector<int> w1 = word_from_bits(bits, -1);
        w1[j] = 0;
        path.z1_minus = make_gamma0_point(n, c1, w1, -1);
        std::vector<int> wy(n, 2);
        for (int s = 0; s < n; ++s)
            if (bits[s] == -1 && s != j) wy[s] = 1;
        path.y_minus = make_gamma0_point(n, Triple{0, m - 1, m + 1}, wy, -1);
        std::vector<int> w2 = wy;
        w2[i] = 0;
        path.z2_minus = make_gamma0_point(n, c1, w2, -1);
    }
    return path;
}

}  // namespace metaring

#endif  // METARING_HIERARCHY_HPP
