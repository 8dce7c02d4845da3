#ifndef METARING_SIMULATE_HPP
#define METARING_SIMULATE_HPP

#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "rates.hpp"

namespace metaring {

/// Counter-style 64-bit generator (splitmix64 update). Replica r of a run
/// draws from stream(seed, r), so parallel replicas are reproducible and
/// non-overlapping by construction.
class Rng {
  public:
    Rng(std::uint64_t seed, std::uint64_t stream = 0) {
        state_ = seed ^ (0x9E3779B97F4A7C15ULL * (stream + 1));
        for (int i = 0; i < 4; ++i) next_u64();  // decorrelate nearby streams
    }

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    /// uniform in (0,1)
    double next_uniform() {
        const double u = (next_u64() >> 11) * 0x1.0p-53;
        return u > 0.0 ? u : 0x1.0p-53;
    }

    /// standard normal (Box-Muller, pairs cached)
    double next_normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = next_uniform();
        const double u2 = next_uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * M_PI * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

  private:
    std::uint64_t state_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

/// Preallocated projected Euler-Maruyama stepper for the constrained SDE:
/// x' = project(x + drift*dt + sqrt(2 eps dt) * project(xi)).
class EmIntegrator {
  public:
    EmIntegrator(const Params& p, double dt, Rng rng) : p_(p), dt_(dt), rng_(rng), g_(p.n) {
        if (dt <= 0 || dt > 0.01)
            throw std::invalid_argument("EmIntegrator: dt must be in (0, 0.01]");
        sigma_ = std::sqrt(2.0 * p.eps * dt);
    }

    void step(Vec& x) {
        const int n = p_.n;
        const double hg = 0.5 * p_.gamma;
        double gsum = 0.0;
        for (int i = 0; i < n; ++i) {
            const double xi = x[i];
            const double left = x[i == 0 ? n - 1 : i - 1];
            const double right = x[i == n - 1 ? 0 : i + 1];
            const double gi = xi * xi * xi - xi + hg * (2.0 * xi - left - right);
            g_[i] = gi;
            gsum += gi;
        }
        const double gmean = gsum / n;
        double xsum = 0.0;
        if (p_.eps > 0.0) {
            double nsum = 0.0;
            for (int i = 0; i < n; ++i) {
                const double z = rng_.next_normal();
                g_[i] = -(g_[i] - gmean) * dt_ + sigma_ * z;
                nsum += sigma_ * z;
            }
            const double nmean = nsum / n;
            for (int i = 0; i < n; ++i) {
                x[i] += g_[i] - nmean;
                xsum += x[i];
            }
        } else {
            for (int i = 0; i < n; ++i) {
                x[i] -= (g_[i] - gmean) * dt_;
                xsum += x[i];
            }
        }
        const double xmean = xsum / n;
        for (int i = 0; i < n; ++i) x[i] -= xmean;
    }

    Rng& rng() { return rng_; }

  private:
    Params p_;
    double dt_;
    double sigma_;
    Rng rng_;
    Vec g_;
};

/// Single projected Euler-Maruyama step (convenience wrapper; throws on
/// non-finite output).
inline Vec step_em(const Params& p, const Vec& x, double dt, Rng& rng) {
    EmIntegrator em(p, dt, rng);
    Vec y = x;
    em.step(y);
    rng = em.rng();
    for (double v : y)
        if (!std::isfinite(v)) throw NumericError("step_em: non-finite state");
    return y;
}

/// Nearest-family label of a configuration.
struct ConfigLabel {
    enum Kind { kB0, kBk, kTransient } kind = kTransient;
    InterfaceState state;  // valid for kB0
    int k = -1;            // valid for kBk

    std::string text() const {
        if (kind == kB0) return state.klass();
        if (kind == kBk) return "B" + std::to_string(k);
        return "transient";
    }
};

/// Classify against the +-1 patterns (coordinates within 0.3 of +-1) first,
/// then against the family coordinate multisets (tolerance 0.1), else
/// transient. Family multisets taken at gamma = 0 unless continued values
/// are supplied.
class Classifier {
  public:
    explicit Classifier(int n, double gamma = 0.0) : n_(n) {
        for (int k = 1; k <= k_max(n); ++k) {
            AlphaRoots r = alpha_from_triple(Triple{0, n / 2 - k, n / 2 + k}, +1);
            Vec mult;
            for (int i = 0; i < n / 2 - k; ++i) mult.push_back(r.alpha1);
            for (int i = 0; i < n / 2 + k; ++i) mult.push_back(r.alpha2);
            std::sort(mult.begin(), mult.end());
            if (gamma > 0) {
                // continued multiset: continue the block representative
                std::vector<int> w(n, 2);
                for (int i = 0; i < n / 2 - k; ++i) w[i] = 1;
                StationaryPoint p =
                    continue_to_gamma(make_gamma0_point(n, Triple{0, n / 2 - k, n / 2 + k}, w, +1),
                                      gamma);
                mult = p.coords;
                std::sort(mult.begin(), mult.end());
            }
            bk_multisets_.push_back(std::move(mult));
        }
    }

    ConfigLabel classify(const Vec& x) const {
        ConfigLabel lbl;
        bool b0 = true;
        std::vector<int> bits(n_);
        int sum = 0;
        for (int i = 0; i < n_; ++i) {
            if (std::abs(x[i] - 1.0) <= 0.3) bits[i] = 1;
            else if (std::abs(x[i] + 1.0) <= 0.3) bits[i] = -1;
            else {
                b0 = false;
                break;
            }
            sum += bits[i];
        }
        if (b0 && sum == 0) {
            lbl.kind = ConfigLabel::kB0;
            lbl.state = classify_B0_state(bits);
            return lbl;
        }
        Vec sx = x;
        std::sort(sx.begin(), sx.end());
        for (std::size_t k = 0; k < bk_multisets_.size(); ++k) {
            for (int sgn : {+1, -1}) {
                bool match = true;
                for (int i = 0; i < n_; ++i) {
                    const double ref = sgn > 0 ? bk_multisets_[k][i]
                                               : -bk_multisets_[k][n_ - 1 - i];
                    if (std::abs(sx[i] - ref) > 0.1) {
                        match = false;
                        break;
                    }
                }
                if (match) {
                    lbl.kind = ConfigLabel::kBk;
                    lbl.k = (int)k + 1;
                    return lbl;
                }
            }
        }
        return lbl;
    }

  private:
    int n_;
    std::vector<Vec> bk_multisets_;
};

struct ExitTimeStats {
    struct PerEps {
        double eps = 0;
        std::vector<double> times;  // uncensored exits, replica order
        int censored = 0;
        double mean = 0;
        double std_error = 0;
    };
    std::vector<PerEps> per_eps;
    double arrhenius_slope = 0;  // least-squares slope of log(mean) vs 1/eps
};

/// Monte Carlo mean first-passage time of the SDE from `start` into the set
/// recognized by `is_target` (checked every check_stride steps). Replica r
/// uses stream(seed, r); aggregation is by replica index, so results are
/// independent of any execution order.
inline ExitTimeStats mean_exit_time(Params p, const Vec& start,
                                    const std::function<bool(const Vec&)>& is_target,
                                    const std::vector<double>& eps_list, int replicas,
                                    std::uint64_t seed, double dt = 0.005,
                                    long max_steps = 400000000L, int check_stride = 8) {
    ExitTimeStats stats;
    for (double eps : eps_list) {
        ExitTimeStats::PerEps pe;
        pe.eps = eps;
        p.eps = eps;
        for (int r = 0; r < replicas; ++r) {
            EmIntegrator em(p, dt, Rng(seed, (std::uint64_t)r + 1));
            Vec x = start;
            long step = 0;
            bool exited = false;
            while (step < max_steps) {
                for (int s = 0; s < check_stride; ++s) em.step(x);
                step += check_stride;
                if (!std::isfinite(x[0]))
                    throw NumericError("mean_exit_time: blow-up at step " + std::to_string(step));
                if (is_target(x)) {
                    pe.times.push_back(step * dt);
                    exited = true;
                    break;
                }
            }
            if (!exited) ++pe.censored;
        }
        double m = 0;
        for (double t : pe.times) m += t;
        m /= std::max<std::size_t>(1, pe.times.size());
        double var = 0;
        for (double t : pe.times) var += (t - m) * (t - m);
        if (pe.times.size() > 1) var /= (pe.times.size() - 1);
        pe.mean = m;
        pe.std_error = std::sqrt(var / std::max<std::size_t>(1, pe.times.size()));
        stats.per_eps.push_back(std::move(pe));
    }
    // slope of log(mean) vs 1/eps
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int cnt = 0;
    for (const auto& pe : stats.per_eps) {
        if (pe.times.empty()) continue;
        const double xi = 1.0 / pe.eps, yi = std::log(pe.mean);
        sx += xi;
        sy += yi;
        sxx += xi * xi;
        sxy += xi * yi;
        ++cnt;
    }
    if (cnt >= 2) stats.arrhenius_slope = (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
    return stats;
}

/// Rates of the effective particle/hole exchange chain: a uniform prefactor
/// kappa (from the zero-coupling saddle closed forms) times the Arrhenius
/// factor of each move's communication height. This preserves every ratio
/// the first-order heights determine.
class KmcModel {
  public:
    KmcModel(int n, double gamma, double eps) : n_(n), gamma_(gamma), eps_(eps) {
        HessianClosedForms f = hessian_closed_forms(n / 2);
        kappa_ = std::abs(f.lambda_minus) / (2.0 * M_PI) *
                 std::sqrt(f.det_min / std::abs(f.det_saddle));
    }

    double rate_of(const CommHeight& h) const {
        return kappa_ * std::exp(-h.value(gamma_) / eps_);
    }
    double kappa() const { return kappa_; }
    int n() const { return n_; }
    double gamma() const { return gamma_; }
    double eps() const { return eps_; }

  private:
    int n_;
    double gamma_, eps_;
    double kappa_;
};

struct KmcEvent {
    double waiting_time = 0;
    Move move;
    InterfaceState next;
};

/// One Gillespie step: exponential waiting time at the total rate, move
/// sampled proportionally to its rate.
inline KmcEvent kmc_step(const InterfaceState& state, const KmcModel& model, Rng& rng) {
    std::vector<Move> moves = allowed_moves(state);
    if (moves.empty()) throw NumericError("kmc_step: empty move set");
    double total = 0;
    std::vector<double> rates(moves.size());
    for (std::size_t i = 0; i < moves.size(); ++i) {
        rates[i] = model.rate_of(moves[i].height);
        total += rates[i];
    }
    KmcEvent ev;
    ev.waiting_time = -std::log(rng.next_uniform()) / total;
    double target = rng.next_uniform() * total, acc = 0;
    std::size_t pick = moves.size() - 1;
    for (std::size_t i = 0; i < moves.size(); ++i) {
        acc += rates[i];
        if (target <= acc) {
            pick = i;
            break;
        }
    }
    ev.move = moves[pick];
    std::vector<int> bits = state.bits;
    std::swap(bits[ev.move.site_i], bits[ev.move.site_j]);
    ev.next = classify_B0_state(bits);
    return ev;
}

struct TraceEntry {
    double t = 0;       // cumulative event time
    int p = 0;          // interface count after the event
    std::string klass;  // A_p / A'_p label after the event
    double t_wait = 0;
    int site_i = 0, site_j = 0;
    std::string type;
    int delta_p = 0;
};

/// Event-driven coarsening trace of the interface count, started from the
/// alternating word unless another start is given.
inline std::vector<TraceEntry> run_interface_trace(int n, double gamma, double eps, long events,
                                                   std::uint64_t seed,
                                                   const std::vector<int>* start = nullptr) {
    Params{n, gamma, eps}.validate();
    std::vector<int> bits;
    if (start) bits = *start;
    else {
        bits.resize(n);
        for (int i = 0; i < n; ++i) bits[i] = (i % 2 == 0) ? 1 : -1;
    }
    InterfaceState state = classify_B0_state(bits);
    KmcModel model(n, gamma, eps);
    Rng rng(seed, 0);
    std::vector<TraceEntry> trace;
    trace.reserve(events);
    double t = 0;
    for (long e = 0; e < events; ++e) {
        KmcEvent ev = kmc_step(state, model, rng);
        t += ev.waiting_time;
        TraceEntry te;
        te.t = t;
        te.p = ev.next.p;
        te.klass = ev.next.klass();
        te.t_wait = ev.waiting_time;
        te.site_i = ev.move.site_i;
        te.site_j = ev.move.site_j;
        te.type = ev.move.height.transition_type;
        te.delta_p = ev.move.height.delta_p;
        trace.push_back(std::move(te));
        state = std::move(ev.next);
    }
    return trace;
}

}  // namespace metaring

#endif  // METARING_SIMULATE_HPP
