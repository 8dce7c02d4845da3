// Command-line front door: landscape enumeration, hierarchy reports, rate
// tables, spectral gap, SDE/KMC simulation, and the invariant suite.
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include <metaring/io.hpp>

using namespace metaring;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitNumeric = 3;
constexpr int kExitVerify = 4;

struct GlobalOpts {
    int n = 8;
    double gamma = 0.0;
    double eps = 0.1;
    std::uint64_t seed = 0;
    bool seed_set = false;
    std::string out;
    std::string format = "json";
    int threads = 1;
};

void add_common(CLI::App* cmd, GlobalOpts& g, bool needs_eps) {
    cmd->add_option("--n", g.n, "ring size (even, not divisible by 3)")->required();
    cmd->add_option("--gamma", g.gamma, "coupling strength");
    if (needs_eps) cmd->add_option("--eps", g.eps, "noise intensity");
    cmd->add_option("--seed", g.seed, "rng seed (fallback: METASTABLE_SEED, then 12345)")
        ->each([&g](const std::string&) { g.seed_set = true; });
    cmd->add_option("--out", g.out, "output file (stdout if omitted)");
    cmd->add_option("--format", g.format, "output format")
        ->check(CLI::IsMember({"json", "csv", "dot"}));
    cmd->add_option("--threads", g.threads, "worker threads for independent replicas")
        ->check(CLI::PositiveNumber);
}

std::uint64_t resolve_seed(const GlobalOpts& g) {
    if (g.seed_set) return g.seed;
    if (const char* env = std::getenv("METASTABLE_SEED")) return std::strtoull(env, nullptr, 10);
    return 12345;
}

// computed first, written only afterwards: failures leave no partial file
void emit(const GlobalOpts& g, const std::string& content) {
    if (g.out.empty()) std::cout << content;
    else write_file(g.out, content);
}

int cmd_landscape(const GlobalOpts& g, bool full) {
    TransitionGraph graph = build_transition_graph(g.n, full);
    if (g.gamma > 0) {
        for (auto& p : graph.nodes) p = continue_to_gamma(p, g.gamma);
        for (auto& z : graph.saddles) z = continue_to_gamma(z, g.gamma);
    }
    if (g.format == "dot") emit(g, to_dot(graph));
    else if (g.format == "json") {
        json j = to_json(graph);
        j["n"] = g.n;
        j["gamma"] = g.gamma;
        emit(g, j.dump(2) + "\n");
    } else {
        throw std::invalid_argument("landscape: format must be json or dot");
    }
    return kExitOk;
}

int cmd_hierarchy(const GlobalOpts& g) {
    HierarchyReport bk = verify_Bk_hierarchy(g.n, g.gamma);
    HierarchyReport ap = verify_A_hierarchy(g.n);
    if (g.format == "dot") {
        std::vector<std::pair<std::string, double>> minima;
        std::vector<SaddleLink> links;
        for (int k = 0; k <= k_max(g.n); ++k)
            minima.push_back({family_name(Family::B, k), family_potential(g.n, k, Family::B)});
        for (int k = 1; k <= k_max(g.n); ++k)
            links.push_back({family_name(Family::C, k, 1), family_potential(g.n, k, Family::C),
                             k - 1, k});
        emit(g, to_dot(disconnectivity_tree(minima, links)));
        return kExitOk;
    }
    if (g.format != "json") throw std::invalid_argument("hierarchy: format must be json or dot");
    json j;
    j["n"] = g.n;
    j["gamma"] = g.gamma;
    j["bk"] = to_json(bk);
    j["a_classes"] = to_json(ap);
    emit(g, j.dump(2) + "\n");
    return kExitOk;
}

int cmd_rates(const GlobalOpts& g) {
    if (g.format != "json") throw std::invalid_argument("rates: format must be json");
    json table = json::array();
    for (int k = 1; k <= k_max(g.n); ++k) {
        RateEstimate r = symmetric_transition_time(g.n, k, g.eps);
        json row = to_json(r);
        row["transition"] = family_name(Family::B, k) + "->" + family_name(Family::B, k - 1);
        row["mean_time"] = r.time_at(g.eps);
        row["rate"] = r.rate_at(g.eps);
        table.push_back(std::move(row));
    }
    json j;
    j["n"] = g.n;
    j["gamma"] = g.gamma;
    j["eps"] = g.eps;
    j["transitions"] = std::move(table);
    emit(g, j.dump(2) + "\n");
    return kExitOk;
}

int cmd_gap(const GlobalOpts& g, double qy) {
    if (g.format != "json") throw std::invalid_argument("gap: format must be json");
    SpectralGapResult r = spectral_gap(g.n, g.gamma, g.eps);
    json j = to_json(r);
    j["n"] = g.n;
    j["gamma"] = g.gamma;
    j["eps"] = g.eps;
    // per-irrep bookkeeping: activity and, for two-dim irreps, the q_y-free
    // Schur eigenvalue scaled by q_x = 1
    json reps = json::array();
    for (const IrrepSpec& pi : irreps(g.n)) {
        OrbitActivity a = active_orbits(pi, g.n);
        json row;
        row["irrep"] = pi.name();
        row["dim"] = pi.dim();
        row["x_active"] = a.x_active;
        row["y_active"] = a.y_active;
        if (pi.two_dim) {
            ReducedBlock b = reduced_block(pi, 1.0, qy > 0 ? qy : 1.0);
            row["schur_eigenvalue_per_qx"] = b.schur_eigenvalue;
        }
        reps.push_back(std::move(row));
    }
    j["irreps"] = std::move(reps);
    emit(g, j.dump(2) + "\n");
    return kExitOk;
}

int cmd_simulate_sde(const GlobalOpts& g, double dt, long steps, int record_stride) {
    if (g.format != "csv") throw std::invalid_argument("simulate sde: format must be csv");
    Params p{g.n, g.gamma, g.eps};
    p.validate();
    std::vector<int> w(g.n, 2);
    for (int i = 0; i < g.n / 2; ++i) w[i] = 1;
    StationaryPoint start = make_gamma0_point(g.n, Triple{0, g.n / 2, g.n / 2}, w, +1);
    if (g.gamma > 0) start = continue_to_gamma(start, g.gamma);
    EmIntegrator em(p, dt, Rng(resolve_seed(g), 0));
    Vec x = start.coords;
    std::vector<std::pair<double, Vec>> rows;
    rows.push_back({0.0, x});
    for (long s = 1; s <= steps; ++s) {
        em.step(x);
        if (std::abs(mean(x)) > 1e-12) throw NumericError("simulate sde: mass drift");
        if (s % record_stride == 0) rows.push_back({s * dt, x});
    }
    emit(g, trajectory_csv(rows, g.n));
    return kExitOk;
}

int cmd_simulate_jump(const GlobalOpts& g, long events, const std::string& log) {
    if (g.format != "csv") throw std::invalid_argument("simulate jump: format must be csv");
    auto trace = run_interface_trace(g.n, g.gamma, g.eps, events, resolve_seed(g));
    emit(g, log == "events" ? event_log_csv(trace) : trace_csv(trace));
    return kExitOk;
}

int cmd_verify() {
    int failures = 0;
    auto check = [&](const std::string& name, bool ok) {
        std::cout << (ok ? "ok   " : "FAIL ") << name << "\n";
        if (!ok) ++failures;
    };

    {
        TransitionGraph g4 = build_transition_graph(4, true);
        check("octahedron at n=4 (6 minima, 12 saddles, degree 4)",
              g4.nodes.size() == 6 && g4.saddles.size() == 12 && g4.edges.size() == 12);
    }
    {
        TransitionGraph g8 = build_transition_graph(8, true);
        bool bridges = g8.saddles.size() == 560;
        for (const auto& e : g8.edges)
            bridges = bridges && g8.nodes[e.lower].k == 0 && g8.nodes[e.upper].k == 1;
        check("n=8 cardinalities 70/112/560 and saddle bridges",
              g8.nodes.size() == 182 && bridges);
    }
    {
        bool ok = true;
        for (int n : {8, 10, 14, 16, 20, 50, 100, 200}) {
            if (n % 2 != 0 || n % 3 == 0) continue;
            HierarchyReport r = verify_Bk_hierarchy(n, 0.0);
            ok = ok && r.ok && r.theta > 0;
        }
        check("B_k hierarchy chain with positive margin", ok);
    }
    {
        HierarchyReport a = verify_A_hierarchy(8);
        check("A-class escape order at n=8", a.ok && a.blocks.front().name == "A2");
    }
    {
        bool ok = true;
        for (int ell = 1; ell < 4; ++ell) {
            IrrepSpec pi;
            pi.two_dim = true;
            pi.ell = ell;
            pi.parity = 1;
            pi.n = 8;
            for (double qy : {1e-3, 1.0, 1e3}) {
                ReducedBlock b = reduced_block(pi, 1.0, qy);
                const double expect = -4.0 * std::pow(std::sin(M_PI * ell / 8), 2);
                ok = ok && std::abs(b.schur_eigenvalue - expect) < 1e-12;
            }
        }
        check("Schur complement independent of q_y", ok);
    }
    {
        SpectralGapResult r = spectral_gap(8, 0.0, 0.05);
        check("gap closed forms at n=8",
              std::abs(r.exponent - 3.0 / 7.0) < 1e-12 &&
                  std::abs(r.prefactor_ratio - gap_prefactor_ratio_closed_form(8)) < 1e-9);
    }
    {
        Params p{8, 0.05, 0.1};
        EmIntegrator em(p, 0.005, Rng(1, 0));
        Vec x{1, 1, 1, 1, -1, -1, -1, -1};
        bool ok = true;
        for (int s = 0; s < 20000; ++s) {
            em.step(x);
            ok = ok && std::isfinite(x[0]);
        }
        check("SDE mass conservation over 2e4 steps", ok && std::abs(mean(x)) < 1e-12);
    }
    {
        auto trace = run_interface_trace(16, 0.1, 0.05, 500, 7);
        std::vector<int> bits;
        for (int i = 0; i < 16; ++i) bits.push_back(i % 2 ? -1 : 1);
        InterfaceState s = classify_B0_state(bits);
        bool ok = true;
        for (const auto& e : trace) {
            bool found = false;
            for (const Move& m : allowed_moves(s))
                if (m.site_i == e.site_i && m.site_j == e.site_j &&
                    m.height.transition_type == e.type)
                    found = true;
            ok = ok && found;
            std::swap(s.bits[e.site_i], s.bits[e.site_j]);
            s = classify_B0_state(s.bits);
            ok = ok && s.p == e.p;
        }
        check("KMC events verify against the move table", ok);
    }
    std::cout << (failures == 0 ? "all checks passed\n"
                                : std::to_string(failures) + " check(s) failed\n");
    return failures == 0 ? kExitOk : kExitVerify;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"mass-conserving ring-lattice metastability toolkit"};
    app.require_subcommand(1);

    GlobalOpts g;
    int exit_code = kExitOk;

    auto* landscape = app.add_subcommand("landscape", "enumerate stationary points and graph");
    bool full = false, orbits = false;
    add_common(landscape, g, false);
    landscape->add_flag("--full", full, "enumerate every point (small n)");
    landscape->add_flag("--orbits", orbits, "one representative per orbit (default)");
    landscape->callback([&] { exit_code = cmd_landscape(g, full && !orbits); });

    auto* hierarchy = app.add_subcommand("hierarchy", "metastable order reports");
    add_common(hierarchy, g, false);
    hierarchy->callback([&] { exit_code = cmd_hierarchy(g); });

    auto* rates = app.add_subcommand("rates", "transition-time table");
    add_common(rates, g, true);
    rates->callback([&] { exit_code = cmd_rates(g); });

    auto* gap = app.add_subcommand("gap", "spectral gap and irrep decomposition");
    double qy = 0.0;
    add_common(gap, g, true);
    gap->add_option("--qy", qy, "override the fast-orbit rate (result is invariant)");
    gap->callback([&] { exit_code = cmd_gap(g, qy); });

    auto* simulate = app.add_subcommand("simulate", "stochastic dynamics");
    simulate->require_subcommand(1);
    auto* sde = simulate->add_subcommand("sde", "projected Euler-Maruyama trajectory");
    double dt = 0.005;
    long steps = 10000;
    int record_stride = 10;
    GlobalOpts gs;
    gs.format = "csv";
    add_common(sde, gs, true);
    sde->add_option("--dt", dt, "time step (<= 0.01)");
    sde->add_option("--steps", steps, "number of steps");
    sde->add_option("--record-stride", record_stride, "record every k-th step")
        ->check(CLI::PositiveNumber);
    sde->callback([&] { exit_code = cmd_simulate_sde(gs, dt, steps, record_stride); });

    auto* jump = simulate->add_subcommand("jump", "kinetic Monte Carlo interface chain");
    long events = 1000;
    std::string log = "trace";
    GlobalOpts gj;
    gj.format = "csv";
    add_common(jump, gj, true);
    jump->add_option("--events", events, "number of jump events");
    jump->add_option("--log", log, "trace (t,p,label) or events (waiting/move log)")
        ->check(CLI::IsMember({"trace", "events"}));
    jump->callback([&] { exit_code = cmd_simulate_jump(gj, events, log); });

    auto* verify = app.add_subcommand("verify", "run the named invariant suite");
    verify->callback([&] { exit_code = cmd_verify(); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitInput;
    } catch (const ContinuationError& e) {
        std::cerr << "numeric failure: " << e.what() << "\n";
        return kExitNumeric;
    } catch (const NumericError& e) {
        std::cerr << "numeric failure: " << e.what() << "\n";
        return kExitNumeric;
    } catch (const std::invalid_argument& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kExitInput;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    }
    return exit_code;
}
