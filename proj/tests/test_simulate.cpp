#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <metaring/simulate.hpp>

#include <set>

using namespace metaring;

TEST_CASE("rng streams are deterministic and distinct") {
    Rng a(42, 0), b(42, 0), c(42, 1);
    for (int i = 0; i < 100; ++i) {
        const std::uint64_t va = a.next_u64();
        CHECK(va == b.next_u64());
        CHECK(va != c.next_u64());
    }
    Rng u(7, 3);
    for (int i = 0; i < 1000; ++i) {
        const double x = u.next_uniform();
        CHECK(x > 0.0);
        CHECK(x < 1.0);
    }
    // loose moment check on the normal generator
    Rng g(123, 0);
    double m = 0, v = 0;
    const int kn = 100000;
    std::vector<double> zs(kn);
    for (double& z : zs) z = g.next_normal();
    for (double z : zs) m += z;
    m /= kn;
    for (double z : zs) v += (z - m) * (z - m);
    v /= kn - 1;
    CHECK(std::abs(m) < 0.02);
    CHECK(v == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("integrator conserves the zero-mean constraint") {
    Params p{8, 0.05, 0.1};
    EmIntegrator em(p, 0.005, Rng(11, 0));
    Rng init(5, 0);
    Vec x(8);
    for (double& xi : x) xi = init.next_normal();
    x = project_to_s(x);
    for (int rep = 0; rep < 20; ++rep) {
        for (int s = 0; s < 10000; ++s) em.step(x);
        CHECK(std::abs(mean(x)) < 1e-12);
        CHECK(std::isfinite(x[0]));
    }
    CHECK_THROWS_AS(EmIntegrator(p, 0.02, Rng(1, 0)), std::invalid_argument);
    CHECK_THROWS_AS(EmIntegrator(p, 0.0, Rng(1, 0)), std::invalid_argument);
}

TEST_CASE("deterministic flow relaxes to the block minimum") {
    StationaryPoint target = continue_to_gamma(
        build_transition_graph(8, false).nodes[0], 0.05);

    Params pp{8, 0.05, 0.1};
    pp.eps = 0.0;  // integrator treats eps = 0 as drift-only
    EmIntegrator em(pp, 0.005, Rng(3, 0));
    Vec x = target.coords;
    for (double& xi : x) xi += 0.05;  // uniform shift is removed by projection
    x[0] += 0.02;
    x[3] -= 0.02;
    x = project_to_s(x);
    for (int s = 0; s < 40000; ++s) em.step(x);
    for (int i = 0; i < 8; ++i) CHECK(x[i] == doctest::Approx(target.coords[i]).epsilon(1e-8));

    // exact stationary point is a fixed point of the drift-only map
    Vec y = target.coords;
    EmIntegrator em2(pp, 0.005, Rng(4, 0));
    for (int s = 0; s < 100; ++s) em2.step(y);
    for (int i = 0; i < 8; ++i) CHECK(y[i] == doctest::Approx(target.coords[i]).epsilon(1e-12));
}

TEST_CASE("single-step wrapper is reproducible") {
    Params p{8, 0.0, 0.1};
    Vec x{1, 1, 1, 1, -1, -1, -1, -1};
    Rng r1(99, 0), r2(99, 0);
    Vec a = step_em(p, x, 0.005, r1);
    Vec b = step_em(p, x, 0.005, r2);
    CHECK(a == b);  // bit identical
    Vec c = step_em(p, a, 0.005, r1);
    Vec d = step_em(p, a, 0.005, r2);
    CHECK(c == d);
    CHECK(a != c);
}

TEST_CASE("classifier") {
    Classifier cl(8);
    ConfigLabel b0 = cl.classify({1, 1, 1, 1, -1, -1, -1, -1});
    CHECK(b0.kind == ConfigLabel::kB0);
    CHECK(b0.text() == "A2");
    ConfigLabel alt = cl.classify({0.9, -1.1, 1.2, -0.8, 1.0, -1.0, 1.05, -0.95});
    CHECK(alt.kind == ConfigLabel::kB0);
    CHECK(alt.text() == "A8");

    AlphaRoots r = alpha_from_triple(Triple{0, 3, 5}, +1);
    Vec b1(8, r.alpha2);
    b1[0] = b1[1] = b1[2] = r.alpha1;
    ConfigLabel lb1 = cl.classify(b1);
    CHECK(lb1.kind == ConfigLabel::kBk);
    CHECK(lb1.k == 1);
    CHECK(lb1.text() == "B1");
    Vec mb1 = b1;
    for (double& v : mb1) v = -v;  // sign-flipped branch
    CHECK(cl.classify(mb1).kind == ConfigLabel::kBk);

    Vec mid(8);
    for (int i = 0; i < 8; ++i) mid[i] = 0.5 * b1[i];
    ConfigLabel lm = cl.classify(mid);
    CHECK(lm.kind == ConfigLabel::kTransient);
    CHECK(lm.text() == "transient");

    // continued multisets at gamma > 0 recognize the continued minimum
    Classifier cg(8, 0.05);
    StationaryPoint cb1 = continue_to_gamma(
        build_transition_graph(8, false).nodes[1], 0.05);
    CHECK(cg.classify(cb1.coords).kind == ConfigLabel::kBk);
}

TEST_CASE("mean exit time machinery") {
    Params p{8, 0.0, 0.1};
    Vec start{1, 1, 1, 1, -1, -1, -1, -1};
    auto is_target = [](const Vec& x) { return std::abs(x[0] - 1.0) > 0.5; };
    ExitTimeStats s1 = mean_exit_time(p, start, is_target, {0.5, 0.4}, 6, 2024, 0.005, 200000);
    ExitTimeStats s2 = mean_exit_time(p, start, is_target, {0.5, 0.4}, 6, 2024, 0.005, 200000);
    REQUIRE(s1.per_eps.size() == 2);
    for (const auto& pe : s1.per_eps) {
        CHECK(pe.censored == 0);
        CHECK((int)pe.times.size() == 6);
        CHECK(pe.mean > 0);
        CHECK(pe.std_error >= 0);
    }
    CHECK(s1.per_eps[0].times == s2.per_eps[0].times);  // replica-deterministic
    CHECK(s1.arrhenius_slope == s2.arrhenius_slope);
    // at strong noise exits happen fast
    CHECK(s1.per_eps[0].mean < 10.0);
}

TEST_CASE("kmc model rates") {
    KmcModel m(8, 0.02, 0.05);
    HessianClosedForms f = hessian_closed_forms(4);
    const double kappa = std::abs(f.lambda_minus) / (2 * M_PI) *
                         std::sqrt(f.det_min / std::abs(f.det_saddle));
    CHECK(m.kappa() == doctest::Approx(kappa).epsilon(1e-13));
    CommHeight a, b;
    a.h0 = b.h0 = b0_barrier_h0(8);
    a.h1 = -0.5;
    b.h1 = 1.5;
    CHECK(m.rate_of(a) / m.rate_of(b) ==
          doctest::Approx(std::exp(0.02 * 2.0 / 0.05)).epsilon(1e-12));
}

TEST_CASE("kmc step from the alternating word") {
    std::vector<int> alt;
    for (int i = 0; i < 8; ++i) alt.push_back(i % 2 ? -1 : 1);
    InterfaceState s = classify_B0_state(alt);
    CHECK(s.p == 8);
    // interface count is maximal: no move can increase it
    for (const Move& m : allowed_moves(s)) CHECK(m.height.delta_p <= 0);

    KmcModel model(8, 0.02, 0.05);
    Rng rng(5, 0);
    double tsum = 0;
    const int reps = 4000;
    for (int i = 0; i < reps; ++i) {
        KmcEvent ev = kmc_step(s, model, rng);
        CHECK(ev.waiting_time > 0);
        CHECK(ev.next.p == s.p + ev.move.height.delta_p);
        tsum += ev.waiting_time;
    }
    double total_rate = 0;
    for (const Move& m : allowed_moves(s)) total_rate += model.rate_of(m.height);
    CHECK(tsum / reps == doctest::Approx(1.0 / total_rate).epsilon(0.05));
}

TEST_CASE("kmc chain satisfies detailed balance in the interface count") {
    // rate(s -> s') * exp(-gamma p_s / eps) is symmetric because a move and
    // its reverse share the same saddle class
    const double gamma = 0.05, eps = 0.07;
    KmcModel model(16, gamma, eps);
    std::vector<std::vector<int>> words{
        {1, 1, 1, 1, 1, 1, 1, 1, -1, -1, -1, -1, -1, -1, -1, -1},
        {1, 1, -1, -1, 1, 1, -1, -1, 1, 1, -1, -1, 1, 1, -1, -1},
        {1, -1, 1, 1, 1, -1, -1, 1, 1, -1, -1, -1, 1, -1, 1, -1},
    };
    for (const auto& w : words) {
        InterfaceState s = classify_B0_state(w);
        for (const Move& mv : allowed_moves(s)) {
            std::vector<int> img = s.bits;
            std::swap(img[mv.site_i], img[mv.site_j]);
            InterfaceState si = classify_B0_state(img);
            const Move* rev = nullptr;
            auto back = allowed_moves(si);
            for (const Move& bm : back)
                if (bm.site_i == mv.site_j && bm.site_j == mv.site_i) rev = &bm;
            REQUIRE(rev != nullptr);
            const double flux_fwd =
                std::exp(-gamma * s.p / eps) * model.rate_of(mv.height);
            const double flux_bwd =
                std::exp(-gamma * si.p / eps) * model.rate_of(rev->height);
            CHECK(flux_fwd == doctest::Approx(flux_bwd).epsilon(1e-11));
        }
    }
}

TEST_CASE("interface trace: coarsening run") {
    auto trace = run_interface_trace(16, 0.1, 0.05, 2000, 77);
    REQUIRE(trace.size() == 2000);
    // identical rerun
    auto again = run_interface_trace(16, 0.1, 0.05, 2000, 77);
    CHECK(trace.back().t == again.back().t);
    CHECK(trace.back().p == again.back().p);

    int prev_p = 16;  // alternating start
    double prev_t = 0;
    int min_p = 16;
    for (const auto& e : trace) {
        CHECK(e.t > prev_t);
        CHECK(e.t_wait == doctest::Approx(e.t - prev_t).epsilon(1e-9));
        CHECK(e.p == prev_p + e.delta_p);
        CHECK((std::set<int>{-4, -2, 0, 2, 4}.count(e.delta_p) == 1));
        CHECK(!e.type.empty());
        min_p = std::min(min_p, e.p);
        prev_p = e.p;
        prev_t = e.t;
    }
    CHECK(min_p == 2);          // reaches the two-interface ground class
    CHECK(trace.back().p <= 6); // and stays coarse

    // explicit start override
    std::vector<int> blocks;
    for (int i = 0; i < 16; ++i) blocks.push_back(i < 8 ? 1 : -1);
    auto t2 = run_interface_trace(16, 0.1, 0.05, 10, 77, &blocks);
    CHECK(t2.front().p == 2 + t2.front().delta_p);
}

TEST_CASE("trace events match the move table") {
    auto trace = run_interface_trace(16, 0.1, 0.05, 300, 123);
    std::vector<int> bits;
    for (int i = 0; i < 16; ++i) bits.push_back(i % 2 ? -1 : 1);
    InterfaceState s = classify_B0_state(bits);
    for (const auto& e : trace) {
        bool found = false;
        for (const Move& m : allowed_moves(s))
            if (m.site_i == e.site_i && m.site_j == e.site_j) {
                found = true;
                CHECK(m.height.transition_type == e.type);
                CHECK(m.height.delta_p == e.delta_p);
            }
        REQUIRE(found);
        std::swap(s.bits[e.site_i], s.bits[e.site_j]);
        s = classify_B0_state(s.bits);
        CHECK(s.p == e.p);
        CHECK(s.klass() == e.klass);
    }
}
