#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <metaring/core_model.hpp>
#include <metaring/linalg.hpp>

using namespace metaring;

// small deterministic LCG for test inputs
struct TestRand {
    std::uint64_t s = 12345;
    double operator()() {
        s = s * 6364136223846793005ULL + 1442695040888963407ULL;
        return ((s >> 11) * 0x1.0p-53) * 4.0 - 2.0;
    }
};

TEST_CASE("params validation") {
    CHECK_NOTHROW((Params{8, 0.0, 0.1}.validate()));
    CHECK_NOTHROW((Params{4, 0.2, 1.0}.validate()));
    CHECK_THROWS_AS((Params{6, 0.0, 0.1}.validate()), std::invalid_argument);   // divisible by 3
    CHECK_THROWS_AS((Params{7, 0.0, 0.1}.validate()), std::invalid_argument);   // odd
    CHECK_THROWS_AS((Params{2, 0.0, 0.1}.validate()), std::invalid_argument);   // too small
    CHECK_THROWS_AS((Params{8, -0.1, 0.1}.validate()), std::invalid_argument);  // gamma < 0
    CHECK_THROWS_AS((Params{8, 0.0, 0.0}.validate()), std::invalid_argument);   // eps <= 0
}

TEST_CASE("potential closed values") {
    Vec block{1, 1, 1, 1, -1, -1, -1, -1};
    CHECK(potential(0.0, block) == doctest::Approx(-2.0).epsilon(1e-14));

    Vec zero(8, 0.0);
    CHECK(potential(0.0, zero) == 0.0);
    CHECK(potential(0.37, zero) == 0.0);

    // 3 coords 5/sqrt(19), 5 coords -3/sqrt(19) -> -30/19
    Vec mixed(8, -3.0 / std::sqrt(19.0));
    mixed[0] = mixed[1] = mixed[2] = 5.0 / std::sqrt(19.0);
    CHECK(potential(0.0, mixed) == doctest::Approx(-30.0 / 19.0).epsilon(1e-13));
}

TEST_CASE("gradient closed values and finite differences") {
    Vec pm{1, -1, 1, 1, -1, -1, 1, -1};
    CHECK(max_abs(unconstrained_gradient(0.0, pm)) == doctest::Approx(0.0));
    Vec zero(8, 0.0);
    CHECK(max_abs(unconstrained_gradient(0.0, zero)) == 0.0);

    TestRand rnd;
    for (int n : {4, 8, 10, 14}) {
        for (double gamma : {0.0, 0.05}) {
            for (int rep = 0; rep < 25; ++rep) {
                Vec x(n);
                for (double& v : x) v = rnd();
                x = project_to_s(x);
                Vec g = unconstrained_gradient(gamma, x);
                const double h = 1e-5;
                for (int i = 0; i < n; ++i) {
                    Vec xp = x, xm = x;
                    xp[i] += h;
                    xm[i] -= h;
                    const double fd = (potential(gamma, xp) - potential(gamma, xm)) / (2 * h);
                    CHECK(g[i] == doctest::Approx(fd).epsilon(1e-6));
                }
            }
        }
    }
}

TEST_CASE("constrained drift") {
    Vec block{1, 1, 1, 1, -1, -1, -1, -1};
    CHECK(max_abs(constrained_drift(0.0, block)) == doctest::Approx(0.0));

    // coupling-only drift on the block pattern: -gamma/2 * discrete Laplacian
    const double gamma = 0.05;
    Vec d = constrained_drift(gamma, block);
    for (int i = 0; i < 8; ++i) {
        const double lap = block[(i + 1) % 8] - 2 * block[i] + block[(i + 7) % 8];
        CHECK(d[i] == doctest::Approx(0.5 * gamma * lap).epsilon(1e-12));
    }

    TestRand rnd;
    for (int rep = 0; rep < 20; ++rep) {
        Vec x(10);
        for (double& v : x) v = rnd();
        Vec dr = constrained_drift(0.07, x);
        double s = 0;
        for (double v : dr) s += v;
        CHECK(std::abs(s) < 1e-12);
    }
}

TEST_CASE("projection") {
    Vec ones(6, 1.0);
    CHECK(max_abs(project_to_s(ones)) == doctest::Approx(0.0));
    Vec v{2, 0, 0, 0};
    Vec pv = project_to_s(v);
    CHECK(pv[0] == doctest::Approx(1.5));
    CHECK(pv[1] == doctest::Approx(-0.5));
    CHECK(project_to_s(pv) == pv);  // idempotent
}

TEST_CASE("constrained hessian closed values") {
    // block minimum at gamma=0: 2*identity of size n-1
    Vec block{1, 1, 1, 1, -1, -1, -1, -1};
    ConstrainedHessian ch = constrained_hessian(0.0, block);
    for (std::size_t i = 0; i < 7; ++i)
        for (std::size_t j = 0; j < 7; ++j)
            CHECK(ch.reduced(i, j) == doctest::Approx(i == j ? 2.0 : 0.0).epsilon(1e-12));
    CHECK(morse_index(ch) == 0);

    // C_1 saddle spectrum at M=4: {-5/14, 5/7 x3, 2, 20/7 x2}
    const double r7 = std::sqrt(7.0);
    Vec z{3 / r7, 3 / r7, 3 / r7, -1 / r7, -2 / r7, -2 / r7, -2 / r7, -2 / r7};
    EigenResult e = jacobi_eigen(constrained_hessian(0.0, z).reduced);
    Vec expect{-5.0 / 14, 5.0 / 7, 5.0 / 7, 5.0 / 7, 2.0, 20.0 / 7, 20.0 / 7};
    REQUIRE(e.values.size() == 7);
    for (int i = 0; i < 7; ++i) CHECK(e.values[i] == doctest::Approx(expect[i]).epsilon(1e-10));
    CHECK(morse_index(constrained_hessian(0.0, z)) == 1);
}

TEST_CASE("spectrum invariant under basis choice") {
    Vec z(8);
    TestRand rnd;
    for (double& v : z) v = rnd();
    z = project_to_s(z);
    ConstrainedHessian ch = constrained_hessian(0.09, z);
    EigenResult e1 = jacobi_eigen(ch.reduced);

    // alternative basis: mean-removed canonical vectors e_2..e_n
    Matrix b2(8, 7);
    for (int j = 0; j < 7; ++j)
        for (int i = 0; i < 8; ++i) b2(i, j) = (i == j + 1 ? 1.0 : 0.0) - 1.0 / 8.0;
    b2 = orthonormalize_columns(std::move(b2));
    Matrix h = full_hessian(0.09, z);
    Matrix red2 = matmul(transpose(b2), matmul(h, b2));
    EigenResult e2 = jacobi_eigen(red2);
    for (int i = 0; i < 7; ++i)
        CHECK(e1.values[i] == doctest::Approx(e2.values[i]).epsilon(1e-10));
}

TEST_CASE("hessian matches finite differences of restricted potential") {
    TestRand rnd;
    for (int rep = 0; rep < 5; ++rep) {
        Vec x(8);
        for (double& v : x) v = rnd();
        x = project_to_s(x);
        ConstrainedHessian ch = constrained_hessian(0.05, x);
        const double h = 1e-4;
        for (std::size_t a = 0; a < 7; ++a)
            for (std::size_t b = 0; b < 7; ++b) {
                auto at = [&](double ta, double tb) {
                    Vec y = x;
                    for (int i = 0; i < 8; ++i)
                        y[i] += ta * ch.basis(i, a) + tb * ch.basis(i, b);
                    return potential(0.05, y);
                };
                const double fd =
                    (at(h, h) - at(h, -h) - at(-h, h) + at(-h, -h)) / (4 * h * h);
                CHECK(ch.reduced(a, b) == doctest::Approx(fd).epsilon(1e-5));
            }
    }
}

TEST_CASE("morse index degenerate detection") {
    Vec zero(8, 0.0);  // uncoupled origin: constrained Hessian -I, index n-1
    CHECK(morse_index(constrained_hessian(0.0, zero)) == 7);

    // artificial degeneracy: inflection coordinates +-1/sqrt(3)
    const double c = 1.0 / std::sqrt(3.0);
    Vec degen{c, c, c, c, -c, -c, -c, -c};
    CHECK_THROWS_AS(morse_index(constrained_hessian(0.0, degen)), NumericError);
}

TEST_CASE("symmetry of the potential") {
    TestRand rnd;
    Vec x(8);
    for (double& v : x) v = rnd();
    x = project_to_s(x);
    for (double gamma : {0.0, 0.13}) {
        const double v0 = potential(gamma, x);
        Vec rx(8), sx(8), mx(8);
        for (int i = 0; i < 8; ++i) {
            rx[i] = x[(i + 1) % 8];        // rotation
            sx[i] = x[(8 - i) % 8];        // reflection
            mx[i] = -x[i];                 // sign flip
        }
        CHECK(potential(gamma, rx) == doctest::Approx(v0).epsilon(1e-12));
        CHECK(potential(gamma, sx) == doctest::Approx(v0).epsilon(1e-12));
        CHECK(potential(gamma, mx) == doctest::Approx(v0).epsilon(1e-12));
    }
}

TEST_CASE("jacobi eigensolver sanity") {
    // known 3x3 spectrum
    Matrix m(3, 3);
    m(0, 0) = 2;
    m(1, 1) = 3;
    m(2, 2) = 4;
    m(0, 1) = m(1, 0) = 1;
    EigenResult e = jacobi_eigen(m);
    // eigenvalues of [[2,1,0],[1,3,0],[0,0,4]]: (5 +- sqrt(5))/2 and 4
    CHECK(e.values[0] == doctest::Approx((5 - std::sqrt(5.0)) / 2).epsilon(1e-12));
    CHECK(e.values[1] == doctest::Approx((5 + std::sqrt(5.0)) / 2).epsilon(1e-12));
    CHECK(e.values[2] == doctest::Approx(4.0).epsilon(1e-12));
    // residual check A v = lambda v
    for (int k = 0; k < 3; ++k) {
        for (int i = 0; i < 3; ++i) {
            double av = 0;
            for (int j = 0; j < 3; ++j) av += m(i, j) * e.vectors(j, k);
            CHECK(av == doctest::Approx(e.values[k] * e.vectors(i, k)).epsilon(1e-10));
        }
    }
}
