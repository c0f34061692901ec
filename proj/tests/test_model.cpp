#include <doctest.h>

#include <random>
#include <sstream>

#include "crossdiff/config.hpp"
#include "crossdiff/errors.hpp"
#include "crossdiff/model.hpp"

using namespace crossdiff;

TEST_CASE("built-in determinant identities") {
    // e1: det D = delta (2 + delta) u1 u2.
    const ModelParams e1 = builtin_example(Family::e1, 0.0, 1.0);
    CHECK(diffusion_matrix(e1, {1.0, 2.0}).det() == doctest::Approx(6.0).epsilon(1e-14));

    // e2: det D = delta (1 + delta) (u1 + u2)^2 / 2.
    const ModelParams e2 = builtin_example(Family::e2, 0.0, 1.0);
    CHECK(diffusion_matrix(e2, {1.0, 1.0}).det() == doctest::Approx(4.0).epsilon(1e-14));

    // Singular limit.
    const ModelParams bt = builtin_example(Family::bt_limit, 0.0, 1.0);
    const Mat2 D = diffusion_matrix(bt, {1.0, 2.0});
    CHECK(D.a11 == 1.0);
    CHECK(D.a12 == 1.0);
    CHECK(D.a21 == 2.0);
    CHECK(D.a22 == 2.0);
    CHECK(D.det() == 0.0);
}

TEST_CASE("built-in constructor rejects invalid parameters") {
    CHECK_THROWS_AS(builtin_example(Family::e1, 0.5, 1e-5), invalid_argument_error);
    CHECK_THROWS_AS(builtin_example(Family::e1, -0.1, 1e-5), invalid_argument_error);
    CHECK_THROWS_AS(builtin_example(Family::e1, 0.1, -1.0), invalid_argument_error);
}

TEST_CASE("coexistence equilibrium") {
    CHECK(coexistence_equilibrium(builtin_example(Family::e1, 0.0, 0.0)).v1 ==
          doctest::Approx(1.0).epsilon(1e-15));
    CHECK(coexistence_equilibrium(builtin_example(Family::e1, 0.0, 0.0)).v2 ==
          doctest::Approx(2.0).epsilon(1e-15));

    const Vec2 us = coexistence_equilibrium(builtin_example(Family::e1, 0.2, 0.0));
    CHECK(us.v1 == doctest::Approx(0.75).epsilon(1e-14));
    CHECK(us.v2 == doctest::Approx(2.5).epsilon(1e-14));

    ModelParams sym;
    sym.alpha = {1.0, 1.0};
    sym.beta = {1.0, 0.0, 0.0, 1.0};
    const Vec2 e = coexistence_equilibrium(sym);
    CHECK(e.v1 == 1.0);
    CHECK(e.v2 == 1.0);

    ModelParams bad;  // b22 a1 - b12 a2 = -1 < 0
    bad.alpha = {1.0, 2.0};
    bad.beta = {1.0, 1.0, 0.0, 1.0};
    CHECK_THROWS_AS(coexistence_equilibrium(bad), invalid_argument_error);
}

TEST_CASE("diffusion matrix evaluation and decomposition") {
    const ModelParams p = builtin_example(Family::e1, 0.0, 0.5);
    const Mat2 D = diffusion_matrix(p, {1.0, 2.0});
    CHECK(D.a11 == doctest::Approx(1.5));
    CHECK(D.a12 == doctest::Approx(1.0));
    CHECK(D.a21 == doctest::Approx(2.0));
    CHECK(D.a22 == doctest::Approx(3.0));

    const Mat2 Z = diffusion_matrix(p, {0.0, 0.0});
    CHECK(Z.norm_fro() == 0.0);

    // D1(u*) = diag(u1*, u2*) for e1.
    const Mat2 D1 = diffusion_d1(p, {1.0, 2.0});
    CHECK(D1.a11 == 1.0);
    CHECK(D1.a12 == 0.0);
    CHECK(D1.a21 == 0.0);
    CHECK(D1.a22 == 2.0);

    // D(u) = D^{delta 1} u1 + D^{delta 2} u2.
    const Mat2 S1 = diffusion_species_matrix(p, 1, p.delta);
    const Mat2 S2 = diffusion_species_matrix(p, 2, p.delta);
    const Mat2 R = S1 * 1.0 + S2 * 2.0;
    CHECK((R - D).norm_fro() == doctest::Approx(0.0));
}

TEST_CASE("diffusion matrix is linear in u") {
    const ModelParams p = builtin_example(Family::e2, 0.1, 0.3);
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> dist(0.0, 5.0);
    for (int trial = 0; trial < 20; ++trial) {
        const Vec2 u{dist(rng), dist(rng)}, v{dist(rng), dist(rng)};
        const double a = dist(rng), b = dist(rng);
        const Mat2 lhs = diffusion_matrix(p, a * u + b * v);
        const Mat2 rhs = a * diffusion_matrix(p, u) + b * diffusion_matrix(p, v);
        CHECK((lhs - rhs).norm_fro() <= 1e-13 * (1.0 + rhs.norm_fro()));
    }
}

TEST_CASE("reaction values") {
    const ModelParams p = builtin_example(Family::e1, 0.0, 0.0);
    const Vec2 at_eq = reaction(p, coexistence_equilibrium(p));
    CHECK(std::abs(at_eq.v1) <= 1e-15);
    CHECK(std::abs(at_eq.v2) <= 1e-15);

    const Vec2 r = reaction(p, {1.0, 1.0});
    CHECK(r.v1 == doctest::Approx(0.0));
    CHECK(r.v2 == doctest::Approx(1.0));

    for (double c : {0.1, 1.0, 7.5}) CHECK(reaction(p, {0.0, c}).v1 == 0.0);
}

TEST_CASE("reaction vanishes at the equilibrium for generic parameters") {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> dist(0.0, 0.49);
    for (int trial = 0; trial < 20; ++trial) {
        const ModelParams p = builtin_example(Family::e2, dist(rng), 0.01);
        const Vec2 r = reaction(p, coexistence_equilibrium(p));
        CHECK(std::abs(r.v1) <= 1e-14);
        CHECK(std::abs(r.v2) <= 1e-14);
    }
}

TEST_CASE("kinetics Jacobian at the equilibrium") {
    const ModelParams p0 = builtin_example(Family::e1, 0.0, 0.0);
    const Mat2 K = jacobian_K(p0);
    CHECK(K.a11 == doctest::Approx(-1.0));
    CHECK(K.a12 == doctest::Approx(0.0));
    CHECK(K.a21 == doctest::Approx(-4.0));
    CHECK(K.a22 == doctest::Approx(-2.0));

    for (double b : {0.05, 0.2, 0.45}) {
        const Mat2 Kb = jacobian_K(builtin_example(Family::e1, b, 0.0));
        CHECK(Kb.det() > 0.0);
        CHECK(Kb.trace() < 0.0);
        CHECK(Kb.a11 < 0.0);
        CHECK(Kb.a12 < 0.0);
        CHECK(Kb.a21 < 0.0);
        CHECK(Kb.a22 < 0.0);
    }
}

TEST_CASE("hypothesis validation on the worked examples") {
    // Instability precondition holds for delta < b/4 (e1 family).
    const auto ok = validate_hypotheses(builtin_example(Family::e1, 0.0385, 4.53e-5));
    CHECK(ok.pass());
    CHECK(ok.find("q_delta_negative")->pass);

    const auto bad = validate_hypotheses(builtin_example(Family::e1, 0.01, 0.01));
    CHECK_FALSE(bad.pass());
    CHECK_FALSE(bad.find("q_delta_negative")->pass);
    CHECK(bad.find("det_increasing_in_delta")->pass);

    // e2 threshold: delta < b u1* u2* / (u1* + u2*)^2.
    const ModelParams p2 = builtin_example(Family::e2, 0.0385, 0.0);
    const Vec2 us = coexistence_equilibrium(p2);
    const double thresh = 0.0385 * us.v1 * us.v2 / ((us.v1 + us.v2) * (us.v1 + us.v2));
    const auto ok2 = validate_hypotheses(builtin_example(Family::e2, 0.0385, 0.5 * thresh));
    CHECK(ok2.pass());
}

TEST_CASE("determinant is zero at delta = 0 and increasing for both families") {
    for (Family f : {Family::e1, Family::e2}) {
        const ModelParams p = builtin_example(f, 0.1, 0.0);
        for (const Vec2 u : {Vec2{1.0, 2.0}, Vec2{0.3, 0.7}, Vec2{5.0, 0.1}}) {
            CHECK(std::abs(diffusion_matrix_at(p, u, 0.0).det()) <= 1e-15);
            double prev = 0.0;
            for (double d : {1e-6, 1e-4, 1e-2, 0.5, 1.0}) {
                const double det = diffusion_matrix_at(p, u, d).det();
                CHECK(det > prev);
                prev = det;
            }
        }
    }
}

TEST_CASE("model config round-trips at full precision") {
    ModelParams p = builtin_example(Family::e2, 0.123456789012345678, 7.77e-7);
    p.family = Family::custom;  // force the tensor through the file
    std::ostringstream out;
    save_model(out, p);
    std::istringstream in(out.str());
    const ModelParams q = load_model(in);
    CHECK(q.alpha[0] == p.alpha[0]);
    CHECK(q.alpha[1] == p.alpha[1]);
    CHECK(q.b == p.b);
    CHECK(q.delta == p.delta);
    CHECK((q.beta - p.beta).norm_fro() == 0.0);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            for (int m = 0; m < 2; ++m)
                for (int n = 0; n < 2; ++n)
                    CHECK(q.dtensor(i, j, m, n) == p.dtensor(i, j, m, n));
}

TEST_CASE("model config: family files and error paths") {
    {
        std::istringstream in("family = e1\nb = 0.0385\ndelta = 4.53e-05\n");
        const ModelParams p = load_model(in);
        CHECK(p.family == Family::e1);
        CHECK(p.alpha[0] == 1.0);
        CHECK(p.alpha[1] == 4.0);
        CHECK(p.beta.a12 == doctest::Approx(0.0385 / 2));
        CHECK(p.dtensor(0, 0, 0, 1) == 1.0);
    }
    {
        std::istringstream in("family = nope\n");
        CHECK_THROWS_AS(load_model(in), config_error);
    }
    {
        std::istringstream in("family = custom\nalpha1 = 1\n");  // missing alpha2/beta
        CHECK_THROWS_AS(load_model(in), config_error);
    }
    {
        std::istringstream in("b : 0.1\n");  // not key = value
        CHECK_THROWS_AS(load_model(in), config_error);
    }
    {
        std::istringstream in("family = e1\nb = zero\n");
        CHECK_THROWS_AS(load_model(in), config_error);
    }
}
