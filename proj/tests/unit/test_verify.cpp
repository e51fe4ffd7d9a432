#include "oracles.hpp"

#include "pplap/calculus.hpp"
#include "pplap/errors.hpp"
#include "pplap/solve.hpp"
#include "pplap/spectral.hpp"
#include "pplap/verify.hpp"

#include <doctest.h>

#include <array>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

using namespace pplap;
using std::numbers::pi;

TEST_CASE("key inequality examples") {
    const std::array<double, 4> I{1, 0, 0, 1};
    const std::array<double, 2> e1{1, 0}, zero{0, 0};
    const auto r = check_key_inequality(I, e1, 2);
    CHECK(r.lhs == doctest::Approx(2.0));
    CHECK(r.rhs == doctest::Approx(2.0));
    CHECK(r.pass);
    const auto z = check_key_inequality(I, zero, 2);
    CHECK(z.lhs == 0.0);
    CHECK(z.pass);
    CHECK_THROWS_AS(check_key_inequality(I, e1, 1), ParameterError);
}

TEST_CASE("key inequality by brute force over random symmetric matrices") {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> nd;
    for (int s = 0; s < 20000; ++s) {
        const int d = 2 + s % 2;
        std::array<double, 9> A{};
        std::array<double, 3> v{};
        for (int i = 0; i < d; ++i) {
            v[i] = nd(rng);
            for (int j = 0; j <= i; ++j) A[i * d + j] = A[j * d + i] = nd(rng);
        }
        // Direct evaluation of both sides.
        double v2 = 0, A2 = 0, tr = 0, vAv = 0, Av2 = 0;
        for (int i = 0; i < d; ++i) {
            v2 += v[i] * v[i];
            tr += A[i * d + i];
            double Avi = 0;
            for (int j = 0; j < d; ++j) {
                A2 += A[i * d + j] * A[i * d + j];
                Avi += A[i * d + j] * v[j];
            }
            Av2 += Avi * Avi;
            vAv += Avi * v[i];
        }
        const double lhs = v2 * v2 * A2;
        const double rhs = 2 * v2 * Av2 + std::pow(v2 * tr - vAv, 2) / (d - 1) - vAv * vAv;
        const auto r = check_key_inequality(std::span<const double>(A.data(), d * d), std::span<const double>(v.data(), d), d);
        CHECK(r.lhs == doctest::Approx(lhs).epsilon(1e-12));
        CHECK(r.rhs == doctest::Approx(rhs).epsilon(1e-10).scale(lhs));
        CHECK(r.pass == (lhs >= rhs - 1e-12 * lhs));
    }
}

TEST_CASE("elementary estimate examples") {
    const auto z = check_elementary(0.0, 1.3, -0.4, 3.0);
    CHECK(z.lhs == 0.0);
    CHECK(z.pass);
    for (double t : {0.5, 2.0, 17.0}) {
        for (double N : {2.0, 3.5, 9.0}) {
            const auto r = check_elementary(t, 0.8, 0.8, N);
            CHECK(r.pass);
            CHECK(r.lhs / r.rhs == doctest::Approx((N - 1) / (N + 2 * t + t * t)).epsilon(1e-12));
        }
    }
    CHECK_THROWS_AS(check_elementary(-1.0, 0, 0, 3), ParameterError);
}

TEST_CASE("Q polynomial examples") {
    CHECK(q_minimum(2.0, 4.0, 0.0) == doctest::Approx(4.0 / 3.0));
    CHECK(check_Q_polynomial(2.0, 4.0, 0.0).pass);
    // N = inf, p = 2.5, alpha = 0: Q(t) = 1 + 0.25 t^2 - 0.5 t, minimum 0.75 at t = 1.
    CHECK(q_polynomial(2.5, kInf, 0.0, 1.0) == doctest::Approx(0.75));
    CHECK(q_minimum(2.5, kInf, 0.0) == doctest::Approx(0.75));
    CHECK(check_Q_polynomial(2.5, kInf, 0.0).pass);
    // Alpha exactly at the threshold: Q(1) = 0, so positivity fails together
    // with admissibility and the report is consistent.
    const double p = 3.5, N = 3.0;
    const double a = alpha_threshold(p, N);
    CHECK(a == doctest::Approx(0.5 * (p - 3 - (p - 1) / (N - 1))));
    CHECK(std::abs(q_polynomial(p, N, a, 1.0)) <= 1e-14);
    const auto b = check_Q_polynomial(p, N, a);
    CHECK(b.pass);
    CHECK(b.get("admissible") == 0.0);
    CHECK(b.fitted_constant <= 1e-14);
}

TEST_CASE("Q minimum against a dense scan") {
    for (double p : {1.5, 2.0, 3.0, 4.5})
        for (double N : {2.0, 3.0, 10.0, kInf})
            for (double alpha : {-1.0, 0.0, 0.7, 2.0}) {
                double lo = kInf;
                for (int i = 0; i <= 100000; ++i) lo = std::min(lo, q_polynomial(p, N, alpha, i / 100000.0));
                CHECK(q_minimum(p, N, alpha) == doctest::Approx(lo).epsilon(1e-8).scale(1.0));
                CHECK(check_Q_polynomial(p, N, alpha).pass);
            }
}

TEST_CASE("monotonicity constants are sharp") {
    CHECK(monotonicity_constant(3.0) == doctest::Approx(0.5));
    CHECK(monotonicity_constant(1.5) == doctest::Approx(0.5));
    // p >= 2: a = -b gives <2|a|^(p-2) a, 2a> = 4|a|^p against 2^(2-p)|2a|^p = 4|a|^p.
    const std::array<double, 2> a{0.6, 0.8}, b{-0.6, -0.8};
    const auto r = check_monotonicity(a, b, 3.0);
    CHECK(r.fitted_constant == doctest::Approx(monotonicity_constant(3.0)));
    CHECK(r.pass);
}

TEST_CASE("Cordes closeness examples") {
    auto dom = Domain::torus(2, 32, 1.0);
    auto u = oracle::smooth_field(dom, 41);
    auto w = oracle::smooth_field(dom, 42);
    const auto v = gradient(w);
    const auto p2 = check_cordes_closeness(u, v, 2.0, 2.0, 1e-3);
    CHECK(p2.lhs == 0.0);
    CHECK(p2.pass);
    const auto v0 = check_cordes_closeness(u, VectorField(dom), 3.0, 2.0, 1e-3);
    CHECK(v0.lhs == 0.0);
    CHECK(v0.pass);
    const auto r = check_cordes_closeness(u, v, 2.5, 2.0, 1e-3);
    CHECK(r.pass);
    CHECK(r.fitted_constant < 1.0);
    CHECK_THROWS_AS(check_cordes_closeness(u, v, 1.5, 2.0, 1e-3), UnsupportedOperation);
}

TEST_CASE("algebra suite is deterministic and violation free") {
    AlgebraOptions o;
    o.samples = 20000;
    o.seed = 7;
    const auto a = algebra_suite(o);
    const auto b = algebra_suite(o);
    REQUIRE(a.size() == 5);
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].pass);
        CHECK(a[i].get("violations") == 0.0);
        CHECK(a[i].lhs == b[i].lhs);
        CHECK(a[i].fitted_constant == b[i].fitted_constant);
    }
}

TEST_CASE("Hessian estimate at p = 2 is the flat Bochner identity") {
    for (int n : {16, 32, 64}) {
        auto dom = Domain::torus(2, n, 1.0);
        const auto u = poisson_solve(oracle::smooth_field(dom, 43));
        const ScalarField eta(dom, 1.0);
        const auto r = check_hessian_estimate(u, {2.0, 1e-8, 10.0}, 0.0, eta);
        CHECK(r.pass);
        CHECK(r.fitted_constant <= 1.0 + 1e-6);
    }
    auto dom = Domain::torus(2, 8, 1.0);
    const auto z = check_hessian_estimate(ScalarField(dom), {2.0, 1e-8, 10.0}, 0.0, ScalarField(dom, 1.0));
    CHECK(z.fitted_constant == 0.0);
    CHECK(z.pass);
    CHECK_THROWS_AS(check_hessian_estimate(ScalarField(dom), {2.5, 1e-8, kInf}, 0.5, ScalarField(dom, 1.0)),
                    ParameterError);
    CHECK_THROWS_AS(check_hessian_estimate(ScalarField(dom), {2.5, 1e-8, 3.0}, -0.5, ScalarField(dom, 1.0)),
                    ParameterError);
}

TEST_CASE("second order estimate at p = 2 on the whole torus") {
    auto dom = Domain::torus(2, 32, 1.0);
    const auto f = oracle::smooth_field(dom, 44);
    const auto u = poisson_solve(f);
    const auto r = check_second_order_final(u, f, 2.0, 1e-8, whole_domain(*dom));
    CHECK(r.fitted_constant <= 1.0 + 1e-6);
    const ScalarField zero(dom);
    const auto z = check_second_order_final(zero, zero, 2.5, 1e-8, ball(*dom, 0, 0.4));
    CHECK(z.lhs == 0.0);
    CHECK(z.pass);
}

TEST_CASE("gradient bound preconditions and constants") {
    auto dom = Domain::torus(2, 16, 1.0);
    const ScalarField c(dom, 2.0);
    const auto r = check_gradient_bound(c, ScalarField(dom), 2.0, kInf, 0, 0.1, 0.3, 2.0);
    CHECK(r.lhs == 0.0);
    CHECK(r.pass);
    CHECK_THROWS_AS(check_gradient_bound(c, ScalarField(dom), 2.0, 2.0, 0, 0.1, 0.3, 2.0), ParameterError);
}

TEST_CASE("Poincare constant at p = 2 on the circle is 1 / lambda1") {
    auto dom = Domain::circle(128, 2 * pi);
    const double l1 = oracle::dense_lambda1(oracle::dense_neg_laplacian_grid(1, 128, 2 * pi));
    const auto r = check_poincare_pp(dom, 2.0, 32, 1);
    CHECK(r.fitted_constant == doctest::Approx(1.0 / l1).epsilon(1e-9));
    CHECK(r.pass);
}

TEST_CASE("Sobolev trick on constants") {
    // Constant f: no gradient term, so C(delta) = delta^(N/2), largest at delta = 0.5.
    auto dom = Domain::torus(2, 32, 1.0);
    const ScalarField c(dom, 3.0);
    const auto r = check_sobolev_trick(c, ball(*dom, 0, 0.3));
    CHECK(r.fitted_constant == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(r.pass);
    CHECK_THROWS_AS(check_sobolev_trick(c, ball(*dom, 0, 0.3), {1.5}), ParameterError);
    auto flat = Domain::torus(2, 16, 1.0, {0.0, kInf});
    CHECK_THROWS_AS(check_sobolev_trick(ScalarField(flat, 1.0), ball(*flat, 0, 0.3)), ParameterError);
}

TEST_CASE("Harnack check on constants and preconditions") {
    auto dom = Domain::torus(2, 32, 1.0);
    const ScalarField c(dom, 2.0), zero(dom);
    const auto r = check_harnack(c, 2.5, 0, 0.1, 0.3, zero);
    CHECK(r.get("quotient") == 1.0);
    CHECK(r.fitted_constant == doctest::Approx(1.0));
    CHECK(r.pass);
    CHECK_THROWS_AS(check_harnack(ScalarField(dom, -1.0), 2.5, 0, 0.1, 0.3, zero), ParameterError);
    CHECK_THROWS_AS(check_harnack(c, 2.5, 0, 0.1, 0.3, zero, 0.5), ParameterError);
}

TEST_CASE("W22 check on constants and non-harmonic fields") {
    auto dom = Domain::torus(2, 32, 1.0);
    const auto r = check_w22_pharmonic(ScalarField(dom, 1.0), {2.0, 0.0, kInf}, 0, 0.3);
    CHECK(r.lhs == 0.0);
    CHECK(r.fitted_constant == 0.0);
    CHECK(r.pass);
    const auto u = oracle::smooth_field(dom, 45);
    CHECK_THROWS_AS(check_w22_pharmonic(u, {2.0, 0.0, kInf}, 0, 0.3), ParameterError);
}

TEST_CASE("refinement drift semantics") {
    EstimateReport a, b;
    a.name = "x";
    a.fitted_constant = 1.0;
    b.fitted_constant = 1.9;
    auto d = refinement_drift(a, b);
    CHECK(d.name == "x.drift");
    CHECK(d.fitted_constant == doctest::Approx(1.9));
    CHECK(d.pass);
    b.fitted_constant = 0.4;
    CHECK_FALSE(refinement_drift(a, b).pass);
    a.fitted_constant = b.fitted_constant = 0.0;
    CHECK(refinement_drift(a, b).fitted_constant == 1.0);
    b.fitted_constant = 1.0;
    CHECK_FALSE(refinement_drift(a, b).pass);
    a.fitted_constant = kInf;
    CHECK_FALSE(refinement_drift(a, b).pass);
}

TEST_CASE("estimate suite is deterministic") {
    auto dom = Domain::torus(2, 16, 1.0);
    const auto a = estimate_suite(dom, 2.5, 3);
    const auto b = estimate_suite(dom, 2.5, 3);
    REQUIRE(a.size() == b.size());
    REQUIRE_FALSE(a.empty());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].name == b[i].name);
        CHECK(a[i].fitted_constant == b[i].fitted_constant);
    }
    CHECK_THROWS_AS(estimate_suite(Domain::graph(std::vector<double>(3, 1.0), {{0, 1, 1.0, 1.0}, {1, 2, 1.0, 1.0}}), 2.5, 3),
                    UnsupportedOperation);
}
