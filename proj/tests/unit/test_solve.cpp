#include "oracles.hpp"

#include "pplap/calculus.hpp"
#include "pplap/errors.hpp"
#include "pplap/solve.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace pplap;
using std::numbers::pi;

namespace {

double signed_pow(double x, double e) { return x >= 0.0 ? std::pow(x, e) : -std::pow(-x, e); }

/// Exact discrete solution of Delta_p u = f on the circle by quadrature: the
/// edge flux X_i = c + h sum_{j <= i} f_j, the edge gradient g_i =
/// sign(X_i)|X_i|^(1/(p-1)) with c fixed by sum g_i = 0 (bisection), and u
/// the running sum of h g_i with its mean removed.
ScalarField circle_oracle(const ScalarField& f, double p) {
    const Domain& dom = f.domain();
    const std::size_t n = f.size();
    const double h = dom.spacing();
    std::vector<double> X(n);
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) X[i] = acc += h * f[i];
    auto total = [&](double c) {
        double s = 0.0;
        for (double x : X) s += signed_pow(x + c, 1.0 / (p - 1.0));
        return s;
    };
    double lo = -1.0, hi = 1.0;
    while (total(lo) > 0.0) lo *= 2.0;
    while (total(hi) < 0.0) hi *= 2.0;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        (total(mid) > 0.0 ? hi : lo) = mid;
    }
    const double c = 0.5 * (lo + hi);
    ScalarField u(f.domain_ptr());
    for (std::size_t i = 1; i < n; ++i) u[i] = u[i - 1] + h * signed_pow(X[i - 1] + c, 1.0 / (p - 1.0));
    return remove_mean(u);
}

double grad_distance(const ScalarField& a, const ScalarField& b, double p) {
    return lp_norm(gradient(a - b), p) / lp_norm(gradient(b), p);
}

ScalarField circle_source(const DomainPtr& dom) {
    return remove_mean(ScalarField::from_function(dom, [&](std::size_t v) {
        const double x = dom->position(v, 0);
        return std::sin(x) + 0.5 * std::cos(2 * x + 0.3);
    }));
}

}  // namespace

TEST_CASE("the quadrature oracle satisfies the discrete equation") {
    auto dom = Domain::circle(128, 2 * pi);
    const auto f = circle_source(dom);
    for (double p : {1.5, 3.0}) {
        const auto u = circle_oracle(f, p);
        const auto r = p_laplacian(u, {p, 0.0, kInf}) - f;
        CHECK(lp_norm(r, kInf) <= 1e-9 * lp_norm(f, kInf));
    }
}

TEST_CASE("variational solve matches the circle oracle") {
    auto dom = Domain::circle(256, 2 * pi);
    const auto f = circle_source(dom);
    for (double p : {1.5, 2.0, 2.5, 4.0}) {
        const auto ref = circle_oracle(f, p);
        const auto u = variational_solve(f, p);
        CHECK(grad_distance(u, ref, p) <= 1e-8);
        CHECK(std::abs(mean(u)) <= 1e-12 * lp_norm(u, kInf));
    }
}

TEST_CASE("continuation matches the circle oracle") {
    auto dom = Domain::circle(256, 2 * pi);
    const auto f = circle_source(dom);
    for (double p : {1.5, 2.5, 3.0}) {
        const auto ref = circle_oracle(f, p);
        const auto rec = continuation(f, default_solver_config(p));
        CHECK(grad_distance(rec.u, ref, p) <= 1e-2);
        CHECK(std::abs(mean(rec.u)) <= 1e-12 * lp_norm(rec.u, kInf));
        CHECK(std::isfinite(rec.residual));
        CHECK(rec.stages.size() == 8);
        CHECK(rec.eps_final == 1e-8);
    }
}

TEST_CASE("p = 2 continuation is the linear solve bit for bit") {
    auto dom = Domain::torus(2, 32, 1.0);
    const auto f = oracle::smooth_field(dom, 5);
    const auto rec = continuation(f, default_solver_config(2.0));
    const auto lin = poisson_solve(f);
    CHECK(rec.u.values() == lin.values());
}

TEST_CASE("inner iteration at p = 2 or w = 0 is one Poisson solve") {
    auto dom = Domain::torus(2, 16, 1.0);
    const auto h = oracle::random_field(dom, 6) + ScalarField(dom, 0.7);
    const auto target = poisson_solve(remove_mean(h));
    {
        SolverConfig cfg = default_solver_config(2.0);
        const auto res = inner_fixed_point(oracle::smooth_field(dom, 7), h, cfg);
        CHECK(res.iterations == 1);
        CHECK(lp_norm(res.u - target, kInf) <= 1e-10 * lp_norm(target, kInf));
    }
    {
        SolverConfig cfg = default_solver_config(3.0);
        cfg.rp.eps = 1e-3;
        const auto res = inner_fixed_point(ScalarField(dom), h, cfg);
        CHECK(res.iterations == 1);
        CHECK(lp_norm(res.u - target, kInf) <= 1e-10 * lp_norm(target, kInf));
    }
}

TEST_CASE("inner contraction ratios respect the Cordes bound") {
    auto dom = Domain::torus(2, 32, 1.0);
    const auto w = oracle::smooth_field(dom, 8);
    const auto f = oracle::smooth_field(dom, 9);
    for (double p : {1.6, 2.5, 3.5}) {
        SolverConfig cfg = default_solver_config(p);
        cfg.rp.eps = 1e-2;
        cfg.rp.M = kInf;
        const auto res = inner_fixed_point(w, outer_rhs(w, f, cfg.rp), cfg);
        REQUIRE(!res.ratios.empty());
        const double bound = std::sqrt(alpha_p(p, dom->N()));
        for (double r : res.ratios) CHECK(r <= bound + 0.1);
    }
}

TEST_CASE("a non-contracting regime raises ContractionFailure") {
    // N = inf gives alpha_p = (p-2)^2 > 1 at p = 4.5.
    auto dom = Domain::torus(2, 32, 1.0, {0.0, kInf});
    const auto w = oracle::smooth_field(dom, 10);
    const auto f = oracle::smooth_field(dom, 11);
    SolverConfig cfg = default_solver_config(4.5);
    cfg.rp.eps = 1e-4;
    try {
        inner_fixed_point(w, outer_rhs(w, f, cfg.rp), cfg);
        FAIL("expected ContractionFailure");
    } catch (const ContractionFailure& e) {
        CHECK(e.observed_ratio() >= 1.0);
        CHECK(e.theoretical_bound() == doctest::Approx(2.5));
    }
}

TEST_CASE("continuation solves the same problem as the variational oracle on the torus") {
    auto dom = Domain::torus(2, 16, 1.0);
    const auto f = oracle::smooth_field(dom, 12);
    for (double p : {1.7, 2.5}) {
        const auto ref = variational_solve(f, p);
        CHECK(weak_residual(ref, f, {p, 0.0, kInf}, residual_test_basis(dom, 1)) <= 1e-10);
        const auto rec = continuation(f, default_solver_config(p));
        CHECK(grad_distance(rec.u, ref, p) <= 1e-2);
    }
}

TEST_CASE("solution scales with the source by t^(1/(p-1))") {
    auto dom = Domain::circle(128, 2 * pi);
    const auto f = circle_source(dom);
    const double p = 3.0, t = 1e4;
    const auto a = continuation(t * f, default_solver_config(p)).u;
    auto b = continuation(f, default_solver_config(p)).u;
    b *= std::pow(t, 1.0 / (p - 1.0));
    CHECK(grad_distance(a, b, p) <= 1e-8);
}

TEST_CASE("stage drifts decrease along the eps schedule") {
    auto dom = Domain::torus(2, 16, 1.0);
    const auto f = oracle::smooth_field(dom, 13);
    SolverConfig cfg = default_solver_config(2.5);
    cfg.keep_stages = true;
    const auto rec = continuation(f, cfg);
    REQUIRE(rec.stage_solutions.size() == 8);
    const auto ref = variational_solve(f, 2.5);
    double prev = kInf;
    for (const auto& u : rec.stage_solutions) {
        const double d = lp_norm(gradient(u - ref), 2.5);
        CHECK(d < prev);
        prev = d;
    }
}

TEST_CASE("truncated sources and the residual basis") {
    auto dom = Domain::torus(2, 8, 1.0);
    auto f = oracle::random_field(dom, 14);
    f *= 10.0;
    const auto t = truncate_rhs(f, 1.0);
    CHECK(std::abs(mean(t)) <= 1e-14);
    CHECK(lp_norm(t, kInf) <= 2.0);
    CHECK_THROWS_AS(truncate_rhs(f, 0.0), ParameterError);
    const auto basis = residual_test_basis(dom, 3);
    CHECK(basis.size() == 72);
    const auto again = residual_test_basis(dom, 3);
    for (std::size_t i = 0; i < basis.size(); ++i) CHECK(basis[i].values() == again[i].values());
}

TEST_CASE("solver configuration is validated") {
    SolverConfig cfg = default_solver_config(2.5);
    CHECK_NOTHROW(validate(cfg));
    cfg.damping = 0.0;
    CHECK_THROWS_AS(validate(cfg), ParameterError);
    cfg = default_solver_config(2.5);
    cfg.eps_schedule = {1e-2, 1e-1};
    CHECK_THROWS_AS(validate(cfg), ParameterError);
    cfg = default_solver_config(2.5);
    cfg.eps_schedule = {1e-15};
    CHECK_THROWS_AS(validate(cfg), ParameterError);
    auto dom = Domain::torus(2, 8, 1.0);
    CHECK_THROWS_AS(continuation(ScalarField(dom, 1.0), default_solver_config(2.5)), ParameterError);
}
