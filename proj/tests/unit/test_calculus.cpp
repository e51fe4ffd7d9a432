#include "oracles.hpp"

#include "pplap/calculus.hpp"
#include "pplap/errors.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace pplap;
using std::numbers::pi;

namespace {

DomainPtr small_graph() {
    std::vector<double> m = {1.0, 0.5, 2.0, 1.0, 1.5};
    std::vector<GraphEdge> e = {{0, 1, 1.0, 1.0}, {1, 2, 2.0, 0.5}, {2, 3, 1.0, 2.0},
                                {3, 4, 1.0, 1.0}, {4, 0, 3.0, 1.5}, {0, 2, 1.0, 4.0}};
    return Domain::graph(m, e);
}

}  // namespace

TEST_CASE("gradient of constants vanishes") {
    for (auto dom : {Domain::torus(1, 16, 1.0), Domain::torus(2, 8, 1.0), Domain::torus(3, 5, 2.0), small_graph()}) {
        ScalarField c(dom, 3.25);
        const auto g = gradient(c);
        const auto lap = laplacian(c);
        for (double x : g.values()) CHECK(x == 0.0);
        for (double x : lap.values()) CHECK(x == 0.0);
        if (dom->is_grid()) {
            const auto H = hessian(c);
            const auto il = infinity_laplacian(c);
            for (double x : H.values()) CHECK(x == 0.0);
            for (double x : il.values()) CHECK(x == 0.0);
        }
    }
}

TEST_CASE("gradient of sin on the circle against the analytic derivative") {
    const int n = 256;
    auto dom = Domain::circle(n, 1.0);
    auto u = ScalarField::from_function(dom, [&](std::size_t v) { return std::sin(2 * pi * dom->position(v, 0)); });
    auto g = gradient(u);
    double err = 0.0;
    for (std::size_t v = 0; v < u.size(); ++v)
        err = std::max(err, std::abs(g.at(v, 0) - 2 * pi * std::cos(2 * pi * dom->position(v, 0))));
    CHECK(err <= 10 * (2 * pi) * (2 * pi) / n);
}

TEST_CASE("gradient is local per axis") {
    auto dom = Domain::torus(2, 16, 1.0);
    auto u = ScalarField::from_function(dom, [&](std::size_t v) { return std::sin(2 * pi * dom->position(v, 0)); });
    auto g = gradient(u);
    for (std::size_t v = 0; v < u.size(); ++v) CHECK(g.at(v, 1) == 0.0);
}

TEST_CASE("summation by parts is exact") {
    for (auto dom : {Domain::torus(1, 32, 2.0), Domain::torus(2, 16, 1.0), Domain::torus(3, 6, 1.0), small_graph()}) {
        for (unsigned seed = 1; seed <= 5; ++seed) {
            VectorField X(dom);
            std::mt19937_64 rng(seed);
            std::normal_distribution<double> nd;
            for (double& x : X.values()) x = nd(rng);
            auto phi = oracle::random_field(dom, seed + 100, false);
            // Direct summation of both sides.
            const auto gphi = gradient(phi);
            const auto w = dom->vector_weights();
            double lhs = 0.0;
            for (std::size_t l = 0; l < X.locations(); ++l)
                for (int c = 0; c < X.components(); ++c) lhs += X.at(l, c) * gphi.at(l, c) * w[l];
            const auto div = divergence(X);
            const auto m = dom->measure();
            double rhs = 0.0;
            for (std::size_t v = 0; v < phi.size(); ++v) rhs -= phi[v] * div[v] * m[v];
            const double scale = std::sqrt(inner(X, X)) * lp_norm(phi, 2.0) / std::sqrt(dom->measure()[0]);
            CHECK(std::abs(lhs - rhs) < 1e-12 * scale);
        }
    }
}

TEST_CASE("laplacian equals div grad and integrates to zero") {
    for (auto dom : {Domain::torus(2, 16, 1.0), small_graph()}) {
        auto u = oracle::random_field(dom, 3, false);
        auto lap = laplacian(u);
        auto dg = divergence(gradient(u));
        for (std::size_t v = 0; v < u.size(); ++v) CHECK(lap[v] == dg[v]);
        CHECK(std::abs(integrate(lap)) < 1e-12 * lp_norm(lap, 1.0));
    }
}

TEST_CASE("laplacian matches a dense stencil matrix") {
    auto dom = Domain::torus(2, 8, 1.3);
    const auto A = oracle::dense_neg_laplacian_grid(2, 8, 1.3);
    auto u = oracle::random_field(dom, 9, false);
    Eigen::VectorXd uv = Eigen::Map<const Eigen::VectorXd>(u.values().data(), u.size());
    Eigen::VectorXd expected = -A * uv;
    auto lap = laplacian(u);
    for (std::size_t v = 0; v < u.size(); ++v) CHECK(lap[v] == doctest::Approx(expected(v)).epsilon(1e-12));
}

TEST_CASE("laplacian of a product of sines is second order accurate") {
    auto dom = Domain::torus(2, 64, 1.0);
    auto u = ScalarField::from_function(dom, [&](std::size_t v) {
        return std::sin(2 * pi * dom->position(v, 0)) * std::sin(2 * pi * dom->position(v, 1));
    });
    auto lap = laplacian(u);
    const double h = dom->spacing();
    double err = 0.0;
    for (std::size_t v = 0; v < u.size(); ++v) err = std::max(err, std::abs(lap[v] + 8 * pi * pi * u[v]));
    // Exact symbol: -2 * 4 sin^2(pi h)/h^2 against -8 pi^2; the gap is O(h^2).
    const double symbol_gap = 8 * pi * pi - 8 * std::pow(std::sin(pi * h) / h, 2);
    CHECK(err == doctest::Approx(symbol_gap).epsilon(1e-6));
    CHECK(err < 8 * pi * pi * (2 * pi * h) * (2 * pi * h));
}

TEST_CASE("hessian trace equals laplacian bit for bit and is symmetric") {
    for (auto dom : {Domain::torus(1, 20, 1.0), Domain::torus(2, 16, 1.0), Domain::torus(3, 6, 1.0)}) {
        auto u = oracle::random_field(dom, 21, false);
        auto H = hessian(u);
        auto lap = laplacian(u);
        for (std::size_t v = 0; v < u.size(); ++v) {
            CHECK(H.trace_at(v) == lap[v]);
            for (int i = 0; i < dom->dim(); ++i)
                for (int j = 0; j < dom->dim(); ++j) CHECK(H.at(v, i, j) == H.at(v, j, i));
        }
    }
}

TEST_CASE("hessian off diagonal against the analytic mixed derivative") {
    auto dom = Domain::torus(2, 128, 1.0);
    auto u = ScalarField::from_function(dom, [&](std::size_t v) {
        return std::sin(2 * pi * dom->position(v, 0)) * std::sin(2 * pi * dom->position(v, 1));
    });
    auto H = hessian(u);
    double err = 0.0;
    for (std::size_t v = 0; v < u.size(); ++v) {
        const double x = dom->position(v, 0), y = dom->position(v, 1);
        err = std::max(err, std::abs(H.at(v, 0, 1) - 4 * pi * pi * std::cos(2 * pi * x) * std::cos(2 * pi * y)));
    }
    CHECK(err < 4 * pi * pi * 0.01);
}

TEST_CASE("discrete Bochner identity on the flat torus") {
    // sum |H u|^2 <= sum (Delta u)^2 for every u, by Parseval on the stencil symbols.
    for (auto dom : {Domain::torus(2, 16, 1.0), Domain::torus(3, 6, 1.0)}) {
        for (unsigned seed = 1; seed <= 10; ++seed) {
            auto u = oracle::random_field(dom, seed);
            auto H = hessian(u);
            double hs = 0.0;
            for (std::size_t v = 0; v < u.size(); ++v) hs += H.hs2_at(v) * dom->measure()[v];
            const double lap2 = std::pow(lp_norm(laplacian(u), 2.0), 2);
            CHECK(hs <= lap2 * (1 + 1e-12));
        }
    }
}

TEST_CASE("hessian is unsupported on graphs") {
    auto dom = small_graph();
    ScalarField u(dom, 1.0);
    CHECK_THROWS_AS(hessian(u), UnsupportedOperation);
    CHECK_THROWS_AS(infinity_laplacian(u), UnsupportedOperation);
}

TEST_CASE("infinity laplacian is H(grad u, grad u)") {
    auto dom = Domain::torus(2, 16, 1.0);
    auto u = oracle::smooth_field(dom, 4);
    auto H = hessian(u);
    auto g = gradient(u);
    auto il = infinity_laplacian(u);
    for (std::size_t v = 0; v < u.size(); ++v) {
        double s = 0.0;
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) s += H.at(v, i, j) * g.at(v, i) * g.at(v, j);
        CHECK(il[v] == doctest::Approx(s).epsilon(1e-14));
    }
}

TEST_CASE("integrals and norms") {
    auto dom = small_graph();
    ScalarField one(dom, 1.0);
    CHECK(integrate(one) == doctest::Approx(6.0));
    ScalarField f(dom, std::vector<double>{1.0, -2.0, 0.5, 3.0, -1.0});
    CHECK(std::abs(mean(remove_mean(f))) < 1e-15);
    // Hand summation with m = (1, 0.5, 2, 1, 1.5).
    const double l1 = 1.0 * 1 + 2.0 * 0.5 + 0.5 * 2 + 3.0 * 1 + 1.0 * 1.5;
    CHECK(lp_norm(f, 1.0) == doctest::Approx(l1));
    const double l3 = std::cbrt(1.0 + 8.0 * 0.5 + 0.125 * 2 + 27.0 + 1.0 * 1.5);
    CHECK(lp_norm(f, 3.0) == doctest::Approx(l3));
    CHECK(lp_norm(f, kInf) == 3.0);
    CHECK(lp_norm(f, 2.0) == doctest::Approx(std::sqrt(1.0 + 2.0 + 0.5 + 9.0 + 1.5)));
}

TEST_CASE("hs_norm is the pointwise Frobenius norm") {
    auto dom = Domain::torus(2, 8, 1.0);
    auto u = oracle::random_field(dom, 5);
    auto H = hessian(u);
    auto hs = hs_norm(H);
    for (std::size_t v = 0; v < u.size(); ++v) {
        const double a = H.at(v, 0, 0), b = H.at(v, 0, 1), d = H.at(v, 1, 1);
        CHECK(hs[v] == doctest::Approx(std::sqrt(a * a + 2 * b * b + d * d)));
    }
}
