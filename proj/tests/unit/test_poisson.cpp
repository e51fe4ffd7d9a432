#include "oracles.hpp"

#include "pplap/calculus.hpp"
#include "pplap/errors.hpp"
#include "pplap/poisson.hpp"

#include <doctest.h>

#include <Eigen/Dense>

#include <cmath>
#include <numbers>

using namespace pplap;
using std::numbers::pi;

namespace {

DomainPtr small_graph() {
    std::vector<double> m = {1.0, 0.5, 2.0, 1.0, 1.5, 0.7};
    std::vector<GraphEdge> e = {{0, 1, 1.0, 1.0}, {1, 2, 2.0, 0.5}, {2, 3, 1.0, 2.0}, {3, 4, 1.0, 1.0},
                                {4, 5, 3.0, 1.5}, {5, 0, 1.0, 4.0}, {1, 4, 0.5, 1.0}};
    return Domain::graph(m, e);
}

/// Dense -Delta on a graph from the edge list: (L u)(x) = sum_e w_e (u(x) - u(y)) / (l_e^2 m(x)).
Eigen::MatrixXd dense_neg_laplacian_graph(const Domain& dom) {
    const auto n = static_cast<Eigen::Index>(dom.num_vertices());
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
    const auto m = dom.measure();
    for (const auto& e : dom.edges()) {
        const double k = e.weight / (e.length * e.length);
        const auto a = static_cast<Eigen::Index>(e.u), b = static_cast<Eigen::Index>(e.v);
        A(a, a) += k / m[e.u];
        A(a, b) -= k / m[e.u];
        A(b, b) += k / m[e.v];
        A(b, a) -= k / m[e.v];
    }
    return A;
}

/// Mean-zero solution of -A u = f through the pseudo-inverse (complete orthogonal decomposition).
ScalarField dense_solve(const DomainPtr& dom, const Eigen::MatrixXd& A, const ScalarField& f) {
    const auto n = static_cast<Eigen::Index>(f.size());
    Eigen::VectorXd rhs(n);
    for (Eigen::Index i = 0; i < n; ++i) rhs(i) = -f[static_cast<std::size_t>(i)];
    Eigen::VectorXd x = A.completeOrthogonalDecomposition().solve(rhs);
    ScalarField u(dom);
    for (Eigen::Index i = 0; i < n; ++i) u[static_cast<std::size_t>(i)] = x(i);
    return remove_mean(u);
}

double max_diff(const ScalarField& a, const ScalarField& b) {
    double e = 0.0;
    for (std::size_t v = 0; v < a.size(); ++v) e = std::max(e, std::abs(a[v] - b[v]));
    return e;
}

}  // namespace

TEST_CASE("zero right-hand side gives zero") {
    auto u = poisson_solve(ScalarField(Domain::torus(2, 16, 1.0)));
    for (double x : u.values()) CHECK(x == 0.0);
}

TEST_CASE("circle: the inverse of sin is -sin") {
    auto dom = Domain::circle(256, 2 * pi);
    auto f = ScalarField::from_function(dom, [&](std::size_t v) { return std::sin(dom->position(v, 0)); });
    auto u = poisson_solve(f);
    double err = 0.0;
    for (std::size_t v = 0; v < u.size(); ++v) err = std::max(err, std::abs(u[v] + std::sin(dom->position(v, 0))));
    CHECK(err <= 1e-3);
}

TEST_CASE("Delta of the solution reproduces f to tolerance") {
    for (auto dom : {Domain::circle(64, 1.0), Domain::torus(2, 32, 1.0), Domain::torus(3, 8, 2.0), small_graph()}) {
        for (double tol : {1e-6, 1e-10}) {
            auto f = oracle::random_field(dom, 17);
            PoissonStats st;
            PoissonSolver solver(dom);
            auto u = solver.solve(f, tol, nullptr, &st);
            CHECK(std::abs(mean(u)) <= 1e-14 * lp_norm(u, kInf));
            CHECK(lp_norm(laplacian(u) - f, 2.0) <= tol * lp_norm(f, 2.0));
            CHECK(st.relative_residual <= tol);
            if (dom->is_grid()) CHECK(st.iterations <= 3);
        }
    }
}

TEST_CASE("agreement with a dense pseudo-inverse") {
    {
        auto dom = Domain::torus(2, 8, 1.0);
        auto f = oracle::random_field(dom, 21);
        const auto ref = dense_solve(dom, oracle::dense_neg_laplacian_grid(2, 8, 1.0), f);
        CHECK(max_diff(poisson_solve(f), ref) <= 1e-10 * lp_norm(ref, kInf));
    }
    {
        auto dom = small_graph();
        auto f = oracle::random_field(dom, 22);
        const auto ref = dense_solve(dom, dense_neg_laplacian_graph(*dom), f);
        CHECK(max_diff(poisson_solve(f), ref) <= 1e-9 * lp_norm(ref, kInf));
    }
}

TEST_CASE("warm start does not change the answer") {
    auto dom = Domain::torus(2, 16, 1.0);
    auto f = oracle::random_field(dom, 23);
    PoissonSolver solver(dom);
    auto cold = solver.solve(f, 1e-12);
    auto guess = oracle::random_field(dom, 24);
    auto warm = solver.solve(f, 1e-12, &guess);
    CHECK(max_diff(cold, warm) <= 1e-10 * lp_norm(cold, kInf));
}

TEST_CASE("preconditions") {
    auto dom = Domain::torus(2, 8, 1.0);
    ScalarField c(dom, 1.0);
    CHECK_THROWS_AS(poisson_solve(c), ParameterError);
    CHECK_THROWS_AS(poisson_solve(oracle::random_field(dom, 1), 0.0), ParameterError);
}
