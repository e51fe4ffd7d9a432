#include "pplap/spectral.hpp"

#include "pplap/calculus.hpp"
#include "pplap/errors.hpp"
#include "pplap/poisson.hpp"

#include <cmath>
#include <random>

namespace pplap {

double lambda1(const DomainPtr& domain, double tol, int max_iterations) {
    if (!(tol > 0.0)) throw ParameterError("lambda1 tolerance must be positive");
    if (domain->num_vertices() < 2) throw ParameterError("lambda1 needs at least two vertices");
    PoissonSolver solver(domain);
    std::mt19937_64 rng(20240601);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    ScalarField x(domain);
    for (double& v : x.values()) v = dist(rng);
    x = remove_mean(x);
    x *= 1.0 / lp_norm(x, 2.0);

    auto rayleigh = [](const ScalarField& y) {
        const VectorField g = gradient(y);
        return inner(g, g) / inner(y, y);
    };
    double lam = rayleigh(x);
    for (int it = 0; it < max_iterations; ++it) {
        // -Delta y = x  <=>  Delta y = -x
        ScalarField y = solver.solve(-x, 1e-13);
        const double ny = lp_norm(y, 2.0);
        if (!(ny > 0.0)) throw ConvergenceError("inverse iteration collapsed to zero");
        y *= 1.0 / ny;
        const double next = rayleigh(y);
        x = std::move(y);
        if (std::abs(next - lam) <= tol * next && it > 2) return next;
        lam = next;
    }
    throw ConvergenceError("inverse iteration for lambda1 did not converge");
}

double lambda1(const Domain& domain, double tol, int max_iterations) {
    // Non-owning alias: the solver only borrows the domain for the duration of the call.
    return lambda1(DomainPtr(DomainPtr{}, &domain), tol, max_iterations);
}

double defect(double lambda1, double K_minus) {
    if (!(lambda1 > 0.0) || !(K_minus >= 0.0)) throw ParameterError("defect needs lambda1 > 0 and K- >= 0");
    const double x = lambda1 * K_minus;
    return x / (1.0 + x);
}

Interval regularity_interval(double N, double delta) {
    if (!(N >= 2.0)) throw ParameterError("N must be >= 2 or inf");
    if (!(delta >= 0.0 && delta < 1.0)) throw ParameterError("delta must lie in [0, 1)");
    if (N == 2.0 && delta == 0.0) return {1.0, kInf};
    const double s = std::sqrt(1.0 - delta);
    if (std::isinf(N)) return {2.0 - s, 2.0 + s};
    return {2.0 - s, 2.0 + s * (N - delta) / (N - 2.0 + delta)};
}

double alpha_p(double p, double N) {
    if (!(p > 1.0)) throw ParameterError("p must be > 1");
    const double t = p - 2.0;
    if (p < 2.0 || std::isinf(N)) return t * t;
    return t * t * (N - 1.0) / (N + 2.0 * t + t * t);
}

double contraction_bound(double p, double N, double lambda1, double K_minus, BochnerFactor factor) {
    const double gamma = factor == BochnerFactor::InverseLambda ? 1.0 / lambda1 : lambda1;
    const double curvature = K_minus > 0.0 ? 1.0 + K_minus * gamma : 1.0;
    return std::sqrt(alpha_p(p, N) * curvature);
}

GeometryConstants geometry_constants(const DomainPtr& domain, double tol) {
    GeometryConstants g;
    g.lambda1 = lambda1(domain, tol);
    g.K_minus = domain->K_minus();
    g.N = domain->N();
    g.delta = defect(g.lambda1, g.K_minus);
    g.interval = regularity_interval(g.N, g.delta);
    return g;
}

}  // namespace pplap
