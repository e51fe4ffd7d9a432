#include "pplap/sources.hpp"

#include "pplap/calculus.hpp"
#include "pplap/errors.hpp"
#include "pplap/poisson.hpp"
#include "pplap/verify.hpp"

#include <array>
#include <cmath>
#include <random>

namespace pplap {

ScalarField smooth_source(const DomainPtr& domain, unsigned seed) {
    const Domain& dom = *domain;
    std::mt19937_64 rng(seed ^ 0x65737469ULL);
    std::normal_distribution<double> nd;
    if (!dom.is_grid()) {
        ScalarField g(domain);
        for (double& x : g.values()) x = nd(rng);
        g = poisson_solve(remove_mean(g), 1e-10);
        g *= std::sqrt(dom.total_measure()) / lp_norm(g, 2.0);
        return remove_mean(g);
    }
    std::uniform_real_distribution<double> phase(0.0, 2.0 * M_PI);
    struct Mode {
        std::array<int, 3> k;
        double amp, ph;
    };
    const std::array<std::array<int, 3>, 4> ks{{{1, 0, 0}, {0, 1, 0}, {1, 1, 0}, {2, -1, 1}}};
    std::vector<Mode> modes;
    for (const auto& k : ks) modes.push_back({k, nd(rng), phase(rng)});
    const double L = dom.side();
    return remove_mean(ScalarField::from_function(domain, [&](std::size_t v) {
        double s = 0.0;
        for (const auto& md : modes) {
            double arg = md.ph;
            for (int a = 0; a < dom.dim(); ++a) arg += 2.0 * M_PI * md.k[a] * dom.position(v, a) / L;
            s += md.amp * std::cos(arg);
        }
        return s;
    }));
}

ScalarField gaussian_bump(const DomainPtr& domain, std::size_t c, double sigma) {
    if (!(sigma > 0.0)) throw ParameterError("bump width must be positive");
    const auto dist = domain->distances_from(c);
    ScalarField g(domain);
    for (std::size_t v = 0; v < g.size(); ++v) g[v] = std::exp(-0.5 * dist[v] * dist[v] / (sigma * sigma));
    g *= 1.0 / integrate(g);
    return g;
}

ScalarField spike_source(const DomainPtr& domain, std::size_t c) {
    if (c >= domain->num_vertices()) throw ParameterError("spike vertex out of range");
    ScalarField g(domain);
    g[c] = 1.0 / domain->measure()[c];
    return remove_mean(g);
}

std::size_t grid_point(const Domain& domain, double frac0, double frac) {
    std::vector<double> x(static_cast<std::size_t>(domain.dim()), frac * domain.side());
    x[0] = frac0 * domain.side();
    return vertex_near(domain, x);
}

const std::vector<std::string>& builtin_source_names() {
    static const std::vector<std::string> names{"smooth", "bump", "dipole", "spike"};
    return names;
}

ScalarField builtin_source(const DomainPtr& domain, const std::string& name, unsigned seed) {
    const Domain& dom = *domain;
    if (name == "smooth") return smooth_source(domain, seed);
    if (name == "spike") return spike_source(domain, 0);
    if (name == "bump" || name == "dipole") {
        if (!dom.is_grid()) throw UnsupportedOperation("source '" + name + "' is grid only");
        const double sigma = 0.05 * dom.side();
        ScalarField g = gaussian_bump(domain, grid_point(dom, 0.1, 0.1), sigma);
        if (name == "dipole") g -= gaussian_bump(domain, grid_point(dom, 0.9, 0.9), sigma);
        return remove_mean(g);
    }
    throw ParameterError("unknown builtin source '" + name + "'");
}

}  // namespace pplap
