#include "pplap/calculus.hpp"

#include "pplap/errors.hpp"

#include <algorithm>
#include <cmath>

namespace pplap {

namespace {

void require_grid(const Domain& d, const char* what) {
    if (!d.is_grid()) throw UnsupportedOperation(std::string(what) + " is not defined on graph domains");
}

double pow_abs(double x, double p) {
    const double a = std::abs(x);
    if (p == 1.0) return a;
    if (p == 2.0) return a * a;
    return std::pow(a, p);
}

}  // namespace

VectorField gradient(const ScalarField& u) {
    const Domain& dom = u.domain();
    VectorField g(u.domain_ptr());
    if (dom.is_grid()) {
        const int d = dom.dim();
        const double inv_h = 1.0 / dom.spacing();
        for (std::size_t v = 0; v < dom.num_vertices(); ++v) {
            for (int i = 0; i < d; ++i) g.at(v, i) = (u[dom.step(v, i, +1)] - u[v]) * inv_h;
        }
    } else {
        const auto edges = dom.edges();
        for (std::size_t e = 0; e < edges.size(); ++e) g.at(e, 0) = (u[edges[e].v] - u[edges[e].u]) / edges[e].length;
    }
    return g;
}

ScalarField divergence(const VectorField& X) {
    const Domain& dom = X.domain();
    ScalarField out(X.domain_ptr());
    if (dom.is_grid()) {
        const int d = dom.dim();
        const double inv_h = 1.0 / dom.spacing();
        for (std::size_t v = 0; v < dom.num_vertices(); ++v) {
            double s = 0.0;
            for (int i = 0; i < d; ++i) s += (X.at(v, i) - X.at(dom.step(v, i, -1), i)) * inv_h;
            out[v] = s;
        }
    } else {
        const auto edges = dom.edges();
        const auto m = dom.measure();
        for (std::size_t e = 0; e < edges.size(); ++e) {
            const double flow = edges[e].weight * X.at(e, 0) / edges[e].length;
            out[edges[e].u] += flow;
            out[edges[e].v] -= flow;
        }
        for (std::size_t v = 0; v < dom.num_vertices(); ++v) out[v] /= m[v];
    }
    return out;
}

ScalarField laplacian(const ScalarField& u) { return divergence(gradient(u)); }

HessianField hessian(const ScalarField& u) {
    const Domain& dom = u.domain();
    require_grid(dom, "hessian");
    const int d = dom.dim();
    const double inv_h = 1.0 / dom.spacing();
    const double inv_4h2 = 0.25 * inv_h * inv_h;
    const VectorField g = gradient(u);
    HessianField H(u.domain_ptr());
    for (std::size_t v = 0; v < dom.num_vertices(); ++v) {
        for (int i = 0; i < d; ++i) {
            // Same expression as the divergence term, so the trace equals laplacian(u).
            H.at(v, i, i) = (g.at(v, i) - g.at(dom.step(v, i, -1), i)) * inv_h;
            for (int j = i + 1; j < d; ++j) {
                const std::size_t pi = dom.step(v, i, +1);
                const std::size_t mi = dom.step(v, i, -1);
                const double mixed = (u[dom.step(pi, j, +1)] - u[dom.step(pi, j, -1)] - u[dom.step(mi, j, +1)] +
                                      u[dom.step(mi, j, -1)]) *
                                     inv_4h2;
                H.at(v, i, j) = mixed;
                H.at(v, j, i) = mixed;
            }
        }
    }
    return H;
}

ScalarField infinity_laplacian(const ScalarField& u) {
    require_grid(u.domain(), "infinity_laplacian");
    const HessianField H = hessian(u);
    const VectorField g = gradient(u);
    ScalarField out(u.domain_ptr());
    for (std::size_t v = 0; v < out.size(); ++v) out[v] = H.bilinear_at(v, g.at(v), g.at(v));
    return out;
}

std::vector<double> magnitude(const VectorField& X) {
    std::vector<double> out(X.locations());
    for (std::size_t l = 0; l < out.size(); ++l) out[l] = X.norm_at(l);
    return out;
}

ScalarField magnitude_field(const VectorField& X) {
    require_grid(X.domain(), "magnitude_field");
    return ScalarField(X.domain_ptr(), magnitude(X));
}

ScalarField component(const VectorField& X, int i) {
    require_grid(X.domain(), "component");
    if (i < 0 || i >= X.components()) throw ParameterError("component index out of range");
    ScalarField out(X.domain_ptr());
    for (std::size_t v = 0; v < out.size(); ++v) out[v] = X.at(v, i);
    return out;
}

double integrate(const ScalarField& f) {
    const auto m = f.domain().measure();
    double s = 0.0;
    for (std::size_t v = 0; v < f.size(); ++v) s += f[v] * m[v];
    return s;
}

double integrate(const ScalarField& f, const Ball& b) {
    const auto m = f.domain().measure();
    double s = 0.0;
    for (std::size_t v : b.members) s += f[v] * m[v];
    return s;
}

double mean(const ScalarField& f) { return integrate(f) / f.domain().total_measure(); }

ScalarField remove_mean(const ScalarField& f) {
    ScalarField out = f;
    out -= mean(f);
    return out;
}

double lp_norm(const ScalarField& f, double p) {
    if (!(p > 0.0)) throw ParameterError("lp_norm exponent must be positive");
    if (std::isinf(p)) {
        double mx = 0.0;
        for (double x : f.values()) mx = std::max(mx, std::abs(x));
        return mx;
    }
    const auto m = f.domain().measure();
    double s = 0.0;
    for (std::size_t v = 0; v < f.size(); ++v) s += pow_abs(f[v], p) * m[v];
    return std::pow(s, 1.0 / p);
}

double lp_norm(const ScalarField& f, double p, const Ball& b) {
    if (!(p > 0.0)) throw ParameterError("lp_norm exponent must be positive");
    if (std::isinf(p)) {
        double mx = 0.0;
        for (std::size_t v : b.members) mx = std::max(mx, std::abs(f[v]));
        return mx;
    }
    const auto m = f.domain().measure();
    double s = 0.0;
    for (std::size_t v : b.members) s += pow_abs(f[v], p) * m[v];
    return std::pow(s, 1.0 / p);
}

double inner(const ScalarField& a, const ScalarField& b) {
    const auto m = a.domain().measure();
    double s = 0.0;
    for (std::size_t v = 0; v < a.size(); ++v) s += a[v] * b[v] * m[v];
    return s;
}

ScalarField hs_norm(const HessianField& H) {
    ScalarField out(H.domain_ptr());
    for (std::size_t v = 0; v < out.size(); ++v) out[v] = std::sqrt(H.hs2_at(v));
    return out;
}

double inner(const VectorField& X, const VectorField& Y) {
    const auto w = X.domain().vector_weights();
    const int c = X.components();
    double s = 0.0;
    for (std::size_t l = 0; l < X.locations(); ++l) {
        double dot = 0.0;
        for (int i = 0; i < c; ++i) dot += X.at(l, i) * Y.at(l, i);
        s += dot * w[l];
    }
    return s;
}

double lp_norm(const VectorField& X, double p) {
    if (!(p > 0.0)) throw ParameterError("lp_norm exponent must be positive");
    if (std::isinf(p)) {
        double mx = 0.0;
        for (std::size_t l = 0; l < X.locations(); ++l) mx = std::max(mx, X.norm_at(l));
        return mx;
    }
    const auto w = X.domain().vector_weights();
    double s = 0.0;
    for (std::size_t l = 0; l < X.locations(); ++l) s += pow_abs(X.norm_at(l), p) * w[l];
    return std::pow(s, 1.0 / p);
}

bool location_in_ball(const Domain& domain, std::size_t loc, const Ball& b) {
    if (domain.is_grid()) return b.contains(loc);
    const auto& e = domain.edges()[loc];
    return b.contains(e.u) && b.contains(e.v);
}

double lp_norm(const VectorField& X, double p, const Ball& b) {
    if (!(p > 0.0)) throw ParameterError("lp_norm exponent must be positive");
    const Domain& dom = X.domain();
    const auto w = dom.vector_weights();
    double s = 0.0;
    for (std::size_t l = 0; l < X.locations(); ++l) {
        if (!location_in_ball(dom, l, b)) continue;
        if (std::isinf(p)) {
            s = std::max(s, X.norm_at(l));
        } else {
            s += pow_abs(X.norm_at(l), p) * w[l];
        }
    }
    return std::isinf(p) ? s : std::pow(s, 1.0 / p);
}

}  // namespace pplap
