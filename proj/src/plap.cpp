#include "pplap/plap.hpp"

#include "pplap/calculus.hpp"
#include "pplap/errors.hpp"

#include <algorithm>
#include <cmath>

namespace pplap {

void validate(const RegParams& rp) {
    if (!(rp.p > 1.0) || !std::isfinite(rp.p)) throw ParameterError("p must lie in (1, inf)");
    if (!(rp.eps >= 0.0) || !std::isfinite(rp.eps)) throw ParameterError("eps must be finite and >= 0");
    if (!(rp.M > 0.0)) throw ParameterError("truncation level M must be positive");
}

double flux_coefficient(double grad_norm, const RegParams& rp) {
    if (rp.p == 2.0) return 1.0;
    const double t = std::min(grad_norm, rp.M);
    const double base = t * t + rp.eps;
    if (base == 0.0) return 0.0;
    return std::pow(base, 0.5 * (rp.p - 2.0));
}

VectorField flux_of_gradient(const VectorField& g, const RegParams& rp) {
    validate(rp);
    VectorField out = g;
    if (rp.p == 2.0) return out;
    const int c = g.components();
    for (std::size_t l = 0; l < g.locations(); ++l) {
        const double k = flux_coefficient(g.norm_at(l), rp);
        for (int i = 0; i < c; ++i) out.at(l, i) *= k;
    }
    return out;
}

VectorField flux(const ScalarField& u, const RegParams& rp) { return flux_of_gradient(gradient(u), rp); }

ScalarField p_laplacian(const ScalarField& u, const RegParams& rp) { return divergence(flux(u, rp)); }

ScalarField frozen_L(const ScalarField& u, const VectorField& v, const RegParams& rp) {
    validate(rp);
    if (!u.domain().is_grid()) throw UnsupportedOperation("frozen_L needs a Hessian and is grid only");
    if (!(rp.eps > 0.0)) throw ParameterError("frozen_L needs eps > 0");
    const HessianField H = hessian(u);
    ScalarField out(u.domain_ptr());
    for (std::size_t x = 0; x < out.size(); ++x) {
        const double lap = H.trace_at(x);
        if (rp.p == 2.0) {
            out[x] = lap;
            continue;
        }
        const auto vx = v.at(x);
        out[x] = lap + (rp.p - 2.0) * H.bilinear_at(x, vx, vx) / (v.norm2_at(x) + rp.eps);
    }
    return out;
}

ScalarField developed(const ScalarField& u, const RegParams& rp) { return frozen_L(u, gradient(u), rp); }

double theta_value(double v_norm2, const RegParams& rp, double N) {
    if (rp.p <= 2.0 || std::isinf(N)) return 1.0;
    const double denom = v_norm2 + rp.eps;
    const double g = denom > 0.0 ? (rp.p - 2.0) * v_norm2 / denom : 0.0;
    return (N + g) / (N + g * g + 2.0 * g);
}

ScalarField theta(const VectorField& v, const RegParams& rp, double N) {
    validate(rp);
    if (!v.domain().is_grid()) throw UnsupportedOperation("theta is defined through vertex vectors and is grid only");
    ScalarField out(v.domain_ptr());
    for (std::size_t x = 0; x < out.size(); ++x) out[x] = theta_value(v.norm2_at(x), rp, N);
    return out;
}

double theta_lower_bound(double p, double N) {
    if (p <= 2.0 || std::isinf(N)) return 1.0;
    const double t = p - 2.0;
    return (N + t) / (N + t * t + 2.0 * t);
}

std::pair<double, double> monotonicity_terms(std::span<const double> a, std::span<const double> b, double p) {
    double na2 = 0.0, nb2 = 0.0, d2 = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        na2 += a[i] * a[i];
        nb2 += b[i] * b[i];
        d2 += (a[i] - b[i]) * (a[i] - b[i]);
    }
    const double na = std::sqrt(na2), nb = std::sqrt(nb2);
    const double ka = na > 0.0 ? std::pow(na, p - 2.0) : 0.0;
    const double kb = nb > 0.0 ? std::pow(nb, p - 2.0) : 0.0;
    double lhs = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) lhs += (ka * a[i] - kb * b[i]) * (a[i] - b[i]);
    double rhs = 0.0;
    if (p >= 2.0) {
        rhs = std::pow(d2, 0.5 * p);
    } else if (d2 > 0.0) {
        rhs = d2 / std::pow(na + nb, 2.0 - p);
    }
    return {lhs, rhs};
}

std::pair<std::vector<double>, std::vector<double>> monotonicity_pair(const VectorField& v, const VectorField& w,
                                                                     const RegParams& rp) {
    validate(rp);
    std::vector<double> lhs(v.locations()), rhs(v.locations());
    for (std::size_t l = 0; l < v.locations(); ++l) {
        auto [a, b] = monotonicity_terms(v.at(l), w.at(l), rp.p);
        lhs[l] = a;
        rhs[l] = b;
    }
    return {std::move(lhs), std::move(rhs)};
}

double p_energy(const ScalarField& u, const ScalarField& f, double p, double eps) {
    const VectorField g = gradient(u);
    const auto w = u.domain().vector_weights();
    double e = 0.0;
    for (std::size_t l = 0; l < g.locations(); ++l) {
        const double base = g.norm2_at(l) + eps;
        e += std::pow(base, 0.5 * p) / p * w[l];
    }
    return e + inner(f, u);
}

}  // namespace pplap
