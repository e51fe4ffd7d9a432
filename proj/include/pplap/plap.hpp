#pragma once

#include "pplap/fields.hpp"

#include <span>
#include <utility>
#include <vector>

namespace pplap {

/// Exponent p with regularization eps and gradient truncation level M.
struct RegParams {
    double p = 2.0;
    double eps = 0.0;
    double M = kInf;
};

void validate(const RegParams& rp);

/// ((|g| ^ M)^2 + eps)^((p-2)/2), the scalar coefficient of the flux at a
/// location with gradient magnitude |g|. Returns 0 when |g| = 0 and eps = 0.
double flux_coefficient(double grad_norm, const RegParams& rp);

/// ((|grad u| ^ M)^2 + eps)^((p-2)/2) grad u, with the convention that the
/// flux vanishes where grad u does and eps = 0.
VectorField flux(const ScalarField& u, const RegParams& rp);
/// The same map applied to an already computed gradient.
VectorField flux_of_gradient(const VectorField& g, const RegParams& rp);

/// div(flux(u)).
ScalarField p_laplacian(const ScalarField& u, const RegParams& rp);

/// Delta u + (p-2) H u(grad u, grad u) / (|grad u|^2 + eps). Grid only, eps > 0.
ScalarField developed(const ScalarField& u, const RegParams& rp);

/// Delta u + (p-2) H u(v, v) / (|v|^2 + eps). Grid only, eps > 0.
ScalarField frozen_L(const ScalarField& u, const VectorField& v, const RegParams& rp);

/// Pointwise Cordes weight: 1 for p < 2 or N = inf, otherwise
/// (N + g) / (N + g^2 + 2g) with g = (p-2)|v|^2 / (|v|^2 + eps).
ScalarField theta(const VectorField& v, const RegParams& rp, double N);
double theta_value(double v_norm2, const RegParams& rp, double N);
/// Infimum of theta over all v: (N+p-2)/(N+(p-2)^2+2(p-2)) for p >= 2, N finite; else 1.
double theta_lower_bound(double p, double N);

/// Pointwise pieces of the monotonicity inequality for one pair of vectors
/// (eps = 0 semantics):
///   lhs = <|a|^(p-2) a - |b|^(p-2) b, a - b>
///   rhs = |a-b|^p                       (p >= 2)
///       = |a-b|^2 / (|a|+|b|)^(2-p)     (p < 2, 0/0 -> 0)
std::pair<double, double> monotonicity_terms(std::span<const double> a, std::span<const double> b, double p);

/// Location-wise monotonicity terms for two vector fields.
std::pair<std::vector<double>, std::vector<double>> monotonicity_pair(const VectorField& v, const VectorField& w,
                                                                     const RegParams& rp);

/// sum (1/p)(|grad u|^2 + eps)^(p/2) w + sum f u m, whose critical points solve
/// Delta_{p,eps} u = f. eps = 0 gives the plain p-energy.
double p_energy(const ScalarField& u, const ScalarField& f, double p, double eps = 0.0);

}  // namespace pplap
