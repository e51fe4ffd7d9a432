#pragma once

#include "pplap/mesh.hpp"

namespace pplap {

/// Smallest nonzero eigenvalue of -Delta on mean-zero fields, by inverse
/// iteration with Poisson solves; `tol` is the relative change of the
/// Rayleigh quotient between steps.
double lambda1(const Domain& domain, double tol = 1e-12, int max_iterations = 10000);
double lambda1(const DomainPtr& domain, double tol = 1e-12, int max_iterations = 10000);

/// Open interval (lo, hi); hi may be kInf.
struct Interval {
    double lo = 1.0;
    double hi = kInf;

    bool contains(double p) const noexcept { return p > lo && p < hi; }
};

/// lambda1 * K- / (1 + lambda1 * K-).
double defect(double lambda1, double K_minus);

/// The admissible exponent interval for dimension bound N (>= 2 or kInf) and defect delta in [0, 1):
///   N = 2, delta = 0:  (1, inf)
///   N = inf:           (2 - sqrt(1-delta), 2 + sqrt(1-delta))
///   otherwise:         (2 - sqrt(1-delta), 2 + sqrt(1-delta) (N-delta)/(N-2+delta))
Interval regularity_interval(double N, double delta);

/// (p-2)^2 (N-1) / (N + 2(p-2) + (p-2)^2) for p >= 2 and finite N, else (p-2)^2.
double alpha_p(double p, double N);

/// Choice of the curvature factor multiplying alpha_p in the contraction bound.
enum class BochnerFactor {
    InverseLambda,  ///< 1 + K- / lambda1 (default)
    Lambda,         ///< 1 + K- * lambda1
};

/// sqrt(alpha_p * (1 + K- * Gamma)), Gamma = 1/lambda1 or lambda1 depending on `factor`.
double contraction_bound(double p, double N, double lambda1, double K_minus,
                         BochnerFactor factor = BochnerFactor::InverseLambda);

struct GeometryConstants {
    double lambda1 = 0.0;
    double K_minus = 0.0;
    double N = 2.0;
    double delta = 0.0;
    Interval interval;
};

GeometryConstants geometry_constants(const DomainPtr& domain, double tol = 1e-12);

}  // namespace pplap
