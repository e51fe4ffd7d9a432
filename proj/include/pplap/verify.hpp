#pragma once

#include "pplap/fields.hpp"
#include "pplap/plap.hpp"

#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace pplap {

/// Outcome of one named inequality check: `lhs relation rhs`.
struct EstimateReport {
    std::string name;
    std::string relation = "<=";
    double lhs = 0.0;
    double rhs = 0.0;
    /// Least C with LHS <= C * RHS over the sample (RHS / LHS for ">=" checks,
    /// the empirical constant for monotonicity).
    double fitted_constant = 0.0;
    bool pass = false;
    /// Parameters and diagnostics in insertion order.
    std::vector<std::pair<std::string, double>> context;
    std::string note;

    void set(const std::string& key, double value);
    /// NaN when the key is absent.
    double get(const std::string& key) const;
};

// ---------------------------------------------------------------- algebra

/// |v|^4 |A|^2 >= 2|v|^2 |Av|^2 + (|v|^2 tr A - <Av,v>)^2 / (n-1) - <Av,v>^2
/// for a symmetric d x d matrix A (row-major) and n >= 2.
EstimateReport check_key_inequality(std::span<const double> A, std::span<const double> v, int n);

/// [((t^2+t)A - (tN+t^2)B) / (N+t^2+2t)]^2 <= t^2(N-1)/(N+2t+t^2) [(A-B)^2/(N-1) + B^2].
EstimateReport check_elementary(double t, double A, double B, double N);

/// Q(t) on [0, 1] for dimension bound N (kInf allowed) and weight exponent alpha.
double q_polynomial(double p, double N, double alpha, double t);
/// Exact minimum of Q over [0, 1] (endpoints and the vertex of the quadratic).
double q_minimum(double p, double N, double alpha);
/// alpha is admissible iff alpha > (p - 3 - (p-1)/(N-1)) / 2 ((p-3)/2 for N = kInf).
double alpha_threshold(double p, double N);

/// min Q > 0 exactly when alpha is strictly admissible, and
/// Q(1) = (p-1)((p-1)/(N-1) + 3 - p + 2 alpha).
EstimateReport check_Q_polynomial(double p, double N, double alpha);

/// <|a|^(p-2)a - |b|^(p-2)b, a-b> >= c_p |a-b|^p (p >= 2) or
/// c_p |a-b|^2 / (|a|+|b|)^(2-p) (p < 2), with c_p = 2^(2-p) resp. p-1.
EstimateReport check_monotonicity(std::span<const double> a, std::span<const double> b, double p);
double monotonicity_constant(double p);

/// Pointwise |tr H - theta L_{v,eps}|^2 <= alpha_p |H|^2 for one symmetric
/// N x N matrix H (row-major) and vector v; p >= 2.
EstimateReport check_cordes_pointwise(std::span<const double> H, std::span<const double> v, double p, double N,
                                      double eps);

/// The pointwise check at every vertex of a grid with dim = N; reports the worst ratio.
EstimateReport check_cordes_closeness(const ScalarField& u, const VectorField& v, double p, double N, double eps);

struct AlgebraOptions {
    std::size_t samples = 1000000;
    unsigned seed = 1;
    bool parallel = true;
};

/// Seeded randomized suites for key, elementary, monotonicity, Cordes
/// closeness and Q admissibility; each report counts violations.
std::vector<EstimateReport> algebra_suite(const AlgebraOptions& options = {});

// -------------------------------------------------------------- estimates

/// Grid vertex nearest to the physical point x (periodic).
std::size_t vertex_near(const Domain& domain, std::span<const double> x);

/// Clamped radial tent: 1 on B_r(center), 0 outside B_R(center), linear in the distance between.
ScalarField cutoff(const DomainPtr& domain, std::size_t center, double r, double R);

/// Fitted C in sum |Hu|^2 w eta^2 <= C sum [(1+alpha^2)(D u)^2 eta^2 + |grad u|^2(|grad eta|^2 + K- eta^2)] w,
/// w = ((|grad u| ^ M)^2 + eps)^alpha, D the developed operator. Grid only.
/// alpha >= 0 needs finite M; alpha < 0 needs M = inf.
EstimateReport check_hessian_estimate(const ScalarField& u, const RegParams& rp, double alpha, const ScalarField& eta);

/// Fitted C1 in sum_{B_{R/8}} |v|^2 + |grad v|^2 <= C1 sum_{B_R} f^2 (+ K- C1 far-field term),
/// v = flux(u, (p, eps, inf)). When the ball is the whole domain the global form
/// sum |grad v|^2 <= C1 sum f^2 is used.
EstimateReport check_second_order_final(const ScalarField& u, const ScalarField& f, double p, double eps,
                                        const Ball& ball);

/// Fitted C in max_{B_r} |grad u| <= C (R/(R-r))^(N/m) ((avg_{B_R} |grad u|^m)^(1/m) + 1). Needs q > N.
EstimateReport check_gradient_bound(const ScalarField& u, const ScalarField& f, double p, double q, std::size_t center,
                                    double r, double R, double m_exp);

/// Fitted C = max over seeded smooth, rough and lowest-mode fields of
/// sum |g - mean g|^p m / sum |grad g|^p w.
EstimateReport check_poincare_pp(const DomainPtr& domain, double p, int samples, unsigned seed);

/// Fitted C~ in sum_B f^2 <= delta sum_B R^2 |grad f|^2 + C~ delta^(-N/2) m(B)^-1 (sum_B |f|)^2,
/// maximized over the deltas.
EstimateReport check_sobolev_trick(const ScalarField& f, const Ball& ball,
                                   const std::vector<double>& deltas = {0.5, 0.1, 0.02});

/// Fitted C in sup_{B_r} u <= C (inf_{B_r} u + r^((p-s/q)/(p-1)) R^(s/(q(p-1))) (avg_{B_R} |f|^q)^(1/(q(p-1)))),
/// s = max(N, p). u must be positive on B_R.
EstimateReport check_harnack(const ScalarField& u, double p, std::size_t center, double r, double R,
                             const ScalarField& f, double q = kInf);

/// Fitted C in sum_{B_{R/2}} (Delta u)^2 <= C sum_{B_R} (1 + R^-2) |grad u|^2.
/// Requires max_{B_R} |Delta_{p,eps} u| <= residual_tol * max |Delta_{p,eps} u|.
EstimateReport check_w22_pharmonic(const ScalarField& u, const RegParams& rp, std::size_t center, double R,
                                   double residual_tol = 1e-4);

/// Drift of a fitted constant under one refinement: max/min of the two
/// constants, pass iff < limit (two zero constants count as no drift).
EstimateReport refinement_drift(const EstimateReport& coarse, const EstimateReport& fine, double limit = 2.0);

/// The standard estimate battery on one grid: smooth, bump and dipole
/// sources solved by continuation, then every estimate check.
std::vector<EstimateReport> estimate_suite(const DomainPtr& domain, double p, unsigned seed);

}  // namespace pplap
