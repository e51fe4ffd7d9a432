#pragma once

#include "pplap/fields.hpp"
#include "pplap/plap.hpp"
#include "pplap/poisson.hpp"
#include "pplap/spectral.hpp"

#include <optional>
#include <vector>

namespace pplap {

struct SolverConfig {
    /// p, plus the (eps, M) pair used by a single outer_picard call.
    RegParams rp;
    double inner_tol = 1e-10;
    double outer_tol = 1e-10;
    double poisson_tol = 1e-12;
    int max_inner = 500;
    int max_outer = 2000;
    double damping = 0.5;
    int max_damping_halvings = 4;
    /// Consecutive energy increases that trigger a damping halving; twice this
    /// many steps without a 10% drop of the fixed-point residual also halve it.
    int divergence_window = 10;
    std::vector<double> eps_schedule;
    /// Used only for p < 2; the last entry is reused if the list is shorter than eps_schedule.
    std::vector<double> M_schedule;
    BochnerFactor bochner = BochnerFactor::InverseLambda;
    /// Keep every continuation stage's solution in the record.
    bool keep_stages = false;
    /// Seed of the random bumps in the residual test basis.
    unsigned residual_seed = 12345;
};

/// eps_j = 10^-j (j = 1..8), M_j = 10^(j/2) for p < 2, eps = 1e-8 final.
SolverConfig default_solver_config(double p);
void validate(const SolverConfig& cfg);

struct InnerResult {
    ScalarField u;
    std::vector<double> ratios;  ///< ||r_k|| / ||r_{k-1}||, with r_k = Delta(u_{k+1} - u_k)
    int iterations = 0;          ///< number of Poisson solves
};

struct StageRecord {
    double eps = 0.0;
    double M = kInf;
    int outer_iterations = 0;
    int inner_iterations = 0;
    double max_inner_ratio = 0.0;
    /// ||grad(u_j - u_{j-1})||_p (the first stage compares with the initial guess).
    double drift = 0.0;
    double damping = 0.0;
};

struct SolveRecord {
    ScalarField u;
    /// sup over the test basis of |sum <|grad u|^(p-2) grad u, grad phi> + sum f phi| / ||grad phi||_p'.
    double residual = 0.0;
    /// Same with the regularized flux of the final stage.
    double residual_regularized = 0.0;
    /// Largest observed inner contraction ratio per outer step.
    std::vector<double> inner_ratios;
    int outer_iterations = 0;
    int inner_iterations = 0;
    double eps_final = 0.0;
    double M_final = kInf;
    double damping_final = 0.0;
    std::vector<double> energy;  ///< E_eps along the outer iterates (normalized problem)
    std::vector<StageRecord> stages;
    std::vector<ScalarField> stage_solutions;  ///< filled when cfg.keep_stages
};

/// Fixed point of the frozen Cordes map with v = grad w, iterated as
/// u_{k+1} = u_k + Delta^{-1}[theta (h - L_{v,eps} u_k) - mean], started from u_0 = w.
InnerResult inner_fixed_point(const ScalarField& w, const ScalarField& h, const SolverConfig& cfg,
                              const PoissonSolver* solver = nullptr);

/// Right-hand side fed to the inner map at the outer iterate w:
///   L_{grad w, eps} w + ((|grad w| ^ M)^2 + eps)^((2-p)/2) f - (|grad w|^2 + eps)^((2-p)/2) Delta_{p,eps} w.
/// At a fixed point u = w this enforces the divergence-form equation.
ScalarField outer_rhs(const ScalarField& w, const ScalarField& f, const RegParams& rp);

/// Damped Picard iteration w <- (1 - tau) w + tau S(w) for a single (eps, M).
SolveRecord outer_picard(const ScalarField& f, const SolverConfig& cfg, const ScalarField* initial = nullptr);

/// outer_picard along the eps (and, for p < 2, M) schedule with warm starts.
SolveRecord continuation(const ScalarField& f, const SolverConfig& cfg);

struct VariationalOptions {
    double gradient_tol = 1e-13;  ///< relative to the dual norm of f
    int max_iterations = 50000;
};

/// Zero-mean minimizer of sum (1/p)|grad u|^p w + sum f u m, i.e. the weak
/// solution of Delta_p u = f.
ScalarField variational_solve(const ScalarField& f, double p, const VariationalOptions& options = {});

/// Clamp to [-n, n] and subtract the mean.
ScalarField truncate_rhs(const ScalarField& f, double n);

/// Test functions for the weak residual: (2d+1)-point bumps at 64 seeded
/// random vertices plus 8 low-frequency trigonometric fields (graphs: 8
/// seeded random fields instead).
std::vector<ScalarField> residual_test_basis(const DomainPtr& domain, unsigned seed);

/// sup over the basis of |sum <flux(u), grad phi> w + sum f phi m| / ||grad phi||_p'.
double weak_residual(const ScalarField& u, const ScalarField& f, const RegParams& rp,
                     const std::vector<ScalarField>& basis);

}  // namespace pplap
