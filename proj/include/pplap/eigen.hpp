#pragma once

#include "pplap/fields.hpp"

namespace pplap {

struct EigenOptions {
    int restarts = 4;
    unsigned seed = 1;
    int max_iterations = 20000;
    /// Run restarts on separate threads.
    bool parallel = true;
};

/// First nontrivial p-eigenpair: Delta_p u = -lambda u|u|^(p-2).
struct EigenRecord {
    ScalarField u;  ///< ||u||_p = 1, max-abs vertex positive
    double lambda = 0.0;
    /// sup over the residual test basis of |sum <|grad u|^(p-2) grad u, grad phi> - lambda sum u|u|^(p-2) phi| / ||grad phi||_p'
    double residual = 0.0;
    /// max over edges of |u(x) - u(y)| / dist(x, y)
    double lipschitz_estimate = 0.0;
    /// sum u|u|^(p-2) m divided by sum |u|^(p-1) m
    double constraint = 0.0;
    /// Final dual gradient norm divided by the quotient.
    double gradient_norm = 0.0;
    /// False when descent stopped at the nonsmooth floor (p < 2) above tol.
    bool converged = true;
    int iterations = 0;
    int restart = 0;  ///< index of the winning restart
};

/// Minimize sum |grad u|^p / min_c sum |u - c|^p over non-constant u by
/// Poisson-preconditioned L-BFGS from several seeded starts; the smallest
/// quotient wins. The optimal shift c enforces sum u|u|^(p-2) m = 0.
EigenRecord p_eigenpair(const DomainPtr& domain, double p, double tol = 1e-10, const EigenOptions& options = {});

/// The c minimizing sum |u - c|^p m (root of sum |u-c|^(p-2)(u-c) m).
double p_center(const ScalarField& u, double p);

/// max over edges of |u(x) - u(y)| / dist(x, y).
double edge_lipschitz(const ScalarField& u);

}  // namespace pplap
