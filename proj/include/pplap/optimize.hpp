#pragma once

#include <functional>
#include <string>
#include <vector>

namespace pplap {

/// Limited-memory BFGS with Armijo backtracking in a user-supplied inner
/// product, with a preconditioner as the initial inverse Hessian.
struct LbfgsOptions {
    int memory = 12;
    int max_iterations = 20000;
    /// Stop when sqrt(<g, P g>) <= gradient_tol.
    double gradient_tol = 1e-12;
    double armijo = 1e-4;
    int max_backtracks = 40;
};

struct LbfgsResult {
    std::vector<double> x;
    double value = 0.0;
    double gradient_norm = 0.0;  ///< sqrt(<g, P g>) at x
    int iterations = 0;
    bool converged = false;
    std::string message;
};

struct LbfgsProblem {
    /// Returns the objective at x and writes its gradient (Riesz representer
    /// in `dot`) into grad.
    std::function<double(const std::vector<double>& x, std::vector<double>& grad)> evaluate;
    std::function<double(const std::vector<double>&, const std::vector<double>&)> dot;
    /// Approximate inverse Hessian applied to a gradient.
    std::function<std::vector<double>(const std::vector<double>&)> precondition;
};

LbfgsResult lbfgs_minimize(const LbfgsProblem& problem, std::vector<double> x0, const LbfgsOptions& options);

}  // namespace pplap
