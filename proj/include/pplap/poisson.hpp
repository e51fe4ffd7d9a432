#pragma once

#include "pplap/fields.hpp"

#include <memory>

namespace pplap {

struct PoissonStats {
    int iterations = 0;
    double relative_residual = 0.0;
};

/// Zero-mean Poisson solver for Delta u = f by preconditioned conjugate
/// gradients on the mean-zero subspace, in the measure-weighted inner product.
/// Grids are preconditioned with the exact Fourier inverse of the stencil
/// (so CG finishes in one or two steps); graphs use Jacobi.
class PoissonSolver {
public:
    explicit PoissonSolver(DomainPtr domain);
    ~PoissonSolver();
    PoissonSolver(const PoissonSolver&) = delete;
    PoissonSolver& operator=(const PoissonSolver&) = delete;

    /// Requires |mean f| <= 1e-10 * rms(f). Returns u with mean 0 and
    /// ||Delta u - f||_2 <= tol ||f||_2. `guess`, if given, seeds CG.
    ScalarField solve(const ScalarField& f, double tol, const ScalarField* guess = nullptr,
                      PoissonStats* stats = nullptr) const;

    /// Apply the preconditioner: an approximation of (-Delta)^+ on mean-zero r.
    ScalarField precondition(const ScalarField& r) const;

    const DomainPtr& domain_ptr() const noexcept { return domain_; }

private:
    struct Spectral;
    DomainPtr domain_;
    std::unique_ptr<Spectral> spectral_;
    std::vector<double> jacobi_;
};

/// One-shot convenience wrapper.
ScalarField poisson_solve(const ScalarField& f, double tol = 1e-12);

}  // namespace pplap
