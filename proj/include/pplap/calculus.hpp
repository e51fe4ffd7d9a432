#pragma once

#include "pplap/fields.hpp"

namespace pplap {

/// Forward differences on grids; (u(v) - u(u)) / length on graph edges.
VectorField gradient(const ScalarField& u);

/// Negative adjoint of `gradient` in the measure-weighted pairing:
/// sum <X, grad phi> w = - sum phi * div X * m for every phi.
ScalarField divergence(const VectorField& X);

/// div(grad u).
ScalarField laplacian(const ScalarField& u);

/// Grid only. Diagonal entries are backward differences of the forward
/// gradient, so the trace reproduces `laplacian` bit for bit; off-diagonal
/// entries use the symmetric central mixed difference.
HessianField hessian(const ScalarField& u);

/// H u (grad u, grad u) pointwise. Grid only.
ScalarField infinity_laplacian(const ScalarField& u);

/// Pointwise Euclidean magnitude. On graphs the result is indexed by edge,
/// so it is returned as a plain vector.
std::vector<double> magnitude(const VectorField& X);
/// Grid only: |X| as a scalar field.
ScalarField magnitude_field(const VectorField& X);
/// Grid only: the scalar field of component i.
ScalarField component(const VectorField& X, int i);

/// Measure-weighted sums (fixed summation order).
double integrate(const ScalarField& f);
double integrate(const ScalarField& f, const Ball& b);
double mean(const ScalarField& f);
ScalarField remove_mean(const ScalarField& f);
/// (sum |f|^p m)^(1/p); p = kInf gives max |f|.
double lp_norm(const ScalarField& f, double p);
double lp_norm(const ScalarField& f, double p, const Ball& b);
double inner(const ScalarField& a, const ScalarField& b);

/// Pointwise Hilbert-Schmidt norm.
ScalarField hs_norm(const HessianField& H);

/// sum_loc <X, Y> w(loc).
double inner(const VectorField& X, const VectorField& Y);
/// (sum_loc |X|^p w)^(1/p); kInf gives max |X|.
double lp_norm(const VectorField& X, double p);
/// Restricted to locations inside a ball (graph edges need both endpoints inside).
double lp_norm(const VectorField& X, double p, const Ball& b);

/// True when the location lies in the ball.
bool location_in_ball(const Domain& domain, std::size_t loc, const Ball& b);

}  // namespace pplap
