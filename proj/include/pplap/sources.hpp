#pragma once

#include "pplap/fields.hpp"

#include <string>
#include <vector>

namespace pplap {

/// Zero-mean seeded combination of four low Fourier modes on a grid. Graphs get
/// seeded white noise smoothed by one Poisson solve and scaled to unit rms.
ScalarField smooth_source(const DomainPtr& domain, unsigned seed);

/// Unit-mass Gaussian of width sigma centred at vertex c (not mean-free).
ScalarField gaussian_bump(const DomainPtr& domain, std::size_t c, double sigma);

/// Unit point mass at vertex c minus its mean.
ScalarField spike_source(const DomainPtr& domain, std::size_t c);

/// Named right-hand sides used by the CLI:
///   smooth  smooth_source(seed)
///   bump    mean-free Gaussian (width 0.05 L) near the fractional point 0.1
///   dipole  bump near 0.1 minus bump near 0.9
///   spike   spike_source at vertex 0
/// Grid-only names raise UnsupportedOperation on graphs.
ScalarField builtin_source(const DomainPtr& domain, const std::string& name, unsigned seed);
const std::vector<std::string>& builtin_source_names();

/// Grid vertex nearest to the point with every coordinate frac * L, except
/// axis 0 which uses frac0.
std::size_t grid_point(const Domain& domain, double frac0, double frac);

}  // namespace pplap
