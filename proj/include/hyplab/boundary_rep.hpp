#pragma once

#include "hyplab/density.hpp"
#include "hyplab/poisson.hpp"
#include "hyplab/step_function.hpp"

namespace hyplab {

// (pi_x(g) f)(v) = P(x, gx, v)^{dim/2} * f(g^{-1} v).  The translate refines f
// along g's prefix path and the kernel is constant on every cell once the
// partition clears the paths of x and gx, so the result is exact; output
// resolution is resolution(f) + |g| (never coarsened).  Unitary on exact
// densities; on orbit densities cells beyond the table depth surface later as
// resolution errors from the mass lookups.
StepFunction rep_act(const ConformalDensity& mu, const Word& g, const StepFunction& f,
                     const Word& basepoint = {});

// <f, h>_x = sum over atoms f * conj(h) * mu_x(atom), exact.
Complex inner_product(const ConformalDensity& mu, const StepFunction& f, const StepFunction& h,
                      const Word& basepoint = {});
double l2_norm(const ConformalDensity& mu, const StepFunction& f, const Word& basepoint = {});

// <pi_x(g) f, h>_x; (g, 1, 1) recovers the spherical function.
Complex matrix_coefficient(const ConformalDensity& mu, const Word& g, const StepFunction& f,
                           const StepFunction& h, const Word& basepoint = {});

// Coefficient bound <pi_x(g)xi, eta>^2 / phi_x(g)^2 <= N0(xi^2)(g^{-1}x) *
// N0(eta^2)(gx) for non-negative xi, eta, where N0 is the normalized
// square-root transform based at x.  Both sides evaluate exactly; `holds`
// tolerates 1e-10 relative float slack and a violation beyond that would
// falsify the inequality.
struct CsPoissonReport {
  double lhs = 0.0;
  double rhs = 0.0;
  double slack = 0.0;  // rhs - lhs
  double phi = 0.0;    // phi_x(g)
  bool holds = false;
};
CsPoissonReport check_cs_poisson(const ConformalDensity& mu, const Word& g,
                                 const StepFunction& xi, const StepFunction& eta,
                                 const Word& basepoint = {});

// Multiplication by e^{(dim/2) b_v(x', x)}: an isometry L2(mu_x) -> L2(mu_x')
// that intertwines pi_x with pi_x'.
StepFunction intertwiner(const ConformalDensity& mu, const Word& x, const Word& xprime,
                         const StepFunction& f);

}  // namespace hyplab
