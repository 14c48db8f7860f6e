#pragma once

#include <complex>
#include <vector>

#include "hyplab/boundary.hpp"
#include "hyplab/density.hpp"
#include "hyplab/step_function.hpp"

namespace hyplab {

// Exact pairing sum_cells exp(s * b_v(x, y)) * h(v) * mu_x(cell): the kernel is
// constant on every cell of h refined along the prefix paths of x and y, so the
// finite cylinder sum IS the integral, not a quadrature of it.
Complex kernel_pair(const ConformalDensity& mu, const Element& x, const Element& y,
                    Complex s, const StepFunction& h);

// e^{s * b_v(x,y)} for exact densities; (d mu_y / d mu_x (cyl v))^{s/dim} from
// mass ratios for orbit densities.  Log-domain.
double poisson_kernel_power(const ConformalDensity& mu, const Element& x,
                            const Element& y, const Word& v, double s);

// integral P(e, y, v)^{dim*(lambda + 1/2)} f(v) dmu_e(v).  lambda = 0 is the
// square-root kernel, lambda = 1/2 the full (harmonic) kernel.
Complex p_lambda_transform(const ConformalDensity& mu, const StepFunction& f,
                           const Element& y, double lambda);

// phi(y) = integral P(e, y, v)^{dim/2} dmu_e(v); phi(e) = 1, phi(y) <= 1,
// phi(y) = phi(y^{-1}).
double harish_chandra(const ConformalDensity& mu, const Element& y);

// phi along the canonical radial word of length n.
double harish_chandra_radial(const ConformalDensity& mu, int n);

// P0 f(y) = (lambda = 0 transform of f) / phi(y).  P0 1 = 1, |P0 f| <= sup|f|.
Complex normalized_poisson(const ConformalDensity& mu, const StepFunction& f,
                           const Element& y);

// Positive-coefficient linear envelopes q1(n) = b1 + c1*n <= phi(y)*e^{dim*n/2}
// <= q2(n) = b2 + c2*n over sphere representatives with n in [exterior_radius,
// max_radius].  Spheres are not phi-constant on free products, so witnesses
// cover one representative per length pattern.
struct HCEstimateFit {
    double b1 = 0.0, c1 = 0.0;
    double b2 = 0.0, c2 = 0.0;
    int exterior_radius = 1;
    int max_radius = 0;
    int witness_count = 0;

    struct Row {
        int n = 0;
        double phi = 0.0;          // canonical-representative value
        double q1_bound = 0.0;     // q1(n) * e^{-dim*n/2}
        double q2_bound = 0.0;     // q2(n) * e^{-dim*n/2}
        double ratio_lower = 0.0;  // q1_bound / phi
        double ratio_upper = 0.0;  // q2_bound / phi
    };
    std::vector<Row> rows;

    double q1(int n) const { return b1 + c1 * n; }
    double q2(int n) const { return b2 + c2 * n; }
};

// Throws EstimateInfeasibleError when no strictly positive linear envelope
// exists over the witnesses (would falsify the Harish-Chandra estimates).
HCEstimateFit fit_harish_chandra_estimates(const ConformalDensity& mu,
                                           int exterior_radius, int max_radius);

// Tail masses of the normalized square-root kernel outside the visual ball
// B(v0, r) along a radial approach y_j -> v0.  Certifies positivity, unit
// total mass at every step, and monotone decay of the tail below `threshold`.
struct DiracWeierstrassReport {
    struct Row {
        int j = 0;
        Word y;
        double tail = 0.0;    // kernel mass outside B(v0, r)
        double inside = 0.0;  // kernel mass of B(v0, r)
        bool unit_ok = false; // tail + inside = 1 within 1e-12
    };
    std::vector<Row> rows;
    double radius = 0.0;
    double threshold = 0.0;
    bool all_unit = false;
    bool monotone = false;       // t_j <= t_{j-1} from the second step on
    bool below_threshold = false;
    bool certified = false;
};

// ys must be radial: every y_j a prefix of the canonical direction through v0
// (UnsupportedApproachError otherwise).  r >= 1 makes the ball everything and
// the tail identically zero.
DiracWeierstrassReport certify_dirac_weierstrass(const ConformalDensity& mu,
                                                 const Word& v0, double r,
                                                 const std::vector<Word>& ys,
                                                 const VisualMetricParams& params,
                                                 double threshold = 0.1);

}  // namespace hyplab
