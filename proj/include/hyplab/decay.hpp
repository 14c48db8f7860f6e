#pragma once

#include <string>
#include <vector>

#include "hyplab/density.hpp"
#include "hyplab/group.hpp"
#include "hyplab/step_function.hpp"

namespace hyplab {

// F_{n,rho}(v) = (1/|C_{n,rho}|) sum over the annulus of the unit vector's
// orbit kernels pi_x(gamma)1 / phi_x(gamma), as an exact step function.
struct AnnulusAverage {
  int n = 0;
  double rho = 0.0;
  double count = 0.0;
  StepFunction average;
  double sup_norm = 0.0;
};
// resolution < 0 means the natural one (n + ceil(rho) + 1).  Numerically
// indistinguishable sibling cells (within 1e-12) are merged, which keeps the
// free-group case, where F is constant, at a handful of leaves.
AnnulusAverage annulus_average(const ConformalDensity& mu, int n, double rho,
                               int resolution = -1, double cap = 2e6);

// Dual route to the same constant: (1/|C|) |sum P0 f(gamma x)| <= sup|F| ||f||_1,
// with the averaged sum and the pairing <f, F> agreeing to 1e-10.
struct DualL1Report {
  int n = 0;
  double rho = 0.0;
  double count = 0.0;
  double average_abs = 0.0;  // |(1/|C|) sum_gamma P0 f(gamma x)|
  double pairing_abs = 0.0;  // |integral f F dmu|
  double l1_norm = 0.0;
  double bound = 0.0;  // sup F * l1_norm
  bool holds = false;
  bool consistent = false;
};
DualL1Report dual_l1_check(const ConformalDensity& mu, const StepFunction& f, int n,
                           double rho, double cap = 2e6);

// Cumulative coefficient sums S(n) = sum_{|gamma| <= n} |<pi(gamma)1, xi>|^2
// against the assembled polynomial bound: per shell, the Cauchy-Schwarz step
// plus the dual L1 constant give sum_{C_{k,rho}} |coef|^2 <= M |C_{k,rho}|
// sup_window q2^2 e^{-alpha m}; the cumulative bound grows like (1+n)^3.
struct RdSumReport {
  struct Row {
    int n = 0;
    double cumulative = 0.0;
    double bound = 0.0;
    bool certified = false;
  };
  std::vector<Row> rows;
  double rho = 1.0;
  double uniform_bound = 0.0;     // M: max sup-norm of F_{k,rho}, k <= n
  double sup_ratio_cubic = 0.0;   // max cumulative/(1+n)^3
  bool all_certified = false;
};
RdSumReport rd_sum(const ConformalDensity& mu, const StepFunction& xi, int n_max,
                   double cap = 2e6);

// One shell sum_{|gamma|=n} |<pi(gamma)1, xi>|^2.  The fast route groups the
// shell by prefixes one level past xi's resolution (the coefficient only sees
// that much of gamma); the direct route enumerates every gamma.
double rd_shell_sum(const ConformalDensity& mu, const StepFunction& xi, int n,
                    double cap = 2e6);
double rd_shell_sum_direct(const ConformalDensity& mu, const StepFunction& xi, int n,
                           double cap = 2e6);

// The annulus-ratio experiment needs a scale for its comparison polynomial;
// it is fitted once per (model, rho, window) on the pair f = g = 1 so that the
// calibration trace attains ratio 1, then frozen for every other pair.
struct RoblinCalibration {
  double rho = 1.0;
  int n_lo = 0, n_hi = 0;
  double constant = 1.0;  // max over the window of raw sum / comparison term
};
RoblinCalibration calibrate_roblin(const ConformalDensity& mu, double rho, int n_lo,
                                   int n_hi, double cap = 2e6);

struct RoblinReport {
  struct Row {
    int n = 0;
    double annulus_sum = 0.0;  // sum over C_{n,rho} of |<pi(gamma)f, g>|^2
    double comparison = 0.0;   // q2(n+rho)^2 e^{-alpha(n+rho)} |C| * constant
    double ratio = 0.0;        // annulus_sum / (comparison |f|_2^2 |g|_2^2)
  };
  std::vector<Row> rows;
  double f_norm2 = 0.0, g_norm2 = 0.0;
  double max_ratio = 0.0;
  double slack = 0.05;
  bool within = false;  // max_ratio <= 1 + slack
  std::string caveat;
};
RoblinReport roblin_experiment(const ConformalDensity& mu, const StepFunction& f,
                               const StepFunction& g, const RoblinCalibration& calib,
                               double cap = 2e6);

// Raw shadow-pair counts e^{-alpha n} #{|gamma| = n : gamma^{-1}x shadows into
// cyl(u), gamma x into cyl(w)} against mu(u) mu(w).  Diagnostic only: the
// integer word metric has an arithmetic length spectrum, so no limit theorem
// is asserted along integer radii.
struct EquidistributionTrace {
  struct Row {
    int n = 0;
    double empirical = 0.0;
    double reference = 0.0;  // mu(u) mu(w)
    double ratio = 0.0;
  };
  std::vector<Row> rows;
  Word u, w;
  std::string caveat;
};
EquidistributionTrace equidistribution_trace(const ConformalDensity& mu, const Word& u,
                                             const Word& w, int n_lo, int n_hi,
                                             double cap = 2e6);

// |<pi(gamma)f, g>| <= sup|f| sup|g| phi(gamma) over the full ball of radius
// n_max.
struct WeakInequalityReport {
  long long checked = 0;
  long long violations = 0;
  double max_ratio = 0.0;  // of |coef| to the bound
  bool holds = false;
};
WeakInequalityReport check_weak_inequality(const ConformalDensity& mu,
                                           const StepFunction& f, const StepFunction& g,
                                           int n_max, double cap = 2e6);

}  // namespace hyplab
