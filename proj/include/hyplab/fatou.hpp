#pragma once

#include <functional>
#include <vector>

#include "hyplab/boundary.hpp"
#include "hyplab/density.hpp"
#include "hyplab/step_function.hpp"

namespace hyplab {

// Log-widened admissible region toward the boundary point `target`: y belongs
// iff d_x(w_x^y, target) <= aperture * d(x,y)^{eps/alpha} * e^{-eps d(x,y)},
// where w_x^y is the canonical ray from x through y.  Exact on these backends:
// both sides are explicit, compared in log domain.
struct ApproachDomain {
  Direction target;
  double aperture = 1.0;
  Word basepoint;
  VisualMetricParams params;
  double exterior_radius = 0.0;  // members of the maximal sup must clear this

  void validate(const GroupModel& m) const;
};

bool in_domain(const GroupModel& m, const ApproachDomain& dom, const Word& y);

// All domain members at distance exactly `distance` from the basepoint, in
// lexicographic order.  Enumerates only words whose ray agrees with the target
// long enough to possibly satisfy the defining inequality, then filters by it;
// throws CapExceededError if that candidate set exceeds `cap`.
std::vector<Word> domain_members(const GroupModel& m, const ApproachDomain& dom, int distance,
                                 double cap = 2e6);

// A finite boundary measure: either |f| dmu_x for a step function f, or a
// point mass.
class BoundaryMeasure {
 public:
  static BoundaryMeasure density(const StepFunction& f);
  static BoundaryMeasure point_mass(const Direction& at, double weight = 1.0);

  bool is_point() const { return point_; }
  double total(const ConformalDensity& mu, const Word& basepoint = {}) const;
  double mass_on(const ConformalDensity& mu, const Word& cyl, const Word& basepoint = {}) const;

 private:
  bool point_ = false;
  StepFunction f_;
  Direction at_;
  double weight_ = 0.0;
};

// sup over j = 0..depth of nu(B_j)/mu_x(B_j), B_j the depth-j ancestor
// cylinder of v (B_0 = everything).  Visual balls centered at resolved
// directions are exactly these cylinders, so the sup is a finite max.
double maximal_function(const ConformalDensity& mu, const BoundaryMeasure& nu, const Direction& v,
                        int depth, const Word& basepoint = {});

// Superlevel masses mu{M nu > t} against the covering bound 3^D total/t and
// the sharper nested-cylinder bound total/t, exhaustively over depth-`depth`
// atoms.
struct MaximalReport {
  struct Row {
    int input = 0;
    double level = 0.0;
    double superlevel_mass = 0.0;
    double covering_bound = 0.0;  // 3^D * total / level
    double nested_bound = 0.0;    // total / level
    bool covering_ok = false;
    bool nested_ok = false;
  };
  std::vector<Row> rows;
  int depth = 0;
  double dimension_d = 0.0;
  bool all_covering_ok = false;
  bool all_nested_ok = false;
};
MaximalReport check_weak_11(const ConformalDensity& mu, const std::vector<BoundaryMeasure>& inputs,
                            const std::vector<double>& levels, int depth,
                            const VisualMetricParams& params);

// sup of |N0 f| over domain members y with exterior_radius < d(x,y) <=
// search_radius, paired with the maximal function at the target.  An empty
// member set is a flag, not an error.
struct NontangentialReport {
  double sup_value = 0.0;
  double maximal_value = 0.0;
  double ratio = 0.0;  // sup / maximal, the measured comparison constant
  int member_count = 0;
  bool empty = true;
};
NontangentialReport nontangential_maximal(const ConformalDensity& mu, const StepFunction& f,
                                          const ApproachDomain& dom, int search_radius,
                                          int maximal_depth);

// |N0 f(y) - f(target)| along every domain member, bucketed by distance.
struct FatouTrace {
  struct Row {
    int n = 0;
    Word y;
    double value = 0.0;  // real part of N0 f(y)
    double error = 0.0;  // |N0 f(y) - f(target)|
  };
  std::vector<Row> rows;
  struct Envelope {
    int n = 0;
    double max_error = 0.0;
    int members = 0;
  };
  std::vector<Envelope> envelope;
  double target_value = 0.0;
  double final_error = 0.0;  // envelope at the largest distance with members
  bool decayed = false;      // final_error <= tolerance
  double tolerance = 0.0;
};
FatouTrace fatou_experiment(const ConformalDensity& mu, const StepFunction& f,
                            const Direction& target, double aperture, int n_lo, int n_hi,
                            double tolerance = 1e-3);

// sum_j c_j on cyl(p_j) \ cyl(p_{j+1}) for j <= truncation along the canonical
// ray p, with c_j = e^{alpha j/2}/(1+j): square-integrable, unbounded in sup
// norm as the truncation deepens, zero beyond the truncated cell.
StepFunction structured_counterexample(const GroupModel& m, int truncation);

// Ratio trace r_n = N0 xi(p_n) along the canonical ray for the deepest
// truncation of the family; growth beyond every fixed bound is the observable
// failure of the degree-0 weak inequality.  A family whose sup norm stops
// growing cannot witness anything: flagged inconclusive.
struct CounterexampleTrace {
  struct Row {
    int n = 0;
    int truncation = 0;
    double value = 0.0;
  };
  std::vector<Row> rows;
  bool inconclusive = false;
};
CounterexampleTrace fatou_counterexample_probe(const ConformalDensity& mu,
                                               const std::function<StepFunction(int)>& family,
                                               int max_n);

}  // namespace hyplab
