#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "hyplab/boundary.hpp"
#include "hyplab/group.hpp"

namespace hyplab {

enum class DensityKind : std::uint8_t { Exact, Orbit };

struct ConformalityReport {
  double c_q;            // sup of ratio vs the cocycle prediction, both directions
  double worst_ratio;    // the signed worst ratio itself
  Word worst_basepoint;
  Word worst_cylinder;
};

// Smallest k with 1/k <= mu(B(v, e^{-eps j})) / e^{-D j eps} <= k over all
// depth-M centers v and 0 <= j <= M, where D = dimension / eps.  Visual balls
// of radius e^{-eps j} around v are exactly the depth-j prefix cylinders.
struct AhlforsReport {
  double dimension_d;  // alpha / epsilon
  double k;
  Word worst_center;
  int worst_radius_depth;
};

// A family of boundary measures mu_x, one per group element x.
//   Exact: the closed-form conformal density of dimension alpha; the cocycle
//          identity mu_y(A) = integral of exp(alpha b_v(x,y)) dmu_x holds
//          exactly, and masses are available at every depth.
//   Orbit: finite orbital sum over the ball of radius N with weight
//          exp(-s d(x, .)), pushed to the boundary along shadow directions
//          and tabulated at a fixed cylinder depth (the resolution).
class ConformalDensity {
 public:
  static ConformalDensity exact(const GroupModel& m);
  static ConformalDensity orbit(const GroupModel& m, double s, int ball_radius, int depth,
                                double cap = 1e7);

  const GroupModel& model() const { return model_; }
  const ModelKey& key() const { return model_.key(); }
  DensityKind kind() const { return kind_; }
  double dimension() const { return dimension_; }
  int resolution() const { return resolution_; }  // cylinder depth limit; huge for Exact

  // mu_basepoint(cylinder of w); Orbit throws ResolutionError past its depth
  double mass(const Word& basepoint, const Word& w) const;
  double mass_e(const Word& w) const;

  // depth-d table of (cylinder, mass) from one basepoint, shortlex order
  std::vector<std::pair<Word, double>> table(const Word& basepoint, int depth) const;

  // measured quasi-conformality constant against exp(dimension * Busemann)
  // over all basepoints at distance 1 and all cells at `depth`
  ConformalityReport measure_conformality(int depth) const;

  // Ahlfors regularity of mu_e in the visual metric, certified by exhaustive
  // cylinder scan to `depth`; throws EstimateInfeasibleError on a zero-mass
  // cylinder (no finite k exists at this resolution).
  AhlforsReport certify_ahlfors_regularity(const VisualMetricParams& params, int depth) const;

  // orbit construction parameters (zero for Exact)
  double orbit_s() const { return s_; }
  int orbit_ball_radius() const { return ball_radius_; }

 private:
  explicit ConformalDensity(GroupModel m) : model_(std::move(m)) {}

  struct Table {
    std::map<Word, double> buckets;  // depth-`resolution_` prefixes, normalized
  };
  const Table& orbit_table(const Word& basepoint) const;
  Table build_orbit_table(const Word& basepoint) const;

  GroupModel model_;
  DensityKind kind_ = DensityKind::Exact;
  double dimension_ = 0.0;
  int resolution_ = 0;
  double s_ = 0.0;
  int ball_radius_ = 0;
  double cap_ = 0.0;

  // per-basepoint tables are built on demand; cache shared across copies
  struct Cache {
    std::mutex mutex;
    std::map<Word, Table> tables;
  };
  std::shared_ptr<Cache> cache_;
};

// Interchange form of a depth-d mass table from basepoint e.  Text is line
// oriented: a versioned header, then one "mass <word> <value>" row per
// cylinder in shortlex order, doubles printed to 17 significant digits so the
// decimal round trip is bit exact.
struct DensityFile {
  std::string model;
  std::string kind;  // "exact" | "orbit"
  double dimension = 0.0;
  double epsilon = 0.0;
  double c_q = 0.0;
  int depth = 0;
  std::vector<std::pair<std::string, double>> masses;
};

std::string density_serialize(const ConformalDensity& mu, const VisualMetricParams& params,
                              int depth);
DensityFile density_parse(const std::string& text);  // SerializationError on bad input

}  // namespace hyplab
