#pragma once

#include <string>

#include "hyplab/group.hpp"
#include "hyplab/halfint.hpp"

namespace hyplab {

// A boundary point: the infinite normal-form word head . period . period ...
// Periods are never empty, so every Direction determines letters to arbitrary
// depth. Cylinders are plain Words (the set of directions extending them).
struct Direction {
  Word head;
  Word period;

  Letter letter_at(std::size_t i) const {
    if (i < head.size()) return head[i];
    return period[(i - head.size()) % period.size()];
  }
  Word prefix(int depth) const {
    Word w;
    w.reserve(static_cast<std::size_t>(depth));
    for (int i = 0; i < depth; ++i) w.push_back(letter_at(static_cast<std::size_t>(i)));
    return w;
  }
  bool starts_with(const Word& cyl) const {
    for (std::size_t i = 0; i < cyl.size(); ++i)
      if (letter_at(i) != cyl[i]) return false;
    return true;
  }
};

// head extended by the smallest admissible letter forever
Direction canonical_direction(const GroupModel& m, const Word& head);
// validated eventually-periodic direction
Direction periodic_direction(const GroupModel& m, const Word& head, const Word& period);
// geodesic ray from x through y: (y, shadow_direction(x,y))_x = d(x,y) exactly
Direction shadow_direction(const GroupModel& m, const Word& x, const Word& y);

std::string direction_str(const GroupModel& m, const Direction& v);
Direction direction_parse(const GroupModel& m, const std::string& s);

bool directions_equal(const GroupModel& m, const Direction& v, const Direction& w);
// translate: g . v (boundary action)
Direction act_direction(const GroupModel& m, const Word& g, const Direction& v);

// stabilized Gromov products; exact half-integers on these backends
HalfInt gromov_boundary(const GroupModel& m, const Direction& v, const Word& y, const Word& x);
HalfInt gromov_boundary_pair(const GroupModel& m, const Direction& v, const Direction& w,
                             const Word& x);  // throws DegenerateInputError when v == w

// b_v(x,y) = lim over w -> v of d(x,w) - d(y,w); positive when y is nearer v.
// Exact on both backends (the limit stabilizes at finite depth).
HalfInt busemann(const GroupModel& m, const Direction& v, const Word& x, const Word& y);

// Visual metric rho(v,w) = exp(-epsilon (v,w)_e), an exact ultrametric here
// (delta = 0), so the comparison constant is 1. epsilon is capped at 1; when
// delta > 0 it would also need epsilon <= log2/(4 delta).
struct VisualMetricParams {
  double epsilon = 1.0;
  double comparison = 1.0;
  static VisualMetricParams standard(const GroupModel& m);  // epsilon = 1
  void validate(const GroupModel& m) const;
};

double visual_distance(const GroupModel& m, const VisualMetricParams& params, const Direction& v,
                       const Direction& w);

}  // namespace hyplab
