#include "hyplab/boundary.hpp"

#include <cmath>
#include <cstdlib>

namespace hyplab {

namespace {

// the canonical tail appended after `last` is eventually periodic with a
// short cycle: iterate the smallest-successor map until a letter repeats
void canonical_tail(const GroupModel& m, Word& head, Word* period) {
  std::vector<Letter> seen_at(static_cast<std::size_t>(m.alphabet_size()), -1);
  Word appended;
  Letter last = head.empty() ? -1 : head.back();
  for (;;) {
    Letter next;
    if (last < 0) {
      next = 0;
    } else {
      if (seen_at[static_cast<std::size_t>(last)] >= 0) {
        // cycle found: letters from its first occurrence onward repeat
        const std::size_t start = static_cast<std::size_t>(seen_at[static_cast<std::size_t>(last)]);
        period->assign(appended.begin() + static_cast<std::ptrdiff_t>(start), appended.end());
        head.insert(head.end(), appended.begin(), appended.begin() + static_cast<std::ptrdiff_t>(start));
        return;
      }
      seen_at[static_cast<std::size_t>(last)] = static_cast<Letter>(appended.size());
      next = m.smallest_extension(head.empty() && appended.empty()
                                      ? Word{}
                                      : Word{last});  // successor depends only on the last letter
    }
    appended.push_back(next);
    last = next;
  }
}

void validate_direction(const GroupModel& m, const Direction& d) {
  if (d.period.empty()) throw DegenerateInputError("direction period must be nonempty");
  Word probe = d.head;
  probe.insert(probe.end(), d.period.begin(), d.period.end());
  probe.insert(probe.end(), d.period.begin(), d.period.end());
  if (!m.is_normal_form(probe))
    throw DegenerateInputError("direction letters do not form an infinite normal-form word");
}

}  // namespace

Direction canonical_direction(const GroupModel& m, const Word& head) {
  m.check_word(head);
  Direction d;
  d.head = head;
  canonical_tail(m, d.head, &d.period);
  return d;
}

Direction periodic_direction(const GroupModel& m, const Word& head, const Word& period) {
  Direction d{head, period};
  validate_direction(m, d);
  return d;
}

Direction shadow_direction(const GroupModel& m, const Word& x, const Word& y) {
  m.check_word(x);
  m.check_word(y);
  if (x == y) throw DegenerateInputError("shadow_direction: x and y coincide, no direction singled out");
  // Walk Cayley neighbors w -> w*s (any letter: extension, cancellation, or a
  // sideways syllable replacement inside a factor clique), keeping the
  // smallest s that moves one farther from x. Each step stays on a geodesic
  // ray from x through y, so the Gromov product postcondition is exact.
  Word w = y;
  int dist = m.distance(x, w);
  const int steps = 2 * static_cast<int>(x.size()) + 2;
  for (int t = 0; t < steps; ++t) {
    bool advanced = false;
    for (Letter s = 0; s < m.alphabet_size(); ++s) {
      Word cand = m.multiply(w, Word{s});
      if (m.distance(x, cand) == dist + 1) {
        w = std::move(cand);
        ++dist;
        advanced = true;
        break;
      }
    }
    if (!advanced) throw Error("shadow_direction: no neighbor increases the distance");  // unreachable
  }
  Direction d;
  d.head = std::move(w);
  canonical_tail(m, d.head, &d.period);
  return d;
}

std::string direction_str(const GroupModel& m, const Direction& v) {
  std::string s = m.word_str(v.head);
  s += " (";
  s += m.word_str(v.period);
  s += ")*";
  return s;
}

Direction direction_parse(const GroupModel& m, const std::string& s) {
  // "<head> (<period>)*" or just "<head>" for the canonical direction
  const auto open = s.find(" (");
  if (open == std::string::npos) return canonical_direction(m, m.word_parse(s));
  const auto close = s.find(")*", open);
  if (close == std::string::npos) throw SerializationError("bad direction literal: " + s);
  return periodic_direction(m, m.word_parse(s.substr(0, open)),
                            m.word_parse(s.substr(open + 2, close - open - 2)));
}

bool directions_equal(const GroupModel& m, const Direction& v, const Direction& w) {
  (void)m;
  // eventually periodic sequences agreeing this far agree everywhere
  const std::size_t depth =
      v.head.size() + w.head.size() + v.period.size() * w.period.size() + 2;
  for (std::size_t i = 0; i < depth; ++i)
    if (v.letter_at(i) != w.letter_at(i)) return false;
  return true;
}

Direction act_direction(const GroupModel& m, const Word& g, const Direction& v) {
  m.check_word(g);
  // Deep enough that g's cancellation cannot reach the periodic tail, the
  // translated word keeps v's letters verbatim; re-anchor the period there.
  const int keep = static_cast<int>(g.size() + v.head.size() + 2 * v.period.size()) + 2;
  Direction out;
  out.head = m.multiply(g, v.prefix(keep));
  const std::size_t phase =
      (static_cast<std::size_t>(keep) - v.head.size()) % v.period.size();
  out.period.reserve(v.period.size());
  for (std::size_t i = 0; i < v.period.size(); ++i)
    out.period.push_back(v.period[(phase + i) % v.period.size()]);
  validate_direction(m, out);
  return out;
}

namespace {

// (v_d, y)_x stabilizes once d clears |x|+|y| plus the junction; evaluate at
// two depths of different parity and insist they agree.
HalfInt stabilized_gromov(const GroupModel& m, const Direction& v, const Word& y, const Word& x) {
  const int d0 = static_cast<int>(x.size() + y.size() + v.head.size()) + 4;
  const HalfInt a = m.gromov(v.prefix(d0), y, x);
  const HalfInt b = m.gromov(v.prefix(d0 + 3), y, x);
  if (!(a == b)) throw Error("boundary Gromov product failed to stabilize");
  return a;
}

}  // namespace

HalfInt gromov_boundary(const GroupModel& m, const Direction& v, const Word& y, const Word& x) {
  m.check_word(y);
  m.check_word(x);
  return stabilized_gromov(m, v, y, x);
}

HalfInt gromov_boundary_pair(const GroupModel& m, const Direction& v, const Direction& w,
                             const Word& x) {
  if (directions_equal(m, v, w))
    throw DegenerateInputError("Gromov product of a boundary point with itself is infinite");
  m.check_word(x);
  const int d0 = static_cast<int>(x.size() + v.head.size() + w.head.size() + v.period.size() +
                                  w.period.size()) + 4;
  const HalfInt a = m.gromov(v.prefix(d0), w.prefix(d0), x);
  const HalfInt b = m.gromov(v.prefix(d0 + 3), w.prefix(d0 + 3), x);
  if (!(a == b)) throw Error("boundary Gromov product failed to stabilize");
  return a;
}

HalfInt busemann(const GroupModel& m, const Direction& v, const Word& x, const Word& y) {
  m.check_word(x);
  m.check_word(y);
  const int d0 = static_cast<int>(x.size() + y.size() + v.head.size()) + 4;
  const Word w0 = v.prefix(d0);
  const Word w1 = v.prefix(d0 + 3);
  const int a = m.distance(x, w0) - m.distance(y, w0);
  const int b = m.distance(x, w1) - m.distance(y, w1);
  if (a != b) throw Error("Busemann cocycle failed to stabilize");
  return HalfInt::whole(a);
}

VisualMetricParams VisualMetricParams::standard(const GroupModel& m) {
  (void)m;
  return VisualMetricParams{};
}

void VisualMetricParams::validate(const GroupModel& m) const {
  if (epsilon <= 0.0) throw DegenerateInputError("visual metric parameter must be positive");
  if (epsilon > 1.0) throw DegenerateInputError("visual metric parameter must be at most 1");
  if (comparison < 1.0) throw DegenerateInputError("visual comparison constant must be at least 1");
  const double delta = m.delta();
  if (delta > 0.0 && epsilon > std::log(2.0) / (4.0 * delta))
    throw DegenerateInputError("visual metric parameter too large for the certified delta");
}

double visual_distance(const GroupModel& m, const VisualMetricParams& params, const Direction& v,
                       const Direction& w) {
  params.validate(m);
  if (directions_equal(m, v, w)) return 0.0;
  return std::exp(-params.epsilon * gromov_boundary_pair(m, v, w, Word{}).value());
}

}  // namespace hyplab
