#include "hyplab/fatou.hpp"

#include <algorithm>
#include <cmath>

#include "hyplab/detutil.hpp"
#include "hyplab/errors.hpp"
#include "hyplab/poisson.hpp"

namespace hyplab {

namespace {

bool word_is_prefix(const Word& p, const Word& w) {
  return p.size() <= w.size() && std::equal(p.begin(), p.end(), w.begin());
}

}  // namespace

void ApproachDomain::validate(const GroupModel& m) const {
  params.validate(m);
  m.check_word(basepoint);
  if (!(aperture > 0.0)) throw DegenerateInputError("approach aperture must be positive");
  if (exterior_radius < 0.0)
    throw DegenerateInputError("exterior radius must be non-negative");
}

bool in_domain(const GroupModel& m, const ApproachDomain& dom, const Word& y) {
  dom.validate(m);
  m.check_word(y);
  if (y == dom.basepoint)
    throw DegenerateInputError("domain membership is undefined at the basepoint itself");
  const double d = static_cast<double>(m.distance(dom.basepoint, y));
  const Direction w = shadow_direction(m, dom.basepoint, y);
  if (directions_equal(m, w, dom.target)) return true;  // on the ray: distance zero
  const double p = gromov_boundary_pair(m, w, dom.target, dom.basepoint).value();
  // log form of  e^{-eps p} <= C d^{eps/alpha} e^{-eps d}
  const double eps = dom.params.epsilon;
  return eps * (d - p) <= std::log(dom.aperture) + (eps / m.alpha()) * std::log(d);
}

std::vector<Word> domain_members(const GroupModel& m, const ApproachDomain& dom, int distance,
                                 double cap) {
  dom.validate(m);
  if (distance < 1) throw DegenerateInputError("domain members live at distance at least 1");

  // Work in basepoint coordinates: y = x*u with |u| = distance; the ray from x
  // through y is the canonical ray through u, so the membership inequality
  // forces u to follow the (translated) target for all but O(log) letters.
  const Direction local = dom.basepoint.empty()
                              ? dom.target
                              : act_direction(m, m.inverse(dom.basepoint), dom.target);
  const double eps = dom.params.epsilon;
  const double needed = distance - std::log(dom.aperture) / eps -
                        std::log(static_cast<double>(distance)) / m.alpha();
  const int j_lo = std::max(0, std::min(distance, static_cast<int>(std::floor(needed)) - 1));

  std::vector<Word> members;
  double candidates = 0.0;
  for (int j = j_lo; j <= distance; ++j) {
    Word stem = local.prefix(j);
    const Letter avoid = j < distance ? local.letter_at(static_cast<std::size_t>(j))
                                      : static_cast<Letter>(m.alphabet_size());
    // extend stem to length `distance`, first letter != avoid so each u is
    // enumerated once with its exact agreement depth
    std::function<void(Word&)> grow = [&](Word& u) {
      if (static_cast<int>(u.size()) == distance) {
        if (++candidates > cap) throw CapExceededError("approach domain candidate set too large");
        const Word y = m.multiply(dom.basepoint, u);
        if (in_domain(m, dom, y)) members.push_back(y);
        return;
      }
      for (Letter s = 0; s < m.alphabet_size(); ++s) {
        if (static_cast<int>(u.size()) == j && s == avoid) continue;
        if (!u.empty() && !m.can_follow(u.back(), s)) continue;
        u.push_back(s);
        grow(u);
        u.pop_back();
      }
    };
    grow(stem);
  }
  std::sort(members.begin(), members.end());
  return members;
}

BoundaryMeasure BoundaryMeasure::density(const StepFunction& f) {
  BoundaryMeasure nu;
  nu.point_ = false;
  nu.f_ = f.map([](Complex v) { return Complex{std::abs(v), 0.0}; });
  return nu;
}

BoundaryMeasure BoundaryMeasure::point_mass(const Direction& at, double weight) {
  if (!(weight >= 0.0)) throw DegenerateInputError("point mass weight must be non-negative");
  BoundaryMeasure nu;
  nu.point_ = true;
  nu.at_ = at;
  nu.weight_ = weight;
  return nu;
}

double BoundaryMeasure::total(const ConformalDensity& mu, const Word& basepoint) const {
  return mass_on(mu, Word{}, basepoint);
}

double BoundaryMeasure::mass_on(const ConformalDensity& mu, const Word& cyl,
                                const Word& basepoint) const {
  if (point_) return at_.starts_with(cyl) ? weight_ : 0.0;
  const StepFunction split = f_.refined_along(mu.model(), cyl);
  KahanSum sum;
  for (const auto& [cell, value] : split.leaves()) {
    if (!word_is_prefix(cyl, cell)) continue;
    if (value == Complex{}) continue;
    sum.add(value.real() * mu.mass(basepoint, cell));
  }
  return sum.get();
}

double maximal_function(const ConformalDensity& mu, const BoundaryMeasure& nu, const Direction& v,
                        int depth, const Word& basepoint) {
  if (depth < 0) throw DegenerateInputError("maximal function needs a non-negative depth");
  if (depth > mu.resolution())
    throw ResolutionError("maximal function depth exceeds the density resolution");
  double best = nu.total(mu, basepoint);  // whole-space average, mu_x(everything) = 1
  for (int j = 1; j <= depth; ++j) {
    const Word cyl = v.prefix(j);
    const double den = mu.mass(basepoint, cyl);
    if (den <= 0.0) continue;
    best = std::max(best, nu.mass_on(mu, cyl, basepoint) / den);
  }
  return best;
}

MaximalReport check_weak_11(const ConformalDensity& mu, const std::vector<BoundaryMeasure>& inputs,
                            const std::vector<double>& levels, int depth,
                            const VisualMetricParams& params) {
  const GroupModel& m = mu.model();
  params.validate(m);
  if (depth < 1) throw DegenerateInputError("superlevel scan needs depth at least 1");
  for (double t : levels)
    if (!(t > 0.0)) throw DegenerateInputError("superlevel grid must be positive");

  MaximalReport report;
  report.depth = depth;
  report.dimension_d = mu.dimension() / params.epsilon;
  const double factor = std::pow(3.0, report.dimension_d);

  // atoms in lexicographic order; the maximal function is constant on each
  std::vector<Word> atoms;
  std::function<void(Word&)> build = [&](Word& w) {
    if (static_cast<int>(w.size()) == depth) {
      atoms.push_back(w);
      return;
    }
    for (Letter s = 0; s < m.alphabet_size(); ++s) {
      if (!w.empty() && !m.can_follow(w.back(), s)) continue;
      w.push_back(s);
      build(w);
      w.pop_back();
    }
  };
  Word scratch;
  build(scratch);

  report.all_covering_ok = true;
  report.all_nested_ok = true;
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    const BoundaryMeasure& nu = inputs[i];
    const double norm = nu.total(mu);
    std::vector<double> field(atoms.size());
    for (std::size_t a = 0; a < atoms.size(); ++a)
      field[a] = maximal_function(mu, nu, canonical_direction(m, atoms[a]), depth);
    for (double t : levels) {
      KahanSum superlevel;
      for (std::size_t a = 0; a < atoms.size(); ++a)
        if (field[a] > t) superlevel.add(mu.mass_e(atoms[a]));
      MaximalReport::Row row;
      row.input = static_cast<int>(i);
      row.level = t;
      row.superlevel_mass = superlevel.get();
      row.covering_bound = factor * norm / t;
      row.nested_bound = norm / t;
      row.covering_ok = row.superlevel_mass <= row.covering_bound * (1.0 + 1e-12);
      row.nested_ok = row.superlevel_mass <= row.nested_bound * (1.0 + 1e-12);
      report.all_covering_ok = report.all_covering_ok && row.covering_ok;
      report.all_nested_ok = report.all_nested_ok && row.nested_ok;
      report.rows.push_back(row);
    }
  }
  return report;
}

NontangentialReport nontangential_maximal(const ConformalDensity& mu, const StepFunction& f,
                                          const ApproachDomain& dom, int search_radius,
                                          int maximal_depth) {
  const GroupModel& m = mu.model();
  dom.validate(m);
  if (search_radius < dom.exterior_radius)
    throw DegenerateInputError("search radius must reach past the exterior radius");

  NontangentialReport report;
  for (int n = 1; n <= search_radius; ++n) {
    if (static_cast<double>(n) <= dom.exterior_radius) continue;
    for (const Word& y : domain_members(m, dom, n)) {
      const double value = std::abs(normalized_poisson(mu, f, Element{m.key(), y}));
      report.sup_value = std::max(report.sup_value, value);
      ++report.member_count;
    }
  }
  report.empty = report.member_count == 0;
  report.maximal_value =
      maximal_function(mu, BoundaryMeasure::density(f), dom.target, maximal_depth, dom.basepoint);
  if (!report.empty && report.maximal_value > 0.0)
    report.ratio = report.sup_value / report.maximal_value;
  return report;
}

FatouTrace fatou_experiment(const ConformalDensity& mu, const StepFunction& f,
                            const Direction& target, double aperture, int n_lo, int n_hi,
                            double tolerance) {
  const GroupModel& m = mu.model();
  if (n_lo < 1 || n_hi < n_lo) throw DegenerateInputError("distance window is empty");
  ApproachDomain dom;
  dom.target = target;
  dom.aperture = aperture;
  dom.params = VisualMetricParams::standard(m);

  FatouTrace trace;
  trace.tolerance = tolerance;
  const Complex fv = f.value_at(target);
  trace.target_value = fv.real();
  for (int n = n_lo; n <= n_hi; ++n) {
    FatouTrace::Envelope env;
    env.n = n;
    for (const Word& y : domain_members(m, dom, n)) {
      const Complex value = normalized_poisson(mu, f, Element{m.key(), y});
      FatouTrace::Row row;
      row.n = n;
      row.y = y;
      row.value = value.real();
      row.error = std::abs(value - fv);
      env.max_error = std::max(env.max_error, row.error);
      ++env.members;
      trace.rows.push_back(std::move(row));
    }
    trace.envelope.push_back(env);
  }
  for (auto it = trace.envelope.rbegin(); it != trace.envelope.rend(); ++it)
    if (it->members > 0) {
      trace.final_error = it->max_error;
      break;
    }
  trace.decayed = trace.final_error <= tolerance;
  return trace;
}

StepFunction structured_counterexample(const GroupModel& m, int truncation) {
  if (truncation < 0) throw DegenerateInputError("truncation level must be non-negative");
  const Direction ray = canonical_direction(m, Word{});
  const double half = m.alpha() / 2.0;

  // preorder leaves: at depth j the ray cell's siblings carry c_j, the cell
  // one past the truncation carries 0
  std::vector<StepFunction::Leaf> leaves;
  Word prefix;
  std::function<void(int)> descend = [&](int j) {
    const Letter next = ray.letter_at(static_cast<std::size_t>(j));
    const double c = std::exp(half * j) / (1.0 + j);
    for (Letter s = 0; s < m.alphabet_size(); ++s) {
      if (!prefix.empty() && !m.can_follow(prefix.back(), s)) continue;
      prefix.push_back(s);
      if (s == next) {
        if (j == truncation)
          leaves.emplace_back(prefix, Complex{});
        else
          descend(j + 1);
      } else {
        leaves.emplace_back(prefix, Complex{c, 0.0});
      }
      prefix.pop_back();
    }
  };
  descend(0);
  return StepFunction(m, std::move(leaves), truncation + 1);
}

CounterexampleTrace fatou_counterexample_probe(const ConformalDensity& mu,
                                               const std::function<StepFunction(int)>& family,
                                               int max_n) {
  if (max_n < 1) throw DegenerateInputError("probe needs at least one step");
  const GroupModel& m = mu.model();
  const Direction ray = canonical_direction(m, Word{});
  const StepFunction deep = family(max_n);
  const StepFunction half = family(std::max(1, max_n / 2));

  CounterexampleTrace trace;
  trace.inconclusive = deep.sup_norm() <= half.sup_norm() * 1.1;
  for (int n = 0; n <= max_n; ++n) {
    CounterexampleTrace::Row row;
    row.n = n;
    row.truncation = max_n;
    row.value = normalized_poisson(mu, deep, Element{m.key(), ray.prefix(n)}).real();
    trace.rows.push_back(row);
  }
  return trace;
}

}  // namespace hyplab
