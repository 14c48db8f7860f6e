#include "hyplab/poisson.hpp"

#include <cmath>
#include <cstdio>
#include <utility>

#include "hyplab/detutil.hpp"
#include "hyplab/errors.hpp"

namespace hyplab {

namespace {

StepFunction constant_one(const GroupModel& m) { return StepFunction::constant(m, 1.0); }

bool is_proper_prefix(const Word& p, const Word& w) {
  if (p.size() >= w.size()) return false;
  for (std::size_t i = 0; i < p.size(); ++i)
    if (p[i] != w[i]) return false;
  return true;
}

}  // namespace

Complex kernel_pair(const ConformalDensity& mu, const Element& x, const Element& y,
                    Complex s, const StepFunction& h) {
  const GroupModel& m = mu.model();
  check_same_model(m.key(), x.key, "kernel basepoint");
  check_same_model(m.key(), y.key, "kernel basepoint");
  check_same_model(m.key(), h.key(), "kernel integrand");
  if (x.word.size() + y.word.size() > 800)
    throw CapExceededError("kernel basepoints too deep for exact Busemann evaluation");

  const StepFunction cells = h.refined_along(m, x.word).refined_along(m, y.word);
  KahanSum re, im;
  for (const auto& [cell, value] : cells.leaves()) {
    if (value == Complex{}) continue;
    const double mass = mu.mass(x.word, cell);
    if (mass == 0.0) continue;
    const double b = busemann(m, canonical_direction(m, cell), x.word, y.word).value();
    const Complex w = std::exp(s * b) * value * mass;
    re.add(w.real());
    im.add(w.imag());
  }
  return {re.get(), im.get()};
}

double poisson_kernel_power(const ConformalDensity& mu, const Element& x,
                            const Element& y, const Word& v, double s) {
  const GroupModel& m = mu.model();
  check_same_model(m.key(), x.key, "kernel basepoint");
  check_same_model(m.key(), y.key, "kernel basepoint");
  m.check_word(v);
  if (is_proper_prefix(v, x.word) || is_proper_prefix(v, y.word)) {
    const std::size_t need = std::max(x.word.size(), y.word.size());
    char msg[160];
    std::snprintf(msg, sizeof msg,
                  "kernel is not constant on a depth-%zu cylinder; resolve v to depth %zu",
                  v.size(), need);
    throw ResolutionError(msg);
  }
  if (mu.kind() == DensityKind::Exact) {
    const double b = busemann(m, canonical_direction(m, v), x.word, y.word).value();
    return std::exp(s * b);
  }
  const double num = mu.mass(y.word, v);
  const double den = mu.mass(x.word, v);
  if (num <= 0.0 || den <= 0.0)
    throw DegenerateInputError("cylinder carries no mass; kernel ratio undefined");
  return std::exp((s / mu.dimension()) * (std::log(num) - std::log(den)));
}

Complex p_lambda_transform(const ConformalDensity& mu, const StepFunction& f,
                           const Element& y, double lambda) {
  const double s = mu.dimension() * (lambda + 0.5);
  return kernel_pair(mu, Element{mu.key(), {}}, y, Complex{s, 0.0}, f);
}

double harish_chandra(const ConformalDensity& mu, const Element& y) {
  return p_lambda_transform(mu, constant_one(mu.model()), y, 0.0).real();
}

double harish_chandra_radial(const ConformalDensity& mu, int n) {
  const GroupModel& m = mu.model();
  const Word w = canonical_direction(m, Word{}).prefix(n);
  return harish_chandra(mu, Element{m.key(), w});
}

Complex normalized_poisson(const ConformalDensity& mu, const StepFunction& f,
                           const Element& y) {
  return p_lambda_transform(mu, f, y, 0.0) / harish_chandra(mu, y);
}

namespace {

// Sphere representatives covering every phi value pattern: one canonical ray,
// plus the opposite-factor ray on free products (phi is not radial there).
std::vector<Word> phi_representatives(const GroupModel& m, int n) {
  std::vector<Word> reps;
  reps.push_back(canonical_direction(m, Word{}).prefix(n));
  if (m.key().backend == Backend::CyclicFreeProduct && n >= 1) {
    Word head{static_cast<Letter>(m.key().a - 1)};
    reps.push_back(canonical_direction(m, head).prefix(n));
  }
  return reps;
}

}  // namespace

HCEstimateFit fit_harish_chandra_estimates(const ConformalDensity& mu,
                                           int exterior_radius, int max_radius) {
  if (exterior_radius < 1) throw DegenerateInputError("exterior radius must be at least 1");
  if (max_radius <= exterior_radius)
    throw DegenerateInputError("max radius must exceed the exterior radius");
  const GroupModel& m = mu.model();
  const double half = mu.dimension() / 2.0;

  HCEstimateFit fit;
  fit.exterior_radius = exterior_radius;
  fit.max_radius = max_radius;

  std::vector<int> ns;
  std::vector<double> lo, hi, canon;
  for (int n = exterior_radius; n <= max_radius; ++n) {
    double rlo = 0.0, rhi = 0.0, rcanon = 0.0;
    bool first = true;
    for (const Word& w : phi_representatives(m, n)) {
      const double r = harish_chandra(mu, Element{m.key(), w}) * std::exp(half * n);
      if (first) rcanon = r;
      rlo = first ? r : std::min(rlo, r);
      rhi = first ? r : std::max(rhi, r);
      first = false;
      ++fit.witness_count;
    }
    ns.push_back(n);
    lo.push_back(rlo);
    hi.push_back(rhi);
    canon.push_back(rcanon);
  }

  // Tightest chords; fall back to a shallow positive slope when the data is
  // not monotone (a positive-coefficient envelope always exists on a finite
  // window of positive values).
  double c2 = 0.0;
  for (std::size_t i = 0; i < ns.size(); ++i)
    for (std::size_t j = i + 1; j < ns.size(); ++j)
      c2 = std::max(c2, (hi[j] - hi[i]) / (ns[j] - ns[i]));
  double c1 = lo.size() > 1 ? (lo[1] - lo[0]) / (ns[1] - ns[0]) : 0.0;
  for (std::size_t i = 0; i < ns.size(); ++i)
    for (std::size_t j = i + 1; j < ns.size(); ++j)
      c1 = std::min(c1, (lo[j] - lo[i]) / (ns[j] - ns[i]));
  double lo_min = lo[0];
  for (double r : lo) lo_min = std::min(lo_min, r);
  if (c1 <= 0.0) c1 = lo_min / (2.0 * max_radius);
  if (c2 <= 0.0) c2 = c1;

  double b1 = lo[0] - c1 * ns[0], b2 = hi[0] - c2 * ns[0];
  for (std::size_t i = 0; i < ns.size(); ++i) {
    b1 = std::min(b1, lo[i] - c1 * ns[i]);
    b2 = std::max(b2, hi[i] - c2 * ns[i]);
  }

  if (!(c1 > 0.0) || !(b1 > 0.0) || !(c2 > 0.0) || !(b2 > 0.0))
    throw EstimateInfeasibleError(
        "no positive-coefficient linear envelope fits the sphere values");
  fit.c1 = c1;
  fit.b1 = b1;
  fit.c2 = c2;
  fit.b2 = b2;

  for (std::size_t i = 0; i < ns.size(); ++i) {
    HCEstimateFit::Row row;
    row.n = ns[i];
    const double damp = std::exp(-half * ns[i]);
    row.phi = canon[i] * damp;
    row.q1_bound = fit.q1(ns[i]) * damp;
    row.q2_bound = fit.q2(ns[i]) * damp;
    row.ratio_lower = row.q1_bound / row.phi;
    row.ratio_upper = row.q2_bound / row.phi;
    fit.rows.push_back(row);
  }
  for (const auto& row : fit.rows)
    if (row.ratio_lower > 1.0 + 1e-12 || row.ratio_upper < 1.0 - 1e-12)
      throw EstimateInfeasibleError("fitted envelope fails to bracket a witness");
  return fit;
}

DiracWeierstrassReport certify_dirac_weierstrass(const ConformalDensity& mu,
                                                 const Word& v0, double r,
                                                 const std::vector<Word>& ys,
                                                 const VisualMetricParams& params,
                                                 double threshold) {
  const GroupModel& m = mu.model();
  m.check_word(v0);
  params.validate(m);
  if (v0.empty()) throw DegenerateInputError("ball center needs a nonempty cylinder");
  if (!(r > 0.0)) throw DegenerateInputError("visual radius must be positive");
  if (ys.empty()) throw DegenerateInputError("approach sequence is empty");

  const Direction center = canonical_direction(m, v0);
  for (const Word& y : ys) {
    m.check_word(y);
    if (!center.starts_with(y))
      throw UnsupportedApproachError("approach point " + m.word_str(y) +
                                     " is not on the ray through " + m.word_str(v0));
  }

  // Cells at least this deep pin the visual distance to the center: a cell on
  // the ray at depth D lies inside the ball, and off-ray cells have constant
  // distance exp(-eps * (center, cell)).
  const double theta = -std::log(r) / params.epsilon;
  const int depth = std::max(0, static_cast<int>(std::ceil(theta))) + 2;
  const StepFunction split = constant_one(m).refined_along(m, center.prefix(depth));
  std::vector<StepFunction::Leaf> tail_leaves = split.leaves();
  std::vector<StepFunction::Leaf> ball_leaves = split.leaves();
  for (std::size_t i = 0; i < tail_leaves.size(); ++i) {
    const Word& cell = tail_leaves[i].first;
    bool in_ball;
    if (center.starts_with(cell)) {
      in_ball = true;  // sup distance exp(-eps*depth) <= r by the choice of depth
    } else {
      const double g = gromov_boundary(m, center, cell, Word{}).value();
      in_ball = std::exp(-params.epsilon * g) <= r;
    }
    tail_leaves[i].second = in_ball ? Complex{} : Complex{1.0, 0.0};
    ball_leaves[i].second = in_ball ? Complex{1.0, 0.0} : Complex{};
  }
  const StepFunction tail_ind(m, std::move(tail_leaves), split.resolution());
  const StepFunction ball_ind(m, std::move(ball_leaves), split.resolution());

  DiracWeierstrassReport report;
  report.radius = r;
  report.threshold = threshold;
  report.all_unit = true;
  report.monotone = true;

  const Element e{m.key(), {}};
  int j = 0;
  for (const Word& y : ys) {
    ++j;
    const Element ye{m.key(), y};
    const double phi = harish_chandra(mu, ye);
    const double tail =
        kernel_pair(mu, e, ye, Complex{mu.dimension() / 2.0, 0.0}, tail_ind).real() / phi;
    const double in =
        kernel_pair(mu, e, ye, Complex{mu.dimension() / 2.0, 0.0}, ball_ind).real() / phi;
    DiracWeierstrassReport::Row row;
    row.j = j;
    row.y = y;
    row.tail = tail;
    row.inside = in;
    row.unit_ok = std::abs(tail + in - 1.0) <= 1e-12 && tail >= -1e-15 && in >= -1e-15;
    if (!row.unit_ok) report.all_unit = false;
    if (report.rows.size() >= 1 && tail > report.rows.back().tail + 1e-15)
      report.monotone = false;
    report.rows.push_back(std::move(row));
  }
  report.below_threshold = report.rows.back().tail <= threshold;
  report.certified = report.all_unit && report.monotone && report.below_threshold;
  return report;
}

}  // namespace hyplab
