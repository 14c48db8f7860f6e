#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <functional>
#include <vector>

#include "hyplab/boundary.hpp"
#include "hyplab/boundary_rep.hpp"
#include "hyplab/density.hpp"
#include "hyplab/detutil.hpp"
#include "hyplab/errors.hpp"
#include "hyplab/fatou.hpp"
#include "hyplab/group.hpp"
#include "hyplab/poisson.hpp"
#include "hyplab/step_function.hpp"

using namespace hyplab;

namespace {

Word random_word(const GroupModel& m, DetRng& rng, int len) {
  Word w;
  while (static_cast<int>(w.size()) < len) {
    const Letter s = static_cast<Letter>(rng.next_below(static_cast<std::uint64_t>(m.alphabet_size())));
    if (w.empty() || m.can_follow(w.back(), s)) w.push_back(s);
  }
  return w;
}

ApproachDomain domain_at(const GroupModel& m, const Direction& v, double aperture,
                         double exterior = 0.0) {
  ApproachDomain dom;
  dom.target = v;
  dom.aperture = aperture;
  dom.params = VisualMetricParams::standard(m);
  dom.exterior_radius = exterior;
  return dom;
}

Word ray_word(int n) { return Word(static_cast<std::size_t>(n), 0); }  // a^n

}  // namespace

TEST_CASE("approach domains contain the ray and exclude transverse spokes") {
  const GroupModel f = GroupModel::free_group(2);
  const Direction va = canonical_direction(f, f.word_parse("a"));
  const ApproachDomain dom = domain_at(f, va, 1.0);

  for (int n = 1; n <= 12; ++n) CHECK(in_domain(f, dom, ray_word(n)));
  for (int n = 1; n <= 12; ++n) {
    Word bn(static_cast<std::size_t>(n), 2);  // b^n
    CHECK(!in_domain(f, dom, bn));
  }
  // unit distance with a huge aperture is always admissible
  const ApproachDomain wide = domain_at(f, va, 100.0);
  for (const char* y : {"a", "A", "b", "B"}) CHECK(in_domain(f, wide, f.word_parse(y)));

  CHECK_THROWS_AS(in_domain(f, dom, Word{}), DegenerateInputError);

  // prefixes of an arbitrary target stay inside at aperture 1 (radial containment)
  DetRng rng(21);
  for (int trial = 0; trial < 12; ++trial) {
    const Direction v = canonical_direction(f, random_word(f, rng, 3));
    const ApproachDomain d2 = domain_at(f, v, 1.0);
    for (int n = 1; n <= 8; ++n) CHECK(in_domain(f, d2, v.prefix(n)));
  }
  const GroupModel z = GroupModel::parse("zfp:2,3");
  for (int trial = 0; trial < 6; ++trial) {
    const Direction v = canonical_direction(z, random_word(z, rng, 2));
    const ApproachDomain d3 = domain_at(z, v, 1.0);
    for (int n = 1; n <= 6; ++n) CHECK(in_domain(z, d3, v.prefix(n)));
  }
}

TEST_CASE("domain member enumeration agrees with a brute-force sphere scan") {
  const GroupModel f = GroupModel::free_group(2);
  DetRng rng(33);
  for (int trial = 0; trial < 6; ++trial) {
    const Direction v = canonical_direction(f, random_word(f, rng, 2));
    const double aperture = trial % 2 == 0 ? 1.0 : 2.5;
    const ApproachDomain dom = domain_at(f, v, aperture);
    for (int n = 1; n <= 6; ++n) {
      const std::vector<Word> fast = domain_members(f, dom, n);
      std::vector<Word> slow;
      std::function<void(Word&)> scan = [&](Word& w) {
        if (static_cast<int>(w.size()) == n) {
          if (in_domain(f, dom, w)) slow.push_back(w);
          return;
        }
        for (Letter s = 0; s < f.alphabet_size(); ++s) {
          if (!w.empty() && !f.can_follow(w.back(), s)) continue;
          w.push_back(s);
          scan(w);
          w.pop_back();
        }
      };
      Word scratch;
      scan(scratch);
      CHECK(fast == slow);
    }
  }
}

TEST_CASE("maximal function: constants, indicators, and point masses") {
  const GroupModel f = GroupModel::free_group(2);
  const ConformalDensity mu = ConformalDensity::exact(f);
  const Direction va = canonical_direction(f, f.word_parse("a"));
  const Direction vb = canonical_direction(f, f.word_parse("b"));

  const BoundaryMeasure one = BoundaryMeasure::density(StepFunction::constant(f, 1.0));
  CHECK(std::abs(maximal_function(mu, one, va, 6) - 1.0) <= 1e-12);
  CHECK(std::abs(maximal_function(mu, one, vb, 6) - 1.0) <= 1e-12);

  const BoundaryMeasure ind = BoundaryMeasure::density(StepFunction::indicator(f, f.word_parse("a"), 1.0));
  CHECK(std::abs(maximal_function(mu, ind, va, 6) - 1.0) <= 1e-12);
  CHECK(std::abs(maximal_function(mu, ind, vb, 6) - 0.25) <= 1e-12);

  const BoundaryMeasure delta = BoundaryMeasure::point_mass(va, 1.0);
  // deepest ancestor dominates: 1 / mu(cyl a^M) = 4 * 3^(M-1)
  for (int M : {2, 4, 6})
    CHECK(std::abs(maximal_function(mu, delta, va, M) - 4.0 * std::pow(3.0, M - 1)) <=
          1e-9 * std::pow(3.0, M));
  CHECK(std::abs(maximal_function(mu, delta, vb, 6) - 1.0) <= 1e-12);  // only the global average

  CHECK_THROWS_AS(maximal_function(mu, one, va, -1), DegenerateInputError);
  const ConformalDensity nu = ConformalDensity::orbit(f, std::log(3.0) + 0.05, 16, 3);
  CHECK_THROWS_AS(maximal_function(nu, one, va, 6), ResolutionError);
}

TEST_CASE("weak (1,1) covering bound certifies on structured and random inputs") {
  const GroupModel f = GroupModel::free_group(2);
  const ConformalDensity mu = ConformalDensity::exact(f);
  const VisualMetricParams params = VisualMetricParams::standard(f);

  std::vector<BoundaryMeasure> inputs;
  inputs.push_back(BoundaryMeasure::density(StepFunction::constant(f, 1.0)));
  inputs.push_back(BoundaryMeasure::density(StepFunction::indicator(f, f.word_parse("a"), 1.0)));
  inputs.push_back(BoundaryMeasure::point_mass(canonical_direction(f, f.word_parse("ab")), 1.0));
  DetRng rng(66);
  for (int i = 0; i < 12; ++i) {
    StepFunction g = StepFunction::constant(f, 0.2 * rng.next_unit());
    for (int piece = 0; piece < 3; ++piece)
      g = operator_add(f, g,
                       StepFunction::indicator(f, random_word(f, rng, 1 + static_cast<int>(rng.next_below(6))),
                                               3.0 * rng.next_unit()));
    inputs.push_back(BoundaryMeasure::density(g));
  }

  const std::vector<double> levels = {0.05, 0.1, 0.2, 0.4, 0.7, 1.0, 1.5, 2.5, 4.0, 8.0};
  const MaximalReport report = check_weak_11(mu, inputs, levels, 6, params);
  CHECK(report.all_covering_ok);
  CHECK(report.all_nested_ok);
  CHECK(report.rows.size() == inputs.size() * levels.size());
  CHECK(std::abs(report.dimension_d - f.alpha()) <= 1e-15);

  // superlevel masses are non-increasing along the grid for each input
  for (std::size_t i = 0; i < inputs.size(); ++i)
    for (std::size_t t = 1; t < levels.size(); ++t) {
      const auto& prev = report.rows[i * levels.size() + t - 1];
      const auto& cur = report.rows[i * levels.size() + t];
      CHECK(cur.superlevel_mass <= prev.superlevel_mass + 1e-15);
    }

  // identity density: nothing exceeds level 1 by more than float noise
  const auto& id_row = report.rows[0 * levels.size() + 7];  // level 2.5
  CHECK(id_row.superlevel_mass == 0.0);

  // the worked indicator example at level 1/2
  const MaximalReport half = check_weak_11(
      mu, {BoundaryMeasure::density(StepFunction::indicator(f, f.word_parse("a"), 1.0))}, {0.5}, 6,
      params);
  CHECK(std::abs(half.rows[0].superlevel_mass - 0.25) <= 1e-12);
  CHECK(half.rows[0].nested_bound == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("nontangential maximal sup is controlled by the maximal function") {
  const GroupModel f = GroupModel::free_group(2);
  const ConformalDensity mu = ConformalDensity::exact(f);
  const Direction va = canonical_direction(f, f.word_parse("a"));
  const Direction vb = canonical_direction(f, f.word_parse("b"));
  const StepFunction one = StepFunction::constant(f, 1.0);
  const StepFunction ind_a = StepFunction::indicator(f, f.word_parse("a"), 1.0);

  const NontangentialReport unit = nontangential_maximal(mu, one, domain_at(f, va, 1.0, 1.0), 8, 8);
  CHECK(!unit.empty);
  CHECK(std::abs(unit.sup_value - 1.0) <= 1e-12);
  CHECK(std::abs(unit.maximal_value - 1.0) <= 1e-12);
  CHECK(std::abs(unit.ratio - 1.0) <= 1e-12);

  const NontangentialReport on = nontangential_maximal(mu, ind_a, domain_at(f, va, 1.0, 1.0), 10, 10);
  CHECK(!on.empty);
  CHECK(on.sup_value <= on.maximal_value + 1e-12);  // measured constant <= 1 here
  CHECK(on.maximal_value == doctest::Approx(1.0).epsilon(1e-12));

  const NontangentialReport off = nontangential_maximal(mu, ind_a, domain_at(f, vb, 1.0, 1.0), 10, 10);
  CHECK(!off.empty);
  CHECK(off.maximal_value == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(off.sup_value <= 4.0 * off.maximal_value);  // finite measured constant

  // deepening the search raises the sup toward the boundary value, never past it
  const NontangentialReport n8 = nontangential_maximal(mu, ind_a, domain_at(f, va, 1.0, 1.0), 8, 8);
  const NontangentialReport n12 = nontangential_maximal(mu, ind_a, domain_at(f, va, 1.0, 1.0), 12, 12);
  CHECK(n12.sup_value >= n8.sup_value - 1e-12);
  CHECK(n12.sup_value <= n12.maximal_value + 1e-12);

  // a tight aperture around a genuinely periodic target has no shallow members
  const Direction vab = periodic_direction(f, f.word_parse("ab"), f.word_parse("ab"));
  const NontangentialReport none = nontangential_maximal(mu, ind_a, domain_at(f, vab, 0.01), 3, 3);
  CHECK(none.empty);
  CHECK(none.sup_value == 0.0);
  CHECK(none.ratio == 0.0);

  CHECK_THROWS_AS(nontangential_maximal(mu, ind_a, domain_at(f, va, 1.0, 5.0), 3, 3),
                  DegenerateInputError);
}

TEST_CASE("normalized transform converges along the approach domain") {
  const GroupModel f = GroupModel::free_group(2);
  const ConformalDensity mu = ConformalDensity::exact(f);
  const Direction va = canonical_direction(f, f.word_parse("a"));
  const Direction vb = canonical_direction(f, f.word_parse("b"));

  // constants: the trace is identically zero
  const FatouTrace flat =
      fatou_experiment(mu, StepFunction::constant(f, 1.0), va, 1.0, 1, 10);
  for (const auto& row : flat.rows) CHECK(row.error == 0.0);
  CHECK(flat.decayed);

  // indicator seen from inside its own cylinder: limit 1, error 3/(2n+4) on the ray
  const StepFunction ind_a = StepFunction::indicator(f, f.word_parse("a"), 1.0);
  const FatouTrace in = fatou_experiment(mu, ind_a, va, 1.0, 1, 20);
  CHECK(in.target_value == 1.0);
  for (const auto& env : in.envelope) CHECK(env.members >= 1);
  for (std::size_t i = 1; i < in.envelope.size(); ++i)
    CHECK(in.envelope[i].max_error <= in.envelope[i - 1].max_error * 1.05 + 1e-12);
  CHECK(in.final_error < 0.12);
  CHECK(in.final_error > 1e-3);  // polynomial decay: still above tolerance at n = 20
  CHECK(!in.decayed);
  // the pure ray member at each depth matches the closed-form error
  for (const auto& row : in.rows)
    if (row.y == ray_word(row.n))
      CHECK(std::abs(row.error - 3.0 / (2.0 * row.n + 4.0)) <= 1e-12);

  // indicator seen from a disjoint cylinder: limit 0
  const FatouTrace out = fatou_experiment(mu, ind_a, vb, 1.0, 1, 20);
  CHECK(out.target_value == 0.0);
  CHECK(out.final_error < out.envelope.front().max_error);
  CHECK(out.final_error < 0.05);
}

TEST_CASE("unbounded family: construction, norm, and growth probe") {
  const GroupModel f = GroupModel::free_group(2);
  const ConformalDensity mu = ConformalDensity::exact(f);

  const int M = 20;
  const StepFunction xi = structured_counterexample(f, M);
  // values on the annular shells and zero past the truncation
  CHECK(std::abs(xi.value_on_cylinder(f.word_parse("b")) - Complex{1.0, 0.0}) <= 1e-15);
  CHECK(std::abs(xi.value_on_cylinder(f.word_parse("ab")) - Complex{std::sqrt(3.0) / 2.0, 0.0}) <=
        1e-14);
  CHECK(xi.value_on_cylinder(ray_word(M + 1)) == Complex{});
  CHECK(std::abs(xi.sup_norm() - std::pow(3.0, M / 2.0) / (1.0 + M)) <= 1e-9);

  double want = 0.75;  // shell masses: 3/4 at depth 0, then (1/2) 3^{-j}
  for (int j = 1; j <= M; ++j) want += 0.5 * std::pow(3.0, -j) * std::pow(3.0, j) / ((1.0 + j) * (1.0 + j));
  const double norm = l2_norm(mu, xi);
  CHECK(std::abs(norm * norm - want) <= 1e-12);

  const auto family = [&f](int level) { return structured_counterexample(f, level); };
  const CounterexampleTrace trace = fatou_counterexample_probe(mu, family, M);
  CHECK(!trace.inconclusive);
  CHECK(trace.rows.size() == static_cast<std::size_t>(M + 1));
  const double r5 = trace.rows[5].value;
  const double r20 = trace.rows[20].value;
  CHECK(r20 > 2.0 * r5);
  CHECK(r20 > 2.0);
  for (int n = 5; n < M; ++n)
    CHECK(trace.rows[n + 1].value >= trace.rows[n].value - 1e-12);

  // bounded inputs cannot witness growth
  const auto flat_family = [&f](int) { return StepFunction::constant(f, 1.0); };
  const CounterexampleTrace flat = fatou_counterexample_probe(mu, flat_family, 10);
  CHECK(flat.inconclusive);
  for (const auto& row : flat.rows) CHECK(std::abs(row.value - 1.0) <= 1e-12);

  DetRng rng(7);
  StepFunction bounded = StepFunction::constant(f, 0.3);
  for (int piece = 0; piece < 3; ++piece)
    bounded = operator_add(f, bounded,
                           StepFunction::indicator(f, random_word(f, rng, 2), rng.next_unit()));
  const auto bounded_family = [&bounded](int) { return bounded; };
  const CounterexampleTrace cap = fatou_counterexample_probe(mu, bounded_family, 10);
  CHECK(cap.inconclusive);
  for (const auto& row : cap.rows) CHECK(row.value <= bounded.sup_norm() + 1e-12);
}
