#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <vector>

#include "hyplab/boundary_rep.hpp"
#include "hyplab/decay.hpp"
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
    const Letter s =
        static_cast<Letter>(rng.next_below(static_cast<std::uint64_t>(m.alphabet_size())));
    if (w.empty() || m.can_follow(w.back(), s)) w.push_back(s);
  }
  return w;
}

StepFunction random_function(const GroupModel& m, DetRng& rng, int depth, bool nonneg) {
  StepFunction f = StepFunction::constant(
      m,
      nonneg ? Complex{rng.next_unit(), 0.0} : Complex{rng.next_unit() - 0.5, rng.next_unit() - 0.5});
  for (int piece = 0; piece < 3; ++piece) {
    const int d = 1 + static_cast<int>(rng.next_below(static_cast<std::uint64_t>(depth)));
    const Complex v = nonneg ? Complex{2.0 * rng.next_unit(), 0.0}
                             : Complex{2.0 * rng.next_unit() - 1.0, rng.next_unit() - 0.5};
    f = operator_add(m, f, StepFunction::indicator(m, random_word(m, rng, d), v));
  }
  return f;
}

StepFunction unit_l2(const ConformalDensity& mu, const StepFunction& f) {
  const double inv = 1.0 / l2_norm(mu, f);
  return f.map([inv](Complex v) { return v * inv; });
}

double integral(const ConformalDensity& mu, const StepFunction& f) {
  KahanSum s;
  for (const auto& [w, v] : f.leaves()) s.add(v.real() * mu.mass_e(w));
  return s.get();
}

}  // namespace

TEST_CASE("annulus averages stay uniformly flat on free groups") {
  const GroupModel f2 = GroupModel::free_group(2);
  const ConformalDensity mu = ConformalDensity::exact(f2);

  const AnnulusAverage base = annulus_average(mu, 0, 0.0);
  CHECK(base.count == 1.0);
  CHECK(base.average.leaves().size() == 1);
  CHECK(std::abs(base.sup_norm - 1.0) <= 1e-14);

  // vertex transitivity makes every average the constant one; the builder
  // must discover the collapse instead of returning a forest of leaves
  double sup_lo = 0.0, sup_hi = 0.0;
  for (int n = 4; n <= 10; ++n) {
    const AnnulusAverage avg = annulus_average(mu, n, 1.0);
    CHECK(avg.count == static_cast<double>(f2.annulus_count(n, 1.0)));
    CHECK(avg.average.leaves().size() == 1);
    CHECK(std::abs(avg.sup_norm - 1.0) <= 1e-10);
    CHECK(std::abs(integral(mu, avg.average) - 1.0) <= 1e-12);
    if (n <= 7) sup_lo = std::max(sup_lo, avg.sup_norm);
    sup_hi = std::max(sup_hi, avg.sup_norm);
  }
  CHECK(sup_hi <= 1.05 * sup_lo);
}

TEST_CASE("free-product averages integrate to one") {
  const GroupModel z = GroupModel::cyclic_free_product(2, 3);
  const ConformalDensity mu = ConformalDensity::exact(z);

  for (int n = 0; n <= 6; ++n) {
    const AnnulusAverage avg = annulus_average(mu, n, 1.0);
    CHECK(avg.count == static_cast<double>(z.annulus_count(n, 1.0)));
    CHECK(std::abs(integral(mu, avg.average) - 1.0) <= 1e-12);
    CHECK(avg.sup_norm >= 1.0 - 1e-12);  // mean one on a probability space
    CHECK(avg.sup_norm < 10.0);
  }

  const GroupModel f2 = GroupModel::free_group(2);
  CHECK_THROWS_AS(annulus_average(mu, 3, 1.0, 3), DegenerateInputError);
  const ConformalDensity shallow = ConformalDensity::orbit(f2, std::log(3.0) + 0.05, 12, 3);
  CHECK_THROWS_AS(annulus_average(shallow, 4, 1.0), ResolutionError);
}

TEST_CASE("dual pairing respects the sup bound") {
  const GroupModel f2 = GroupModel::free_group(2);
  const ConformalDensity mu = ConformalDensity::exact(f2);

  const DualL1Report flat = dual_l1_check(mu, StepFunction::constant(f2, 1.0), 6, 1.0);
  CHECK(std::abs(flat.average_abs - 1.0) <= 1e-12);
  CHECK(std::abs(flat.pairing_abs - 1.0) <= 1e-12);
  CHECK(std::abs(flat.l1_norm - 1.0) <= 1e-12);
  CHECK(flat.holds);
  CHECK(flat.consistent);

  const DualL1Report ind =
      dual_l1_check(mu, StepFunction::indicator(f2, f2.word_parse("a"), 1.0), 6, 1.0);
  CHECK(std::abs(ind.l1_norm - 0.25) <= 1e-12);
  CHECK(ind.holds);
  CHECK(ind.consistent);

  DetRng rng(411);
  for (int trial = 0; trial < 20; ++trial) {
    StepFunction f = random_function(f2, rng, 3, false);
    const double t = BoundaryMeasure::density(f).total(mu);
    if (t <= 1e-9) continue;
    f = f.map([t](Complex v) { return v / t; });
    const DualL1Report rep = dual_l1_check(mu, f, 5, 1.0);
    CHECK(std::abs(rep.l1_norm - 1.0) <= 1e-10);
    CHECK(rep.holds);
    CHECK(rep.consistent);
  }
}

TEST_CASE("shell sums group cleanly along prefixes") {
  const GroupModel f2 = GroupModel::free_group(2);
  const ConformalDensity mu = ConformalDensity::exact(f2);
  DetRng rng(929);
  for (int trial = 0; trial < 4; ++trial) {
    const StepFunction xi = random_function(f2, rng, 3, false);
    for (int n : {6, 7}) {
      const double fast = rd_shell_sum(mu, xi, n);
      const double slow = rd_shell_sum_direct(mu, xi, n);
      CHECK(std::abs(fast - slow) <= 1e-12 * std::max(1.0, slow));
    }
  }
}

TEST_CASE("cumulative coefficient growth is polynomially bounded") {
  const GroupModel f2 = GroupModel::free_group(2);
  const ConformalDensity mu = ConformalDensity::exact(f2);
  const StepFunction one = StepFunction::constant(f2, 1.0);

  // for the cyclic vector the shell masses are the squared radial values:
  // shell n adds |S_n| * phi(n)^2 = (n + 2)^2 / 3
  const RdSumReport flat = rd_sum(mu, one, 10);
  CHECK(flat.all_certified);
  double expect = 1.0;
  for (const auto& row : flat.rows) {
    if (row.n > 0) expect += std::pow(row.n + 2.0, 2.0) / 3.0;
    CHECK(std::abs(row.cumulative - expect) <= 1e-9 * expect);
    CHECK(row.cumulative <= row.bound);
  }
  // the identity row dominates: S(0)/(1+0)^3 = 1, later rows decay like 1/9
  CHECK(std::abs(flat.sup_ratio_cubic - 1.0) <= 1e-12);

  DetRng rng(6007);
  for (int trial = 0; trial < 10; ++trial) {
    const StepFunction xi = unit_l2(mu, random_function(f2, rng, 4, false));
    const RdSumReport rep = rd_sum(mu, xi, 10);
    CHECK(rep.all_certified);
    CHECK(rep.rows.front().cumulative <= 1.0 + 1e-12);  // Cauchy-Schwarz at the identity
    for (std::size_t i = 1; i < rep.rows.size(); ++i)
      CHECK(rep.rows[i].cumulative >= rep.rows[i - 1].cumulative);
    CHECK(std::isfinite(rep.sup_ratio_cubic));
  }

  CHECK_THROWS_AS(rd_sum(mu, StepFunction::constant(f2, 2.0), 4), DegenerateInputError);
}

TEST_CASE("annulus mass ratios calibrate to one") {
  const GroupModel f2 = GroupModel::free_group(2);
  const ConformalDensity mu = ConformalDensity::exact(f2);
  const StepFunction one = StepFunction::constant(f2, 1.0);

  const RoblinCalibration calib = calibrate_roblin(mu, 1.0, 4, 8);
  CHECK(calib.constant > 0.0);

  const RoblinReport self = roblin_experiment(mu, one, one, calib);
  CHECK(std::abs(self.max_ratio - 1.0) <= 1e-12);
  CHECK(self.within);
  CHECK(std::abs(self.f_norm2 - 1.0) <= 1e-12);
  CHECK(self.rows.size() == 5);
  CHECK(!self.caveat.empty());

  const StepFunction ind_a = StepFunction::indicator(f2, f2.word_parse("a"), 1.0);
  const StepFunction ind_b = StepFunction::indicator(f2, f2.word_parse("b"), 1.0);
  const RoblinReport cross = roblin_experiment(mu, ind_a, ind_b, calib);
  CHECK(cross.within);

  // the ratio is scale invariant, so rescaling to unit norm changes nothing
  const StepFunction two_a = ind_a.map([](Complex v) { return 2.0 * v; });
  const RoblinReport scaled = roblin_experiment(mu, two_a, two_a, calib);
  const RoblinReport plain = roblin_experiment(mu, ind_a, ind_a, calib);
  CHECK(scaled.within);
  for (std::size_t i = 0; i < scaled.rows.size(); ++i)
    CHECK(std::abs(scaled.rows[i].ratio - plain.rows[i].ratio) <=
          1e-12 * std::max(1.0, plain.rows[i].ratio));

  const GroupModel z = GroupModel::cyclic_free_product(2, 3);
  const ConformalDensity zmu = ConformalDensity::exact(z);
  const RoblinCalibration zcalib = calibrate_roblin(zmu, 1.0, 3, 6);
  const RoblinReport zself =
      roblin_experiment(zmu, StepFunction::constant(z, 1.0), StepFunction::constant(z, 1.0), zcalib);
  CHECK(std::abs(zself.max_ratio - 1.0) <= 1e-12);
  CHECK(zself.within);

  CHECK_THROWS_AS(calibrate_roblin(mu, 0.5, 4, 8), DegenerateInputError);
  CHECK_THROWS_AS(roblin_experiment(mu, StepFunction::constant(f2, 0.0), one, calib),
                  DegenerateInputError);
}

TEST_CASE("shadow pair counts track product masses") {
  const GroupModel f2 = GroupModel::free_group(2);
  const ConformalDensity mu = ConformalDensity::exact(f2);
  const Word u = f2.word_parse("a");
  const Word w = f2.word_parse("b");

  const EquidistributionTrace trace = equidistribution_trace(mu, u, w, 2, 6);
  CHECK(trace.rows.size() == 5);
  CHECK(!trace.caveat.empty());
  for (const auto& row : trace.rows) {
    CHECK(std::abs(row.reference - 1.0 / 16.0) <= 1e-15);
    CHECK(row.empirical >= 0.0);
    CHECK(std::isfinite(row.ratio));
    if (row.n >= 4) {
      CHECK(row.ratio > 0.5);
      CHECK(row.ratio < 2.0);
    }
  }

  const EquidistributionTrace again = equidistribution_trace(mu, u, w, 2, 6);
  for (std::size_t i = 0; i < trace.rows.size(); ++i) {
    CHECK(again.rows[i].empirical == trace.rows[i].empirical);
    CHECK(again.rows[i].ratio == trace.rows[i].ratio);
  }

  CHECK_THROWS_AS(equidistribution_trace(mu, u, w, 0, 4), DegenerateInputError);
}

TEST_CASE("matrix coefficients respect the spherical envelope") {
  const GroupModel f2 = GroupModel::free_group(2);
  const ConformalDensity mu = ConformalDensity::exact(f2);

  const WeakInequalityReport full = check_weak_inequality(
      mu, StepFunction::indicator(f2, f2.word_parse("a"), 1.0), StepFunction::constant(f2, 1.0), 8);
  CHECK(full.holds);
  CHECK(full.violations == 0);
  CHECK(full.checked == f2.ball_count(8));
  CHECK(full.max_ratio <= 1.0 + 1e-12);
  CHECK(full.max_ratio > 0.0);

  DetRng rng(17);
  for (int trial = 0; trial < 5; ++trial) {
    const StepFunction f = random_function(f2, rng, 3, false);
    const StepFunction g = random_function(f2, rng, 3, false);
    CHECK(check_weak_inequality(mu, f, g, 5).holds);
  }

  const GroupModel z = GroupModel::cyclic_free_product(2, 3);
  const ConformalDensity zmu = ConformalDensity::exact(z);
  DetRng zrng(18);
  const WeakInequalityReport zrep = check_weak_inequality(
      zmu, random_function(z, zrng, 2, false), random_function(z, zrng, 2, false), 5);
  CHECK(zrep.holds);
}
