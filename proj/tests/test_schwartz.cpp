#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <map>
#include <vector>

#include "hyplab/detutil.hpp"
#include "hyplab/errors.hpp"
#include "hyplab/group.hpp"
#include "hyplab/schwartz.hpp"

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

SchwartzElement random_element(SchwartzSpace& S, DetRng& rng, double t, int max_len,
                               int pieces) {
  std::vector<std::pair<Word, Complex>> coeffs;
  for (int i = 0; i < pieces; ++i)
    coeffs.emplace_back(
        random_word(S.model(), rng, static_cast<int>(rng.next_below(max_len + 1))),
        Complex{2.0 * rng.next_unit() - 1.0, 2.0 * rng.next_unit() - 1.0});
  return S.element(t, std::move(coeffs));
}

double max_entry_diff(const SchwartzElement& a, const SchwartzElement& b) {
  double worst = 0.0;
  for (const auto& e : a.entries()) worst = std::max(worst, std::abs(e.value - b.value_at(e.gamma)));
  for (const auto& e : b.entries()) worst = std::max(worst, std::abs(e.value - a.value_at(e.gamma)));
  return worst;
}

}  // namespace

TEST_CASE("norm weights match the definition on deltas and the zero element") {
  const GroupModel f = GroupModel::free_group(2);
  SchwartzSpace S(f);

  CHECK(schwartz_norm(S.delta(4.0, Word{})) == 1.0);
  const SchwartzElement d2 = S.delta(4.0, f.word_parse("ab"));
  CHECK(std::abs(schwartz_norm(d2) - 121.5) <= 1e-9);  // 3^4 / (2/3)
  CHECK(schwartz_norm(S.element(4.0, {})) == 0.0);
  // exact cancellation empties the support
  CHECK(S.element(4.0, {{f.word_parse("a"), Complex{1.0, 0.0}},
                        {f.word_parse("a"), Complex{-1.0, 0.0}}})
            .support_size() == 0);
  CHECK_THROWS_AS(S.delta(-1.0, Word{}), DegenerateInputError);

  for (const auto& e : d2.entries()) {
    CHECK(e.weight == std::pow(3.0, 4.0));
    CHECK(std::abs(e.phi - 2.0 / 3.0) <= 1e-12);
  }
}

TEST_CASE("convolution: unit, inverses, oracle, bilinearity, associativity") {
  const GroupModel f = GroupModel::free_group(2);
  SchwartzSpace S(f);
  DetRng rng(45);

  const SchwartzElement unit = S.delta(4.0, Word{});
  const SchwartzElement g = random_element(S, rng, 4.0, 4, 6);
  CHECK(max_entry_diff(convolve(S, unit, g), g) == 0.0);
  CHECK(max_entry_diff(convolve(S, g, unit), g) == 0.0);

  const Word w = f.word_parse("abA");
  const SchwartzElement left = S.delta(4.0, w);
  const SchwartzElement right = S.delta(4.0, f.inverse(w));
  const SchwartzElement prod = convolve(S, left, right);
  CHECK(prod.support_size() == 1);
  CHECK(prod.value_at(Word{}) == Complex{1.0, 0.0});

  // ball indicator squared against a direct double sum
  std::vector<std::pair<Word, Complex>> ball1;
  f.for_each_in_annulus(0, 1.0, 100.0, [&](const Word& v) { ball1.emplace_back(v, Complex{1.0, 0.0}); });
  const SchwartzElement ind = S.element(4.0, ball1);
  const SchwartzElement sq = convolve(S, ind, ind);
  std::map<Word, double> direct;
  for (const auto& [x, cx] : ball1)
    for (const auto& [y, cy] : ball1) direct[f.multiply(x, y)] += 1.0;
  CHECK(sq.support_size() == direct.size());
  for (const auto& [word, count] : direct)
    CHECK(std::abs(sq.value_at(word) - Complex{count, 0.0}) <= 1e-15);
  CHECK(std::abs(sq.value_at(Word{}) - Complex{5.0, 0.0}) <= 1e-15);

  for (int trial = 0; trial < 10; ++trial) {
    const SchwartzElement x = random_element(S, rng, 4.0, 3, 5);
    const SchwartzElement y = random_element(S, rng, 4.0, 3, 5);
    const SchwartzElement z = random_element(S, rng, 4.0, 3, 5);
    // bilinearity: (x + y) * z = x*z + y*z entrywise
    std::vector<std::pair<Word, Complex>> sum_coeffs;
    for (const auto& e : x.entries()) sum_coeffs.emplace_back(e.gamma, e.value);
    for (const auto& e : y.entries()) sum_coeffs.emplace_back(e.gamma, e.value);
    const SchwartzElement xy = S.element(4.0, sum_coeffs);
    const SchwartzElement lhs = convolve(S, xy, z);
    std::vector<std::pair<Word, Complex>> rhs_coeffs;
    const SchwartzElement xz = convolve(S, x, z);
    const SchwartzElement yz = convolve(S, y, z);
    for (const auto& e : xz.entries()) rhs_coeffs.emplace_back(e.gamma, e.value);
    for (const auto& e : yz.entries()) rhs_coeffs.emplace_back(e.gamma, e.value);
    CHECK(max_entry_diff(lhs, S.element(4.0, rhs_coeffs)) <= 1e-12);
    // associativity
    CHECK(max_entry_diff(convolve(S, convolve(S, x, y), z),
                         convolve(S, x, convolve(S, y, z))) <= 1e-12);
    // support lives in the product set
    CHECK(convolve(S, x, y).support_radius() <= x.support_radius() + y.support_radius());
  }

  CHECK_THROWS_AS(convolve(S, g, g, 4.0), CapExceededError);
  CHECK_THROWS_AS(convolve(S, g, S.delta(3.0, Word{})), DegenerateInputError);
  const GroupModel f3 = GroupModel::free_group(3);
  SchwartzSpace S3(f3);
  CHECK_THROWS_AS(convolve(S, g, S3.delta(4.0, Word{})), ModelMismatchError);
}

TEST_CASE("involution preserves the norm and is involutive") {
  DetRng rng(91);
  for (const char* name : {"free:2", "zfp:2,3"}) {
    const GroupModel m = GroupModel::parse(name);
    SchwartzSpace S(m);
    for (int trial = 0; trial < 8; ++trial) {
      const SchwartzElement a = random_element(S, rng, 4.0, 3, 5);
      const SchwartzElement star = involution(S, a);
      CHECK(std::abs(schwartz_norm(star) - schwartz_norm(a)) <=
            1e-12 * std::max(1.0, schwartz_norm(a)));
      CHECK(max_entry_diff(involution(S, star), a) == 0.0);
    }
  }
}

TEST_CASE("kernel sums: stratified fast path matches direct enumeration") {
  DetRng rng(17);
  for (int k : {2, 3}) {
    const GroupModel f = GroupModel::free_group(k);
    SchwartzSpace S(f);
    std::vector<Word> gs = {Word{}, f.word_parse("a"), f.word_parse("ab")};
    gs.push_back(random_word(f, rng, 4));
    for (const Word& g : gs)
      for (int N : {6, 7}) {
        if (N < static_cast<int>(g.size()) + 2) continue;
        const Trick2Report fast = trick2_sum(S, g, 4.0, N);
        const Trick2Report direct = trick2_sum_direct(S, g, 4.0, N);
        CHECK(std::abs(fast.partial_sum - direct.partial_sum) <=
              1e-12 * direct.partial_sum);
        CHECK(fast.tail_bound == direct.tail_bound);
      }
  }
  // the direct sum itself is radial: same-length words give the same value
  const GroupModel f = GroupModel::free_group(2);
  SchwartzSpace S(f);
  const Trick2Report r1 = trick2_sum_direct(S, f.word_parse("aba"), 4.0, 6);
  const Trick2Report r2 = trick2_sum_direct(S, f.word_parse("abA"), 4.0, 6);
  const Trick2Report r3 = trick2_sum_direct(S, f.word_parse("Bab"), 4.0, 6);
  CHECK(std::abs(r1.partial_sum - r2.partial_sum) <= 1e-12 * r1.partial_sum);
  CHECK(std::abs(r1.partial_sum - r3.partial_sum) <= 1e-12 * r1.partial_sum);
}

TEST_CASE("kernel sums: uniform ratio, certified tails, divergence flag") {
  const GroupModel f = GroupModel::free_group(2);
  SchwartzSpace S(f);
  CHECK(S.t0() == 3.0);
  CHECK(std::abs(S.count_constant() - 4.0 / 3.0) <= 1e-14);

  const Trick2Report base = trick2_sum(S, Word{}, 4.0, 12);
  CHECK(base.convergent);
  CHECK(base.phi_g == 1.0);
  CHECK(base.ratio >= 1.0);
  CHECK(base.tail_bound > 0.0);

  // truncation growth is inside the certified tail, and stays under 1%
  const Trick2Report wider = trick2_sum(S, Word{}, 4.0, 14);
  CHECK(wider.partial_sum >= base.partial_sum);
  CHECK(wider.partial_sum - base.partial_sum <= base.tail_bound);
  CHECK((wider.partial_sum - base.partial_sum) / base.partial_sum < 0.01);

  // ratios across |g| <= 6 stay within a factor 3 of each other
  double lo = base.ratio, hi = base.ratio;
  for (int L = 1; L <= 6; ++L) {
    const Trick2Report r = trick2_sum(S, Word(static_cast<std::size_t>(L), 0), 4.0, 12);
    lo = std::min(lo, r.ratio);
    hi = std::max(hi, r.ratio);
    if (L == 4)
      CHECK(r.ratio <= 3.0 * base.ratio);
  }
  CHECK(hi <= 3.0 * lo);

  const Trick2Report div = trick2_sum(S, Word{}, 2.0, 12);
  CHECK(!div.convergent);
  CHECK(std::isinf(div.tail_bound));
  CHECK(div.partial_sum > 0.0);
  CHECK(div.threshold == 3.0);

  CHECK_THROWS_AS(trick2_sum(S, f.word_parse("abab"), 4.0, 5), DegenerateInputError);

  const double ct = empirical_kernel_constant(S, 4.0);
  CHECK(ct >= hi);
  CHECK(ct >= empirical_kernel_constant(S, 4.0, 12, 2));
  CHECK_THROWS_AS(empirical_kernel_constant(S, 2.0), DegenerateInputError);
  CHECK_THROWS_AS(empirical_kernel_constant(S, 4.0, 6, 6), DegenerateInputError);
}

TEST_CASE("kernel sums on a free product of finite cyclic groups") {
  const GroupModel z = GroupModel::parse("zfp:2,3");
  SchwartzSpace S(z);
  CHECK(S.t0() == 3.0);
  CHECK(std::abs(S.count_constant() - 3.0 / std::sqrt(2.0)) <= 1e-12);

  const Trick2Report base = trick2_sum(S, Word{}, 4.0, 8);
  CHECK(base.convergent);
  CHECK(base.ratio >= 1.0);
  CHECK(base.tail_bound > 0.0);
  CHECK(std::isfinite(base.tail_bound));

  double lo = base.ratio, hi = base.ratio;
  z.for_each_in_annulus(1, 1.0, 100.0, [&](const Word& g) {
    if (g.empty()) return;
    const Trick2Report r = trick2_sum(S, g, 4.0, 8);
    lo = std::min(lo, r.ratio);
    hi = std::max(hi, r.ratio);
  });
  CHECK(hi <= 3.0 * lo);

  CHECK(empirical_kernel_constant(S, 4.0, 8, 2) >= 1.0);
}

TEST_CASE("algebra closure certificates on deltas, spheres, and random pairs") {
  const GroupModel f = GroupModel::free_group(2);
  SchwartzSpace S(f);
  DetRng rng(7);

  const ClosureReport triv = check_algebra_closure(S, S.delta(4.0, Word{}), S.delta(4.0, Word{}), 4.0);
  CHECK(triv.certified);
  CHECK(triv.norm_f1 == 1.0);
  CHECK(triv.norm_conv == 1.0);
  CHECK(std::abs(triv.measured_constant - 1.0) <= 1e-15);
  CHECK(triv.assembled_constant == std::pow(2.0, 5.0) * triv.kernel_constant);
  CHECK(triv.kernel_constant > 1.0);

  int certified = 0;
  double worst_measured = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const SchwartzElement a = random_element(S, rng, 4.0, 5, 8);
    const SchwartzElement b = random_element(S, rng, 4.0, 5, 8);
    const ClosureReport r = check_algebra_closure(S, a, b, 4.0);
    certified += r.certified ? 1 : 0;
    worst_measured = std::max(worst_measured, r.measured_constant);
  }
  CHECK(certified == 50);
  CHECK(worst_measured > 0.0);

  // normalized sphere indicator squared
  std::vector<std::pair<Word, Complex>> sphere4;
  f.for_each_in_annulus(4, 0.0, 1e5, [&](const Word& v) {
    sphere4.emplace_back(v, Complex{1.0 / f.sphere_count(4), 0.0});
  });
  const SchwartzElement c4 = S.element(4.0, sphere4);
  const ClosureReport r4 = check_algebra_closure(S, c4, c4, 4.0);
  CHECK(r4.certified);
  CHECK(r4.measured_constant < r4.assembled_constant);

  CHECK_THROWS_AS(check_algebra_closure(S, S.delta(3.0, Word{}), S.delta(3.0, Word{}), 4.0),
                  DegenerateInputError);
}

TEST_CASE("convolution operators are l2-bounded with the kernel constant") {
  const GroupModel f = GroupModel::free_group(2);
  SchwartzSpace S(f);
  DetRng rng(58);

  std::vector<std::pair<Word, Complex>> h;
  for (int i = 0; i < 20; ++i)
    h.emplace_back(random_word(f, rng, static_cast<int>(rng.next_below(7))),
                   Complex{2.0 * rng.next_unit() - 1.0, rng.next_unit()});

  const L2BoundReport unit = check_l2_boundedness(S, S.delta(4.0, Word{}), h, 4.0);
  CHECK(unit.certified);
  CHECK(std::abs(unit.conv_norm - unit.h_norm) <= 1e-14 * unit.h_norm);
  CHECK(unit.constant_squared == unit.constant * unit.constant);

  const L2BoundReport shift = check_l2_boundedness(S, S.delta(4.0, f.word_parse("aB")), h, 4.0);
  CHECK(shift.certified);
  CHECK(std::abs(shift.conv_norm - shift.h_norm) <= 1e-14 * shift.h_norm);

  int certified = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const SchwartzElement a = random_element(S, rng, 4.0, 4, 6);
    std::vector<std::pair<Word, Complex>> v;
    for (int i = 0; i < 12; ++i)
      v.emplace_back(random_word(f, rng, static_cast<int>(rng.next_below(7))),
                     Complex{2.0 * rng.next_unit() - 1.0, 2.0 * rng.next_unit() - 1.0});
    certified += check_l2_boundedness(S, a, v, 4.0).certified ? 1 : 0;
  }
  CHECK(certified == 50);
}
