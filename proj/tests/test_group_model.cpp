#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "hyplab/detutil.hpp"
#include "hyplab/group.hpp"
#include "oracles.hpp"

using namespace hyplab;

namespace {

Word random_word(const GroupModel& m, DetRng& rng, int len) {
  Word w;
  while (static_cast<int>(w.size()) < len) {
    const Letter s = static_cast<Letter>(rng.next_below(m.alphabet_size()));
    if (w.empty() || m.can_follow(w.back(), s)) w.push_back(s);
  }
  return w;
}

}  // namespace

TEST_CASE("parse and name round trip") {
  for (const char* spec : {"free:2", "free:3", "zfp:2,3", "zfp:3,4"}) {
    const GroupModel m = GroupModel::parse(spec);
    CHECK(m.name() == spec);
  }
  CHECK_THROWS_AS(GroupModel::parse("free:1"), DegenerateInputError);
  CHECK_THROWS_AS(GroupModel::parse("zfp:2,2"), DegenerateInputError);
  CHECK_THROWS_AS(GroupModel::parse("zfp:3"), DegenerateInputError);
  CHECK_THROWS_AS(GroupModel::parse("free:x"), DegenerateInputError);
  CHECK_THROWS_AS(GroupModel::parse("dihedral:5"), DegenerateInputError);
}

TEST_CASE("letters: involution and succession rules") {
  for (const char* spec : {"free:2", "free:3", "zfp:2,3", "zfp:3,4"}) {
    const GroupModel m = GroupModel::parse(spec);
    for (Letter s = 0; s < m.alphabet_size(); ++s) {
      CHECK(m.inverse_letter(m.inverse_letter(s)) == s);
      // a letter and its inverse are never a normal-form pair
      CHECK_FALSE(m.can_follow(s, m.inverse_letter(s)));
      int deg = 0;
      for (Letter t = 0; t < m.alphabet_size(); ++t)
        if (m.can_follow(s, t)) ++deg;
      CHECK(deg == m.degree_after(s));
    }
  }
}

TEST_CASE("free-group words: strings, products, inverses") {
  const GroupModel m = GroupModel::free_group(2);
  CHECK(m.word_str(m.word_parse("abA")) == "abA");
  CHECK(m.word_parse("e").empty());
  CHECK(m.word_str(Word{}) == "e");
  CHECK_THROWS_AS(m.word_parse("aA"), DegenerateInputError);  // not reduced
  CHECK_THROWS_AS(m.word_parse("ac"), DegenerateInputError);  // no such letter in rank 2

  CHECK(m.word_str(m.multiply(m.word_parse("abA"), m.word_parse("a"))) == "ab");
  CHECK(m.word_str(m.multiply(m.word_parse("aB"), m.word_parse("ba"))) == "aa");

  DetRng rng(7);
  for (int t = 0; t < 50; ++t) {
    const Word w = random_word(m, rng, 1 + static_cast<int>(rng.next_below(9)));
    CHECK(m.multiply(w, m.inverse(w)).empty());
    CHECK(m.multiply(m.inverse(w), w).empty());
  }
}

TEST_CASE("free-product words: syllable strings and junction collapse") {
  const GroupModel m = GroupModel::cyclic_free_product(2, 3);
  CHECK(m.word_str(m.word_parse("x1.y2")) == "x1.y2");
  CHECK(m.word_parse("x.y") == m.word_parse("x1.y1"));  // bare syllable means exponent 1
  CHECK_THROWS_AS(m.word_parse("x1.x1"), DegenerateInputError);
  CHECK_THROWS_AS(m.word_parse("y3"), DegenerateInputError);  // exponent reduces mod order

  CHECK(m.multiply(m.word_parse("x1"), m.word_parse("x1")).empty());
  CHECK(m.word_str(m.multiply(m.word_parse("y1"), m.word_parse("y1"))) == "y2");
  CHECK(m.multiply(m.word_parse("y2"), m.word_parse("y1")).empty());
  // cascading collapse across the junction: (x y) (y^2 x) = e
  CHECK(m.multiply(m.word_parse("x1.y1"), m.word_parse("y2.x1")).empty());
  // partial collapse leaves a merged syllable
  CHECK(m.word_str(m.multiply(m.word_parse("x1.y1"), m.word_parse("y1.x1"))) == "x1.y2.x1");

  DetRng rng(11);
  const GroupModel m34 = GroupModel::cyclic_free_product(3, 4);
  for (int t = 0; t < 50; ++t) {
    const Word w = random_word(m34, rng, 1 + static_cast<int>(rng.next_below(9)));
    CHECK(m34.multiply(w, m34.inverse(w)).empty());
  }
}

TEST_CASE("distance agrees with reduced product length; gromov products are half-integers") {
  DetRng rng(23);
  for (const char* spec : {"free:2", "zfp:2,3", "zfp:3,4"}) {
    const GroupModel m = GroupModel::parse(spec);
    for (int t = 0; t < 200; ++t) {
      const Word a = random_word(m, rng, static_cast<int>(rng.next_below(8)));
      const Word b = random_word(m, rng, static_cast<int>(rng.next_below(8)));
      // independent path: materialize a^-1 b and take its length
      CHECK(m.distance(a, b) == static_cast<int>(m.multiply(m.inverse(a), b).size()));
      const Word c = random_word(m, rng, static_cast<int>(rng.next_below(8)));
      CHECK(m.distance(a, b) + m.distance(b, c) >= m.distance(a, c));
      CHECK(m.gromov(a, b, c).halves >= 0);
    }
  }
  const GroupModel f = GroupModel::free_group(2);
  CHECK(f.gromov(f.word_parse("ab"), f.word_parse("aB"), Word{}) == HalfInt::whole(1));
  CHECK(f.gromov(f.word_parse("ab"), f.word_parse("abb"), Word{}) == HalfInt::whole(2));
  const GroupModel z = GroupModel::cyclic_free_product(2, 3);
  // same-factor divergence sits half a step out
  CHECK(z.gromov(z.word_parse("y1"), z.word_parse("y2"), Word{}) == HalfInt{1});
  CHECK(z.gromov(z.word_parse("x1.y1"), z.word_parse("x1.y2"), Word{}) == HalfInt{3});
  CHECK(z.gromov(z.word_parse("x1.y1"), z.word_parse("y1.x1"), Word{}) == HalfInt{0});
}

TEST_CASE("sphere counts match breadth-first enumeration") {
  struct Probe {
    const char* spec;
    int radius;
  };
  for (const Probe probe : {Probe{"free:2", 6}, Probe{"free:3", 4}, Probe{"zfp:2,3", 8},
                            Probe{"zfp:3,4", 6}}) {
    const GroupModel m = GroupModel::parse(probe.spec);
    const auto bfs = oracle::bfs_sphere_counts(m, probe.radius);
    for (int n = 0; n <= probe.radius; ++n) CHECK(m.sphere_count(n) == static_cast<double>(bfs[n]));
  }

  const GroupModel z = GroupModel::cyclic_free_product(2, 3);
  CHECK(z.ball_count(12) == 442.0);
  for (int n = 1; n <= 20; ++n)  // two-step recurrence c_{n+2} = (p-1)(q-1) c_n
    CHECK(z.sphere_count(n + 2) == 2.0 * z.sphere_count(n));
  for (int n = 1; n <= 30; ++n)
    CHECK(z.log_sphere_count(n) == doctest::Approx(std::log(z.sphere_count(n))).epsilon(1e-13));
}

TEST_CASE("annulus windows and counts") {
  int lo, hi;
  GroupModel::annulus_window(5, 0.0, &lo, &hi);
  CHECK(lo == 5);
  CHECK(hi == 5);
  GroupModel::annulus_window(5, 1.0, &lo, &hi);
  CHECK(lo == 4);
  CHECK(hi == 6);
  GroupModel::annulus_window(2, 1.5, &lo, &hi);
  CHECK(lo == 1);
  CHECK(hi == 3);
  GroupModel::annulus_window(0, 1.0, &lo, &hi);
  CHECK(lo == 0);
  CHECK(hi == 1);

  const GroupModel m = GroupModel::free_group(2);
  CHECK(m.annulus_count(2, 1.0) == 4.0 + 12.0 + 36.0);
  CHECK(m.annulus_count(0, 1.0) == 5.0);
}

TEST_CASE("enumeration is shortlex and chunking partitions it") {
  const GroupModel m = GroupModel::free_group(2);
  const auto words = m.annulus(3, 0.0, 1e6);
  REQUIRE(words.size() == 36);
  CHECK(m.word_str(words.front()) == "aaa");
  CHECK(m.word_str(words.back()) == "BBB");
  for (std::size_t i = 0; i + 1 < words.size(); ++i) CHECK(m.shortlex_less(words[i], words[i + 1]));

  const GroupModel z = GroupModel::cyclic_free_product(2, 3);
  const auto mixed = z.annulus(4, 1.5, 1e6);
  CHECK(static_cast<double>(mixed.size()) == z.annulus_count(4, 1.5));
  for (std::size_t i = 0; i + 1 < mixed.size(); ++i) CHECK(z.shortlex_less(mixed[i], mixed[i + 1]));
  for (const Word& w : mixed) CHECK(z.is_normal_form(w));

  // chunk-by-chunk enumeration concatenates to the same list
  std::vector<Word> chunked;
  for (const auto& c : z.annulus_chunks(4, 1.5))
    z.enumerate_chunk(c, [&](const Word& w) { chunked.push_back(w); });
  CHECK(chunked == mixed);

  // annulus window reaching length zero still emits the identity
  const auto small = z.annulus(0, 0.5, 100);
  REQUIRE(small.size() == 1);
  CHECK(small[0].empty());

  CHECK_THROWS_AS(m.annulus(10, 0.0, 10), CapExceededError);
  try {
    m.annulus(10, 0.0, 10);
  } catch (const CapExceededError& e) {
    CHECK(std::string(e.what()).find("cap") != std::string::npos);
  }
}

TEST_CASE("critical exponent estimates converge to the closed form") {
  const GroupModel f = GroupModel::free_group(2);
  const auto ef = f.estimate_critical_exponent(10);
  CHECK(ef.raw == doctest::Approx(std::log(4.0 * std::pow(3.0, 9.0)) / 10.0).epsilon(1e-13));
  CHECK(ef.extrapolated == doctest::Approx(std::log(3.0)).epsilon(1e-12));
  CHECK(f.alpha() == std::log(3.0));

  const GroupModel z = GroupModel::cyclic_free_product(2, 3);
  const auto ez = z.estimate_critical_exponent(10);
  CHECK(ez.extrapolated == doctest::Approx(0.5 * std::log(2.0)).epsilon(1e-12));
  CHECK(z.alpha() == doctest::Approx(0.5 * std::log(2.0)).epsilon(1e-15));
  CHECK_THROWS_AS(z.estimate_critical_exponent(4), DegenerateInputError);
}

TEST_CASE("four-point hyperbolicity certification") {
  const GroupModel f = GroupModel::free_group(2);
  CHECK(f.delta() == 0.0);
  CHECK(f.delta_certified_radius() == 0);

  // factor cosets are cliques meeting at cut vertices, so the Cayley graph is
  // a block graph: the four-point constant must come out exactly zero
  const GroupModel z = GroupModel::cyclic_free_product(2, 3);
  CHECK(z.delta() == 0.0);
  CHECK(z.delta_certified_radius() == 12);
  CHECK(z.delta() == 0.0);  // memoized second call agrees

  const GroupModel z34 = GroupModel::cyclic_free_product(3, 4);
  CHECK(z34.delta() == 0.0);
  CHECK(z34.delta_certified_radius() == 6);  // largest radius with at most 1500 elements
}
