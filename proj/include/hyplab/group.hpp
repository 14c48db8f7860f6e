#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "hyplab/errors.hpp"
#include "hyplab/halfint.hpp"

namespace hyplab {

enum class Backend : std::uint8_t { FreeGroup, CyclicFreeProduct };

// Cheap value identity for a model; carried by densities / step functions so
// cross-model mixing is caught instead of silently computing garbage.
struct ModelKey {
  Backend backend{Backend::FreeGroup};
  int a = 0;  // rank k (free) or first factor order p
  int b = 0;  // unused (free) or second factor order q
  friend bool operator==(const ModelKey&, const ModelKey&) = default;
};

// A letter indexes the symmetric generating set S.
//   FreeGroup(k):            S = a_1, a_1^-1, ..., a_k, a_k^-1      (2k letters)
//   CyclicFreeProduct(p,q):  S = x, x^2, ..., x^(p-1), y, ..., y^(q-1)
// For the free product a letter is a whole syllable; word length in S equals
// the syllable count, and the alternating syllable form is the geodesic
// normal form.
using Letter = std::int16_t;
using Word = std::vector<Letter>;

struct CriticalExponentEstimate {
  double raw;           // log |C_r| / r
  double extrapolated;  // log-ratio extrapolation; exact limit on both backends
};

class GroupModel {
 public:
  static GroupModel free_group(int rank);
  static GroupModel cyclic_free_product(int p, int q);
  // "free:2", "free:3", "zfp:2,3"
  static GroupModel parse(const std::string& spec);

  const ModelKey& key() const { return key_; }
  std::string name() const;
  bool operator==(const GroupModel& o) const { return key_ == o.key_; }

  // --- alphabet ---
  int alphabet_size() const { return nletters_; }
  Letter inverse_letter(Letter s) const { return inv_[s]; }
  // true when `next` may follow `prev` inside a normal-form word
  bool can_follow(Letter prev, Letter next) const {
    if (key_.backend == Backend::FreeGroup) return next != (prev ^ 1);
    return factor_[prev] != factor_[next];
  }
  int letter_factor(Letter s) const { return factor_[s]; }   // 0/1; free: generator index
  int degree_after(Letter prev) const;  // number of valid successors
  // smallest-index letter that keeps `w`'s normal form when appended,
  // optionally skipping one additional forbidden letter (-1 = none)
  Letter smallest_extension(const Word& w, Letter forbidden = -1) const;

  // --- words ---
  bool is_normal_form(const Word& w) const;
  void check_word(const Word& w) const;  // throws DegenerateInputError
  Word multiply(const Word& a, const Word& b) const;
  Word inverse(const Word& a) const;
  int distance(const Word& a, const Word& b) const;
  int length(const Word& a) const { return static_cast<int>(a.size()); }
  // (y,z)_x = (d(x,y)+d(x,z)-d(y,z))/2, exact
  HalfInt gromov(const Word& y, const Word& z, const Word& x) const;
  bool shortlex_less(const Word& a, const Word& b) const;

  std::string word_str(const Word& w) const;
  Word word_parse(const std::string& s) const;

  // --- geometry constants ---
  double alpha() const { return alpha_; }     // exponential growth rate of |C_n|
  double growth() const { return growth_; }   // e^alpha
  double delta() const;                       // 0 (free) / certified four-point constant
  int delta_certified_radius() const;         // ball radius the certification scanned

  // --- counting (closed forms; exact integers while they fit a double) ---
  double sphere_count(int n) const;
  double log_sphere_count(int n) const;
  double ball_count(int n) const;
  double annulus_count(int n, double rho) const;
  static void annulus_window(int n, double rho, int* lo, int* hi);

  CriticalExponentEstimate estimate_critical_exponent(int radius) const;

  // --- enumeration ---
  // Chunks partition the annulus; each enumerates independently in lex order
  // and concatenating chunks in vector order gives shortlex. Parallel
  // consumers merge per-chunk results in chunk order, so reductions are
  // bit-identical for every thread count.
  struct AnnulusChunk {
    int length;
    Word prefix;  // enumerate normal-form words of `length` extending it
  };
  std::vector<AnnulusChunk> annulus_chunks(int n, double rho, int split_depth = 2) const;

  template <class F>
  void enumerate_chunk(const AnnulusChunk& c, F&& visit) const {
    Word w = c.prefix;
    if (static_cast<int>(w.size()) == c.length) {
      visit(w);
      return;
    }
    dfs_fixed_length(w, c.length, visit);
  }

  // Shortlex enumeration of {gamma : n-rho <= |gamma| <= n+rho}. Refuses when
  // the predicted count exceeds `cap`, naming the prediction.
  template <class F>
  void for_each_in_annulus(int n, double rho, double cap, F&& visit) const {
    guard_cap(n, rho, cap);
    for (const AnnulusChunk& c : annulus_chunks(n, rho, 2)) enumerate_chunk(c, visit);
  }

  std::vector<Word> annulus(int n, double rho, double cap) const {
    std::vector<Word> out;
    out.reserve(static_cast<std::size_t>(std::min(annulus_count(n, rho), cap)));
    for_each_in_annulus(n, rho, cap, [&](const Word& w) { out.push_back(w); });
    return out;
  }

  void guard_cap(int n, double rho, double cap) const;

 private:
  GroupModel() = default;

  template <class F>
  void dfs_fixed_length(Word& w, int target, F&& visit) const {
    // iterative lexicographic DFS emitting exactly the depth-`target` words
    const Letter A = static_cast<Letter>(nletters_);
    Word stack;  // next letter candidate per level
    Letter s = 0;
    const std::size_t base = w.size();
    for (;;) {
      // try to descend with letters >= s
      bool descended = false;
      for (; s < A; ++s) {
        if (!w.empty() && !can_follow(w.back(), s)) continue;
        w.push_back(s);
        if (static_cast<int>(w.size()) == target) {
          visit(w);
          w.pop_back();
          continue;  // siblings
        }
        stack.push_back(s);
        s = 0;
        descended = true;
        break;
      }
      if (descended) continue;
      if (w.size() == base) return;
      w.pop_back();
      s = static_cast<Letter>(stack.back() + 1);
      stack.pop_back();
    }
  }

  ModelKey key_;
  int nletters_ = 0;
  std::vector<Letter> inv_;
  std::vector<std::int16_t> factor_;
  std::vector<std::int16_t> expo_;  // zfp: exponent of the syllable letter
  double alpha_ = 0.0;
  double growth_ = 0.0;
};

// Group element with its model identity; the functional API below works on
// raw words, this wrapper is what crosses module/CLI/python boundaries.
struct Element {
  ModelKey key;
  Word word;
};

inline void check_same_model(const ModelKey& a, const ModelKey& b, const char* what) {
  if (!(a == b)) throw ModelMismatchError(std::string(what) + ": operands come from different group models");
}

}  // namespace hyplab
