#pragma once

#include <cstdint>
#include <compare>
#include <string>

namespace hyplab {

// Exact half-integer: stores twice the value. Gromov products and Busemann
// values on the tree backends live in (1/2)Z, so all the hyperbolicity
// identities can be checked with integer arithmetic and zero tolerance.
struct HalfInt {
  std::int64_t halves = 0;

  constexpr HalfInt() = default;
  constexpr explicit HalfInt(std::int64_t h) : halves(h) {}
  static constexpr HalfInt whole(std::int64_t n) { return HalfInt{2 * n}; }

  constexpr double value() const { return 0.5 * static_cast<double>(halves); }
  constexpr bool is_integer() const { return (halves % 2) == 0; }

  friend constexpr HalfInt operator+(HalfInt a, HalfInt b) { return HalfInt{a.halves + b.halves}; }
  friend constexpr HalfInt operator-(HalfInt a, HalfInt b) { return HalfInt{a.halves - b.halves}; }
  friend constexpr HalfInt operator-(HalfInt a) { return HalfInt{-a.halves}; }
  friend constexpr auto operator<=>(HalfInt a, HalfInt b) = default;

  std::string str() const {
    if (halves % 2 == 0) return std::to_string(halves / 2);
    return std::to_string(halves) + "/2";
  }
};

constexpr HalfInt min(HalfInt a, HalfInt b) { return a.halves <= b.halves ? a : b; }
constexpr HalfInt max(HalfInt a, HalfInt b) { return a.halves >= b.halves ? a : b; }

}  // namespace hyplab
