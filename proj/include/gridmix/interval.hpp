#pragma once

#include <string>

#include "gridmix/rational.hpp"

namespace gridmix {

// Closed rational interval [lo, hi]. All operations return enclosures: the
// result interval contains every value attainable from points of the inputs.
// Roots and atanh are irrational in general, so those return genuine
// brackets; field operations are exact.
struct RatInterval {
  Rat lo, hi;

  RatInterval() : lo(0), hi(0) {}
  explicit RatInterval(const Rat& v) : lo(v), hi(v) {}
  RatInterval(Rat l, Rat h);

  Rat width() const { return hi - lo; }
  Rat mid() const { return (lo + hi) / 2; }
  bool contains(const Rat& v) const { return lo <= v && v <= hi; }
  bool strictly_positive() const { return lo > 0; }
  bool strictly_negative() const { return hi < 0; }

  RatInterval operator+(const RatInterval& o) const;
  RatInterval operator-(const RatInterval& o) const;
  RatInterval operator*(const RatInterval& o) const;
  // Requires o to not contain zero.
  RatInterval operator/(const RatInterval& o) const;
  RatInterval operator-() const { return RatInterval(-hi, -lo); }

  RatInterval operator+(const Rat& v) const { return *this + RatInterval(v); }
  RatInterval operator-(const Rat& v) const { return *this - RatInterval(v); }
  RatInterval operator*(const Rat& v) const { return *this * RatInterval(v); }
  RatInterval operator/(const Rat& v) const { return *this / RatInterval(v); }

  std::string str() const;
};

inline RatInterval operator-(const Rat& v, const RatInterval& i) {
  return RatInterval(v) - i;
}
inline RatInterval operator*(const Rat& v, const RatInterval& i) {
  return i * v;
}

// Bracket of x^(1/n) for x >= 0, by bisection until the bracket width drops
// below 2^-prec_bits. Endpoints are exact rationals.
RatInterval nth_root(const Rat& x, unsigned n, unsigned prec_bits = 60);

// Bracket of x^(1/n) over a nonnegative interval.
RatInterval nth_root(const RatInterval& x, unsigned n,
                     unsigned prec_bits = 60);

// Bracket of atanh(x) for |x| < 1 via the odd power series; the tail is
// bounded geometrically, so both ends are certified.
RatInterval atanh_bracket(const Rat& x, unsigned prec_bits = 60);

}  // namespace gridmix
