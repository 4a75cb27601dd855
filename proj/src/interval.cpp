#include "gridmix/interval.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <sstream>
#include <stdexcept>

namespace gridmix {

// --- rational helpers --------------------------------------------------------

Rat rat_from_string(const std::string& s) {
  std::string t;
  for (char ch : s)
    if (!isspace(static_cast<unsigned char>(ch))) t += ch;
  if (t.empty()) throw std::invalid_argument("empty rational literal");

  if (t.find('/') != std::string::npos) {
    Rat r;
    if (r.set_str(t, 10) != 0)
      throw std::invalid_argument("bad rational literal: " + s);
    if (r.get_den() == 0) throw std::invalid_argument("zero denominator: " + s);
    r.canonicalize();
    return r;
  }

  // Decimal with optional exponent, converted exactly.
  bool neg = false;
  std::size_t pos = 0;
  if (t[pos] == '+' || t[pos] == '-') neg = t[pos++] == '-';
  std::string digits;
  long frac_digits = 0;
  bool seen_dot = false, seen_digit = false;
  for (; pos < t.size() && (isdigit(static_cast<unsigned char>(t[pos])) || t[pos] == '.'); ++pos) {
    if (t[pos] == '.') {
      if (seen_dot) throw std::invalid_argument("bad literal: " + s);
      seen_dot = true;
    } else {
      digits += t[pos];
      seen_digit = true;
      if (seen_dot) ++frac_digits;
    }
  }
  if (!seen_digit) throw std::invalid_argument("bad literal: " + s);
  long exp10 = 0;
  if (pos < t.size()) {
    if (t[pos] != 'e' && t[pos] != 'E')
      throw std::invalid_argument("bad literal: " + s);
    exp10 = std::stol(t.substr(pos + 1));
  }
  mpz_class num(digits.empty() ? "0" : digits, 10);  // base fixed: no octal
  if (neg) num = -num;
  long shift = exp10 - frac_digits;
  Rat r(num);
  mpz_class p10;
  mpz_ui_pow_ui(p10.get_mpz_t(), 10, static_cast<unsigned long>(std::labs(shift)));
  if (shift > 0)
    r *= Rat(p10);
  else if (shift < 0)
    r /= Rat(p10);
  r.canonicalize();
  return r;
}

std::string rat_to_string(const Rat& r) { return r.get_str(); }

std::string rat_to_decimal(const Rat& r, int digits) {
  mpz_class num = r.get_num(), den = r.get_den();
  bool neg = num < 0;
  if (neg) num = -num;
  mpz_class ip = num / den, rem = num % den;
  std::string out = (neg && (ip != 0 || rem != 0) ? "-" : "") + ip.get_str();
  if (digits > 0) {
    out += '.';
    for (int i = 0; i < digits; ++i) {
      rem *= 10;
      out += static_cast<char>('0' + mpz_class(rem / den).get_si());
      rem %= den;
    }
  }
  return out;
}

double rat_to_double(const Rat& r) { return r.get_d(); }

Rat rat_pow(const Rat& base, unsigned long exp) {
  Rat out;
  mpz_pow_ui(out.get_num_mpz_t(), base.get_num().get_mpz_t(), exp);
  mpz_pow_ui(out.get_den_mpz_t(), base.get_den().get_mpz_t(), exp);
  out.canonicalize();
  return out;
}

Rat rationalize(double x, unsigned long max_den) {
  if (!std::isfinite(x)) throw std::invalid_argument("non-finite value");
  bool neg = x < 0;
  double v = neg ? -x : x;
  // Stern-Brocot / continued fraction convergents.
  unsigned long p0 = 0, q0 = 1, p1 = 1, q1 = 0;
  double frac = v;
  for (int it = 0; it < 64; ++it) {
    double fl = std::floor(frac);
    if (fl > 1e18) break;
    unsigned long a = static_cast<unsigned long>(fl);
    if (q0 + a * q1 > max_den && q1 > 0) break;
    unsigned long p2 = p0 + a * p1, q2 = q0 + a * q1;
    p0 = p1; q0 = q1; p1 = p2; q1 = q2;
    double rem = frac - fl;
    if (rem < 1e-15) break;
    frac = 1.0 / rem;
  }
  Rat best;
  if (q1 != 0 && q1 <= max_den)
    best = Rat(static_cast<long>(p1), static_cast<long>(q1));
  else
    best = Rat(static_cast<long>(p0), static_cast<long>(q0 == 0 ? 1 : q0));
  best.canonicalize();
  return neg ? Rat(-best) : best;
}

Rat rat_ceil_den(double x, unsigned long den) {
  double scaled = std::ceil(x * static_cast<double>(den));
  Rat r{mpz_class(scaled), mpz_class(den)};
  r.canonicalize();
  if (r.get_d() < x) r += Rat(1, static_cast<long>(den));  // double rounding guard
  return r;
}

Rat rat_floor_den(double x, unsigned long den) {
  double scaled = std::floor(x * static_cast<double>(den));
  Rat r{mpz_class(scaled), mpz_class(den)};
  r.canonicalize();
  if (r.get_d() > x) r -= Rat(1, static_cast<long>(den));
  return r;
}

// --- intervals ---------------------------------------------------------------

RatInterval::RatInterval(Rat l, Rat h) : lo(std::move(l)), hi(std::move(h)) {
  if (lo > hi) throw std::invalid_argument("interval lo > hi");
}

RatInterval RatInterval::operator+(const RatInterval& o) const {
  return RatInterval(lo + o.lo, hi + o.hi);
}

RatInterval RatInterval::operator-(const RatInterval& o) const {
  return RatInterval(lo - o.hi, hi - o.lo);
}

RatInterval RatInterval::operator*(const RatInterval& o) const {
  Rat a = lo * o.lo, b = lo * o.hi, c = hi * o.lo, d = hi * o.hi;
  Rat mn = a, mx = a;
  for (const Rat* v : {&b, &c, &d}) {
    if (*v < mn) mn = *v;
    if (*v > mx) mx = *v;
  }
  return RatInterval(mn, mx);
}

RatInterval RatInterval::operator/(const RatInterval& o) const {
  if (o.lo <= 0 && o.hi >= 0)
    throw std::domain_error("interval division through zero");
  return *this * RatInterval(1 / o.hi, 1 / o.lo);
}

std::string RatInterval::str() const {
  std::ostringstream os;
  os << "[" << lo.get_str() << ", " << hi.get_str() << "]";
  return os.str();
}

RatInterval nth_root(const Rat& x, unsigned n, unsigned prec_bits) {
  if (x < 0) throw std::domain_error("nth_root of negative value");
  if (n == 0) throw std::invalid_argument("0th root");
  if (x == 0) return RatInterval(Rat(0));
  if (n == 1) return RatInterval(x);

  {
    // Exact when x is a perfect n-th power of a rational.
    mpz_class rn, rd;
    int num_exact = mpz_root(rn.get_mpz_t(), x.get_num().get_mpz_t(), n);
    int den_exact = mpz_root(rd.get_mpz_t(), x.get_den().get_mpz_t(), n);
    if (num_exact && den_exact) {
      Rat r(rn, rd);
      r.canonicalize();
      return RatInterval(r);
    }
  }

  Rat lo(0), hi = x < 1 ? Rat(1) : x;
  Rat tol(1);
  tol /= rat_pow(Rat(2), prec_bits).get_num();  // 2^-prec_bits
  // Bisection keeps lo^n <= x <= hi^n throughout; both ends stay rational.
  while (hi - lo > tol) {
    Rat mid = (lo + hi) / 2;
    if (rat_pow(mid, n) <= x)
      lo = mid;
    else
      hi = mid;
  }
  return RatInterval(lo, hi);
}

RatInterval nth_root(const RatInterval& x, unsigned n, unsigned prec_bits) {
  return RatInterval(nth_root(x.lo, n, prec_bits).lo,
                     nth_root(x.hi, n, prec_bits).hi);
}

RatInterval atanh_bracket(const Rat& x, unsigned prec_bits) {
  if (x <= -1 || x >= 1) throw std::domain_error("atanh domain");
  if (x == 0) return RatInterval(Rat(0));
  bool neg = x < 0;
  Rat v = neg ? Rat(-x) : x;

  Rat tol(1);
  tol /= rat_pow(Rat(2), prec_bits).get_num();
  // atanh(v) = sum v^(2k+1)/(2k+1); tail after K terms is below
  // v^(2K+3)/((2K+3)(1-v^2)).
  Rat sum(0), term = v, v2 = v * v;
  unsigned long k = 0;
  while (true) {
    sum += term / Rat(2 * k + 1);
    term *= v2;
    ++k;
    Rat tail = term / (Rat(2 * k + 1) * (1 - v2));
    if (tail < tol) {
      RatInterval out(sum, sum + tail);
      return neg ? -out : out;
    }
    if (k > 100000) throw std::runtime_error("atanh series stalled");
  }
}

}  // namespace gridmix
