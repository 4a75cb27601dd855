#pragma once

#include <gmpxx.h>
#include <string>

namespace gridmix {

using Rat = mpq_class;

// Parses "p/q", plain integers, and decimal strings ("1.8801", "-0.25",
// "2.5e-3"). Decimals convert exactly; no binary float is involved.
Rat rat_from_string(const std::string& s);

// Canonical "p/q" (or "p" when q == 1).
std::string rat_to_string(const Rat& r);

// Fixed-point decimal rendering, truncated toward zero.
std::string rat_to_decimal(const Rat& r, int digits = 12);

double rat_to_double(const Rat& r);

Rat rat_pow(const Rat& base, unsigned long exp);

// Nearest rational with denominator <= max_den (continued-fraction walk).
Rat rationalize(double x, unsigned long max_den);

// Smallest k/max_den >= x, resp. largest k/max_den <= x. Used when a bound
// must land on a specific side of a real value.
Rat rat_ceil_den(double x, unsigned long den);
Rat rat_floor_den(double x, unsigned long den);

}  // namespace gridmix
