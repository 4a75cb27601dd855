#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "gridmix/branching.hpp"
#include "gridmix/interval.hpp"

namespace gridmix {

// Piecewise-linear upper envelope for one type: plateau B_lo left of
// alpha_lo, a line of slope b_lo from (alpha_lo, B_lo), a line of slope b_hi
// into (alpha_hi, B_hi), plateau B_hi to the right. Valid when it provably
// dominates f_j at the anchors and in slope (six checks, done in
// envelope_bound_D, never assumed).
struct EnvelopeSpec {
  Rat alpha_lo, alpha_hi;
  Rat B_lo, B_hi;
  Rat b_lo, b_hi;
};

struct DmsCertificate {
  Rat lambda_star;
  std::vector<Rat> s;
  std::vector<Rat> c;
  // One envelope per type; leaf types (row sum 0) carry none.
  std::vector<std::optional<EnvelopeSpec>> envelopes;
};

enum class FailKind { None, Precondition, Envelope, Inequality };

struct Verdict {
  bool pass = false;
  FailKind kind = FailKind::None;
  std::vector<Rat> per_type_slack;  // c_j - (D^ M S c)_j
  std::string witness;              // violated inequality, both sides
};

// Enclosure of theta_j = (prod_l c_l^{M_jl})^(1/Delta_j) /
// (sum_l c_l s_l M_jl / Delta_j). Requires Delta_j >= 1.
RatInterval theta(const BranchingMatrix& m, const std::vector<Rat>& c,
                  const std::vector<Rat>& s, int j, unsigned prec_bits = 60);

// f_j(alpha) = (1-alpha)(1-theta*psi^(1/Delta))/(s_j-alpha) with
// psi = (1-alpha)/(lambda*alpha); enclosure over the theta interval.
RatInterval f_enclosure(const Rat& lambda_star, const Rat& s_j,
                        const RatInterval& theta_j, int delta_j,
                        const Rat& alpha, unsigned prec_bits = 60);

// Closed-form derivative enclosure:
//   f' = theta*h/(Delta*alpha*(s-alpha)) - (s-1)(1-theta*h)/(s-alpha)^2,
// h = psi^(1/Delta). Validated against central differences in tests.
RatInterval f_prime_enclosure(const Rat& lambda_star, const Rat& s_j,
                              const RatInterval& theta_j, int delta_j,
                              const Rat& alpha, unsigned prec_bits = 60);

// Rational upper bound on sup f_j over [1/(1+lambda*), 1]: the max of the
// two plateaus and, when the middle lines intersect inside (alpha_lo,
// alpha_hi), the intersection height. Throws std::runtime_error naming the
// failed validity check if the envelope does not provably dominate f_j.
Rat envelope_bound_D(const Rat& lambda_star, const Rat& s_j,
                     const RatInterval& theta_j, int delta_j,
                     const EnvelopeSpec& env);

// Full certificate check: preconditions (dimensions, s_j > 51/50,
// lambda* > 27/16, c > 0, theta in (0,1]), envelope validity, then the
// strict componentwise inequality (D^ M S c) < c in exact arithmetic.
Verdict check_dms(const BranchingMatrix& m, const DmsCertificate& cert);

// Single-type threshold: true iff lambda < Delta^Delta/(Delta-1)^(Delta+1),
// decided exactly; cross-checked internally by bisecting
// omega*(1+omega)^Delta = lambda and comparing Delta*omega/(1+omega) with 1.
bool check_single_type(int delta, const Rat& lambda);

// Falsification oracle: max of f_j over `samples` evenly spaced points of
// (1/(1+lambda*), 1), floating point, with theta taken at the conservative
// (lower) end. Never exceeds a valid envelope bound.
double sample_max_f(const Rat& lambda_star, const Rat& s_j, double theta_lo,
                    int delta_j, int samples);

// Certificate text format:
//   cert lambda=p/q
//   s: p/q ...
//   c: p/q ...
//   env j: alo=p/q ahi=p/q Blo=p/q Bhi=p/q blo=p/q bhi=p/q
void save_certificate(std::ostream& os, const DmsCertificate& cert);
DmsCertificate load_certificate(std::istream& is);

}  // namespace gridmix
