#pragma once

#include <optional>

#include "gridmix/dms.hpp"

namespace gridmix {

struct SearchConfig {
  std::uint64_t seed = 1;
  long budget = 4000;          // accepted/rejected moves, total
  double step_init = 0.12;     // log-space perturbation scale
  double step_min = 1e-4;
  unsigned long rationalize_denominator_cap = 1000000;
  int sample_points = 4096;    // D_jj sampling density for the climb objective
};

// Guess-then-verify: floating-point hill climb over (log s_j, log c_j) with
// periodic restarts and a rebalancing move that pulls c toward the dominant
// eigenvector of the induced D M S map, then envelope fitting, exact
// rationalization, and a final rigorous check_dms. Returns a certificate
// only when the exact check passes. Deterministic for a fixed config.
std::optional<DmsCertificate> search_certificate(const BranchingMatrix& m,
                                                 const Rat& lambda_star,
                                                 const SearchConfig& cfg = {});

// Largest lambda on a bisection grid of width tol in [lo, hi] for which the
// search succeeds; a certified lower bound on the achievable threshold (the
// monotone-in-lambda assumption only steers the probing order).
Rat max_lambda(const BranchingMatrix& m, const Rat& lo, const Rat& hi,
               const Rat& tol, const SearchConfig& cfg = {});

// Fits envelopes for fixed (lambda*, s, c): locates each argmax by sampling,
// anchors slightly to each side (rationalized), takes certified tangent
// slopes inflated away from zero, and certified plateau heights. Exposed
// separately so externally supplied (s, c) can be completed to a full
// certificate. Throws if some type's envelope cannot be validated.
DmsCertificate fit_certificate(const BranchingMatrix& m,
                               const Rat& lambda_star,
                               const std::vector<Rat>& s,
                               const std::vector<Rat>& c,
                               unsigned long den_cap = 1000000);

}  // namespace gridmix
