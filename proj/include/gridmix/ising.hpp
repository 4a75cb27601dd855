#pragma once

#include <iosfwd>
#include <map>

#include "gridmix/branching.hpp"
#include "gridmix/dms.hpp"
#include "gridmix/sawtree.hpp"

namespace gridmix {

// Contraction certificate for the two-spin ferromagnet: stores tanh(beta*)
// rationally so the inequality tanh(beta*) * (Mc)_j < c_j stays exact;
// beta* itself is only ever reported as an interval.
struct IsingCertificate {
  Rat tanh_beta_star;
  std::vector<Rat> c;
};

Verdict check_ising(const BranchingMatrix& m, const IsingCertificate& cert);

// Certified interval for atanh(tanh_beta_star).
RatInterval certified_beta_star(const IsingCertificate& cert,
                                unsigned prec_bits = 60);

struct PerronCertificate {
  Rat rho_upper;        // exact: max_j (Mc)_j / c_j over the spectral block
  std::vector<Rat> c;   // positive; root entry extended when excluded
};

// Power iteration (floating) rationalized into a Collatz-Wielandt witness:
// any c > 0 gives the exact bound rho <= max_j (Mc)_j/c_j. The root type is
// excluded from the block when nothing maps into it; its c entry is then
// chosen large enough that the root row inequality is slack.
PerronCertificate perron_certificate(const BranchingMatrix& m,
                                     int iters = 500);

// Spin pins for two-spin models: true = minus, false = plus.
using SpinPins = std::map<int, bool>;

// Walk tree for the two-spin model: same construction as the hard-core tree
// except both cycle-closing leaves stay in the tree as spin-pinned leaves.
// The closing copy is pinned plus when the revisited vertex's first walk
// edge outranks the closing edge, else minus: plus plays the unoccupied
// role of the hard-core fixing, minus the occupied one.
SawTree build_ising_saw_tree(const GenericGraph& g, int v, int depth_cap,
                             const SpinPins& pins = {});

// Bottom-up ratio recursion theta = prod (e^{2b} theta_i + 1)/(theta_i +
// e^{2b}); free leaves carry theta = 1, pinned leaves 0 (plus) or the
// e^{2b}-limit (minus). Returns alpha = 1/(1+theta).
double ising_tree_ratio(const SawTree& t, double beta);

// Exact-summation Pr[sigma_v = minus] over all spin assignments, weights
// exp(beta * sum_{uv in E} sigma_u sigma_v). Guarded to <= 20 vertices.
double ising_brute_force_marginal(const GenericGraph& g, int v, double beta,
                                  const SpinPins& pins = {});

// Text format: "ising tanh=p/q" then "c: p/q ...".
void save_ising_certificate(std::ostream& os, const IsingCertificate& cert);
IsingCertificate load_ising_certificate(std::istream& is);

}  // namespace gridmix
