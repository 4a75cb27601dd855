#pragma once

#include <cstdint>
#include <vector>

#include "gridmix/lattice.hpp"
#include "gridmix/rational.hpp"
#include "gridmix/sawtree.hpp"

namespace gridmix {

// Exact partition function: sum of lambda^|sigma| over independent sets
// consistent with pins. Regions go through a column transfer matrix (scales
// to hundreds of cells); generic graphs are enumerated directly (<= 24
// unpinned vertices after reduction; 36 total as a hard guard).
Rat brute_force_partition(const LatticeRegion& r, const Rat& lambda,
                          const CoordPins& pins = {});
Rat brute_force_partition(const GenericGraph& g, const Rat& lambda,
                          const VertexPins& pins = {});

// Exact Pr[cell unoccupied] in (region, pins) via the transfer matrix:
// Z(pins + cell pinned Unoccupied)/Z(pins).
Rat transfer_marginal(const LatticeRegion& r, const CoordPins& pins,
                      Coord cell, const Rat& lambda);

struct PartitionEstimate {
  bool ok = false;            // bracket met eps
  int failed_vertex = -1;     // first offender when !ok
  double log_value = 0.0;     // log of the bracket midpoint
  double relative_error_bound = 0.0;  // z_hi/z_lo - 1, certified
  std::vector<int> per_vertex_depths;
  Rat z_lo, z_hi;             // exact bracket, z_lo <= Z <= z_hi
};

// Deterministic approximate counting: eliminate vertices in id order,
// pinning each eliminated vertex Unoccupied; every factor 1/alpha_i is
// bracketed by evaluating its walk tree under both cap boundaries at depth
// L = ceil(log(2n/eps)/log(1/gamma_hint)). The reported error comes from the
// brackets themselves, never from gamma_hint.
PartitionEstimate weitz_partition_estimate(const GenericGraph& g,
                                           const Rat& lambda, double eps,
                                           double gamma_hint);
PartitionEstimate weitz_partition_estimate(const LatticeRegion& r,
                                           const Rat& lambda, double eps,
                                           double gamma_hint,
                                           const CoordPins& pins = {});

struct ChainState {
  std::vector<std::uint8_t> occupancy;
  long long step_count = 0;
  std::uint64_t rng_state_hash = 0;  // fingerprint of the generator state
};

struct GlauberResult {
  ChainState state;
  std::vector<double> frequency;  // per-vertex occupancy rate after burn-in
  std::vector<double> std_error;  // batch-means standard error of frequency
};

// Single-site heat bath: pick a uniform vertex; pinned vertices never move;
// a vertex with an occupied neighbor becomes unoccupied; otherwise occupied
// with probability lambda/(1+lambda). mt19937_64 throughout, so identical
// seeds give identical trajectories. The independent-set invariant is
// asserted every step in debug builds and every 2^16 steps in release.
GlauberResult glauber_run(const GenericGraph& g, const Rat& lambda,
                          const VertexPins& pins, long long steps,
                          std::uint64_t seed, long long burn_in = 0);

}  // namespace gridmix
