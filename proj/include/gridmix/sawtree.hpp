#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "gridmix/lattice.hpp"
#include "gridmix/rational.hpp"

namespace gridmix {

// Node of a self-avoiding-walk tree, arena-allocated. Children are a linked
// list (first_child / next_sibling) in neighbor-priority order.
struct SawNode {
  int vertex = -1;       // vertex in the source graph
  int depth = 0;         // = walk length from the root
  int parent = -1;
  int first_child = -1;
  int next_sibling = -1;
  std::int8_t pin = -1;  // -1 none, else static_cast<Pin>
  bool capped = false;   // sits at depth_cap and was not expanded
};

struct SawTree {
  std::vector<SawNode> nodes;  // nodes[0] is the root
  int depth_cap = 0;
  bool truncated = false;       // some node was capped
  bool root_forced_unoccupied = false;  // an Occupied pin sits on a neighbor
                                        // of the root walk's single vertex
  std::size_t size() const { return nodes.size(); }
  std::vector<int> children(int node) const;
};

enum class Boundary { AllOccupiedAtCap, AllUnoccupiedAtCap, Free };

// Tree of self-avoiding walks from v, truncated at depth_cap. A walk that
// revisits a vertex x closes a cycle x -> v1 -> ... -> vl -> x; the closing
// copy is fixed Unoccupied when v1 outranks vl at x (leaf dropped), else
// Occupied (leaf and its parent vl dropped). Pins apply to every copy of a
// pinned vertex: Unoccupied copies stay as pinned leaves, Occupied copies are
// dropped together with their parent, mirroring the cycle rule.
SawTree build_saw_tree(const GenericGraph& g, int v, int depth_cap,
                       const VertexPins& pins = {});

// Pr[root unoccupied] by the bottom-up recursion alpha = 1/(1 + lambda *
// prod child alphas). Capped leaves take alpha 0 (AllOccupiedAtCap) or 1
// (AllUnoccupiedAtCap); Free is only legal on an untruncated tree, where
// dead-end leaves take the natural 1/(1+lambda).
Rat root_unoccupied_prob(const SawTree& t, const Rat& lambda,
                         Boundary boundary);

// Same value without materializing the tree; walk state lives on an explicit
// stack so depth is unbounded by the call stack.
Rat saw_root_prob_lazy(const GenericGraph& g, int v, int depth_cap,
                       const VertexPins& pins, const Rat& lambda,
                       Boundary boundary);

// Exact Pr[v unoccupied] by exhaustive enumeration of independent sets
// consistent with pins (guarded to <= 24 vertices).
Rat brute_force_marginal(const GenericGraph& g, int v, const Rat& lambda,
                         const VertexPins& pins = {});

// Convenience wrapper: exact marginal of v in (g, pins) via the full SAW
// tree. Returns 0/1 immediately if v itself is pinned.
Rat saw_marginal(const GenericGraph& g, int v, const Rat& lambda,
                 const VertexPins& pins = {});

// Spatial-mixing probe: for L = 1..Lmax, the absolute gap at the origin of
// build_box(L) between the all-even-boundary-occupied and
// all-odd-boundary-occupied marginals. Exact rationals; evaluated by the
// column transfer oracle (see gibbs) and cross-checked against the SAW tree
// for small L in tests.
std::vector<std::pair<int, Rat>> ssm_probe(int lmax, const Rat& lambda);

}  // namespace gridmix
