#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gridmix/lattice.hpp"

namespace gridmix {

// How a matrix classifies walk suffixes into types. Generated matrices carry
// one of the semantic classifiers; matrices loaded from files fall back to
// exact suffix-window lookup against their labels.
enum class TypeRule {
  None,          // labels only (or trivial single-type)
  SuffixWindow,  // type = trailing window of the walk (pruned matrices)
  CycleDistance  // type = fewest extra edges completing a short simple cycle
};

struct BranchingMatrix {
  int t = 0;
  std::vector<std::vector<int>> m;
  int root_type = 0;
  std::vector<std::string> labels;  // walk suffixes over N,E,S,W; "" = root

  TypeRule rule = TypeRule::None;
  int max_cycle = 0;
  bool pruned = false;

  std::vector<int> row_sums() const;
  int delta() const;  // max row sum

  // Type of a node whose walk from the root spells `walk` (letters NESW).
  // Returns nullopt when the suffix matches no type (possible only for
  // rule == None matrices with incomplete labels).
  std::optional<int> classify(const std::string& walk) const;
};

// Walk-type transition structure on Z^2: suffixes of non-backtracking walks
// that have not yet closed a cycle of length <= max_cycle. With prune, states
// whose next step would be fixed Occupied by the tie-breaking rule are
// deleted to a fixed point (the parent-removal of the walk-tree rule), and
// the surviving states are quotiented by their trailing window of length
// max_cycle-2. Without prune, states are quotiented by the minimum number of
// additional edges needed to complete a simple cycle of length <= max_cycle
// through the walk's tail; for max_cycle=4 this reproduces the classical
// 4-type matrix. Rows of a quotient are entrywise maxima over the class, so
// the result dominates the exact transition structure for any grouping.
BranchingMatrix generate_matrix(int max_cycle, bool prune);

// Builds the walk tree of build_box(L) from the origin, truncated at depth
// L, and greedily assigns types by walk suffix; true iff every node's
// children fit within its row of M. On failure *counterexample (if non-null)
// receives the offending walk.
bool verify_domination(const BranchingMatrix& m, int L,
                       std::string* counterexample = nullptr);

// Floating-point Perron root estimate (power iteration), used by tests and
// table output; certified bounds live in ising::perron_certificate.
double perron_root_estimate(const BranchingMatrix& m, int iters = 2000);

namespace detail {
// Same as generate_matrix but explores steps in the given order (a
// permutation of "NESW"). The result must not depend on it; exposed so tests
// can assert that.
BranchingMatrix generate_matrix_with_order(int max_cycle, bool prune,
                                           const std::string& enum_order);
}  // namespace detail

// Text format: "branching t root", t rows, then "label j: <suffix>" lines.
void save_matrix(std::ostream& os, const BranchingMatrix& m);
BranchingMatrix load_matrix(std::istream& is);

}  // namespace gridmix
