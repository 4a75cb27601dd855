#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace gridmix {

struct Coord {
  int x = 0;
  int y = 0;
  auto operator<=>(const Coord&) const = default;
};

// Direction priority used everywhere a neighbor order matters (walk
// enumeration, cycle tie-breaking): N > E > S > W.
enum class Dir { N = 0, E = 1, S = 2, W = 3 };
Coord step(Coord c, Dir d);
Dir opposite(Dir d);
char dir_letter(Dir d);

enum class Pin { Occupied, Unoccupied };

using CoordPins = std::map<Coord, Pin>;
using VertexPins = std::map<int, Pin>;

// Finite set of grid vertices; edges are implicit (unit-distance pairs both
// present in the set). Cells are kept row-major (y, then x) so vertex ids are
// canonical.
struct LatticeRegion {
  std::vector<Coord> cells;  // sorted; index in this vector = vertex id
  std::map<Coord, int> index;

  static LatticeRegion from_cells(std::vector<Coord> cs);
  bool contains(Coord c) const { return index.count(c) != 0; }
  int id_of(Coord c) const;
  std::size_t size() const { return cells.size(); }
  std::vector<int> neighbors(int v) const;  // N,E,S,W priority order
};

// Adjacency-list graph. Neighbor lists are ordered; that order is the
// vertex-local ranking used by the walk-tree cycle rule (earlier = greater).
struct GenericGraph {
  int n = 0;
  std::vector<std::vector<int>> adj;

  void add_edge(int u, int v);
  bool has_edge(int u, int v) const;
  std::size_t edge_count() const;
  // Position of x in adj[u]; smaller position = higher priority.
  int neighbor_rank(int u, int x) const;
};

// The square {(i,j) : |i| <= L, |j| <= L}, side 2L+1.
LatticeRegion build_box(int L);

// Graph view of a region; coord_of[i] is the cell of vertex i.
struct RegionGraph {
  GenericGraph graph;
  std::vector<Coord> coord_of;
};
RegionGraph to_graph(const LatticeRegion& r);

// Folds hard pins into the graph: an Unoccupied pin deletes its vertex, an
// Occupied pin deletes the vertex and all its neighbors. Adjacent Occupied
// pins and pins on absent vertices are rejected. orig_of maps new vertex ids
// back to the input's ids (for regions, coord_of maps back to cells).
struct PinnedGraph {
  GenericGraph graph;
  std::vector<int> orig_of;
  std::vector<Coord> coord_of;  // region inputs only
};
PinnedGraph apply_pins(const LatticeRegion& r, const CoordPins& pins);
PinnedGraph apply_pins(const GenericGraph& g, const VertexPins& pins);

enum class Parity { Even, Odd };

// Alternating pins on the boundary of a box (cells with max(|i|,|j|) = L):
// cells whose i+j parity matches get Occupied, the others Unoccupied. The
// origin counts as even.
CoordPins boundary_pins(const LatticeRegion& r, Parity parity);

// --- plain-text formats ----------------------------------------------------
// region: "region <n>" then n lines "i j".
// pins:   lines "i j occ|unocc".
// graph:  "graph <n> <m>", m lines "u v" (0-based), optional "order u: ..."
//         lines overriding the neighbor priority at u.
void save_region(std::ostream& os, const LatticeRegion& r);
LatticeRegion load_region(std::istream& is);
void save_pins(std::ostream& os, const CoordPins& p);
CoordPins load_pins(std::istream& is);
void save_graph(std::ostream& os, const GenericGraph& g);
GenericGraph load_graph(std::istream& is);

}  // namespace gridmix
