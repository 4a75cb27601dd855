#include "gridmix/lattice.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace gridmix {

Coord step(Coord c, Dir d) {
  switch (d) {
    case Dir::N: return {c.x, c.y + 1};
    case Dir::E: return {c.x + 1, c.y};
    case Dir::S: return {c.x, c.y - 1};
    case Dir::W: return {c.x - 1, c.y};
  }
  return c;
}

Dir opposite(Dir d) {
  switch (d) {
    case Dir::N: return Dir::S;
    case Dir::E: return Dir::W;
    case Dir::S: return Dir::N;
    case Dir::W: return Dir::E;
  }
  return d;
}

char dir_letter(Dir d) { return "NESW"[static_cast<int>(d)]; }

LatticeRegion LatticeRegion::from_cells(std::vector<Coord> cs) {
  std::sort(cs.begin(), cs.end(), [](Coord a, Coord b) {
    return a.y != b.y ? a.y < b.y : a.x < b.x;  // row-major
  });
  cs.erase(std::unique(cs.begin(), cs.end()), cs.end());
  LatticeRegion r;
  r.cells = std::move(cs);
  for (int i = 0; i < static_cast<int>(r.cells.size()); ++i)
    r.index[r.cells[i]] = i;
  return r;
}

int LatticeRegion::id_of(Coord c) const {
  auto it = index.find(c);
  if (it == index.end()) throw std::out_of_range("cell not in region");
  return it->second;
}

std::vector<int> LatticeRegion::neighbors(int v) const {
  std::vector<int> out;
  for (Dir d : {Dir::N, Dir::E, Dir::S, Dir::W}) {
    auto it = index.find(step(cells.at(v), d));
    if (it != index.end()) out.push_back(it->second);
  }
  return out;
}

void GenericGraph::add_edge(int u, int v) {
  if (u == v) throw std::invalid_argument("self-loop");
  if (u < 0 || v < 0 || u >= n || v >= n)
    throw std::out_of_range("edge endpoint out of range");
  if (has_edge(u, v)) throw std::invalid_argument("parallel edge");
  adj[u].push_back(v);
  adj[v].push_back(u);
}

bool GenericGraph::has_edge(int u, int v) const {
  for (int x : adj[u])
    if (x == v) return true;
  return false;
}

std::size_t GenericGraph::edge_count() const {
  std::size_t deg = 0;
  for (const auto& a : adj) deg += a.size();
  return deg / 2;
}

int GenericGraph::neighbor_rank(int u, int x) const {
  for (std::size_t i = 0; i < adj[u].size(); ++i)
    if (adj[u][i] == x) return static_cast<int>(i);
  throw std::out_of_range("not a neighbor");
}

LatticeRegion build_box(int L) {
  if (L < 0) throw std::invalid_argument("negative radius");
  std::vector<Coord> cs;
  for (int y = -L; y <= L; ++y)
    for (int x = -L; x <= L; ++x) cs.push_back({x, y});
  return LatticeRegion::from_cells(std::move(cs));
}

RegionGraph to_graph(const LatticeRegion& r) {
  RegionGraph out;
  out.graph.n = static_cast<int>(r.size());
  out.graph.adj.resize(out.graph.n);
  out.coord_of = r.cells;
  for (int v = 0; v < out.graph.n; ++v) out.graph.adj[v] = r.neighbors(v);
  return out;
}

namespace {

// Shared pin-folding once neighbors are known.
PinnedGraph reduce(int n, const std::vector<std::vector<int>>& adj,
                   const std::map<int, Pin>& pins) {
  for (const auto& [v, p] : pins) {
    if (v < 0 || v >= n) throw std::invalid_argument("pin on absent vertex");
    if (p == Pin::Occupied)
      for (int u : adj[v]) {
        auto it = pins.find(u);
        if (it != pins.end() && it->second == Pin::Occupied)
          throw std::invalid_argument("adjacent Occupied pins");
      }
  }
  std::vector<bool> removed(n, false);
  for (const auto& [v, p] : pins) {
    removed[v] = true;
    if (p == Pin::Occupied)
      for (int u : adj[v]) removed[u] = true;
  }
  PinnedGraph out;
  std::vector<int> new_id(n, -1);
  for (int v = 0; v < n; ++v)
    if (!removed[v]) {
      new_id[v] = out.graph.n++;
      out.orig_of.push_back(v);
    }
  out.graph.adj.resize(out.graph.n);
  for (int v = 0; v < n; ++v)
    if (new_id[v] >= 0)
      for (int u : adj[v])
        if (new_id[u] >= 0) out.graph.adj[new_id[v]].push_back(new_id[u]);
  return out;
}

}  // namespace

PinnedGraph apply_pins(const LatticeRegion& r, const CoordPins& pins) {
  std::map<int, Pin> by_id;
  for (const auto& [c, p] : pins) {
    if (!r.contains(c)) throw std::invalid_argument("pin on absent cell");
    by_id[r.id_of(c)] = p;
  }
  auto rg = to_graph(r);
  PinnedGraph out = reduce(rg.graph.n, rg.graph.adj, by_id);
  for (int v : out.orig_of) out.coord_of.push_back(r.cells[v]);
  return out;
}

PinnedGraph apply_pins(const GenericGraph& g, const VertexPins& pins) {
  return reduce(g.n, g.adj, pins);
}

CoordPins boundary_pins(const LatticeRegion& r, Parity parity) {
  int L = 0;
  for (Coord c : r.cells)
    L = std::max({L, std::abs(c.x), std::abs(c.y)});
  CoordPins out;
  int want = parity == Parity::Even ? 0 : 1;
  for (Coord c : r.cells) {
    if (std::max(std::abs(c.x), std::abs(c.y)) != L) continue;
    int par = ((c.x + c.y) % 2 + 2) % 2;
    out[c] = par == want ? Pin::Occupied : Pin::Unoccupied;
  }
  return out;
}

// --- io ----------------------------------------------------------------------

void save_region(std::ostream& os, const LatticeRegion& r) {
  os << "region " << r.size() << "\n";
  for (Coord c : r.cells) os << c.x << " " << c.y << "\n";
}

LatticeRegion load_region(std::istream& is) {
  std::string tag;
  std::size_t n;
  if (!(is >> tag >> n) || tag != "region")
    throw std::runtime_error("bad region header");
  std::vector<Coord> cs(n);
  for (auto& c : cs)
    if (!(is >> c.x >> c.y)) throw std::runtime_error("truncated region file");
  return LatticeRegion::from_cells(std::move(cs));
}

void save_pins(std::ostream& os, const CoordPins& p) {
  for (const auto& [c, pin] : p)
    os << c.x << " " << c.y << " "
       << (pin == Pin::Occupied ? "occ" : "unocc") << "\n";
}

CoordPins load_pins(std::istream& is) {
  CoordPins out;
  int x, y;
  std::string w;
  while (is >> x >> y >> w) {
    if (w == "occ")
      out[{x, y}] = Pin::Occupied;
    else if (w == "unocc")
      out[{x, y}] = Pin::Unoccupied;
    else
      throw std::runtime_error("bad pin word: " + w);
  }
  return out;
}

void save_graph(std::ostream& os, const GenericGraph& g) {
  os << "graph " << g.n << " " << g.edge_count() << "\n";
  for (int u = 0; u < g.n; ++u)
    for (int v : g.adj[u])
      if (u < v) os << u << " " << v << "\n";
  for (int u = 0; u < g.n; ++u) {
    os << "order " << u << ":";
    for (int v : g.adj[u]) os << " " << v;
    os << "\n";
  }
}

GenericGraph load_graph(std::istream& is) {
  std::string tag;
  int n, m;
  if (!(is >> tag >> n >> m) || tag != "graph")
    throw std::runtime_error("bad graph header");
  GenericGraph g;
  g.n = n;
  g.adj.resize(n);
  for (int i = 0; i < m; ++i) {
    int u, v;
    if (!(is >> u >> v)) throw std::runtime_error("truncated graph file");
    g.add_edge(u, v);
  }
  // Optional explicit neighbor orders.
  std::string word;
  while (is >> word) {
    if (word != "order") throw std::runtime_error("bad trailing data: " + word);
    int u;
    char colon;
    if (!(is >> u) ) throw std::runtime_error("bad order line");
    is >> colon;  // consumes ':'
    std::vector<int> order;
    std::string line;
    std::getline(is, line);
    std::istringstream ls(line);
    int v;
    while (ls >> v) order.push_back(v);
    std::vector<int> old = g.adj.at(u);
    std::sort(old.begin(), old.end());
    std::vector<int> chk = order;
    std::sort(chk.begin(), chk.end());
    if (old != chk) throw std::runtime_error("order line is not a permutation");
    g.adj[u] = order;
  }
  return g;
}

}  // namespace gridmix
