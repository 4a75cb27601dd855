#include "gridmix/sawtree.hpp"

#include <cassert>
#include <stdexcept>

namespace gridmix {

namespace {

Pin pin_of(const VertexPins& pins, int v, bool& has) {
  auto it = pins.find(v);
  has = it != pins.end();
  return has ? it->second : Pin::Unoccupied;
}

// True when expanding the walk by x would hand x a child that the cycle rule
// fixes Occupied (or a copy of an Occupied-pinned vertex): x is then forced
// unoccupied and is dropped from its parent entirely. walk holds the
// vertices root..u; x is u's prospective child. A neighbor y of x that lies
// on the walk closes the cycle y -> walk[pos_y+1] -> ... -> x -> y; the
// closing copy of y is fixed Unoccupied iff walk[pos_y+1] outranks x at y.
bool forced_unoccupied(const GenericGraph& g, const VertexPins& pins,
                       const std::vector<int>& walk,
                       const std::vector<int>& pos_in_walk, int u, int x) {
  for (int y : g.adj[x]) {
    if (y == u) continue;  // x's parent in the tree
    bool has = false;
    if (pin_of(pins, y, has) == Pin::Occupied && has) return true;
    int pos = y < static_cast<int>(pos_in_walk.size()) ? pos_in_walk[y] : -1;
    if (pos >= 0) {
      int v1 = walk[pos + 1];
      if (!(g.neighbor_rank(y, v1) < g.neighbor_rank(y, x))) return true;
    }
  }
  return false;
}

struct Frame {
  int u;          // graph vertex
  int node;       // arena index
  int next = 0;   // neighbor cursor into g.adj[u]
};

}  // namespace

std::vector<int> SawTree::children(int node) const {
  std::vector<int> out;
  for (int c = nodes[node].first_child; c >= 0; c = nodes[c].next_sibling)
    out.push_back(c);
  return out;
}

SawTree build_saw_tree(const GenericGraph& g, int v, int depth_cap,
                       const VertexPins& pins) {
  if (v < 0 || v >= g.n) throw std::invalid_argument("root not in graph");
  if (depth_cap < 1) throw std::invalid_argument("depth_cap must be >= 1");

  SawTree t;
  t.depth_cap = depth_cap;
  t.nodes.push_back({v, 0, -1, -1, -1, -1, false});

  bool root_pinned = false;
  Pin rp = pin_of(pins, v, root_pinned);
  if (root_pinned) {
    t.nodes[0].pin = static_cast<std::int8_t>(rp);
    return t;  // query vertex itself pinned: nothing to expand
  }
  for (int x : g.adj[v]) {
    bool has = false;
    if (pin_of(pins, x, has) == Pin::Occupied && has) {
      t.root_forced_unoccupied = true;
      return t;
    }
  }

  std::vector<int> walk{v};
  std::vector<int> pos_in_walk(g.n, -1);
  pos_in_walk[v] = 0;
  std::vector<int> tail{0};  // last child of each open node, for linking
  std::vector<Frame> stack{{v, 0, 0}};

  auto link_child = [&](int parent_node, int child_node) {
    if (t.nodes[parent_node].first_child < 0)
      t.nodes[parent_node].first_child = child_node;
    else
      t.nodes[tail[stack.size() - 1]].next_sibling = child_node;
    tail[stack.size() - 1] = child_node;
  };

  while (!stack.empty()) {
    Frame& f = stack.back();
    if (f.next >= static_cast<int>(g.adj[f.u].size())) {
      pos_in_walk[f.u] = -1;
      walk.pop_back();
      tail.pop_back();
      stack.pop_back();
      continue;
    }
    int x = g.adj[f.u][f.next++];
    int parent_vertex =
        walk.size() >= 2 ? walk[walk.size() - 2] : -1;
    if (x == parent_vertex) continue;  // not a self-avoiding extension
    if (pos_in_walk[x] >= 0) {
      // Cycle-closing copy. The Occupied direction was ruled out when f.u
      // itself was admitted, so this leaf is fixed Unoccupied and dropped.
      assert(g.neighbor_rank(x, walk[pos_in_walk[x] + 1]) <
             g.neighbor_rank(x, f.u));
      continue;
    }
    bool has = false;
    Pin p = pin_of(pins, x, has);
    if (has && p == Pin::Occupied) {
      // Would have doomed f.u before it was created.
      assert(false);
      continue;
    }
    int depth = t.nodes[f.node].depth + 1;
    if (has && p == Pin::Unoccupied) {
      int id = static_cast<int>(t.nodes.size());
      t.nodes.push_back({x, depth, f.node, -1, -1,
                         static_cast<std::int8_t>(Pin::Unoccupied), false});
      link_child(f.node, id);
      continue;
    }
    if (forced_unoccupied(g, pins, walk, pos_in_walk, f.u, x))
      continue;  // x's subtree removed together with its Occupied-fixed child
    if (depth == depth_cap) {
      int id = static_cast<int>(t.nodes.size());
      t.nodes.push_back({x, depth, f.node, -1, -1, -1, true});
      link_child(f.node, id);
      t.truncated = true;
      continue;
    }
    int id = static_cast<int>(t.nodes.size());
    t.nodes.push_back({x, depth, f.node, -1, -1, -1, false});
    link_child(f.node, id);
    walk.push_back(x);
    pos_in_walk[x] = static_cast<int>(walk.size()) - 1;
    tail.push_back(-1);
    stack.push_back({x, id, 0});
  }
  return t;
}

Rat root_unoccupied_prob(const SawTree& t, const Rat& lambda,
                         Boundary boundary) {
  if (lambda < 0) throw std::invalid_argument("negative activity");
  if (boundary == Boundary::Free && t.truncated)
    throw std::invalid_argument("Free boundary on a truncated tree");
  if (t.root_forced_unoccupied) return Rat(1);
  if (t.nodes[0].pin >= 0)
    return static_cast<Pin>(t.nodes[0].pin) == Pin::Occupied ? Rat(0) : Rat(1);

  std::vector<Rat> alpha(t.nodes.size());
  // Children always follow their parent in the arena, so one reverse sweep
  // is a postorder.
  for (int i = static_cast<int>(t.nodes.size()) - 1; i >= 0; --i) {
    const SawNode& nd = t.nodes[i];
    if (nd.pin >= 0) {
      alpha[i] = static_cast<Pin>(nd.pin) == Pin::Occupied ? Rat(0) : Rat(1);
      continue;
    }
    if (nd.capped) {
      alpha[i] =
          boundary == Boundary::AllOccupiedAtCap ? Rat(0) : Rat(1);
      continue;
    }
    Rat prod(1);
    for (int c = nd.first_child; c >= 0; c = t.nodes[c].next_sibling)
      prod *= alpha[c];
    alpha[i] = Rat(1) / (1 + lambda * prod);
  }
  return alpha[0];
}

Rat saw_root_prob_lazy(const GenericGraph& g, int v, int depth_cap,
                       const VertexPins& pins, const Rat& lambda,
                       Boundary boundary) {
  if (v < 0 || v >= g.n) throw std::invalid_argument("root not in graph");
  if (depth_cap < 1) throw std::invalid_argument("depth_cap must be >= 1");

  bool root_pinned = false;
  Pin rp = pin_of(pins, v, root_pinned);
  if (root_pinned) return rp == Pin::Occupied ? Rat(0) : Rat(1);
  for (int x : g.adj[v]) {
    bool has = false;
    if (pin_of(pins, x, has) == Pin::Occupied && has) return Rat(1);
  }

  Rat cap_alpha = boundary == Boundary::AllOccupiedAtCap ? Rat(0) : Rat(1);
  bool truncated = false;

  struct LFrame {
    int u;
    int next = 0;
    Rat prod;
  };
  std::vector<int> walk{v};
  std::vector<int> pos_in_walk(g.n, -1);
  pos_in_walk[v] = 0;
  std::vector<LFrame> stack;
  stack.push_back({v, 0, Rat(1)});

  Rat result(0);
  while (!stack.empty()) {
    LFrame& f = stack.back();
    if (f.next >= static_cast<int>(g.adj[f.u].size())) {
      Rat alpha = Rat(1) / (1 + lambda * f.prod);
      pos_in_walk[f.u] = -1;
      walk.pop_back();
      stack.pop_back();
      if (stack.empty())
        result = alpha;
      else
        stack.back().prod *= alpha;
      continue;
    }
    int x = g.adj[f.u][f.next++];
    int parent_vertex = walk.size() >= 2 ? walk[walk.size() - 2] : -1;
    if (x == parent_vertex) continue;
    if (pos_in_walk[x] >= 0) continue;  // Unoccupied closure, dropped
    bool has = false;
    Pin p = pin_of(pins, x, has);
    if (has && p == Pin::Unoccupied) continue;  // factor 1
    if (forced_unoccupied(g, pins, walk, pos_in_walk, f.u, x)) continue;
    int depth = static_cast<int>(walk.size());  // depth of x if admitted
    if (depth == depth_cap) {
      truncated = true;
      f.prod *= cap_alpha;
      continue;
    }
    walk.push_back(x);
    pos_in_walk[x] = static_cast<int>(walk.size()) - 1;
    stack.push_back({x, 0, Rat(1)});
  }
  if (boundary == Boundary::Free && truncated)
    throw std::invalid_argument("Free boundary on a truncated tree");
  return result;
}

Rat brute_force_marginal(const GenericGraph& g, int v, const Rat& lambda,
                         const VertexPins& pins) {
  if (g.n > 24) throw std::invalid_argument("brute force guarded to 24 vertices");
  if (v < 0 || v >= g.n) throw std::invalid_argument("vertex not in graph");

  // Z = sum_k N_k lambda^k; count independent sets by occupancy so the DFS
  // stays in integers.
  std::vector<unsigned long long> total(g.n + 1, 0), v_unocc(g.n + 1, 0);
  std::vector<std::uint8_t> occ(g.n, 0);

  // DFS over vertices in id order.
  struct StackEntry { int vertex; int phase; };
  std::vector<StackEntry> st{{0, 0}};
  int occupied_count = 0;
  while (!st.empty()) {
    auto [u, phase] = st.back();
    st.pop_back();
    if (u == g.n) {
      ++total[occupied_count];
      if (!occ[v]) ++v_unocc[occupied_count];
      continue;
    }
    bool has = false;
    Pin p = pin_of(pins, u, has);
    if (phase == 0) {
      st.push_back({u, 1});
      if (!has || p == Pin::Unoccupied) {  // try unoccupied
        occ[u] = 0;
        st.push_back({u + 1, 0});
      }
      continue;
    }
    if (phase == 1) {
      bool can_occupy = !has || p == Pin::Occupied;
      if (can_occupy)
        for (int x : g.adj[u])
          if (x < u && occ[x]) { can_occupy = false; break; }
      if (can_occupy) {
        st.push_back({u, 2});
        occ[u] = 1;
        ++occupied_count;
        st.push_back({u + 1, 0});
      } else if (has && p == Pin::Occupied) {
        // pinned Occupied but blocked: this branch contributes nothing
      }
      continue;
    }
    occ[u] = 0;  // phase 2: undo occupy
    --occupied_count;
  }

  Rat z(0), zu(0), pw(1);
  for (int k = 0; k <= g.n; ++k) {
    if (total[k]) z += Rat(static_cast<long>(total[k])) * pw;
    if (v_unocc[k]) zu += Rat(static_cast<long>(v_unocc[k])) * pw;
    pw *= lambda;
  }
  if (z == 0) throw std::invalid_argument("pins admit no configuration");
  return zu / z;
}

Rat saw_marginal(const GenericGraph& g, int v, const Rat& lambda,
                 const VertexPins& pins) {
  bool has = false;
  Pin p = pin_of(pins, v, has);
  if (has) return p == Pin::Occupied ? Rat(0) : Rat(1);
  return saw_root_prob_lazy(g, v, g.n + 1, pins, lambda, Boundary::Free);
}

}  // namespace gridmix
