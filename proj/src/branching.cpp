#include "gridmix/branching.hpp"

#include <algorithm>
#include <cassert>
#include <cctype>
#include <istream>
#include <map>
#include <ostream>
#include <queue>
#include <set>
#include <sstream>
#include <stdexcept>

#include "gridmix/sawtree.hpp"

namespace gridmix {

namespace {

// Priority of a direction letter: N highest, then E, S, W. The cycle rule
// compares the first edge out of the revisited vertex against the inverse of
// the closing step.
int letter_rank(char c) {
  switch (c) {
    case 'N': return 3;
    case 'E': return 2;
    case 'S': return 1;
    case 'W': return 0;
  }
  throw std::invalid_argument(std::string("bad direction letter: ") + c);
}

char inverse_letter(char c) {
  switch (c) {
    case 'N': return 'S';
    case 'S': return 'N';
    case 'E': return 'W';
    case 'W': return 'E';
  }
  throw std::invalid_argument(std::string("bad direction letter: ") + c);
}

std::pair<int, int> letter_vec(char c) {
  switch (c) {
    case 'N': return {0, 1};
    case 'E': return {1, 0};
    case 'S': return {0, -1};
    case 'W': return {-1, 0};
  }
  throw std::invalid_argument(std::string("bad direction letter: ") + c);
}

// Collation for canonical ordering of suffix labels: N < E < S < W.
int collate(char c) { return 3 - letter_rank(c); }

bool label_less(const std::string& a, const std::string& b) {
  if (a.size() != b.size()) return a.size() < b.size();
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] != b[i]) return collate(a[i]) < collate(b[i]);
  return false;
}

// Does stepping `d` from the walk-suffix `s` complete a cycle of length
// <= max_cycle? (Equivalently: the last 2k-1 letters plus d sum to zero for
// some k.) If so, is the closing copy fixed Occupied — poisoning the parent?
struct StepClose {
  bool closes = false;
  bool poisons = false;
};

StepClose close_info(const std::string& s, char d, int max_cycle) {
  StepClose out;
  auto [dx, dy] = letter_vec(d);
  int sx = dx, sy = dy;
  int len = static_cast<int>(s.size());
  for (int back = 1; back <= std::min(len, max_cycle - 1); ++back) {
    auto [vx, vy] = letter_vec(s[len - back]);
    sx += vx;
    sy += vy;
    int cycle_len = back + 1;
    if (sx == 0 && sy == 0 && cycle_len % 2 == 0 && cycle_len >= 4) {
      out.closes = true;
      // First edge out of the revisited vertex vs. the edge back to the
      // closing copy's parent: smaller rank on the walk side means the
      // closing copy is fixed Occupied, killing its parent.
      if (letter_rank(s[len - back]) < letter_rank(inverse_letter(d)))
        out.poisons = true;
      // A walk suffix in the automaton contains no completed short cycle,
      // so the first zero partial sum is the only one; keep scanning anyway
      // in case a longer window also closes (it cannot for simple walks).
      return out;
    }
  }
  return out;
}

struct Automaton {
  std::vector<std::string> states;            // windowed suffixes; [0] = ""
  std::map<std::string, int> index;
  std::vector<std::vector<int>> children;     // surviving transitions
  int window = 0;
};

Automaton build_automaton(int max_cycle, bool prune,
                          const std::string& enum_order) {
  Automaton a;
  a.window = max_cycle - 1;
  a.states.push_back("");
  a.index[""] = 0;

  auto admissible_steps = [&](const std::string& s) {
    std::vector<char> out;
    for (char d : enum_order) {
      if (!s.empty() && d == inverse_letter(s.back())) continue;
      out.push_back(d);
    }
    return out;
  };

  // BFS over windowed suffixes. A transition exists unless the step closes a
  // short cycle (the walk ends there in every variant of the construction).
  std::queue<int> bfs;
  bfs.push(0);
  std::vector<std::vector<int>> raw_children{{}};
  while (!bfs.empty()) {
    int si = bfs.front();
    bfs.pop();
    std::string s = a.states[si];
    for (char d : admissible_steps(s)) {
      if (close_info(s, d, max_cycle).closes) continue;
      std::string t = s + d;
      if (static_cast<int>(t.size()) > a.window)
        t = t.substr(t.size() - a.window);
      auto it = a.index.find(t);
      int ti;
      if (it == a.index.end()) {
        ti = static_cast<int>(a.states.size());
        a.states.push_back(t);
        a.index[t] = ti;
        raw_children.push_back({});
        bfs.push(ti);
      } else {
        ti = it->second;
      }
      raw_children[si].push_back(ti);
    }
  }

  if (!prune) {
    a.children = std::move(raw_children);
    return a;
  }

  // Poisoned states are those with some admissible Occupied-fixed closing
  // step; they vanish together with their subtrees, i.e. all edges into
  // them. Poison is intrinsic to the window, so one sweep plus a
  // reachability pass is the fixed point.
  std::vector<bool> poisoned(a.states.size(), false);
  for (std::size_t i = 0; i < a.states.size(); ++i)
    for (char d : admissible_steps(a.states[i]))
      if (close_info(a.states[i], d, max_cycle).poisons) {
        poisoned[i] = true;
        break;
      }

  std::vector<std::vector<int>> kept(a.states.size());
  for (std::size_t i = 0; i < a.states.size(); ++i) {
    if (poisoned[i]) continue;
    for (int c : raw_children[i])
      if (!poisoned[c]) kept[i].push_back(c);
  }

  std::vector<bool> reach(a.states.size(), false);
  std::queue<int> q;
  q.push(0);
  reach[0] = true;
  while (!q.empty()) {
    int u = q.front();
    q.pop();
    for (int c : kept[u])
      if (!reach[c]) {
        reach[c] = true;
        q.push(c);
      }
  }

  Automaton b;
  b.window = a.window;
  std::vector<int> remap(a.states.size(), -1);
  for (std::size_t i = 0; i < a.states.size(); ++i)
    if (reach[i]) {
      remap[i] = static_cast<int>(b.states.size());
      b.states.push_back(a.states[i]);
      b.index[a.states[i]] = remap[i];
    }
  b.children.resize(b.states.size());
  for (std::size_t i = 0; i < a.states.size(); ++i)
    if (remap[i] >= 0)
      for (int c : kept[i])
        if (remap[c] >= 0) b.children[remap[i]].push_back(remap[c]);
  return b;
}

// Minimum number of steps from each state until some continuation completes
// a short cycle (closing steps are counted). Backward BFS: states with an
// immediate closing step have distance 1.
std::vector<int> closure_distance(const Automaton& a, int max_cycle) {
  int n = static_cast<int>(a.states.size());
  const int INF = 1 << 29;
  std::vector<int> dist(n, INF);
  std::vector<std::vector<int>> parents(n);
  for (int i = 0; i < n; ++i)
    for (int c : a.children[i]) parents[c].push_back(i);
  std::queue<int> q;
  for (int i = 0; i < n; ++i) {
    const std::string& s = a.states[i];
    for (char d : {'N', 'E', 'S', 'W'}) {
      if (!s.empty() && d == inverse_letter(s.back())) continue;
      if (close_info(s, d, max_cycle).closes) {
        dist[i] = 1;
        q.push(i);
        break;
      }
    }
  }
  while (!q.empty()) {
    int u = q.front();
    q.pop();
    for (int p : parents[u])
      if (dist[p] > dist[u] + 1) {
        dist[p] = dist[u] + 1;
        q.push(p);
      }
  }
  return dist;
}

BranchingMatrix quotient(const Automaton& a,
                         const std::vector<int>& class_of_state,
                         const std::vector<std::string>& class_labels,
                         int root_class) {
  int t = static_cast<int>(class_labels.size());
  BranchingMatrix m;
  m.t = t;
  m.root_type = root_class;
  m.labels = class_labels;
  m.m.assign(t, std::vector<int>(t, 0));
  for (std::size_t i = 0; i < a.states.size(); ++i) {
    std::vector<int> row(t, 0);
    for (int c : a.children[i]) ++row[class_of_state[c]];
    int cls = class_of_state[i];
    for (int j = 0; j < t; ++j)
      m.m[cls][j] = std::max(m.m[cls][j], row[j]);
  }
  return m;
}

BranchingMatrix generate_with_order(int max_cycle, bool prune,
                                    const std::string& enum_order) {
  if (max_cycle < 4 || max_cycle % 2 != 0)
    throw std::invalid_argument("max_cycle must be an even integer >= 4");

  Automaton a = build_automaton(max_cycle, prune, enum_order);
  std::vector<int> class_of(a.states.size());
  std::vector<std::string> labels;
  int root_class;

  if (prune) {
    // Type = trailing window of length max_cycle-2 (whole walk near root).
    int key_len = max_cycle - 2;
    std::map<std::string, std::vector<int>, decltype(&label_less)> classes(
        &label_less);
    for (std::size_t i = 0; i < a.states.size(); ++i) {
      const std::string& s = a.states[i];
      std::string key = static_cast<int>(s.size()) <= key_len
                            ? s
                            : s.substr(s.size() - key_len);
      classes[key].push_back(static_cast<int>(i));
    }
    int idx = 0;
    for (const auto& [key, members] : classes) {
      labels.push_back(key);
      for (int st : members) class_of[st] = idx;
      ++idx;
    }
    root_class = static_cast<int>(
        std::find(labels.begin(), labels.end(), "") - labels.begin());
  } else {
    // Type = distance to the nearest possible closure; fewest-additional-
    // edges-last ordering, root first.
    std::vector<int> dist = closure_distance(a, max_cycle);
    std::set<int> values(dist.begin() + 1, dist.end());
    std::map<int, int> type_of_dist;  // larger distance = earlier type
    labels.push_back("");             // root
    for (auto it = values.rbegin(); it != values.rend(); ++it)
      type_of_dist[*it] = static_cast<int>(labels.size()),
      labels.push_back("");
    class_of[0] = 0;
    root_class = 0;
    // Representative label: shortest, then collation-least, state per class.
    for (std::size_t i = 1; i < a.states.size(); ++i) {
      int cls = type_of_dist.at(dist[i]);
      class_of[i] = cls;
      if (labels[cls].empty() || label_less(a.states[i], labels[cls]))
        labels[cls] = a.states[i];
    }
  }

  BranchingMatrix m = quotient(a, class_of, labels, root_class);
  m.rule = prune ? TypeRule::SuffixWindow : TypeRule::CycleDistance;
  m.max_cycle = max_cycle;
  m.pruned = prune;
  return m;
}

}  // namespace

std::vector<int> BranchingMatrix::row_sums() const {
  std::vector<int> out(t, 0);
  for (int i = 0; i < t; ++i)
    for (int j = 0; j < t; ++j) out[i] += m[i][j];
  return out;
}

int BranchingMatrix::delta() const {
  int d = 0;
  for (int s : row_sums()) d = std::max(d, s);
  return d;
}

std::optional<int> BranchingMatrix::classify(const std::string& walk) const {
  if (t == 1) return 0;
  if (rule == TypeRule::CycleDistance && max_cycle >= 4) {
    if (walk.empty()) return root_type;
    // Distance is a window property; rebuild is cheap enough to cache.
    static thread_local std::map<std::pair<int, bool>,
                                 std::map<std::string, int>>
        cache;
    auto key = std::make_pair(max_cycle, pruned);
    auto it = cache.find(key);
    if (it == cache.end()) {
      Automaton a = build_automaton(max_cycle, pruned, "NESW");
      std::vector<int> dist = closure_distance(a, max_cycle);
      std::map<std::string, int> by_window;
      for (std::size_t i = 1; i < a.states.size(); ++i)
        by_window[a.states[i]] = dist[i];
      it = cache.emplace(key, std::move(by_window)).first;
    }
    int w = max_cycle - 1;
    std::string window = static_cast<int>(walk.size()) <= w
                             ? walk
                             : walk.substr(walk.size() - w);
    auto f = it->second.find(window);
    if (f == it->second.end()) return std::nullopt;
    // Types are laid out root-first then by decreasing distance, and the
    // observed distances are exactly 1..t-1 (a cycle can always be completed
    // within three fresh steps), so distance d maps to type t-d.
    return t - f->second;
  }
  // Suffix-window lookup against labels.
  std::size_t maxlen = 0;
  for (const auto& l : labels) maxlen = std::max(maxlen, l.size());
  std::string key =
      walk.size() <= maxlen ? walk : walk.substr(walk.size() - maxlen);
  for (int j = 0; j < t; ++j)
    if (j < static_cast<int>(labels.size()) && labels[j] == key) return j;
  return std::nullopt;
}

BranchingMatrix generate_matrix(int max_cycle, bool prune) {
  return generate_with_order(max_cycle, prune, "NESW");
}

namespace detail {
BranchingMatrix generate_matrix_with_order(int max_cycle, bool prune,
                                           const std::string& enum_order) {
  return generate_with_order(max_cycle, prune, enum_order);
}
}  // namespace detail

bool verify_domination(const BranchingMatrix& m, int L,
                       std::string* counterexample) {
  if (L < 1) throw std::invalid_argument("L must be >= 1");
  LatticeRegion box = build_box(L);
  RegionGraph rg = to_graph(box);
  int origin = box.id_of({0, 0});
  SawTree t = build_saw_tree(rg.graph, origin, L);

  // Letters of each node's walk, recovered from coordinates.
  std::vector<std::string> walk(t.size());
  std::vector<int> type(t.size(), -1);
  for (std::size_t i = 0; i < t.size(); ++i) {
    const SawNode& nd = t.nodes[i];
    if (nd.parent >= 0) {
      Coord pc = rg.coord_of[t.nodes[nd.parent].vertex];
      Coord cc = rg.coord_of[nd.vertex];
      char letter = 0;
      for (Dir d : {Dir::N, Dir::E, Dir::S, Dir::W})
        if (step(pc, d) == cc) letter = dir_letter(d);
      walk[i] = walk[nd.parent] + letter;
    }
    auto ty = m.classify(walk[i]);
    if (!ty) {
      if (counterexample) *counterexample = walk[i];
      return false;
    }
    type[i] = *ty;
  }
  if (type[0] != m.root_type) {
    if (counterexample) *counterexample = "";
    return false;
  }
  for (std::size_t i = 0; i < t.size(); ++i) {
    std::vector<int> counts(m.t, 0);
    for (int c : t.children(static_cast<int>(i))) ++counts[type[c]];
    for (int j = 0; j < m.t; ++j)
      if (counts[j] > m.m[type[i]][j]) {
        if (counterexample) *counterexample = walk[i];
        return false;
      }
  }
  return true;
}

double perron_root_estimate(const BranchingMatrix& m, int iters) {
  int n = m.t;
  std::vector<double> x(n, 1.0);
  double rho = 0.0;
  for (int it = 0; it < iters; ++it) {
    std::vector<double> y(n, 0.0);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) y[i] += m.m[i][j] * x[j];
    double mx = 0.0;
    for (double v : y) mx = std::max(mx, v);
    if (mx == 0.0) return 0.0;
    rho = mx;
    for (double& v : y) v /= mx;
    x = std::move(y);
  }
  return rho;
}

void save_matrix(std::ostream& os, const BranchingMatrix& m) {
  os << "branching " << m.t << " " << m.root_type << "\n";
  for (int i = 0; i < m.t; ++i) {
    for (int j = 0; j < m.t; ++j) os << (j ? " " : "") << m.m[i][j];
    os << "\n";
  }
  for (int j = 0; j < static_cast<int>(m.labels.size()); ++j)
    os << "label " << j << ": " << m.labels[j] << "\n";
}

BranchingMatrix load_matrix(std::istream& is) {
  std::string tag;
  int t, root;
  if (!(is >> tag >> t >> root) || tag != "branching" || t <= 0 ||
      root < 0 || root >= t)
    throw std::runtime_error("bad matrix header");
  BranchingMatrix m;
  m.t = t;
  m.root_type = root;
  m.m.assign(t, std::vector<int>(t, 0));
  for (int i = 0; i < t; ++i)
    for (int j = 0; j < t; ++j)
      if (!(is >> m.m[i][j]) || m.m[i][j] < 0)
        throw std::runtime_error("bad matrix entry");
  m.labels.assign(t, "");
  std::string word;
  while (is >> word) {
    if (word != "label") throw std::runtime_error("bad trailing data");
    int j;
    char colon;
    if (!(is >> j) || j < 0 || j >= t) throw std::runtime_error("bad label index");
    is >> colon;
    std::string rest;
    std::getline(is, rest);
    std::string suffix;
    for (char ch : rest)
      if (!isspace(static_cast<unsigned char>(ch))) suffix += ch;
    m.labels[j] = suffix;
  }
  return m;
}

}  // namespace gridmix
