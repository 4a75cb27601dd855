#include "gridmix/ising.hpp"

#include <cmath>
#include <functional>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace gridmix {

namespace {

// Spin values share the hard-core pin slots: minus <-> Occupied(0),
// plus <-> Unoccupied(1).
constexpr std::int8_t kMinus = static_cast<std::int8_t>(Pin::Occupied);
constexpr std::int8_t kPlus = static_cast<std::int8_t>(Pin::Unoccupied);

Verdict verdict_fail(FailKind kind, std::string witness) {
  Verdict v;
  v.pass = false;
  v.kind = kind;
  v.witness = std::move(witness);
  return v;
}

}  // namespace

Verdict check_ising(const BranchingMatrix& m, const IsingCertificate& cert) {
  if (m.t < 1 || static_cast<int>(cert.c.size()) != m.t)
    return verdict_fail(FailKind::Precondition,
                        "certificate dimensions do not match");
  if (!(cert.tanh_beta_star > 0) || !(cert.tanh_beta_star < 1))
    return verdict_fail(FailKind::Precondition,
                        "tanh(beta*) must lie in (0,1)");
  for (int j = 0; j < m.t; ++j)
    if (!(cert.c[j] > 0))
      return verdict_fail(FailKind::Precondition,
                          "c_" + std::to_string(j) + " must be positive");

  Verdict v;
  v.per_type_slack.resize(m.t);
  int worst = -1;
  for (int j = 0; j < m.t; ++j) {
    Rat row(0);
    for (int l = 0; l < m.t; ++l)
      if (m.m[j][l]) row += Rat(m.m[j][l]) * cert.c[l];
    v.per_type_slack[j] = cert.c[j] - cert.tanh_beta_star * row;
    if (worst < 0 || v.per_type_slack[j] < v.per_type_slack[worst]) worst = j;
  }
  if (v.per_type_slack[worst] > 0) {
    v.pass = true;
    v.kind = FailKind::None;
    return v;
  }
  v.pass = false;
  v.kind = FailKind::Inequality;
  v.witness = "tanh(beta*)*(Mc)_" + std::to_string(worst) + " = " +
              rat_to_decimal(cert.c[worst] - v.per_type_slack[worst], 12) +
              " >= c_" + std::to_string(worst) + " = " +
              rat_to_decimal(cert.c[worst], 12);
  return v;
}

RatInterval certified_beta_star(const IsingCertificate& cert,
                                unsigned prec_bits) {
  return atanh_bracket(cert.tanh_beta_star, prec_bits);
}

PerronCertificate perron_certificate(const BranchingMatrix& m, int iters) {
  if (m.t < 1) throw std::invalid_argument("empty matrix");
  if (iters < 1) throw std::invalid_argument("iters must be >= 1");

  // The root type leaves the spectral block when nothing maps into it; its
  // row is then satisfied afterwards by scaling c_root.
  bool root_has_in_edge = false;
  for (int l = 0; l < m.t; ++l)
    if (m.m[l][m.root_type] > 0) root_has_in_edge = true;

  std::vector<int> block;
  for (int j = 0; j < m.t; ++j)
    if (root_has_in_edge || j != m.root_type) block.push_back(j);

  PerronCertificate out;
  out.c.assign(m.t, Rat(1));

  if (!block.empty()) {
    std::vector<double> x(block.size(), 1.0);
    for (int it = 0; it < iters; ++it) {
      std::vector<double> y(block.size(), 0.0);
      for (std::size_t a = 0; a < block.size(); ++a)
        for (std::size_t b = 0; b < block.size(); ++b)
          y[a] += m.m[block[a]][block[b]] * x[b];
      double mx = 0.0;
      for (double v : y) mx = std::max(mx, v);
      if (!(mx > 0)) break;  // nilpotent-to-zero block
      for (std::size_t a = 0; a < block.size(); ++a) x[a] = y[a] / mx;
    }
    for (std::size_t a = 0; a < block.size(); ++a) {
      Rat ca = rationalize(x[a], 1000000000UL);
      if (!(ca > 0)) ca = Rat(1, 1000000000UL);
      out.c[block[a]] = ca;
    }
  }

  // Collatz-Wielandt: rho <= max_j (Mc)_j / c_j for any positive c, computed
  // exactly over the block.
  Rat rho(0);
  for (int a : block) {
    Rat row(0);
    for (int b : block)
      if (m.m[a][b]) row += Rat(m.m[a][b]) * out.c[b];
    Rat q = row / out.c[a];
    if (q > rho) rho = q;
  }
  if (!(rho > 0)) rho = 1;  // spectral radius 0; 1 is still an upper bound
  out.rho_upper = rho;

  if (!root_has_in_edge && m.t > 1) {
    Rat root_row(0);
    for (int l = 0; l < m.t; ++l)
      if (m.m[m.root_type][l]) root_row += Rat(m.m[m.root_type][l]) * out.c[l];
    out.c[m.root_type] = root_row > 0 ? 2 * root_row / rho : Rat(1);
  }
  return out;
}

SawTree build_ising_saw_tree(const GenericGraph& g, int v, int depth_cap,
                             const SpinPins& pins) {
  if (v < 0 || v >= g.n) throw std::invalid_argument("root out of range");
  if (depth_cap < 0) throw std::invalid_argument("negative depth cap");

  SawTree t;
  t.depth_cap = depth_cap;
  t.nodes.push_back(SawNode{v, 0, -1, -1, -1, -1, false});
  if (auto it = pins.find(v); it != pins.end()) {
    t.nodes[0].pin = it->second ? kMinus : kPlus;
    return t;
  }

  std::vector<int> walk_pos(g.n, -1);
  std::vector<int> walk{v};
  walk_pos[v] = 0;

  std::function<void(int)> expand = [&](int ni) {
    int x = t.nodes[ni].vertex;
    int depth = t.nodes[ni].depth;
    int parent_vertex =
        t.nodes[ni].parent >= 0 ? t.nodes[t.nodes[ni].parent].vertex : -1;
    int last_child = -1;
    auto attach = [&](SawNode node) {
      int idx = static_cast<int>(t.nodes.size());
      t.nodes.push_back(node);
      if (last_child < 0)
        t.nodes[ni].first_child = idx;
      else
        t.nodes[last_child].next_sibling = idx;
      last_child = idx;
      return idx;
    };

    for (int y : g.adj[x]) {
      if (y == parent_vertex) continue;
      if (auto it = pins.find(y); it != pins.end()) {
        std::int8_t spin = it->second ? kMinus : kPlus;
        attach(SawNode{y, depth + 1, ni, -1, -1, spin, false});
        continue;
      }
      if (walk_pos[y] >= 0) {
        // Cycle closes at y: both copies stay, the closing one spin-pinned.
        // Plus when y's first walk edge outranks the closing edge y->x
        // (the unoccupied role), minus otherwise.
        int v1 = walk[walk_pos[y] + 1];
        bool v1_outranks = g.neighbor_rank(y, v1) < g.neighbor_rank(y, x);
        std::int8_t spin = v1_outranks ? kPlus : kMinus;
        attach(SawNode{y, depth + 1, ni, -1, -1, spin, false});
        continue;
      }
      if (depth == depth_cap) {
        t.truncated = true;
        attach(SawNode{y, depth + 1, ni, -1, -1, -1, true});
        continue;
      }
      int idx = attach(SawNode{y, depth + 1, ni, -1, -1, -1, false});
      walk.push_back(y);
      walk_pos[y] = static_cast<int>(walk.size()) - 1;
      expand(idx);
      walk.pop_back();
      walk_pos[y] = -1;
    }
  };
  expand(0);
  return t;
}

double ising_tree_ratio(const SawTree& t, double beta) {
  if (t.nodes.empty()) throw std::invalid_argument("empty tree");
  double e2b = std::exp(2.0 * beta);
  if (t.nodes[0].pin >= 0) return t.nodes[0].pin == kMinus ? 0.0 : 1.0;

  std::vector<double> theta(t.nodes.size(), 1.0);
  for (int i = static_cast<int>(t.nodes.size()) - 1; i >= 0; --i) {
    const SawNode& nd = t.nodes[i];
    if (nd.pin >= 0 || nd.capped) continue;  // handled by the parent / free
    double prod = 1.0;
    for (int c = nd.first_child; c >= 0; c = t.nodes[c].next_sibling) {
      const SawNode& ch = t.nodes[c];
      if (ch.pin == kMinus)
        prod *= e2b;
      else if (ch.pin == kPlus)
        prod *= 1.0 / e2b;
      else
        prod *= (e2b * theta[c] + 1.0) / (theta[c] + e2b);
    }
    theta[i] = prod;
  }
  return 1.0 / (1.0 + theta[0]);
}

double ising_brute_force_marginal(const GenericGraph& g, int v, double beta,
                                  const SpinPins& pins) {
  if (g.n > 20) throw std::invalid_argument("brute force limited to 20 vertices");
  if (v < 0 || v >= g.n) throw std::invalid_argument("vertex out of range");

  std::vector<std::pair<int, int>> edges;
  for (int a = 0; a < g.n; ++a)
    for (int b : g.adj[a])
      if (a < b) edges.emplace_back(a, b);

  double z = 0.0, z_minus = 0.0;
  for (std::uint32_t mask = 0; mask < (1u << g.n); ++mask) {
    bool ok = true;
    for (const auto& [u, mn] : pins)
      if (((mask >> u) & 1u) != (mn ? 1u : 0u)) {
        ok = false;
        break;
      }
    if (!ok) continue;
    int sum = 0;
    for (const auto& [a, b] : edges) {
      int sa = (mask >> a) & 1u ? -1 : 1;
      int sb = (mask >> b) & 1u ? -1 : 1;
      sum += sa * sb;
    }
    double w = std::exp(beta * sum);
    z += w;
    if ((mask >> v) & 1u) z_minus += w;
  }
  if (!(z > 0)) throw std::runtime_error("pins admit no configuration");
  return z_minus / z;
}

void save_ising_certificate(std::ostream& os, const IsingCertificate& cert) {
  os << "ising tanh=" << rat_to_string(cert.tanh_beta_star) << "\n";
  os << "c:";
  for (const Rat& v : cert.c) os << " " << rat_to_string(v);
  os << "\n";
}

IsingCertificate load_ising_certificate(std::istream& is) {
  IsingCertificate cert;
  bool saw_header = false;
  std::string line;
  while (std::getline(is, line)) {
    std::istringstream ls(line);
    std::string tag;
    if (!(ls >> tag)) continue;
    if (tag == "ising") {
      std::string kv;
      if (!(ls >> kv) || kv.compare(0, 5, "tanh=") != 0)
        throw std::runtime_error("bad ising header");
      cert.tanh_beta_star = rat_from_string(kv.substr(5));
      saw_header = true;
    } else if (tag == "c:") {
      std::string tok;
      while (ls >> tok) cert.c.push_back(rat_from_string(tok));
    } else {
      throw std::runtime_error("unrecognized ising certificate line: " + line);
    }
  }
  if (!saw_header || cert.c.empty())
    throw std::runtime_error("incomplete ising certificate");
  return cert;
}

}  // namespace gridmix
