#include "gridmix/gibbs.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

namespace gridmix {

namespace {

double log_of_rat(const Rat& r) {
  if (r <= 0) throw std::domain_error("log of non-positive rational");
  long en, ed;
  double dn = mpz_get_d_2exp(&en, r.get_num().get_mpz_t());
  double dd = mpz_get_d_2exp(&ed, r.get_den().get_mpz_t());
  return std::log(dn) - std::log(dd) +
         (static_cast<double>(en) - static_cast<double>(ed)) * std::log(2.0);
}

// Column description for the transfer pass.
struct Column {
  int x;
  std::vector<int> ys;              // sorted
  std::vector<std::uint32_t> states;  // admissible occupancy masks
  std::vector<int> cell_ids;        // region vertex ids, parallel to ys
};

// Z * q^n as one integer: every cell contributes p when occupied, q when
// not, so ratios of these integers are exact conditional probabilities.
mpz_class scaled_partition(const LatticeRegion& r, const Rat& lambda,
                           const CoordPins& pins) {
  for (const auto& [c, pin] : pins)
    if (!r.contains(c)) throw std::invalid_argument("pin on absent cell");

  mpz_class p = lambda.get_num(), q = lambda.get_den();
  if (r.size() == 0) return mpz_class(1);

  // Group cells by x.
  std::map<int, std::vector<int>> by_x;  // x -> ys
  for (Coord c : r.cells) by_x[c.x].push_back(c.y);

  std::vector<Column> cols;
  for (auto& [x, ys] : by_x) {
    std::sort(ys.begin(), ys.end());
    Column col;
    col.x = x;
    col.ys = ys;
    int h = static_cast<int>(ys.size());
    if (h > 28) throw std::invalid_argument("column too tall for transfer");
    std::uint32_t vert_conflict = 0;  // bit i set: ys[i], ys[i+1] adjacent
    for (int i = 0; i + 1 < h; ++i)
      if (ys[i + 1] == ys[i] + 1) vert_conflict |= 1u << i;
    std::uint32_t force_occ = 0, force_unocc = 0;
    for (int i = 0; i < h; ++i) {
      auto it = pins.find({x, ys[i]});
      if (it != pins.end())
        (it->second == Pin::Occupied ? force_occ : force_unocc) |= 1u << i;
    }
    for (std::uint32_t s = 0; s < (1u << h); ++s) {
      if ((s & (s >> 1)) & vert_conflict) continue;
      if ((s & force_occ) != force_occ) continue;
      if (s & force_unocc) continue;
      col.states.push_back(s);
    }
    cols.push_back(std::move(col));
  }

  // Per-state weight p^occ q^(h-occ).
  auto col_weight = [&](const Column& col, std::uint32_t s) {
    mpz_class w(1);
    for (std::size_t i = 0; i < col.ys.size(); ++i)
      w *= (s >> i) & 1 ? p : q;
    return w;
  };

  std::vector<mpz_class> vec(cols[0].states.size());
  for (std::size_t i = 0; i < cols[0].states.size(); ++i)
    vec[i] = col_weight(cols[0], cols[0].states[i]);

  for (std::size_t ci = 1; ci < cols.size(); ++ci) {
    const Column& prev = cols[ci - 1];
    const Column& cur = cols[ci];
    bool adjacent_cols = cur.x == prev.x + 1;
    // Project each previous state onto the current column's bit positions.
    std::vector<std::uint32_t> proj(prev.states.size(), 0);
    if (adjacent_cols) {
      std::vector<int> bit_in_cur(prev.ys.size(), -1);
      for (std::size_t i = 0; i < prev.ys.size(); ++i) {
        auto it = std::lower_bound(cur.ys.begin(), cur.ys.end(), prev.ys[i]);
        if (it != cur.ys.end() && *it == prev.ys[i])
          bit_in_cur[i] = static_cast<int>(it - cur.ys.begin());
      }
      for (std::size_t si = 0; si < prev.states.size(); ++si) {
        std::uint32_t m = 0, s = prev.states[si];
        for (std::size_t i = 0; i < prev.ys.size(); ++i)
          if (((s >> i) & 1) && bit_in_cur[i] >= 0) m |= 1u << bit_in_cur[i];
        proj[si] = m;
      }
    }
    std::vector<mpz_class> next(cur.states.size());
    for (std::size_t ti = 0; ti < cur.states.size(); ++ti) {
      mpz_class acc(0);
      std::uint32_t t = cur.states[ti];
      for (std::size_t si = 0; si < prev.states.size(); ++si)
        if (!(proj[si] & t)) acc += vec[si];
      next[ti] = acc * col_weight(cur, t);
    }
    vec = std::move(next);
  }

  mpz_class z(0);
  for (const auto& v : vec) z += v;
  return z;
}

}  // namespace

Rat brute_force_partition(const LatticeRegion& r, const Rat& lambda,
                          const CoordPins& pins) {
  if (r.size() > 400) throw std::invalid_argument("region too large");
  mpz_class zq = scaled_partition(r, lambda, pins);
  Rat qn = rat_pow(Rat(lambda.get_den()), r.size());
  return Rat(zq) / qn;
}

Rat brute_force_partition(const GenericGraph& g, const Rat& lambda,
                          const VertexPins& pins) {
  if (g.n > 24)
    throw std::invalid_argument(
        "direct enumeration guarded to 24 vertices; use a region");
  std::vector<unsigned long long> by_count(g.n + 1, 0);
  std::vector<std::uint8_t> occ(g.n, 0);
  // Iterative include/exclude DFS, counting by occupancy.
  struct E { int v; int phase; };
  std::vector<E> st{{0, 0}};
  int k = 0;
  while (!st.empty()) {
    auto [v, phase] = st.back();
    st.pop_back();
    if (v == g.n) { ++by_count[k]; continue; }
    auto it = pins.find(v);
    bool pinned = it != pins.end();
    if (phase == 0) {
      st.push_back({v, 1});
      if (!pinned || it->second == Pin::Unoccupied) {
        occ[v] = 0;
        st.push_back({v + 1, 0});
      }
    } else if (phase == 1) {
      bool can = !pinned || it->second == Pin::Occupied;
      if (can)
        for (int x : g.adj[v])
          if (x < v && occ[x]) { can = false; break; }
      if (can) {
        st.push_back({v, 2});
        occ[v] = 1;
        ++k;
        st.push_back({v + 1, 0});
      }
    } else {
      occ[v] = 0;
      --k;
    }
  }
  Rat z(0), pw(1);
  for (int i = 0; i <= g.n; ++i) {
    if (by_count[i])
      z += Rat(static_cast<unsigned long>(by_count[i])) * pw;
    pw *= lambda;
  }
  return z;
}

Rat transfer_marginal(const LatticeRegion& r, const CoordPins& pins,
                      Coord cell, const Rat& lambda) {
  if (!r.contains(cell)) throw std::invalid_argument("cell not in region");
  if (pins.count(cell))
    return pins.at(cell) == Pin::Occupied ? Rat(0) : Rat(1);
  mpz_class z = scaled_partition(r, lambda, pins);
  if (z == 0) throw std::invalid_argument("pins admit no configuration");
  CoordPins with = pins;
  with[cell] = Pin::Unoccupied;
  mpz_class zu = scaled_partition(r, lambda, with);
  return Rat(zu) / Rat(z);
}

std::vector<std::pair<int, Rat>> ssm_probe(int lmax, const Rat& lambda) {
  if (lmax < 1) throw std::invalid_argument("lmax must be >= 1");
  std::vector<std::pair<int, Rat>> out;
  if (lambda == 0) {  // only the empty configuration has weight
    for (int L = 1; L <= lmax; ++L) out.push_back({L, Rat(0)});
    return out;
  }
  for (int L = 1; L <= lmax; ++L) {
    LatticeRegion r = build_box(L);
    Rat a_even =
        transfer_marginal(r, boundary_pins(r, Parity::Even), {0, 0}, lambda);
    Rat a_odd =
        transfer_marginal(r, boundary_pins(r, Parity::Odd), {0, 0}, lambda);
    Rat gap = a_even - a_odd;
    if (gap < 0) gap = -gap;
    out.push_back({L, gap});
  }
  return out;
}

// --- Weitz counting ----------------------------------------------------------

PartitionEstimate weitz_partition_estimate(const GenericGraph& g,
                                           const Rat& lambda, double eps,
                                           double gamma_hint) {
  if (eps <= 0) throw std::invalid_argument("eps must be positive");
  if (!(gamma_hint > 0 && gamma_hint < 1))
    throw std::invalid_argument("gamma_hint must be in (0,1)");
  int n = g.n;
  PartitionEstimate pe;
  if (n == 0) {
    pe.ok = true;
    pe.z_lo = pe.z_hi = Rat(1);
    return pe;
  }
  int depth = static_cast<int>(
      std::ceil(std::log(2.0 * n / eps) / std::log(1.0 / gamma_hint)));
  depth = std::max(depth, 1);

  Rat z_lo(1), z_hi(1);
  double worst = 0.0;
  VertexPins pins;  // eliminated vertices, pinned Unoccupied
  for (int v = 0; v < n; ++v) {
    Rat a_occ = saw_root_prob_lazy(g, v, depth, pins, lambda,
                                   Boundary::AllOccupiedAtCap);
    Rat a_un = saw_root_prob_lazy(g, v, depth, pins, lambda,
                                  Boundary::AllUnoccupiedAtCap);
    Rat lo = std::min(a_occ, a_un), hi = std::max(a_occ, a_un);
    // Z factor is 1/alpha, so the bracket flips.
    z_lo /= hi;
    z_hi /= lo;
    double contrib = log_of_rat(hi) - log_of_rat(lo);
    if (contrib > worst) {
      worst = contrib;
      pe.failed_vertex = v;
    }
    pe.per_vertex_depths.push_back(depth);
    pins[v] = Pin::Unoccupied;
  }
  pe.z_lo = z_lo;
  pe.z_hi = z_hi;
  pe.relative_error_bound = rat_to_double(z_hi / z_lo - 1);
  pe.log_value = (log_of_rat(z_lo) + log_of_rat(z_hi)) / 2;
  pe.ok = pe.relative_error_bound <= eps;
  if (pe.ok) pe.failed_vertex = -1;
  return pe;
}

PartitionEstimate weitz_partition_estimate(const LatticeRegion& r,
                                           const Rat& lambda, double eps,
                                           double gamma_hint,
                                           const CoordPins& pins) {
  PinnedGraph pg = apply_pins(r, pins);
  PartitionEstimate pe =
      weitz_partition_estimate(pg.graph, lambda, eps, gamma_hint);
  int pinned_occ = 0;
  for (const auto& [c, p] : pins)
    if (p == Pin::Occupied) ++pinned_occ;
  if (pinned_occ) {
    Rat scale = rat_pow(lambda, pinned_occ);
    pe.z_lo *= scale;
    pe.z_hi *= scale;
    pe.log_value += pinned_occ * log_of_rat(lambda);
  }
  return pe;
}

// --- Glauber dynamics --------------------------------------------------------

GlauberResult glauber_run(const GenericGraph& g, const Rat& lambda,
                          const VertexPins& pins, long long steps,
                          std::uint64_t seed, long long burn_in) {
  if (steps < 0 || burn_in < 0 || burn_in > steps)
    throw std::invalid_argument("bad step counts");
  int n = g.n;
  if (n == 0) throw std::invalid_argument("empty graph");
  std::vector<std::uint8_t> occ(n, 0);
  std::vector<std::uint8_t> pinned(n, 0);
  for (const auto& [v, p] : pins) {
    if (v < 0 || v >= n) throw std::invalid_argument("pin on absent vertex");
    pinned[v] = 1;
    occ[v] = p == Pin::Occupied ? 1 : 0;
  }
  for (const auto& [v, p] : pins)
    if (p == Pin::Occupied)
      for (int x : g.adj[v])
        if (occ[x]) throw std::invalid_argument("adjacent Occupied pins");

  auto check_invariant = [&]() {
    for (int u = 0; u < n; ++u)
      if (occ[u])
        for (int x : g.adj[u])
          if (occ[x]) throw std::logic_error("independence invariant violated");
  };

  std::mt19937_64 rng(seed);
  double p_occ = rat_to_double(lambda / (1 + lambda));

  long long measured = steps - burn_in;
  int batches = static_cast<int>(std::min<long long>(1000, std::max<long long>(1, measured)));
  long long batch_len = measured > 0 ? measured / batches : 1;

  // Occupancy time integrals, flushed lazily on flips and batch boundaries.
  std::vector<long long> last_touch(n, 0);
  std::vector<long long> integral(n, 0);
  std::vector<std::vector<double>> batch_freq;  // [batch][vertex]
  long long measured_done = 0;
  auto flush_all = [&](long long now) {
    for (int u = 0; u < n; ++u) {
      if (occ[u]) integral[u] += now - last_touch[u];
      last_touch[u] = now;
    }
  };

  for (long long t = 0; t < steps; ++t) {
    if (t == burn_in) {
      std::fill(last_touch.begin(), last_touch.end(), t);
      std::fill(integral.begin(), integral.end(), 0);
    }
    int v = static_cast<int>(rng() % static_cast<std::uint64_t>(n));
    std::uint64_t coin = rng();
    if (!pinned[v]) {
      bool blocked = false;
      for (int x : g.adj[v])
        if (occ[x]) { blocked = true; break; }
      std::uint8_t next;
      if (blocked)
        next = 0;
      else
        next = (static_cast<double>(coin >> 11) * 0x1.0p-53) < p_occ ? 1 : 0;
      if (next != occ[v] && t >= burn_in) {
        if (occ[v]) integral[v] += t - last_touch[v];
        last_touch[v] = t;
      }
      occ[v] = next;
    }
#ifndef NDEBUG
    check_invariant();
#else
    if ((t & 0xFFFF) == 0xFFFF) check_invariant();
#endif
    if (t >= burn_in) {
      ++measured_done;
      if (measured_done % batch_len == 0 &&
          static_cast<int>(batch_freq.size()) < batches) {
        flush_all(t + 1);
        // Cumulative snapshots; differenced into per-batch rates below.
        std::vector<double> f(n);
        for (int u = 0; u < n; ++u) f[u] = static_cast<double>(integral[u]);
        batch_freq.push_back(std::move(f));
      }
    }
  }
  flush_all(steps);

  GlauberResult out;
  out.state.occupancy = occ;
  out.state.step_count = steps;
  {
    std::ostringstream ss;
    ss << rng;
    std::uint64_t h = 1469598103934665603ull;
    for (char ch : ss.str()) {
      h ^= static_cast<unsigned char>(ch);
      h *= 1099511628211ull;
    }
    out.state.rng_state_hash = h;
  }
  out.frequency.assign(n, 0.0);
  out.std_error.assign(n, 0.0);
  if (measured <= 0) return out;

  for (int u = 0; u < n; ++u)
    out.frequency[u] = static_cast<double>(integral[u]) / static_cast<double>(measured);

  // Convert cumulative batch integrals into per-batch rates.
  int nb = static_cast<int>(batch_freq.size());
  if (nb >= 2) {
    std::vector<std::vector<double>> rate(nb, std::vector<double>(n));
    for (int b = 0; b < nb; ++b)
      for (int u = 0; u < n; ++u) {
        double prev = b ? batch_freq[b - 1][u] : 0.0;
        rate[b][u] = (batch_freq[b][u] - prev) / static_cast<double>(batch_len);
      }
    for (int u = 0; u < n; ++u) {
      double mean = 0;
      for (int b = 0; b < nb; ++b) mean += rate[b][u];
      mean /= nb;
      double var = 0;
      for (int b = 0; b < nb; ++b)
        var += (rate[b][u] - mean) * (rate[b][u] - mean);
      var /= (nb - 1);
      out.std_error[u] = std::sqrt(var / nb);
    }
  }
  return out;
}

}  // namespace gridmix
