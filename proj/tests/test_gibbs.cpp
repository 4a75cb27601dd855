#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <random>

#include "doctest.h"
#include "gridmix/gibbs.hpp"
#include "gridmix/lattice.hpp"

using namespace gridmix;

namespace {

GenericGraph make_graph(int n, const std::vector<std::pair<int, int>>& edges) {
  GenericGraph g;
  g.n = n;
  g.adj.resize(n);
  for (auto [u, v] : edges) g.add_edge(u, v);
  return g;
}

LatticeRegion square(int side) {
  std::vector<Coord> cs;
  for (int y = 0; y < side; ++y)
    for (int x = 0; x < side; ++x) cs.push_back({x, y});
  return LatticeRegion::from_cells(std::move(cs));
}

}  // namespace

TEST_CASE("independent-set counts of square grids match the known sequence") {
  // Independent-set counts of the k x k grid graph, k = 1..6.
  const long expected[] = {2, 7, 63, 1234, 55447, 5598861};
  for (int k = 1; k <= 6; ++k)
    CHECK(brute_force_partition(square(k), Rat(1)) == Rat(expected[k - 1]));
}

TEST_CASE("transfer and direct enumeration agree on small graphs") {
  GenericGraph edge = make_graph(2, {{0, 1}});
  CHECK(brute_force_partition(edge, Rat(1)) == Rat(3));
  GenericGraph c4 = make_graph(4, {{0, 1}, {1, 2}, {2, 3}, {3, 0}});
  CHECK(brute_force_partition(c4, Rat(1)) == Rat(7));
  CHECK(brute_force_partition(c4, Rat(2)) == Rat(1 + 4 * 2 + 2 * 4));

  for (const Rat& lam : {Rat(1, 2), Rat(1), Rat(2), Rat(18801, 10000)}) {
    LatticeRegion b1 = build_box(1);
    CHECK(brute_force_partition(b1, lam) ==
          brute_force_partition(to_graph(b1).graph, lam));
  }
}

TEST_CASE("partition function with pins") {
  LatticeRegion b1 = build_box(1);
  // Center occupied: neighbors excluded, four free corners remain.
  CHECK(brute_force_partition(b1, Rat(1), {{{0, 0}, Pin::Occupied}}) ==
        Rat(16));
  CHECK(brute_force_partition(b1, Rat(1), {{{0, 0}, Pin::Unoccupied}}) ==
        Rat(63 - 16));

  // Graph-side equivalent: pin vertex 4 (the center).
  GenericGraph g = to_graph(b1).graph;
  CHECK(brute_force_partition(g, Rat(1), {{4, Pin::Unoccupied}}) == Rat(47));
  CHECK_THROWS(brute_force_partition(square(21), Rat(1)));
}

TEST_CASE("transfer_marginal matches enumeration, with and without pins") {
  LatticeRegion b1 = build_box(1);
  GenericGraph g = to_graph(b1).graph;

  CHECK(transfer_marginal(b1, {}, {0, 0}, Rat(1)) == Rat(47, 63));
  CHECK(transfer_marginal(b1, {}, {-1, -1}, Rat(1)) == Rat(2, 3));
  CHECK(transfer_marginal(b1, {}, {0, 0}, Rat(1)) ==
        brute_force_marginal(g, b1.id_of({0, 0}), Rat(1)));

  for (Parity par : {Parity::Even, Parity::Odd}) {
    CoordPins cpins = boundary_pins(b1, par);
    VertexPins vpins;
    for (const auto& [c, p] : cpins) vpins[b1.id_of(c)] = p;
    for (const Rat& lam : {Rat(1, 2), Rat(2)})
      CHECK(transfer_marginal(b1, cpins, {0, 0}, lam) ==
            brute_force_marginal(g, b1.id_of({0, 0}), lam, vpins));
  }

  // Pinned query cells answer immediately.
  CHECK(transfer_marginal(b1, {{{0, 0}, Pin::Occupied}}, {0, 0}, Rat(1)) ==
        Rat(0));
  CHECK(transfer_marginal(b1, {{{0, 0}, Pin::Unoccupied}}, {0, 0}, Rat(1)) ==
        Rat(1));
  CHECK_THROWS(transfer_marginal(b1, {}, {9, 9}, Rat(1)));
}

TEST_CASE("weitz estimate is exact on a single vertex") {
  LatticeRegion one = square(1);
  PartitionEstimate pe = weitz_partition_estimate(one, Rat(3, 2), 1e-6, 0.5);
  CHECK(pe.ok);
  CHECK(pe.z_lo == Rat(5, 2));
  CHECK(pe.z_hi == Rat(5, 2));
  CHECK(pe.relative_error_bound == 0.0);
  CHECK(pe.log_value == doctest::Approx(std::log(2.5)).epsilon(1e-12));
}

TEST_CASE("weitz estimate brackets the exact grid counts") {
  // 3x3 at eps = 1e-6.
  PartitionEstimate p3 = weitz_partition_estimate(square(3), Rat(1), 1e-6, 0.6);
  CHECK(p3.ok);
  CHECK(p3.relative_error_bound <= 1e-6);
  CHECK(p3.z_lo <= Rat(63));
  CHECK(Rat(63) <= p3.z_hi);
  CHECK(p3.log_value == doctest::Approx(std::log(63.0)).epsilon(1e-6));

  // 4x4 at eps = 1e-6.
  PartitionEstimate p4 = weitz_partition_estimate(square(4), Rat(1), 1e-6, 0.6);
  CHECK(p4.ok);
  CHECK(p4.relative_error_bound <= 1e-6);
  CHECK(p4.z_lo <= Rat(1234));
  CHECK(Rat(1234) <= p4.z_hi);

  // 6x6 at eps = 1e-3; the bracket must still contain the exact count.
  PartitionEstimate p6 = weitz_partition_estimate(square(6), Rat(1), 1e-3, 0.6);
  CHECK(p6.ok);
  CHECK(p6.relative_error_bound <= 1e-3);
  CHECK(p6.z_lo <= Rat(5598861));
  CHECK(Rat(5598861) <= p6.z_hi);
}

TEST_CASE("weitz bracket always contains the exact partition value") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 20; ++trial) {
    int n = 3 + static_cast<int>(rng() % 10);
    GenericGraph g;
    g.n = n;
    g.adj.resize(n);
    for (int u = 0; u < n; ++u)
      for (int v = u + 1; v < n; ++v)
        if (rng() % 4 == 0) g.add_edge(u, v);
    Rat lam = trial % 2 ? Rat(1) : Rat(1, 2);
    Rat z = brute_force_partition(g, lam);
    PartitionEstimate pe = weitz_partition_estimate(g, lam, 1e-4, 0.5);
    CHECK(pe.z_lo <= z);
    CHECK(z <= pe.z_hi);
    if (pe.ok) CHECK(pe.relative_error_bound <= 1e-4);
  }
}

TEST_CASE("weitz estimate with region pins rescales by pinned activity") {
  LatticeRegion b1 = build_box(1);
  CoordPins pins{{{0, 0}, Pin::Occupied}};
  Rat z = brute_force_partition(b1, Rat(2), pins);  // = 2 * (1+2)^4 = 162
  CHECK(z == Rat(162));
  PartitionEstimate pe = weitz_partition_estimate(b1, Rat(2), 1e-6, 0.5, pins);
  CHECK(pe.ok);
  CHECK(pe.z_lo <= z);
  CHECK(z <= pe.z_hi);
}

TEST_CASE("glauber matches exact marginals on tiny graphs") {
  GenericGraph one = make_graph(1, {});
  GlauberResult r1 = glauber_run(one, Rat(1), {}, 200000, 1, 1000);
  CHECK(std::abs(r1.frequency[0] - 0.5) < 0.01);

  GenericGraph edge = make_graph(2, {{0, 1}});
  GlauberResult r2 = glauber_run(edge, Rat(1), {}, 400000, 2, 2000);
  CHECK(std::abs(r2.frequency[0] - 1.0 / 3.0) < 0.01);
  CHECK(std::abs(r2.frequency[1] - 1.0 / 3.0) < 0.01);
}

TEST_CASE("glauber matches exact occupancy marginals on the 3x3 box") {
  LatticeRegion b1 = build_box(1);
  GenericGraph g = to_graph(b1).graph;
  GlauberResult r = glauber_run(g, Rat(1), {}, 2000000, 3, 10000);
  for (int v = 0; v < g.n; ++v) {
    double exact =
        1.0 - rat_to_double(transfer_marginal(b1, {}, b1.cells[v], Rat(1)));
    CHECK(std::abs(r.frequency[v] - exact) < 0.015);
    CHECK(r.std_error[v] > 0.0);
    CHECK(r.std_error[v] < 0.02);
  }
}

TEST_CASE("glauber respects pins and never violates independence") {
  LatticeRegion b1 = build_box(1);
  GenericGraph g = to_graph(b1).graph;
  int center = b1.id_of({0, 0});
  VertexPins pins{{center, Pin::Occupied}};
  GlauberResult r = glauber_run(g, Rat(1), pins, 500000, 4, 5000);
  CHECK(r.frequency[center] == 1.0);
  for (int x : g.adj[center]) CHECK(r.frequency[x] == 0.0);
  // Final state is an independent set honoring the pins.
  CHECK(r.state.occupancy[center] == 1);
  for (int u = 0; u < g.n; ++u)
    if (r.state.occupancy[u])
      for (int x : g.adj[u]) CHECK(r.state.occupancy[x] == 0);
  // Corners decouple and behave like isolated vertices.
  CHECK(std::abs(r.frequency[b1.id_of({1, 1})] - 0.5) < 0.02);

  CHECK_THROWS(glauber_run(g, Rat(1), {{0, Pin::Occupied}, {1, Pin::Occupied}},
                           1000, 1));
}

TEST_CASE("glauber is reproducible per seed") {
  GenericGraph g = to_graph(build_box(1)).graph;
  GlauberResult a = glauber_run(g, Rat(1), {}, 50000, 42, 100);
  GlauberResult b = glauber_run(g, Rat(1), {}, 50000, 42, 100);
  CHECK(a.state.rng_state_hash == b.state.rng_state_hash);
  CHECK(a.state.occupancy == b.state.occupancy);
  CHECK(a.frequency == b.frequency);
  GlauberResult c = glauber_run(g, Rat(1), {}, 50000, 43, 100);
  CHECK(a.state.rng_state_hash != c.state.rng_state_hash);
}

TEST_CASE("gibbs guards") {
  GenericGraph g = to_graph(build_box(1)).graph;
  CHECK_THROWS(glauber_run(g, Rat(1), {}, -1, 1));
  CHECK_THROWS(glauber_run(g, Rat(1), {}, 100, 1, 200));
  CHECK_THROWS(weitz_partition_estimate(g, Rat(1), 0.0, 0.5));
  CHECK_THROWS(weitz_partition_estimate(g, Rat(1), 1e-3, 1.5));
  CHECK_THROWS(brute_force_partition(build_box(1), Rat(1),
                                     {{{9, 9}, Pin::Unoccupied}}));
}
