#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <sstream>

#include "doctest.h"
#include "gridmix/search.hpp"

using namespace gridmix;

namespace {

BranchingMatrix single_type(int row) {
  BranchingMatrix m;
  m.t = 1;
  m.m = {{row}};
  m.root_type = 0;
  m.labels = {""};
  return m;
}

std::string cert_bytes(const DmsCertificate& c) {
  std::ostringstream os;
  save_certificate(os, c);
  return os.str();
}

}  // namespace

TEST_CASE("search certifies the four-type matrix at the published activity") {
  BranchingMatrix n4 = generate_matrix(4, false);
  SearchConfig cfg;
  cfg.seed = 1;
  cfg.budget = 2000;
  auto cert = search_certificate(n4, Rat(18801, 10000), cfg);
  REQUIRE(cert.has_value());
  Verdict v = check_dms(n4, *cert);
  CHECK(v.pass);
  for (const Rat& sl : v.per_type_slack) CHECK(sl > 0);

  // The result survives a save/load cycle and still verifies.
  std::istringstream is(cert_bytes(*cert));
  DmsCertificate back = load_certificate(is);
  CHECK(check_dms(n4, back).pass);

  // Fixed config means bit-for-bit reproducible output.
  auto again = search_certificate(n4, Rat(18801, 10000), cfg);
  REQUIRE(again.has_value());
  CHECK(cert_bytes(*again) == cert_bytes(*cert));
}

TEST_CASE("a certificate's weights carry down to smaller activities") {
  BranchingMatrix n4 = generate_matrix(4, false);
  SearchConfig cfg;
  cfg.seed = 1;
  cfg.budget = 2000;
  auto cert = search_certificate(n4, Rat(18801, 10000), cfg);
  REQUIRE(cert.has_value());
  // The same (s, c) certifies every probed activity below lambda*, down to
  // just above the envelope floor 27/16; only the envelope anchors (which
  // depend on the activity) need re-fitting.
  const std::vector<Rat> below = {Rat(9, 5), Rat(7, 4),
                                  Rat(27, 16) + Rat(1, 100)};
  for (const Rat& lam : below) {
    DmsCertificate lower = fit_certificate(n4, lam, cert->s, cert->c);
    CHECK(check_dms(n4, lower).pass);
  }
}

TEST_CASE("search succeeds at an easier activity and fails far above") {
  BranchingMatrix n4 = generate_matrix(4, false);
  SearchConfig cfg;
  cfg.seed = 1;
  cfg.budget = 1500;
  auto easy = search_certificate(n4, Rat(7, 4), cfg);
  REQUIRE(easy.has_value());
  CHECK(check_dms(n4, *easy).pass);

  // Far above anything certifiable for this matrix (even the best known
  // refinements stop below 2.4): the climb must come back empty-handed.
  SearchConfig small = cfg;
  small.budget = 800;
  CHECK_FALSE(search_certificate(n4, Rat(39, 10), small).has_value());
}

TEST_CASE("single-type activities below the envelope floor decide exactly") {
  // Row sum 3: threshold 27/16. Below the floor the certificate is the
  // fixed-point decision itself (no envelopes).
  BranchingMatrix three = single_type(3);
  auto ok = search_certificate(three, Rat(8, 5));
  REQUIRE(ok.has_value());
  CHECK(ok->lambda_star == Rat(8, 5));
  CHECK(ok->s == std::vector<Rat>{Rat(4, 3)});
  CHECK(ok->c == std::vector<Rat>{Rat(1)});
  CHECK_FALSE(ok->envelopes[0].has_value());

  CHECK_FALSE(search_certificate(three, Rat(27, 16)).has_value());
  CHECK_FALSE(search_certificate(three, Rat(17, 10)).has_value());

  BranchingMatrix two = single_type(2);
  CHECK(search_certificate(two, Rat(3, 2)).has_value());
  // Above the floor the climb takes over; row sum 2 certifies well past 2.
  SearchConfig cfg;
  cfg.seed = 1;
  cfg.budget = 1200;
  auto cert2 = search_certificate(two, Rat(2), cfg);
  REQUIRE(cert2.has_value());
  CHECK(check_dms(two, *cert2).pass);

  // Multi-type matrices are out of scope below the floor.
  BranchingMatrix pair;
  pair.t = 2;
  pair.m = {{0, 2}, {0, 1}};
  pair.root_type = 0;
  pair.labels = {"", "N"};
  CHECK_FALSE(search_certificate(pair, Rat(3, 2)).has_value());
}

TEST_CASE("leaf-only matrices certify trivially at any activity") {
  BranchingMatrix zero = single_type(0);
  auto cert = search_certificate(zero, Rat(5));
  REQUIRE(cert.has_value());
  CHECK(check_dms(zero, *cert).pass);
  CHECK(max_lambda(zero, Rat(2), Rat(10), Rat(1)) == Rat(10));
}

TEST_CASE("max_lambda brackets the certifiable frontier") {
  BranchingMatrix n4 = generate_matrix(4, false);
  SearchConfig cfg;
  cfg.seed = 1;
  cfg.budget = 1500;
  // The four-type frontier sits near 2.3; with a coarse grid the search
  // certifies the midpoint(s) below it and rejects 2.8.
  Rat best = max_lambda(n4, Rat(9, 5), Rat(14, 5), Rat(1, 4), cfg);
  CHECK(best >= Rat(9, 5));
  CHECK(best < Rat(14, 5));
  auto at_best = search_certificate(n4, best, cfg);
  REQUIRE(at_best.has_value());
  CHECK(check_dms(n4, *at_best).pass);

  CHECK_THROWS_AS(max_lambda(n4, Rat(2), Rat(2), Rat(1, 10)),
                  std::invalid_argument);
  CHECK_THROWS_AS(max_lambda(n4, Rat(2), Rat(3), Rat(0)),
                  std::invalid_argument);
}

TEST_CASE("degenerate inputs yield no certificate") {
  BranchingMatrix n4 = generate_matrix(4, false);
  CHECK_FALSE(search_certificate(n4, Rat(0)).has_value());
  CHECK_FALSE(search_certificate(n4, Rat(-2)).has_value());
  BranchingMatrix empty;
  CHECK_FALSE(search_certificate(empty, Rat(2)).has_value());
}
