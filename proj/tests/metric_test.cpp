#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "graphop/metric.hpp"

using namespace graphop;

TEST_CASE("entry distribution of the identity stacks (f, f)") {
  POperator I = make_identity_op(Domain::Continuum);
  std::vector<Signal> F = {Signal::piecewise_constant({0.3})};
  EmpiricalMeasure m = entry_distribution(I, F, 8);
  REQUIRE(m.dim == 2);
  REQUIRE(m.size() == 8);
  for (int q = 0; q < 8; ++q) {
    REQUIRE(m.atom(q)[0] == 0.3);
    REQUIRE(m.atom(q)[1] == 0.3);
  }
}

TEST_CASE("entry distribution of the hypercube indicator lists neighbor shares") {
  POperator A = make_hypercube_op(2);
  std::vector<Signal> F = {Signal::piecewise_constant({1.0, 0.0, 0.0, 0.0})};
  EmpiricalMeasure m = entry_distribution(A, F, 8);
  REQUIRE(m.size() == 8);
  // two quadrature atoms per vertex cell: (1,0), (0,1/2), (0,1/2), (0,0)
  const double want[4][2] = {{1.0, 0.0}, {0.0, 0.5}, {0.0, 0.5}, {0.0, 0.0}};
  for (int q = 0; q < 8; ++q) {
    REQUIRE(m.atom(q)[0] == want[q / 2][0]);
    REQUIRE(m.atom(q)[1] == want[q / 2][1]);
  }
}

TEST_CASE("finite entry distribution has one atom per grid point") {
  POperator A = discretize(make_hypercube_op(2), 4);
  std::vector<FiniteSignal> F(2);
  F[0].values = {1.0, 0.0, 0.0, 0.0};
  F[1].values = {0.0, 1.0, 0.0, 0.0};
  EmpiricalMeasure m = entry_distribution(A, F);
  REQUIRE(m.dim == 4);
  REQUIRE(m.size() == 4);
  const double want[4][4] = {{1, 0, 0, 0.5}, {0, 1, 0.5, 0}, {0, 0, 0.5, 0}, {0, 0, 0, 0.5}};
  for (int u = 0; u < 4; ++u)
    for (int d = 0; d < 4; ++d) REQUIRE(m.atom(u)[d] == Catch::Approx(want[u][d]).margin(1e-14));
}

TEST_CASE("entry distribution rejects mismatched domains") {
  POperator A = make_hypercube_op(2);
  POperator B = discretize(A, 4);
  std::vector<Signal> F = {Signal::piecewise_constant({1.0})};
  std::vector<FiniteSignal> G(1);
  G[0].values = {1.0, 0.0};
  REQUIRE_THROWS_AS(entry_distribution(B, F, 8), std::invalid_argument);
  REQUIRE_THROWS_AS(entry_distribution(A, G), std::invalid_argument);
  REQUIRE_THROWS_AS(entry_distribution(B, G), std::invalid_argument);  // wrong resolution
  REQUIRE_THROWS_AS(entry_distribution(A, std::vector<Signal>{}, 8), std::invalid_argument);
}

TEST_CASE("profile sampling is seed-deterministic") {
  POperator A = make_hypercube_op(3);
  ProfileConfig cfg;
  cfg.k = 1;
  cfg.num_tuples = 1;
  cfg.q_atoms = 32;
  cfg.seed = 11;
  auto p1 = sample_profile(A, cfg);
  auto p2 = sample_profile(A, cfg);
  REQUIRE(p1.size() == 1);
  REQUIRE(p1[0].measure.dim == 2);
  REQUIRE(p1[0].measure.coords == p2[0].measure.coords);

  cfg.seed = 12;
  auto p3 = sample_profile(A, cfg);
  REQUIRE(p1[0].measure.coords != p3[0].measure.coords);

  POperator B = discretize(A, 8);
  auto pf = sample_profile(B, cfg);
  REQUIRE(pf[0].measure.size() == 8);  // one atom per grid point
}

TEST_CASE("linear operators scale entry atoms linearly") {
  POperator A = make_hypercube_op(3);
  std::vector<Signal> F = sample_lipschitz_tuple(2, 1.0, 2026);
  std::vector<Signal> half;
  for (const Signal& f : F) half.push_back(scale_signal(f, 0.5));
  EmpiricalMeasure m = entry_distribution(A, F, 64);
  EmpiricalMeasure mh = entry_distribution(A, half, 64);
  for (std::size_t i = 0; i < m.coords.size(); ++i)
    REQUIRE(mh.coords[i] == Catch::Approx(0.5 * m.coords[i]).margin(1e-15));
}

TEST_CASE("paired profile distance of an operator to itself is zero") {
  POperator A = make_hypercube_op(3);
  ProfileConfig cfg;
  cfg.k = 1;
  cfg.num_tuples = 4;
  cfg.q_atoms = 64;
  cfg.seed = 5;
  REQUIRE(hausdorff_profile_distance(A, A, cfg) == 0.0);
}

TEST_CASE("cross mode separates constant-output maps by their gap") {
  OperatorConstants c;
  c.C_A = 1.0;
  POperator Z = POperator::continuum(
      "zero", [](const Signal&) { return Signal::piecewise_constant({0.0}); }, c, true, true);
  POperator O = POperator::continuum(
      "one", [](const Signal&) { return Signal::piecewise_constant({1.0}); }, c, false, true);
  ProfileConfig cfg;
  cfg.k = 1;
  cfg.num_tuples = 3;
  cfg.q_atoms = 16;
  cfg.seed = 77;
  cfg.estimator = ProfileConfig::Estimator::Cross;
  // every atom pair differs by 1 in the image coordinate
  REQUIRE(hausdorff_profile_distance(Z, O, cfg) == 1.0);
}

TEST_CASE("paired estimate grows with nested tuple sets") {
  POperator A = make_hypercube_op(4);
  POperator B = discretize(A, 8);
  ProfileConfig cfg;
  cfg.k = 1;
  cfg.num_tuples = 4;
  cfg.q_atoms = 128;
  cfg.seed = 31;
  const double d4 = hausdorff_profile_distance(A, B, cfg);
  cfg.num_tuples = 8;
  const double d8 = hausdorff_profile_distance(A, B, cfg);
  REQUIRE(d8 >= d4);  // max over a superset of the same seeded tuples
}

TEST_CASE("dm estimate of identical operators is zero with a geometric tail") {
  POperator A = make_hypercube_op(3);
  ProfileConfig cfg;
  cfg.num_tuples = 3;
  cfg.q_atoms = 32;
  cfg.seed = 9;
  DmReport rep = dm_estimate(A, A, 3, cfg);
  REQUIRE(rep.total == 0.0);
  REQUIRE(rep.per_k.size() == 3);
  for (const DmPerK& row : rep.per_k) REQUIRE(row.dH == 0.0);
  REQUIRE(rep.remainder_bound == 0.125);  // 2^-3, the diameter route never undercuts it
}

TEST_CASE("deeper truncations move the estimate by at most the tail bound") {
  POperator A = make_hypercube_op(4);
  POperator B = discretize(A, 16);
  ProfileConfig cfg;
  cfg.num_tuples = 6;
  cfg.q_atoms = 128;
  cfg.seed = 13;
  DmReport r1 = dm_estimate(A, B, 1, cfg);
  DmReport r3 = dm_estimate(A, B, 3, cfg);
  REQUIRE(r3.per_k[0].dH == r1.per_k[0].dH);  // per-k seeds depend only on k
  REQUIRE(std::abs(r3.total - r1.total) <= r1.remainder_bound + 1e-15);
}

TEST_CASE("estimates are identical under any thread count") {
  POperator A = make_hypercube_op(4);
  POperator B = discretize(A, 8);
  ProfileConfig cfg;
  cfg.num_tuples = 5;
  cfg.q_atoms = 64;
  cfg.seed = 101;
  cfg.threads = 1;
  DmReport r1 = dm_estimate(A, B, 2, cfg);
  cfg.threads = 3;
  DmReport r3 = dm_estimate(A, B, 2, cfg);
  REQUIRE(r1.total == r3.total);
  for (std::size_t i = 0; i < r1.per_k.size(); ++i) REQUIRE(r1.per_k[i].dH == r3.per_k[i].dH);
}

TEST_CASE("discretization at n=16 stays under the n^{-1/2} envelope") {
  POperator A = make_hypercube_op(4);
  POperator B = discretize(A, 16);
  ProfileConfig cfg;
  cfg.k = 1;
  cfg.C_v = 1.0;
  cfg.num_tuples = 64;
  cfg.q_atoms = 512;
  cfg.seed = 404;
  const double est = hausdorff_profile_distance(A, B, cfg);
  // 2 sqrt(C_A C_v / n) + (C_v + 1)/n at C_A = C_v = 1, n = 16
  REQUIRE(est <= 0.625);
}
