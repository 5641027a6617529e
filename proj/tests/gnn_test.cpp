#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "graphop/gnn.hpp"

using namespace graphop;

namespace {

// Plain-loop realization of the finite network on the weighted matrix D:
// an independent path for cross-checking gnn_forward.
std::vector<std::vector<double>> matrix_gnn(const GnnParams& p, const std::vector<double>& D, int n,
                                            const std::vector<double>& x0) {
  std::vector<std::vector<double>> cur = {x0};
  for (int l = 0; l < p.L; ++l) {
    std::vector<std::vector<double>> nxt;
    for (int f = 0; f < p.widths[l + 1]; ++f) {
      std::vector<double> acc(n, 0.0);
      for (int g = 0; g < p.widths[l]; ++g) {
        std::vector<double> y = cur[g];
        for (int k = 0; k < p.K; ++k) {
          if (k > 0) {
            std::vector<double> z(n, 0.0);
            for (int u = 0; u < n; ++u)
              for (int v = 0; v < n; ++v) z[u] += D[static_cast<std::size_t>(u) * n + v] * y[v];
            y = z;
          }
          const double w = p.h[l][f][g][k];
          if (w != 0.0)
            for (int u = 0; u < n; ++u) acc[u] += w * y[u];
        }
      }
      for (double& v : acc) v = apply_activation(p.activation, v);
      nxt.push_back(std::move(acc));
    }
    cur = std::move(nxt);
  }
  return cur;
}

}  // namespace

TEST_CASE("convolution taps select operator powers") {
  POperator A = make_hypercube_op(2);
  Signal f = Signal::piecewise_constant({1.0, 0.0, 0.0, 0.0});

  POperator id = graphop_conv({1.0, 0.0}, A);
  POperator just_a = graphop_conv({0.0, 1.0}, A);
  Signal Af = A.apply(f);
  Rng rng(3);
  for (int t = 0; t < 10; ++t) {
    const double x = rng.next_unit();
    REQUIRE(id.apply(f)(x) == f(x));
    REQUIRE(just_a.apply(f)(x) == Af(x));
  }

  POperator half = graphop_conv({0.5, 0.5}, A);
  Signal g = half.apply(f);
  REQUIRE(g(0.1) == 0.5);
  REQUIRE(g(0.3) == 0.25);
  REQUIRE(g(0.6) == 0.25);
  REQUIRE(g(0.9) == 0.0);
}

TEST_CASE("convolution gain is the tap-weighted geometric sum") {
  POperator A2 = op_scale(make_hypercube_op(2), 2.0);  // C_A = 2
  POperator C = graphop_conv({0.5, -0.5, 1.0}, A2);
  REQUIRE(C.constants().C_A == Catch::Approx(0.5 + 0.5 * 2.0 + 1.0 * 4.0).margin(1e-15));
  REQUIRE(C.constants().flags.constant_to_constant);  // hypercube keeps cells
  REQUIRE(C.constants().C_c.value() == 0.0);

  POperator G = make_graphon_op("product", kernel_product());
  POperator CG = graphop_conv({0.5, 0.5}, G);
  REQUIRE_FALSE(CG.constants().flags.constant_to_constant);
  REQUIRE_FALSE(CG.constants().C_c.has_value());  // identity tap breaks smoothing claims
}

TEST_CASE("convolution rejects empty and oversized taps") {
  POperator A = make_hypercube_op(2);
  REQUIRE_THROWS_AS(graphop_conv({}, A), std::invalid_argument);
  REQUIRE_THROWS_AS(graphop_conv({0.5, 1.2}, A), CoefficientBoundError);
}

TEST_CASE("parameter validation checks shapes and the coefficient bound") {
  GnnParams p;
  p.L = 1;
  p.widths = {1, 1};
  p.K = 2;
  p.h = {{{{1.0, 0.0}}}};
  REQUIRE_NOTHROW(p.validate());

  GnnParams bad = p;
  bad.h[0][0][0][1] = 1.2;
  REQUIRE_THROWS_AS(bad.validate(), CoefficientBoundError);

  bad = p;
  bad.widths = {2, 1};
  REQUIRE_THROWS_AS(bad.validate(), std::invalid_argument);

  bad = p;
  bad.h[0][0][0].push_back(0.0);
  REQUIRE_THROWS_AS(bad.validate(), std::invalid_argument);

  bad = p;
  bad.h.clear();
  REQUIRE_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("identity network passes bounded signals through") {
  GnnParams p;
  p.L = 1;
  p.widths = {1, 1};
  p.K = 2;
  p.h = {{{{1.0, 0.0}}}};

  POperator A = make_hypercube_op(3);
  Signal x = Signal::piecewise_constant({0.5, -0.75, 0.25, 1.0, -1.0, 0.0, 0.5, -0.5});
  std::vector<Signal> out = gnn_forward(p, A, x);
  REQUIRE(out.size() == 1);
  for (int c = 0; c < 8; ++c) REQUIRE(out[0]((c + 0.5) / 8.0) == x((c + 0.5) / 8.0));

  POperator An = discretize(A, 8);
  FiniteSignal xf = restrict_signal(x, 8);
  std::vector<FiniteSignal> outf = gnn_forward(p, An, xf);
  REQUIRE(outf[0].values == xf.values);
}

TEST_CASE("zero coefficients give the zero network under every activation") {
  for (Activation act : {Activation::Clip, Activation::Tanh, Activation::LeakyAbs}) {
    GnnParams p;
    p.L = 2;
    p.widths = {1, 2, 1};
    p.K = 2;
    p.activation = act;
    p.h = {{{{0.0, 0.0}}, {{0.0, 0.0}}}, {{{0.0, 0.0}, {0.0, 0.0}}}};
    POperator An = discretize(make_hypercube_op(3), 8);
    FiniteSignal x;
    x.values.assign(8, 0.7);
    std::vector<FiniteSignal> out = gnn_forward(p, An, x);
    for (double v : out[0].values) REQUIRE(v == 0.0);
  }
}

TEST_CASE("constant inputs reduce the network to a scalar recursion") {
  GnnParams p = random_gnn_params(2, {1, 2, 1}, 2, Activation::Clip, 515);
  POperator A = make_hypercube_op(3);
  Signal x = Signal::piecewise_constant({0.5});
  Signal y = gnn_forward(p, A, x)[0];

  // constants are fixed points of the averaging operator, so each filter
  // collapses to the sum of its taps
  double x1[2];
  for (int f = 0; f < 2; ++f)
    x1[f] = apply_activation(Activation::Clip, (p.h[0][f][0][0] + p.h[0][f][0][1]) * 0.5);
  double want = 0.0;
  for (int g = 0; g < 2; ++g) want += (p.h[1][0][g][0] + p.h[1][0][g][1]) * x1[g];
  want = apply_activation(Activation::Clip, want);

  REQUIRE(y(0.3) == Catch::Approx(want).margin(1e-15));
  REQUIRE(y(0.77) == Catch::Approx(want).margin(1e-15));
}

TEST_CASE("finite forward pass matches a plain matrix realization") {
  POperator An = discretize(make_hypercube_op(4), 16);
  GnnParams p = random_gnn_params(2, {1, 2, 1}, 3, Activation::Tanh, 808);
  Rng rng(809);
  FiniteSignal x;
  for (int i = 0; i < 16; ++i) x.values.push_back(rng.next_in(-1, 1));

  std::vector<FiniteSignal> got = gnn_forward(p, An, x);
  std::vector<std::vector<double>> want = matrix_gnn(p, *An.matrix(), 16, x.values);
  REQUIRE(got.size() == want.size());
  for (int i = 0; i < 16; ++i)
    REQUIRE(got[0].values[i] == Catch::Approx(want[0][i]).margin(1e-10));
}

TEST_CASE("layer zero is not activated") {
  GnnParams p;
  p.L = 1;
  p.widths = {1, 1};
  p.K = 1;
  p.h = {{{{0.5}}}};
  POperator I = make_identity_op(Domain::Finite, 3);
  FiniteSignal x;
  x.values = {1.8, -1.4, 0.3};  // outside [-1,1]: clipping the input would show
  std::vector<FiniteSignal> out = gnn_forward(p, I, x);
  REQUIRE(out[0].values[0] == 0.9);
  REQUIRE(out[0].values[1] == -0.7);
  REQUIRE(out[0].values[2] == 0.15);
}

TEST_CASE("hidden features can be permuted without changing the output") {
  // dyadic data keeps every intermediate sum exact, so the reordered
  // accumulation is bitwise identical
  GnnParams p;
  p.L = 2;
  p.widths = {1, 3, 1};
  p.K = 2;
  p.h = {{{{0.5, -0.25}}, {{1.0, 0.5}}, {{-0.75, 0.125}}},
         {{{0.25, 0.5}, {-0.5, 0.25}, {0.75, -0.125}}}};
  GnnParams q = p;
  std::swap(q.h[0][0], q.h[0][2]);        // permute hidden features 0 <-> 2
  std::swap(q.h[1][0][0], q.h[1][0][2]);  // and the matching second-layer slices

  POperator I = make_identity_op(Domain::Finite, 4);
  FiniteSignal x;
  x.values = {0.5, -0.25, 0.75, -1.0};
  REQUIRE(gnn_forward(p, I, x)[0].values == gnn_forward(q, I, x)[0].values);
}

TEST_CASE("network as operator: declared gain dominates measured ratios") {
  POperator An = discretize(make_hypercube_op(4), 16);
  GnnParams p = random_gnn_params(2, {1, 2, 1}, 2, Activation::Clip, 71);
  POperator Phi = gnn_as_operator(p, An);
  REQUIRE(Phi.constants().C_A == 16.0);  // (n_max K max(1,C_A)^K)^L = (2*2)^2
  REQUIRE_FALSE(Phi.is_linear());

  Rng rng(72);
  for (int trial = 0; trial < 50; ++trial) {
    FiniteSignal x, y;
    for (int i = 0; i < 16; ++i) x.values.push_back(rng.next_in(-1, 1));
    for (int i = 0; i < 16; ++i) y.values.push_back(rng.next_in(-1, 1));
    FiniteSignal dx = x, dy = Phi.apply(x), ey = Phi.apply(y);
    for (int i = 0; i < 16; ++i) dx.values[i] -= y.values[i];
    for (int i = 0; i < 16; ++i) dy.values[i] -= ey.values[i];
    const double denom = l2_norm(dx);
    if (denom == 0.0) continue;
    REQUIRE(l2_norm(dy) <= Phi.constants().C_A * denom + 1e-12);
  }
}

TEST_CASE("network as operator keeps identity and zero cases honest") {
  POperator A = make_hypercube_op(2);
  GnnParams id;
  id.L = 1;
  id.widths = {1, 1};
  id.K = 1;
  id.h = {{{{1.0}}}};
  POperator Phi = gnn_as_operator(id, A);
  REQUIRE(Phi.constants().C_A == 1.0);
  REQUIRE(Phi.constants().flags.constant_to_constant);
  Signal x = Signal::piecewise_constant({1.7, -2.0, 0.3, 0.9});
  Signal y = Phi.apply(x);
  REQUIRE(y(0.1) == 1.0);  // clip
  REQUIRE(y(0.3) == -1.0);
  REQUIRE(y(0.6) == 0.3);

  GnnParams zero = id;
  zero.K = 2;
  zero.h = {{{{0.0, 0.0}}}};
  POperator Z = gnn_as_operator(zero, A);
  REQUIRE(Z.constants().C_A == 2.0);  // declared composite bound, not the measured 0
  REQUIRE(Z.apply(x)(0.5) == 0.0);

  GnnParams wide = random_gnn_params(1, {1, 2}, 1, Activation::Clip, 5);
  REQUIRE_THROWS_AS(gnn_as_operator(wide, A), std::invalid_argument);
}

TEST_CASE("piecewise-constant inputs stay piecewise constant through the network") {
  POperator A = make_hypercube_op(3);
  GnnParams p = random_gnn_params(2, {1, 2, 1}, 2, Activation::Clip, 21);
  POperator Phi = gnn_as_operator(p, A);
  REQUIRE(Phi.constants().resolutions.contains(8));
  Rng rng(22);
  std::vector<double> v(8);
  for (double& t : v) t = rng.next_in(-1, 1);
  Signal y = Phi.apply(Signal::piecewise_constant(v));
  for (int cell = 0; cell < 8; ++cell) {
    const double ref = y((cell + 0.5) / 8.0);
    for (int probe = 1; probe <= 8; ++probe)
      REQUIRE(y((cell + probe / 9.0) / 8.0) == ref);
  }
}

TEST_CASE("identity and zero networks have no discretization gap") {
  POperator A = make_hypercube_op(4);
  Rng rng(31);
  FiniteSignal x;
  for (int i = 0; i < 16; ++i) x.values.push_back(rng.next_in(-1, 1));

  GnnParams id;
  id.L = 1;
  id.widths = {1, 1};
  id.K = 2;
  id.h = {{{{1.0, 0.0}}}};
  REQUIRE(gnn_signal_gap(id, A, 16, x) == 0.0);

  GnnParams zero = id;
  zero.h = {{{{0.0, 0.0}}}};
  REQUIRE(gnn_signal_gap(zero, A, 16, x) == 0.0);
}

TEST_CASE("two-layer network gap at n=64 stays under the layered bound") {
  POperator A = make_hypercube_op(6);
  GnnParams p = random_gnn_params(2, {1, 2, 1}, 2, Activation::Clip, 606);
  Signal f = sample_lipschitz_tuple(1, 1.0, 607)[0];
  FiniteSignal x = restrict_signal(f, 64);
  const double gap = gnn_signal_gap(p, A, 64, x);
  REQUIRE(gap >= 0.0);
  // composite worst case (3^K K n_max C_A^K)^L max(C_v, 3^K K^2 (C_v+1) n_max C_A^K)/n
  REQUIRE(gap <= 1296.0 * 144.0 / 64.0);
}
