#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "gnn.hpp"
#include "metric.hpp"
#include "operator.hpp"

// Closed forms of the discretization and transferability bounds, statistical
// checkers for the operator assumptions behind them, and a sweep harness that
// pairs measured distance estimates with the matching bound per resolution.

namespace graphop {

enum class Theorem { Thm41, Cor42, Thm43Approx, Thm43Transfer, GeneralD1, LemmaE3 };

// Piece-structure regime a bound assumes of the operator. The deterministic
// constant-to-lipschitz form carries a constant C_c; the whp forms pay +1
// terms for an exceptional set; lipschitz-to-lipschitz needs no C_c at all.
enum class BoundVariant { ConstantToLipschitz, ConstantToLipschitzWhp, LipschitzToLipschitz };

inline const char* theorem_name(Theorem t) {
  switch (t) {
    case Theorem::Thm41: return "thm41";
    case Theorem::Cor42: return "cor42";
    case Theorem::Thm43Approx: return "thm43-approx";
    case Theorem::Thm43Transfer: return "thm43-transfer";
    case Theorem::GeneralD1: return "general-D1";
    case Theorem::LemmaE3: return "lemma-E3";
  }
  throw std::invalid_argument("theorem_name: unknown theorem");
}

inline const char* variant_name(BoundVariant v) {
  switch (v) {
    case BoundVariant::ConstantToLipschitz: return "constant-to-lipschitz";
    case BoundVariant::ConstantToLipschitzWhp: return "constant-to-lipschitz-whp";
    case BoundVariant::LipschitzToLipschitz: return "lipschitz-to-lipschitz";
  }
  throw std::invalid_argument("variant_name: unknown variant");
}

namespace detail {

inline void require_constants(double C_A, double C_v, const char* who) {
  if (!(C_A >= 0.0) || !(C_v >= 0.0))
    throw std::invalid_argument(std::string(who) + ": constants must be nonnegative");
}

inline void require_resolution(int n, const char* who) {
  if (n < 1) throw std::invalid_argument(std::string(who) + ": resolution must be >= 1");
}

inline void require_gnn_shape(int K, int L, int n_max, const char* who) {
  if (K < 1 || L < 1 || n_max < 1)
    throw std::invalid_argument(std::string(who) + ": K, L, n_max must be >= 1");
}

}  // namespace detail

// Discretization bound for a single operator: with gain C_A and test signals
// of Lipschitz budget C_v, d_M(A, A_n) <= 2 sqrt(C_A C_v / n) + (C_v + 1)/n.
inline double thm41_bound(double C_A, double C_v, int n) {
  detail::require_constants(C_A, C_v, "thm41_bound");
  detail::require_resolution(n, "thm41_bound");
  const double nn = n;
  return 2.0 * std::sqrt(C_A * C_v / nn) + (C_v + 1.0) / nn;
}

// Transfer bound between two discretizations of the same operator. Written
// as the sum of the per-resolution terms so that m == n collapses bitwise to
// twice the single-resolution bound.
inline double cor42_bound(double C_A, double C_v, int m, int n) {
  return thm41_bound(C_A, C_v, m) + thm41_bound(C_A, C_v, n);
}

// Composite filter gain of an L-layer width-n_max network whose taps reach K
// powers of an operator with gain C_A: (n_max sum_{i=1..K} C_A^i)^L.
inline double cbar_A(double C_A, int K, int L, int n_max) {
  detail::require_gnn_shape(K, L, n_max, "cbar_A");
  double sum = 0.0;
  double p = 1.0;
  for (int i = 1; i <= K; ++i) {
    p *= C_A;
    sum += p;
  }
  return std::pow(n_max * sum, L);
}

// Discretization bound for a network built on A, per piece-structure regime.
// P1 = 3^(KL) scales the sqrt term; the constant-to-lipschitz regimes add a
// C_c penalty P2 = 3^K K^2 under the root. C_c is ignored by the
// lipschitz-to-lipschitz regime.
inline double thm43_bound(double C_A, double C_v, int K, int L, int n_max, int n,
                          BoundVariant variant, double C_c = 0.0) {
  detail::require_constants(C_A, C_v, "thm43_bound");
  detail::require_gnn_shape(K, L, n_max, "thm43_bound");
  detail::require_resolution(n, "thm43_bound");
  const double nn = n;
  const double cbar = cbar_A(C_A, K, L, n_max);
  const double P1 = std::pow(3.0, static_cast<double>(K) * L);
  const double P2 = std::pow(3.0, K) * K * K;
  const double cak = std::pow(C_A, K);
  switch (variant) {
    case BoundVariant::ConstantToLipschitz:
      return P1 * std::sqrt((cbar * C_v + C_c * n_max * cak * P2) / nn) + C_v / nn;
    case BoundVariant::ConstantToLipschitzWhp:
      return P1 * std::sqrt((cbar * C_v + (C_c + 1.0) * n_max * cak * P2) / nn) +
             (C_v + 1.0) / nn;
    case BoundVariant::LipschitzToLipschitz:
      return P1 * std::sqrt(cbar * C_v / nn) + (C_v + 1.0) / nn;
  }
  throw std::invalid_argument("thm43_bound: unknown variant");
}

// Transfer form of the network bound; the sum of per-resolution terms of the
// lipschitz-to-lipschitz shape, collapsing bitwise at m == n.
inline double thm43_transfer_bound(double C_A, double C_v, int K, int L, int n_max, int m, int n) {
  return thm43_bound(C_A, C_v, K, L, n_max, m, BoundVariant::LipschitzToLipschitz) +
         thm43_bound(C_A, C_v, K, L, n_max, n, BoundVariant::LipschitzToLipschitz);
}

// Per-signal network output gap bound:
//   (1/n) (3^K K n_max C_A^K)^L max(C_v, 3^K K^2 X n_max C_A^K)
// where X is C_c, C_c + 1, or C_v + 1 by regime.
inline double lemma_e3_bound(double C_A, double C_v, double C_c, int K, int L, int n_max, int n,
                             BoundVariant variant) {
  detail::require_constants(C_A, C_v, "lemma_e3_bound");
  detail::require_gnn_shape(K, L, n_max, "lemma_e3_bound");
  detail::require_resolution(n, "lemma_e3_bound");
  const double threeK = std::pow(3.0, K);
  const double cak = std::pow(C_A, K);
  const double layer_gain = std::pow(threeK * K * n_max * cak, L);
  double X = 0.0;
  switch (variant) {
    case BoundVariant::ConstantToLipschitz: X = C_c; break;
    case BoundVariant::ConstantToLipschitzWhp: X = C_c + 1.0; break;
    case BoundVariant::LipschitzToLipschitz: X = C_v + 1.0; break;
  }
  return layer_gain * std::max(C_v, threeK * K * K * X * n_max * cak) / n;
}

// General single-operator discretization bound with factor 8, covering the
// relaxed piece assumptions. The lipschitz-to-lipschitz row is inherently a
// whp statement, hence the +1 terms.
inline double general_approx_bound(double C_A, double C_v, double C_c, int n,
                                   BoundVariant variant) {
  detail::require_constants(C_A, C_v, "general_approx_bound");
  detail::require_resolution(n, "general_approx_bound");
  const double nn = n;
  switch (variant) {
    case BoundVariant::ConstantToLipschitz:
      return 8.0 * (std::sqrt(C_A * C_v / nn) + (C_v + C_c) / nn);
    case BoundVariant::ConstantToLipschitzWhp:
      return 8.0 * (std::sqrt((C_A * C_v + 1.0) / nn) + (C_v + C_c + 1.0) / nn);
    case BoundVariant::LipschitzToLipschitz:
      return 8.0 * (std::sqrt((C_A * C_v + 1.0) / nn) + (C_v + 1.0) / nn);
  }
  throw std::invalid_argument("general_approx_bound: unknown variant");
}

struct BoundConstants {
  double C_A = 0.0;
  double C_v = 0.0;
  double C_c = 0.0;
  int K = 0;      // 0 when the bound has no network
  int L = 0;
  int n_max = 0;
  int n = 0;
  int m = 0;      // 0 when the bound involves a single resolution
};

// One measured-versus-predicted row. pass is set exactly when measured is.
struct BoundReport {
  Theorem theorem = Theorem::Thm41;
  std::optional<BoundVariant> variant;
  BoundConstants constants;
  double bound_value = 0.0;
  std::optional<double> measured;
  std::optional<bool> pass;
  bool hypothesis_ok = true;  // every resolution in the row lies in the operator's declared set
  int num_tuples = 0;
  std::uint64_t seed = 0;

  void set_measured(double v) {
    measured = v;
    pass = (v <= bound_value);
  }
};

// Outcome of a statistical assumption check. These are falsifiers: a pass is
// evidence from finitely many trials, not a proof over all inputs; a failure
// carries a concrete witness.
struct CheckReport {
  bool pass = false;
  double measured = 0.0;   // worst statistic observed over all trials
  double threshold = 0.0;
  int trials = 0;
  std::string witness;     // empty on pass
};

namespace detail {

inline std::string format_witness(const char* what, int trial, double value) {
  char buf[96];
  std::snprintf(buf, sizeof(buf), "trial %d: %s %.6g", trial, what, value);
  return buf;
}

inline Signal random_pc_signal(Rng& rng, int n) {
  std::vector<double> vals(n);
  for (double& v : vals) v = rng.next_in(-1.0, 1.0);
  return Signal::piecewise_constant(std::move(vals));
}

inline FiniteSignal random_finite_signal(Rng& rng, int n) {
  FiniteSignal x;
  x.values.resize(n);
  for (double& v : x.values) v = rng.next_in(-1.0, 1.0);
  return x;
}

}  // namespace detail

// Checks the declared L2 gain on random signal pairs: max ||Af - Ag|| over
// ||f - g||, pass iff within 1% of C_A. Continuum operators are probed with
// piecewise-constant noise at resolution 64.
inline CheckReport check_lipschitz_map(const POperator& A, double C_A, int trials,
                                       std::uint64_t seed) {
  if (trials < 1) throw std::invalid_argument("check_lipschitz_map: trials must be >= 1");
  CheckReport rep;
  rep.trials = trials;
  rep.threshold = C_A * 1.01;
  int worst_trial = -1;
  Rng rng(seed);
  for (int t = 0; t < trials; ++t) {
    double ratio = 0.0;
    if (A.domain() == Domain::Continuum) {
      const Signal f = detail::random_pc_signal(rng, 64);
      const Signal g = detail::random_pc_signal(rng, 64);
      const double den = l2_distance(f, g);
      if (den < 1e-9) continue;
      ratio = l2_distance(A.apply(f), A.apply(g)) / den;
    } else {
      const FiniteSignal f = detail::random_finite_signal(rng, A.grid_n());
      const FiniteSignal g = detail::random_finite_signal(rng, A.grid_n());
      const double den = l2_distance(f, g);
      if (den < 1e-9) continue;
      ratio = l2_distance(A.apply(f), A.apply(g)) / den;
    }
    if (ratio > rep.measured) {
      rep.measured = ratio;
      worst_trial = t;
    }
  }
  rep.pass = rep.measured <= rep.threshold;
  if (!rep.pass) rep.witness = detail::format_witness("gain ratio", worst_trial, rep.measured);
  return rep;
}

enum class PieceMode { ConstantToConstant, ConstantToLipschitz, LipschitzToLipschitz };

// Checks the declared piece structure of a continuum operator at resolution n.
//
// ConstantToConstant probes images of piecewise-constant noise at 8 points
// per cell and reports the worst within-cell spread (pass iff <= 1e-9).
// ConstantToLipschitz runs a within-cell finite-difference Lipschitz estimate
// on the same inputs; LipschitzToLipschitz feeds Lipschitz inputs of constant
// lipschitz_const and scans the image globally. The lipschitz modes pass iff
// the estimate is within 1% of lipschitz_const.
inline CheckReport check_piece_structure(const POperator& A, int n, PieceMode mode, int trials,
                                         std::uint64_t seed, double lipschitz_const = 1.0) {
  if (A.domain() != Domain::Continuum)
    throw std::invalid_argument("check_piece_structure: continuum operator required");
  detail::require_resolution(n, "check_piece_structure");
  if (trials < 1) throw std::invalid_argument("check_piece_structure: trials must be >= 1");
  CheckReport rep;
  rep.trials = trials;
  int worst_trial = -1;

  if (mode == PieceMode::LipschitzToLipschitz) {
    rep.threshold = lipschitz_const * 1.01;
    // The fine-step scan leaves gaps between its probe pairs, so a jump can
    // slip through; an adjacent-pair scan over a contiguous grid cannot miss
    // one, at the price of a coarser quotient. Take the worse of the two.
    auto lipschitz_estimate = [](const Signal& g) {
      double est = fd_lipschitz(g);
      const int grid = 4096;
      double prev = g(0.0);
      for (int i = 1; i <= grid; ++i) {
        const double cur = g(static_cast<double>(i) / grid);
        est = std::max(est, std::abs(cur - prev) * grid);
        prev = cur;
      }
      return est;
    };
    for (int t = 0; t < trials; ++t) {
      const Signal f =
          sample_lipschitz_tuple(1, lipschitz_const, split_seed(seed, t),
                                 SignalFamily::PiecewiseLinear)[0];
      const double est = lipschitz_estimate(A.apply(f));
      if (est > rep.measured) {
        rep.measured = est;
        worst_trial = t;
      }
    }
    rep.pass = rep.measured <= rep.threshold;
    if (!rep.pass)
      rep.witness = detail::format_witness("image lipschitz", worst_trial, rep.measured);
    return rep;
  }

  // Both constant-piece modes probe images of piecewise-constant noise at 8
  // interior points per cell; spread for the constant mode, adjacent-pair
  // slopes for the lipschitz mode. Cell boundaries are never crossed, so
  // jumps between cells are allowed as the assumptions intend.
  const int probes = 8;
  rep.threshold = (mode == PieceMode::ConstantToConstant) ? 1e-9 : lipschitz_const * 1.01;
  Rng rng(seed);
  for (int t = 0; t < trials; ++t) {
    const Signal f = detail::random_pc_signal(rng, n);
    const Signal g = A.apply(f);
    for (int u = 0; u < n; ++u) {
      double y[probes];
      double x[probes];
      for (int j = 0; j < probes; ++j) {
        x[j] = (u + (j + 0.5) / probes) / n;
        y[j] = g(x[j]);
      }
      double stat = 0.0;
      if (mode == PieceMode::ConstantToConstant) {
        const auto [lo, hi] = std::minmax_element(y, y + probes);
        stat = *hi - *lo;
      } else {
        for (int j = 0; j + 1 < probes; ++j)
          stat = std::max(stat, std::abs(y[j + 1] - y[j]) / (x[j + 1] - x[j]));
      }
      if (stat > rep.measured) {
        rep.measured = stat;
        worst_trial = t;
      }
    }
  }
  rep.pass = rep.measured <= rep.threshold;
  if (!rep.pass) {
    const char* what =
        (mode == PieceMode::ConstantToConstant) ? "within-cell spread" : "within-cell slope";
    rep.witness = detail::format_witness(what, worst_trial, rep.measured);
  }
  return rep;
}

struct SweepConfig {
  ProfileConfig profile;
  int k_max = 4;
  // Regime reported for the network bounds; the resolution-only bounds ignore it.
  BoundVariant variant = BoundVariant::LipschitzToLipschitz;
  std::optional<GnnParams> gnn;  // required by the thm43 and lemma-E3 sweeps
};

namespace detail {

inline BoundReport sweep_row(Theorem theorem, const SweepConfig& cfg, const POperator& A, int n,
                             int m) {
  BoundReport row;
  row.theorem = theorem;
  row.constants.C_A = A.constants().C_A;
  row.constants.C_v = cfg.profile.C_v;
  row.constants.C_c = A.constants().C_c.value_or(0.0);
  row.constants.n = n;
  row.constants.m = m;
  row.num_tuples = cfg.profile.num_tuples;
  row.seed = cfg.profile.seed;
  row.hypothesis_ok = A.constants().resolutions.contains(n) &&
                      (m == 0 || A.constants().resolutions.contains(m));
  return row;
}

// Worst network output gap over sampled Lipschitz inputs restricted to n.
inline double max_gnn_gap(const GnnParams& p, const POperator& A, int n,
                          const ProfileConfig& cfg) {
  auto gap = [&](int t) {
    const Signal f = sample_lipschitz_tuple(1, cfg.C_v, split_seed(cfg.seed, t), cfg.family)[0];
    return gnn_signal_gap(p, A, n, restrict_signal(f, n));
  };
  const std::vector<double> gaps = parallel_map<double>(cfg.num_tuples, cfg.threads, gap);
  return *std::max_element(gaps.begin(), gaps.end());
}

}  // namespace detail

// Runs the chosen experiment per resolution against a continuum operator and
// returns one report row per resolution (per consecutive resolution pair for
// the transfer bounds). Rows whose resolution lies outside the operator's
// declared set are measured anyway and flagged via hypothesis_ok. All rows
// share the config seed, so resolutions are compared under common draws.
inline std::vector<BoundReport> run_resolution_sweep(const POperator& A,
                                                     const std::vector<int>& resolutions,
                                                     const SweepConfig& cfg, Theorem theorem) {
  if (A.domain() != Domain::Continuum)
    throw std::invalid_argument("run_resolution_sweep: continuum operator required");
  cfg.profile.validate();
  if (cfg.k_max < 1) throw std::invalid_argument("run_resolution_sweep: k_max must be >= 1");
  for (int n : resolutions) detail::require_resolution(n, "run_resolution_sweep");
  const bool needs_gnn = theorem == Theorem::Thm43Approx || theorem == Theorem::Thm43Transfer ||
                         theorem == Theorem::LemmaE3;
  if (needs_gnn && !cfg.gnn)
    throw std::invalid_argument("run_resolution_sweep: theorem requires gnn params");
  if (needs_gnn) cfg.gnn->validate();

  const double C_A = A.constants().C_A;
  const double C_v = cfg.profile.C_v;
  const double C_c = A.constants().C_c.value_or(0.0);
  std::vector<BoundReport> rows;

  auto fill_gnn_shape = [&](BoundReport& row) {
    row.variant = cfg.variant;
    row.constants.K = cfg.gnn->K;
    row.constants.L = cfg.gnn->L;
    row.constants.n_max = cfg.gnn->n_max();
  };

  switch (theorem) {
    case Theorem::Thm41:
    case Theorem::GeneralD1:
      for (int n : resolutions) {
        BoundReport row = detail::sweep_row(theorem, cfg, A, n, 0);
        if (theorem == Theorem::Thm41) {
          row.bound_value = thm41_bound(C_A, C_v, n);
        } else {
          row.variant = cfg.variant;
          row.bound_value = general_approx_bound(C_A, C_v, C_c, n, cfg.variant);
        }
        row.set_measured(dm_estimate(A, discretize(A, n), cfg.k_max, cfg.profile).total);
        rows.push_back(std::move(row));
      }
      break;
    case Theorem::Cor42:
      for (std::size_t i = 0; i + 1 < resolutions.size(); ++i) {
        const int m = resolutions[i];
        const int n = resolutions[i + 1];
        BoundReport row = detail::sweep_row(theorem, cfg, A, n, m);
        row.bound_value = cor42_bound(C_A, C_v, m, n);
        row.set_measured(
            dm_estimate(discretize(A, m), discretize(A, n), cfg.k_max, cfg.profile).total);
        rows.push_back(std::move(row));
      }
      break;
    case Theorem::Thm43Approx: {
      const POperator net = gnn_as_operator(*cfg.gnn, A);
      for (int n : resolutions) {
        BoundReport row = detail::sweep_row(theorem, cfg, A, n, 0);
        fill_gnn_shape(row);
        row.bound_value = thm43_bound(C_A, C_v, cfg.gnn->K, cfg.gnn->L, cfg.gnn->n_max(), n,
                                      cfg.variant, C_c);
        const POperator net_n = gnn_as_operator(*cfg.gnn, discretize(A, n));
        row.set_measured(dm_estimate(net, net_n, cfg.k_max, cfg.profile).total);
        rows.push_back(std::move(row));
      }
      break;
    }
    case Theorem::Thm43Transfer:
      for (std::size_t i = 0; i + 1 < resolutions.size(); ++i) {
        const int m = resolutions[i];
        const int n = resolutions[i + 1];
        BoundReport row = detail::sweep_row(theorem, cfg, A, n, m);
        fill_gnn_shape(row);
        row.bound_value =
            thm43_transfer_bound(C_A, C_v, cfg.gnn->K, cfg.gnn->L, cfg.gnn->n_max(), m, n);
        const POperator net_m = gnn_as_operator(*cfg.gnn, discretize(A, m));
        const POperator net_n = gnn_as_operator(*cfg.gnn, discretize(A, n));
        row.set_measured(dm_estimate(net_m, net_n, cfg.k_max, cfg.profile).total);
        rows.push_back(std::move(row));
      }
      break;
    case Theorem::LemmaE3:
      for (int n : resolutions) {
        BoundReport row = detail::sweep_row(theorem, cfg, A, n, 0);
        fill_gnn_shape(row);
        row.bound_value = lemma_e3_bound(C_A, C_v, C_c, cfg.gnn->K, cfg.gnn->L, cfg.gnn->n_max(),
                                         n, cfg.variant);
        row.set_measured(detail::max_gnn_gap(*cfg.gnn, A, n, cfg.profile));
        rows.push_back(std::move(row));
      }
      break;
  }
  return rows;
}

}  // namespace graphop
