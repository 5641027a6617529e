#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <vector>

#include "quadrature.hpp"
#include "rng.hpp"

// Signals are test functions on [0,1]: piecewise-constant and piecewise-linear
// vectors on the uniform grid, or arbitrary analytic evaluators. They are
// immutable value types; copies share their payload.
//
// Grid conventions, used consistently everywhere:
//   - resolution-n cells are half-open, cell u = ((u-1)/n, u/n], u = 1..n
//   - x = 0 belongs to cell 1
//   - evaluation outside [0,1] returns the boundary value (constant
//     continuation), which is what the mollifier expects
//   - finite signals live on grid points u/n with inner product weighted by
//     1/n, so the constant-1 signal has norm 1 at every resolution

namespace graphop {

// Cell of x at resolution n under the half-open convention.
inline int cell_index(double x, int n) {
  int c = static_cast<int>(std::ceil(x * n));
  if (c < 1) c = 1;
  if (c > n) c = n;
  return c;
}

inline long long cell_index(double x, long long n) {
  long long c = static_cast<long long>(std::ceil(x * static_cast<double>(n)));
  if (c < 1) c = 1;
  if (c > n) c = n;
  return c;
}

struct FiniteSignal {
  std::vector<double> values;  // values[u-1] is the value at grid point u/n

  int n() const { return static_cast<int>(values.size()); }
};

enum class SignalRepr { PiecewiseConstant, PiecewiseLinear, Analytic };

class Signal {
 public:
  static Signal piecewise_constant(std::vector<double> values) {
    if (values.empty()) throw std::invalid_argument("piecewise_constant: empty values");
    auto p = std::make_shared<Payload>();
    p->repr = SignalRepr::PiecewiseConstant;
    p->n = static_cast<int>(values.size());
    p->vals = std::move(values);
    p->range_bound = max_abs(p->vals);
    return Signal(std::move(p));
  }

  // node_values[i] is the value at node i/n, i = 0..n
  static Signal piecewise_linear(std::vector<double> node_values) {
    if (node_values.size() < 2) throw std::invalid_argument("piecewise_linear: need at least 2 nodes");
    auto p = std::make_shared<Payload>();
    p->repr = SignalRepr::PiecewiseLinear;
    p->n = static_cast<int>(node_values.size()) - 1;
    p->vals = std::move(node_values);
    p->range_bound = max_abs(p->vals);
    double md = 0.0;
    for (std::size_t i = 1; i < p->vals.size(); ++i)
      md = std::max(md, std::abs(p->vals[i] - p->vals[i - 1]));
    p->lipschitz = p->n * md;
    return Signal(std::move(p));
  }

  static Signal analytic(std::function<double(double)> f, double range_bound,
                         std::optional<double> lipschitz = std::nullopt) {
    if (!f) throw std::invalid_argument("analytic: empty function");
    if (!(range_bound >= 0)) throw std::invalid_argument("analytic: range_bound must be >= 0");
    auto p = std::make_shared<Payload>();
    p->repr = SignalRepr::Analytic;
    p->fn = std::move(f);
    p->range_bound = range_bound;
    p->lipschitz = lipschitz;
    return Signal(std::move(p));
  }

  double operator()(double x) const {
    if (x < 0.0) x = 0.0;
    if (x > 1.0) x = 1.0;
    const Payload& p = *p_;
    switch (p.repr) {
      case SignalRepr::PiecewiseConstant:
        return p.vals[cell_index(x, p.n) - 1];
      case SignalRepr::PiecewiseLinear: {
        const int seg = cell_index(x, p.n);
        double t = x * p.n - (seg - 1);
        if (t < 0.0) t = 0.0;
        if (t > 1.0) t = 1.0;
        return p.vals[seg - 1] * (1.0 - t) + p.vals[seg] * t;
      }
      case SignalRepr::Analytic:
        return p.fn(x);
    }
    return 0.0;  // unreachable
  }

  SignalRepr repr() const { return p_->repr; }
  // grid resolution; 0 for analytic signals
  int resolution() const { return p_->repr == SignalRepr::Analytic ? 0 : p_->n; }
  // cell values (piecewise-constant) or node values (piecewise-linear)
  const std::vector<double>& values() const {
    if (p_->repr == SignalRepr::Analytic) throw std::logic_error("values(): analytic signal");
    return p_->vals;
  }
  double range_bound() const { return p_->range_bound; }
  const std::optional<double>& lipschitz_const() const { return p_->lipschitz; }

  // Same signal with metadata replaced; bounds stay the caller's responsibility.
  Signal with_metadata(double range_bound, std::optional<double> lipschitz) const {
    auto p = std::make_shared<Payload>(*p_);
    p->range_bound = range_bound;
    p->lipschitz = lipschitz;
    return Signal(std::move(p));
  }

 private:
  struct Payload {
    SignalRepr repr = SignalRepr::Analytic;
    int n = 0;
    std::vector<double> vals;
    std::function<double(double)> fn;
    double range_bound = 0.0;
    std::optional<double> lipschitz;
  };

  explicit Signal(std::shared_ptr<Payload> p) : p_(std::move(p)) {}

  static double max_abs(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
  }

  std::shared_ptr<const Payload> p_;
};

// ---- grid transfer ---------------------------------------------------------

// Cell averages: values[u-1] = n * integral of f over cell u. Exact to machine
// precision on piecewise-constant input whose resolution divides q.
inline FiniteSignal restrict_signal(const Signal& f, int n, int q = kGroundPoints) {
  if (n < 1) throw std::invalid_argument("restrict_signal: n must be >= 1");
  const int pts = cell_points(n, q);
  FiniteSignal out;
  out.values.resize(n);
  for (int u = 1; u <= n; ++u) out.values[u - 1] = cell_mean(f, n, u, pts);
  return out;
}

// Step-function extension; an isometry for the weighted grid inner product.
inline Signal extend_pc(const FiniteSignal& X) {
  if (X.values.empty()) throw std::invalid_argument("extend_pc: empty signal");
  return Signal::piecewise_constant(X.values);
}

// Piecewise-linear extension interpolating X at the grid points and held
// constant on [0, 1/n], where interpolation has no left neighbor.
// pre: adjacent increments at most C_v/n (within tolerance), so the result is
// C_v-Lipschitz.
inline Signal extend_pl(const FiniteSignal& X, double C_v) {
  const int n = X.n();
  if (n < 1) throw std::invalid_argument("extend_pl: empty signal");
  const double cap = C_v / n + 1e-12;
  for (int i = 1; i < n; ++i) {
    if (std::abs(X.values[i] - X.values[i - 1]) > cap)
      throw std::invalid_argument("extend_pl: grid increments exceed C_v/n");
  }
  std::vector<double> nodes(n + 1);
  nodes[0] = X.values[0];
  for (int i = 0; i < n; ++i) nodes[i + 1] = X.values[i];
  return Signal::piecewise_linear(std::move(nodes));
}

// ---- norms and inner products ----------------------------------------------

inline double inner_product(const Signal& f, const Signal& g, int q = kGroundPoints) {
  return integrate01([&](double x) { return f(x) * g(x); }, q);
}

inline double l2_norm(const Signal& f, int q = kGroundPoints) {
  return std::sqrt(std::max(0.0, integrate01([&](double x) { return f(x) * f(x); }, q)));
}

inline double l2_distance(const Signal& f, const Signal& g, int q = kGroundPoints) {
  return std::sqrt(std::max(0.0, integrate01(
                                     [&](double x) {
                                       const double d = f(x) - g(x);
                                       return d * d;
                                     },
                                     q)));
}

inline double inner_product(const FiniteSignal& x, const FiniteSignal& y) {
  if (x.n() != y.n()) throw std::invalid_argument("inner_product: resolution mismatch");
  std::vector<double> prod(x.values.size());
  for (std::size_t i = 0; i < prod.size(); ++i) prod[i] = x.values[i] * y.values[i];
  return pairwise_sum(prod) / x.n();
}

inline double l2_norm(const FiniteSignal& x) {
  return std::sqrt(std::max(0.0, inner_product(x, x)));
}

inline double l2_distance(const FiniteSignal& x, const FiniteSignal& y) {
  if (x.n() != y.n()) throw std::invalid_argument("l2_distance: resolution mismatch");
  std::vector<double> d(x.values.size());
  for (std::size_t i = 0; i < d.size(); ++i) {
    const double t = x.values[i] - y.values[i];
    d[i] = t * t;
  }
  return std::sqrt(std::max(0.0, pairwise_sum(d) / x.n()));
}

// ---- pointwise algebra -----------------------------------------------------

inline Signal scale_signal(const Signal& f, double a) {
  if (f.repr() != SignalRepr::Analytic) {
    std::vector<double> v = f.values();
    for (double& x : v) x *= a;
    return f.repr() == SignalRepr::PiecewiseConstant ? Signal::piecewise_constant(std::move(v))
                                                     : Signal::piecewise_linear(std::move(v));
  }
  std::optional<double> lip;
  if (f.lipschitz_const()) lip = std::abs(a) * *f.lipschitz_const();
  Signal base = f;
  return Signal::analytic([base, a](double x) { return a * base(x); },
                          std::abs(a) * f.range_bound(), lip);
}

inline Signal add_signals(const Signal& f, const Signal& g) {
  if (f.repr() == g.repr() && f.repr() != SignalRepr::Analytic && f.resolution() == g.resolution()) {
    std::vector<double> v = f.values();
    for (std::size_t i = 0; i < v.size(); ++i) v[i] += g.values()[i];
    return f.repr() == SignalRepr::PiecewiseConstant ? Signal::piecewise_constant(std::move(v))
                                                     : Signal::piecewise_linear(std::move(v));
  }
  std::optional<double> lip;
  if (f.lipschitz_const() && g.lipschitz_const()) lip = *f.lipschitz_const() + *g.lipschitz_const();
  Signal a = f, b = g;
  return Signal::analytic([a, b](double x) { return a(x) + b(x); },
                          f.range_bound() + g.range_bound(), lip);
}

// ---- finite-difference Lipschitz scan ---------------------------------------

// Largest difference quotient at the pinned step; the checkers compare it
// against declared constants with a 1.01 slack factor.
inline double fd_lipschitz(const Signal& f, int probes = 4096, double step = 1e-4) {
  double worst = 0.0;
  const double span = 1.0 - step;
  for (int i = 0; i < probes; ++i) {
    const double x = span * (i + 0.5) / probes;
    worst = std::max(worst, std::abs(f(x + step) - f(x)) / step);
  }
  return worst;
}

// ---- mollifier ---------------------------------------------------------------

// Standard bump on (-1,1), unnormalized; normalization happens discretely in
// mollify so that constants map to constants exactly.
inline double bump_kernel(double t) {
  const double s = 1.0 - t * t;
  return s > 0.0 ? std::exp(-1.0 / s) : 0.0;
}

inline double bump_kernel_slope(double t) {
  const double s = 1.0 - t * t;
  if (s <= 0.0) return 0.0;
  return bump_kernel(t) * (-2.0 * t) / (s * s);
}

// Certain upper bound on the Lipschitz constant of mollify(f, eps) over all f
// with range_bound <= 1, for the discrete rule below. g = num/den gives
// |g'| <= 2 * sup|num'| / inf den; both envelopes are periodic in x with the
// node spacing, so a scan over one period suffices.
inline double mollify_lipschitz_cap(double eps, int kernel_pts = 512) {
  const double dy = 2.0 * eps / kernel_pts;
  double s1 = 0.0, dmin = 0.0;
  const int offsets = 64;
  for (int o = 0; o < offsets; ++o) {
    const double x = dy * o / offsets;
    double slope = 0.0, mass = 0.0;
    const long long j0 = static_cast<long long>(std::floor((x - eps) / dy)) - 1;
    const long long j1 = static_cast<long long>(std::ceil((x + eps) / dy)) + 1;
    for (long long j = j0; j <= j1; ++j) {
      const double t = ((j + 0.5) * dy - x) / eps;
      slope += std::abs(bump_kernel_slope(t)) / eps;
      mass += bump_kernel(t);
    }
    s1 = std::max(s1, slope);
    dmin = (o == 0) ? mass : std::min(dmin, mass);
  }
  return 2.0 * s1 / dmin;
}

// f * phi_eps with phi the standard bump scaled to (-eps, eps), f continued
// constantly beyond [0,1]. The quadrature nodes are anchored absolutely
// (y_j = (j + 1/2) * 2eps/kernel_pts), not relative to x: with moving nodes
// the discrete sum would jump whenever a node crosses a discontinuity of f,
// and the finite-difference Lipschitz checks would see those jumps.
// pre: range_bound(f) <= 1, eps > 0.
inline Signal mollify(const Signal& f, double eps, int kernel_pts = 512) {
  if (!(eps > 0.0)) throw std::invalid_argument("mollify: eps must be positive");
  if (f.range_bound() > 1.0 + 1e-12) throw std::invalid_argument("mollify: range_bound must be <= 1");
  if (kernel_pts < 8) throw std::invalid_argument("mollify: too few kernel points");
  const double dy = 2.0 * eps / kernel_pts;
  Signal base = f;
  auto eval = [base, eps, dy](double x) {
    const long long j0 = static_cast<long long>(std::floor((x - eps) / dy));
    const long long j1 = static_cast<long long>(std::ceil((x + eps) / dy));
    double num = 0.0, den = 0.0;
    for (long long j = j0; j <= j1; ++j) {
      const double y = (j + 0.5) * dy;
      const double w = bump_kernel((y - x) / eps);
      if (w > 0.0) {
        num += w * base(y);
        den += w;
      }
    }
    return num / den;
  };
  return Signal::analytic(std::move(eval), f.range_bound(), std::max(1.0, 1.0 / (eps * eps)));
}

// ---- sampling ----------------------------------------------------------------

enum class SignalFamily { PiecewiseLinear, MollifiedNoise };

// k independent signals with range_bound <= 1 and lipschitz_const <= C_v,
// deterministic in seed. Signal j draws from the child stream split_seed(seed, j).
//
// PiecewiseLinear: node values on a grid of max(2, ceil(16 C_v)) nodes, first
// node uniform in [-1,1], increments clipped to +-C_v per unit length.
//
// MollifiedNoise: uniform piecewise-constant noise mollified with
// eps = C_v^{-1/2}, then scaled so the certain slope cap of the discrete
// mollifier lands at or below C_v; the declared metadata stays honest for
// every C_v this way.
inline std::vector<Signal> sample_lipschitz_tuple(int k, double C_v, std::uint64_t seed,
                                                  SignalFamily family = SignalFamily::PiecewiseLinear) {
  if (k < 1) throw std::invalid_argument("sample_lipschitz_tuple: k must be >= 1");
  if (!(C_v >= 0.0)) throw std::invalid_argument("sample_lipschitz_tuple: C_v must be >= 0");
  if (family == SignalFamily::MollifiedNoise && !(C_v > 0.0))
    throw std::invalid_argument("sample_lipschitz_tuple: mollified-noise family needs C_v > 0");

  std::vector<Signal> out;
  out.reserve(k);
  for (int j = 0; j < k; ++j) {
    Rng rng(split_seed(seed, static_cast<std::uint64_t>(j)));
    if (family == SignalFamily::PiecewiseLinear) {
      const int nodes = std::max(2, static_cast<int>(std::ceil(16.0 * C_v)));
      const int nseg = nodes - 1;
      const double maxstep = C_v / nseg;
      std::vector<double> nv(nodes);
      nv[0] = rng.next_in(-1.0, 1.0);
      for (int i = 1; i < nodes; ++i) {
        double v = nv[i - 1] + rng.next_in(-maxstep, maxstep);
        nv[i] = std::clamp(v, -1.0, 1.0);  // clipping never widens an increment
      }
      out.push_back(Signal::piecewise_linear(std::move(nv)));
    } else {
      const int noise_res = 16;
      std::vector<double> vals(noise_res);
      for (double& v : vals) v = rng.next_in(-1.0, 1.0);
      const double eps = 1.0 / std::sqrt(C_v);
      Signal g = mollify(Signal::piecewise_constant(std::move(vals)), eps);
      const double cap = mollify_lipschitz_cap(eps);
      const double s = std::min(1.0, C_v / cap);
      out.push_back(scale_signal(g, s).with_metadata(s, std::min(C_v, s * cap)));
    }
  }
  return out;
}

}  // namespace graphop
