#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "operator.hpp"
#include "rng.hpp"
#include "signal.hpp"

// Layered networks built from operator polynomials: each layer feature is
// rho(sum_g conv(h[l][f][g], A)[X_{l-1,g}]) with conv(h, A) = sum_k h_k A^k.
// The same recursion runs on continuum signals (lazy) and finite signals
// (through the operator's matrix); layer 0 is the raw input, no activation.
// Coefficients are a theorem hypothesis, |h| <= 1, and violations throw
// loudly instead of being normalized away.

namespace graphop {

struct CoefficientBoundError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

enum class Activation { Clip, Tanh, LeakyAbs };

inline double apply_activation(Activation a, double t) {
  switch (a) {
    case Activation::Clip: return std::min(std::max(t, -1.0), 1.0);
    case Activation::Tanh: return std::tanh(t);
    case Activation::LeakyAbs: return t >= 0.0 ? t : -0.25 * t;
  }
  return t;  // unreachable
}

struct GnnParams {
  int L = 1;
  std::vector<int> widths;  // L+1 entries, widths[0] = 1
  int K = 1;
  Activation activation = Activation::Clip;
  std::vector<std::vector<std::vector<std::vector<double>>>> h;  // [l][f][g][k]

  void validate() const {
    if (L < 1) throw std::invalid_argument("GnnParams: L must be >= 1");
    if (K < 1) throw std::invalid_argument("GnnParams: K must be >= 1");
    if (static_cast<int>(widths.size()) != L + 1)
      throw std::invalid_argument("GnnParams: widths must have L+1 entries");
    if (widths[0] != 1) throw std::invalid_argument("GnnParams: input width must be 1");
    for (int w : widths)
      if (w < 1) throw std::invalid_argument("GnnParams: widths must be positive");
    if (static_cast<int>(h.size()) != L) throw std::invalid_argument("GnnParams: h needs L layers");
    for (int l = 0; l < L; ++l) {
      if (static_cast<int>(h[l].size()) != widths[l + 1])
        throw std::invalid_argument("GnnParams: h layer does not match output width");
      for (const auto& row : h[l]) {
        if (static_cast<int>(row.size()) != widths[l])
          throw std::invalid_argument("GnnParams: h row does not match input width");
        for (const auto& filt : row) {
          if (static_cast<int>(filt.size()) != K)
            throw std::invalid_argument("GnnParams: filter does not have K taps");
          for (double v : filt)
            if (std::abs(v) > 1.0)
              throw CoefficientBoundError("GnnParams: |h| must be <= 1");
        }
      }
    }
  }

  int n_max() const { return *std::max_element(widths.begin(), widths.end()); }
};

inline GnnParams random_gnn_params(int L, std::vector<int> widths, int K, Activation act,
                                   std::uint64_t seed) {
  GnnParams p;
  p.L = L;
  p.widths = std::move(widths);
  p.K = K;
  p.activation = act;
  Rng rng(seed);
  p.h.resize(L);
  for (int l = 0; l < L; ++l) {
    p.h[l].resize(p.widths[l + 1]);
    for (auto& row : p.h[l]) {
      row.resize(p.widths[l]);
      for (auto& filt : row) {
        filt.resize(K);
        for (double& v : filt) v = rng.next_in(-1, 1);
      }
    }
  }
  p.validate();
  return p;
}

namespace detail {

inline void check_filter(const std::vector<double>& h) {
  if (h.empty()) throw std::invalid_argument("graphop_conv: K must be >= 1");
  for (double v : h)
    if (std::abs(v) > 1.0) throw CoefficientBoundError("graphop_conv: |h| must be <= 1");
}

inline std::size_t last_tap(const std::vector<double>& h) {
  std::size_t last = 0;
  for (std::size_t k = 0; k < h.size(); ++k)
    if (h[k] != 0.0) last = k;
  return last;
}

inline Signal conv_apply(const std::vector<double>& h, const POperator& A, const Signal& X) {
  Signal acc = scale_signal(X, h[0]);
  Signal power = X;
  const std::size_t kmax = last_tap(h);
  for (std::size_t k = 1; k <= kmax; ++k) {
    power = A.apply(power);
    if (h[k] != 0.0) acc = add_signals(acc, scale_signal(power, h[k]));
  }
  return acc;
}

inline FiniteSignal conv_apply(const std::vector<double>& h, const POperator& A,
                               const FiniteSignal& X) {
  FiniteSignal acc = X;
  for (double& v : acc.values) v *= h[0];
  FiniteSignal power = X;
  const std::size_t kmax = last_tap(h);
  for (std::size_t k = 1; k <= kmax; ++k) {
    power = A.apply(power);
    if (h[k] != 0.0)
      for (int i = 0; i < acc.n(); ++i) acc.values[i] += h[k] * power.values[i];
  }
  return acc;
}

inline Signal activate(Activation a, const Signal& s) {
  if (s.repr() == SignalRepr::PiecewiseConstant) {
    std::vector<double> v = s.values();
    for (double& x : v) x = apply_activation(a, x);
    return Signal::piecewise_constant(std::move(v));
  }
  Signal base = s;
  const double range = (a == Activation::LeakyAbs) ? s.range_bound() : std::min(s.range_bound(), 1.0);
  return Signal::analytic([base, a](double x) { return apply_activation(a, base(x)); }, range,
                          s.lipschitz_const());
}

inline FiniteSignal activate(Activation a, const FiniteSignal& s) {
  FiniteSignal out = s;
  for (double& v : out.values) v = apply_activation(a, v);
  return out;
}

inline Signal add_features(const Signal& a, const Signal& b) { return add_signals(a, b); }

inline FiniteSignal add_features(const FiniteSignal& a, const FiniteSignal& b) {
  FiniteSignal out = a;
  for (int i = 0; i < out.n(); ++i) out.values[i] += b.values[i];
  return out;
}

template <typename Sig>
std::vector<Sig> gnn_layers(const GnnParams& p, const POperator& A, const Sig& X) {
  std::vector<Sig> cur;
  cur.push_back(X);  // layer 0: raw input
  for (int l = 0; l < p.L; ++l) {
    std::vector<Sig> nxt;
    nxt.reserve(p.widths[l + 1]);
    for (int f = 0; f < p.widths[l + 1]; ++f) {
      Sig acc = conv_apply(p.h[l][f][0], A, cur[0]);
      for (int g = 1; g < p.widths[l]; ++g)
        acc = add_features(acc, conv_apply(p.h[l][f][g], A, cur[g]));
      nxt.push_back(activate(p.activation, acc));
    }
    cur = std::move(nxt);
  }
  return cur;
}

}  // namespace detail

// Operator polynomial sum_k h_k A^k (A^0 = identity), computed by repeated
// application. Gain bound: sum |h_k| C_A^k. Piece bookkeeping only survives
// when A maps pieces to pieces exactly; a smoothing A mixes a piecewise term
// (k=0) with smooth ones, so no flag can be claimed.
inline POperator graphop_conv(const std::vector<double>& h, const POperator& A) {
  detail::check_filter(h);
  OperatorConstants c;
  c.C_A = 0.0;
  double gain = 1.0;
  for (double v : h) {
    c.C_A += std::abs(v) * gain;
    gain *= A.constants().C_A;
  }
  const bool pieces = A.constants().C_c && *A.constants().C_c == 0.0 &&
                      A.constants().flags.constant_to_constant;
  if (pieces) {
    c.C_c = 0.0;
    c.flags.constant_to_constant = true;
    c.resolutions = A.constants().resolutions;
  }
  const std::string name = "conv[" + std::to_string(h.size()) + "]." + A.name();
  if (A.domain() == Domain::Continuum) {
    POperator a = A;
    auto hv = h;
    return POperator::continuum(
        name, [hv, a](const Signal& X) { return detail::conv_apply(hv, a, X); }, std::move(c),
        A.is_linear(), A.is_self_adjoint());
  }
  POperator a = A;
  auto hv = h;
  return POperator::finite(
      name, A.grid_n(), [hv, a](const FiniteSignal& X) { return detail::conv_apply(hv, a, X); },
      std::move(c), A.is_linear(), A.is_self_adjoint());
}

inline std::vector<Signal> gnn_forward(const GnnParams& p, const POperator& A, const Signal& X) {
  p.validate();
  if (A.domain() != Domain::Continuum)
    throw std::invalid_argument("gnn_forward: finite operator given a continuum signal");
  return detail::gnn_layers(p, A, X);
}

inline std::vector<FiniteSignal> gnn_forward(const GnnParams& p, const POperator& A,
                                             const FiniteSignal& X) {
  p.validate();
  if (A.domain() != Domain::Finite)
    throw std::invalid_argument("gnn_forward: continuum operator given a finite signal");
  if (X.n() != A.grid_n()) throw std::invalid_argument("gnn_forward: resolution mismatch");
  return detail::gnn_layers(p, A, X);
}

// The network as a single nonlinear operator (scalar in, scalar out). The
// declared gain is the layered worst case (n_max K max(1, C_A)^K)^L; the
// max guard keeps the bound valid for sub-unit C_A, where low-order filter
// taps still pass signals through undamped.
inline POperator gnn_as_operator(const GnnParams& p, const POperator& A) {
  p.validate();
  if (p.widths.back() != 1)
    throw std::invalid_argument("gnn_as_operator: output width must be 1");
  OperatorConstants c;
  const double layer_gain = p.n_max() * p.K * std::pow(std::max(1.0, A.constants().C_A), p.K);
  c.C_A = std::pow(layer_gain, p.L);
  const bool pieces = A.constants().C_c && *A.constants().C_c == 0.0 &&
                      A.constants().flags.constant_to_constant;
  if (pieces) {
    c.C_c = 0.0;
    c.flags.constant_to_constant = true;
    c.resolutions = A.constants().resolutions;
  }
  const std::string name = "gnn." + A.name();
  if (A.domain() == Domain::Continuum) {
    POperator a = A;
    GnnParams params = p;
    return POperator::continuum(
        name, [params, a](const Signal& X) { return detail::gnn_layers(params, a, X)[0]; },
        std::move(c), false, false);
  }
  POperator a = A;
  GnnParams params = p;
  return POperator::finite(
      name, A.grid_n(),
      [params, a](const FiniteSignal& X) { return detail::gnn_layers(params, a, X)[0]; },
      std::move(c), false, false);
}

// L2 gap between the finite network's output, extended to the continuum, and
// the continuum network run on the extended input: the discretization error
// of the whole network on one signal. Multi-feature outputs report the worst
// feature.
inline double gnn_signal_gap(const GnnParams& p, const POperator& A, int n, const FiniteSignal& X) {
  p.validate();
  if (A.domain() != Domain::Continuum)
    throw std::invalid_argument("gnn_signal_gap: continuum operator required");
  if (X.n() != n) throw std::invalid_argument("gnn_signal_gap: signal resolution must equal n");
  POperator An = discretize(A, n);
  const std::vector<FiniteSignal> yn = detail::gnn_layers(p, An, X);
  const std::vector<Signal> yc = detail::gnn_layers(p, A, extend_pc(X));
  double worst = 0.0;
  for (std::size_t f = 0; f < yn.size(); ++f)
    worst = std::max(worst, l2_distance(extend_pc(yn[f]), yc[f]));
  return worst;
}

}  // namespace graphop
