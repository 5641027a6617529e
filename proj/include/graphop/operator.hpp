#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "rng.hpp"
#include "signal.hpp"

// Operators on signals, continuum ([0,1] with Lebesgue measure) or finite
// (grid [n]/n with weight 1/n). Operators are immutable; apply is pure. The
// declared constants are bounds the rest of the library relies on:
//   C_A    bound on the L2 -> L2 gain
//   C_c    Lipschitz constant of images of unit-range piecewise-constant
//          inputs, when the operator smooths them (0 for operators that keep
//          them piecewise-constant)
// Piece flags say how the operator transforms piece structure; the
// constant-to-constant flag only holds at resolutions in resolution_set.

namespace graphop {

struct PieceFlags {
  bool constant_to_constant = false;
  bool constant_to_lipschitz = false;
  bool lipschitz_to_lipschitz = false;
};

struct ResolutionSet {
  enum class Kind { None, All, PowersOfTwo, Explicit };

  Kind kind = Kind::None;
  int max_exp = 0;           // PowersOfTwo: {1, 2, 4, ..., 2^max_exp}
  std::vector<int> values;   // Explicit, ascending

  bool contains(int n) const {
    if (n < 1) return false;
    switch (kind) {
      case Kind::None: return false;
      case Kind::All: return true;
      case Kind::PowersOfTwo: {
        if ((n & (n - 1)) != 0) return false;
        long long p = 1;
        int e = 0;
        while (p < n) { p <<= 1; ++e; }
        return e <= max_exp;
      }
      case Kind::Explicit:
        for (int v : values) if (v == n) return true;
        return false;
    }
    return false;
  }

  static ResolutionSet none() { return {}; }
  static ResolutionSet all() { ResolutionSet r; r.kind = Kind::All; return r; }
  static ResolutionSet powers_of_two(int max_exp) {
    ResolutionSet r;
    r.kind = Kind::PowersOfTwo;
    r.max_exp = max_exp;
    return r;
  }
  static ResolutionSet explicit_set(std::vector<int> v) {
    ResolutionSet r;
    r.kind = Kind::Explicit;
    r.values = std::move(v);
    return r;
  }
};

inline ResolutionSet intersect(const ResolutionSet& a, const ResolutionSet& b) {
  using K = ResolutionSet::Kind;
  if (a.kind == K::None || b.kind == K::None) return ResolutionSet::none();
  if (a.kind == K::All) return b;
  if (b.kind == K::All) return a;
  if (a.kind == K::PowersOfTwo && b.kind == K::PowersOfTwo)
    return ResolutionSet::powers_of_two(std::min(a.max_exp, b.max_exp));
  // at least one explicit list: filter it through the other set
  const ResolutionSet& ex = (a.kind == K::Explicit) ? a : b;
  const ResolutionSet& other = (a.kind == K::Explicit) ? b : a;
  std::vector<int> out;
  for (int v : ex.values)
    if (other.contains(v)) out.push_back(v);
  return ResolutionSet::explicit_set(std::move(out));
}

struct OperatorConstants {
  double C_A = 1.0;
  std::optional<double> C_c;
  PieceFlags flags;
  ResolutionSet resolutions;
};

enum class Domain { Continuum, Finite };

class POperator {
 public:
  static POperator continuum(std::string name, std::function<Signal(const Signal&)> apply,
                             OperatorConstants c, bool linear, bool self_adjoint) {
    POperator op;
    op.name_ = std::move(name);
    op.domain_ = Domain::Continuum;
    op.apply_c_ = std::move(apply);
    op.constants_ = std::move(c);
    op.linear_ = linear;
    op.self_adjoint_ = self_adjoint;
    return op;
  }

  // D is row-major n x n and already carries any grid weight: apply(X) = D X.
  static POperator finite_matrix(std::string name, int n, std::vector<double> D,
                                 OperatorConstants c, bool self_adjoint) {
    if (D.size() != static_cast<std::size_t>(n) * n)
      throw std::invalid_argument("finite_matrix: matrix is not n x n");
    POperator op;
    op.name_ = std::move(name);
    op.domain_ = Domain::Finite;
    op.n_ = n;
    op.matrix_ = std::make_shared<const std::vector<double>>(std::move(D));
    op.constants_ = std::move(c);
    op.linear_ = true;
    op.self_adjoint_ = self_adjoint;
    return op;
  }

  static POperator finite(std::string name, int n,
                          std::function<FiniteSignal(const FiniteSignal&)> apply,
                          OperatorConstants c, bool linear, bool self_adjoint) {
    POperator op;
    op.name_ = std::move(name);
    op.domain_ = Domain::Finite;
    op.n_ = n;
    op.apply_f_ = std::move(apply);
    op.constants_ = std::move(c);
    op.linear_ = linear;
    op.self_adjoint_ = self_adjoint;
    return op;
  }

  Domain domain() const { return domain_; }
  int grid_n() const { return n_; }
  const std::string& name() const { return name_; }
  const OperatorConstants& constants() const { return constants_; }
  bool is_linear() const { return linear_; }
  bool is_self_adjoint() const { return self_adjoint_; }
  // materialized matrix of a finite linear operator, row-major; null otherwise
  const std::vector<double>* matrix() const { return matrix_ ? matrix_.get() : nullptr; }

  Signal apply(const Signal& f) const {
    if (domain_ != Domain::Continuum) throw std::logic_error("apply: finite operator, continuum signal");
    return apply_c_(f);
  }

  FiniteSignal apply(const FiniteSignal& x) const {
    if (domain_ != Domain::Finite) throw std::logic_error("apply: continuum operator, finite signal");
    if (x.n() != n_) throw std::invalid_argument("apply: signal resolution does not match operator");
    if (matrix_) {
      const std::vector<double>& D = *matrix_;
      FiniteSignal y;
      y.values.assign(n_, 0.0);
      for (int u = 0; u < n_; ++u) {
        double acc = 0.0;
        const double* row = D.data() + static_cast<std::size_t>(u) * n_;
        for (int v = 0; v < n_; ++v) acc += row[v] * x.values[v];
        y.values[u] = acc;
      }
      return y;
    }
    return apply_f_(x);
  }

  POperator with_constants(OperatorConstants c) const {
    POperator op = *this;
    op.constants_ = std::move(c);
    return op;
  }

 private:
  std::string name_;
  Domain domain_ = Domain::Continuum;
  int n_ = 0;
  std::function<Signal(const Signal&)> apply_c_;
  std::function<FiniteSignal(const FiniteSignal&)> apply_f_;
  std::shared_ptr<const std::vector<double>> matrix_;
  OperatorConstants constants_;
  bool linear_ = false;
  bool self_adjoint_ = false;
};

// ---- kernels and the graphon operator ---------------------------------------

struct Kernel {
  std::function<double(double, double)> w;
  double sup;  // bound on |w|
  double lip;  // bound on the per-variable Lipschitz constant
};

inline Kernel kernel_constant(double w) {
  return {[w](double, double) { return w; }, std::abs(w), 0.0};
}

inline Kernel kernel_product() {
  return {[](double x, double y) { return x * y; }, 1.0, 1.0};
}

inline Kernel kernel_gaussian_bump(double sigma) {
  if (!(sigma > 0)) throw std::invalid_argument("gaussian-bump: sigma must be positive");
  return {[sigma](double x, double y) {
            const double d = (x - y) / sigma;
            return std::exp(-0.5 * d * d);
          },
          1.0, 1.0 / sigma};
}

inline Kernel kernel_min() {
  return {[](double x, double y) { return std::min(x, y); }, 1.0, 1.0};
}

// Kernel integral operator (Af)(x) = \int W(x,y) f(y) dy on the ground grid.
// The kernel must be symmetric; the operator smooths piecewise-constant
// inputs into kernel-Lipschitz outputs.
inline POperator make_graphon_op(const std::string& name, const Kernel& k, int q = kGroundPoints) {
  Rng rng(0x9a3f0c5u);
  for (int t = 0; t < 64; ++t) {
    const double x = rng.next_unit(), y = rng.next_unit();
    if (std::abs(k.w(x, y) - k.w(y, x)) > 1e-12 * std::max(1.0, k.sup))
      throw std::invalid_argument("make_graphon_op: kernel must be symmetric");
  }
  OperatorConstants c;
  c.C_A = k.sup;
  c.C_c = k.lip;
  c.flags.constant_to_lipschitz = true;
  c.flags.lipschitz_to_lipschitz = true;
  auto W = k.w;
  const double sup = k.sup, lip = k.lip;
  auto apply = [W, sup, lip, q](const Signal& f) {
    auto fy = std::make_shared<std::vector<double>>(q);
    double l1 = 0.0;
    for (int i = 0; i < q; ++i) {
      (*fy)[i] = f((i + 0.5) / q);
      l1 += std::abs((*fy)[i]);
    }
    l1 /= q;
    auto eval = [W, fy, q](double x) {
      double acc = 0.0;
      for (int i = 0; i < q; ++i) acc += W(x, (i + 0.5) / q) * (*fy)[i];
      return acc / q;
    };
    return Signal::analytic(std::move(eval), sup * l1, lip * l1);
  };
  return POperator::continuum(name, std::move(apply), std::move(c), true, true);
}

// ---- graphings ---------------------------------------------------------------

// wraps into (0,1]; the half-open convention used by all cell logic
inline double wrap_unit(double x) {
  double y = std::fmod(x, 1.0);
  if (y <= 0.0) y += 1.0;
  return y;
}

// Two-regular shift graphing: (Af)(x) = f(x+a mod 1) + f(x-a mod 1),
// halved when normalized. No piece structure: the wrap at 0/1 cuts cells.
inline POperator make_shift_op(double a, bool normalize = false) {
  const double w = normalize ? 0.5 : 1.0;
  OperatorConstants c;
  c.C_A = 2.0 * w;
  auto apply = [a, w](const Signal& f) {
    Signal base = f;
    auto eval = [base, a, w](double x) { return w * (base(wrap_unit(x + a)) + base(wrap_unit(x - a))); };
    return Signal::analytic(std::move(eval), 2.0 * w * f.range_bound(), std::nullopt);
  };
  return POperator::continuum("shift", std::move(apply), std::move(c), true, true);
}

inline std::vector<int> divisors_of(int N) {
  std::vector<int> d;
  for (int i = 1; i <= N; ++i)
    if (N % i == 0) d.push_back(i);
  return d;
}

// N disjoint copies of the shift dynamics, one per cell of width 1/N: within
// cell j the point z = (x - base) N rotates by a. Constant-to-constant exactly
// at resolutions dividing N, where cells of the signal are unions of the
// dynamics cells.
inline POperator make_copies_op(int N, double a, bool normalize = false) {
  if (N < 1) throw std::invalid_argument("make_copies_op: N must be >= 1");
  const double w = normalize ? 0.5 : 1.0;
  OperatorConstants c;
  c.C_A = 2.0 * w;
  c.C_c = 0.0;
  c.flags.constant_to_constant = true;
  c.resolutions = ResolutionSet::explicit_set(divisors_of(N));
  auto apply = [N, a, w](const Signal& f) {
    Signal base = f;
    auto eval = [base, N, a, w](double x) {
      const int j = cell_index(x, N);
      const double lo = static_cast<double>(j - 1) / N;
      const double z = (x - lo) * N;
      return w * (base(lo + wrap_unit(z + a) / N) + base(lo + wrap_unit(z - a) / N));
    };
    return Signal::analytic(std::move(eval), 2.0 * w * f.range_bound(), std::nullopt);
  };
  return POperator::continuum("copies-" + std::to_string(N), std::move(apply), std::move(c), true, true);
}

// ---- hypercube ----------------------------------------------------------------

// Vertex set {0,1}^N embedded as binary digits after the radix point;
// (Af)(x) averages f over the N digit flips. Digit extraction goes through
// the cell index at resolution 2^N, so inputs that are exact dyadic boundary
// points land in the half-open cell they belong to, and the flip offsets
// (+-2^-i) are exact in floating point.
inline POperator make_hypercube_op(int N) {
  if (N < 1 || N > 40) throw std::invalid_argument("make_hypercube_op: N must be in 1..40");
  const long long cells = 1LL << N;
  OperatorConstants c;
  c.C_A = 1.0;
  c.C_c = 0.0;
  c.flags.constant_to_constant = true;
  c.resolutions = ResolutionSet::powers_of_two(N);
  auto apply = [N, cells](const Signal& f) {
    Signal base = f;
    auto eval = [base, N, cells](double x) {
      const long long bits = cell_index(x, cells) - 1;
      double acc = 0.0;
      for (int i = 1; i <= N; ++i) {
        const long long flipped = bits ^ (1LL << (N - i));
        acc += base(x + static_cast<double>(flipped - bits) / static_cast<double>(cells));
      }
      return acc / N;
    };
    return Signal::analytic(std::move(eval), f.range_bound(), std::nullopt);
  };
  return POperator::continuum("hypercube-" + std::to_string(N), std::move(apply), std::move(c), true,
                              true);
}

// ---- finite matrix operators ---------------------------------------------------

// Operator on the n-point grid from an unweighted coefficient matrix M:
// (AX)(u) = (1/n) sum_v M[u][v] X(v). The declared C_A is the Schur bound
// sqrt(max row mass * max column mass) of the weighted matrix.
inline POperator make_matrix_op(const std::string& name, const std::vector<std::vector<double>>& M) {
  const int n = static_cast<int>(M.size());
  if (n == 0) throw std::invalid_argument("make_matrix_op: empty matrix");
  for (const auto& row : M)
    if (static_cast<int>(row.size()) != n) throw std::invalid_argument("make_matrix_op: matrix must be square");
  std::vector<double> D(static_cast<std::size_t>(n) * n);
  bool symmetric = true;
  for (int u = 0; u < n; ++u)
    for (int v = 0; v < n; ++v) {
      D[static_cast<std::size_t>(u) * n + v] = M[u][v] / n;
      if (std::abs(M[u][v] - M[v][u]) > 1e-12) symmetric = false;
    }
  double maxrow = 0.0, maxcol = 0.0;
  for (int u = 0; u < n; ++u) {
    double r = 0.0, cm = 0.0;
    for (int v = 0; v < n; ++v) {
      r += std::abs(D[static_cast<std::size_t>(u) * n + v]);
      cm += std::abs(D[static_cast<std::size_t>(v) * n + u]);
    }
    maxrow = std::max(maxrow, r);
    maxcol = std::max(maxcol, cm);
  }
  OperatorConstants c;
  c.C_A = std::sqrt(maxrow * maxcol);
  return POperator::finite_matrix(name, n, std::move(D), std::move(c), symmetric);
}

inline POperator make_identity_op(Domain domain, int n = 0) {
  OperatorConstants c;
  c.C_A = 1.0;
  c.C_c = 0.0;
  c.flags.constant_to_constant = true;
  c.flags.lipschitz_to_lipschitz = true;
  c.resolutions = ResolutionSet::all();
  if (domain == Domain::Continuum)
    return POperator::continuum("identity", [](const Signal& f) { return f; }, std::move(c), true, true);
  if (n < 1) throw std::invalid_argument("make_identity_op: finite identity needs n >= 1");
  std::vector<double> D(static_cast<std::size_t>(n) * n, 0.0);
  for (int u = 0; u < n; ++u) D[static_cast<std::size_t>(u) * n + u] = 1.0;
  return POperator::finite_matrix("identity", n, std::move(D), std::move(c), true);
}

// ---- discretization -------------------------------------------------------------

// A_m = restrict . A . extend_pc on the m-point grid. Extension is an L2
// isometry and restriction an L2 contraction, so C_A carries over; piece
// flags do not apply to finite operators and are dropped. Self-adjointness
// carries over. Linear operators are materialized as matrices by probing
// with the grid indicators, which makes repeated application cheap.
inline POperator discretize(const POperator& A, int m, int q = kGroundPoints) {
  if (A.domain() != Domain::Continuum) throw std::invalid_argument("discretize: operator already finite");
  if (m < 1) throw std::invalid_argument("discretize: m must be >= 1");
  OperatorConstants c;
  c.C_A = A.constants().C_A;
  const std::string name = A.name() + "@" + std::to_string(m);
  POperator base = A;
  auto composite = [base, m, q](const FiniteSignal& X) {
    return restrict_signal(base.apply(extend_pc(X)), m, q);
  };
  if (A.is_linear()) {
    std::vector<double> D(static_cast<std::size_t>(m) * m);
    FiniteSignal probe;
    probe.values.assign(m, 0.0);
    for (int v = 0; v < m; ++v) {
      probe.values[v] = 1.0;
      FiniteSignal col = composite(probe);
      probe.values[v] = 0.0;
      for (int u = 0; u < m; ++u) D[static_cast<std::size_t>(u) * m + v] = col.values[u];
    }
    return POperator::finite_matrix(name, m, std::move(D), std::move(c), A.is_self_adjoint());
  }
  return POperator::finite(name, m, std::move(composite), std::move(c), false, A.is_self_adjoint());
}

// ---- operator algebra ------------------------------------------------------------

namespace detail {
inline void require_same_domain(const POperator& A, const POperator& B, const char* who) {
  if (A.domain() != B.domain()) throw std::invalid_argument(std::string(who) + ": domain mismatch");
  if (A.domain() == Domain::Finite && A.grid_n() != B.grid_n())
    throw std::invalid_argument(std::string(who) + ": grid size mismatch");
}
}  // namespace detail

inline POperator op_add(const POperator& A, const POperator& B) {
  detail::require_same_domain(A, B, "op_add");
  OperatorConstants c;
  c.C_A = A.constants().C_A + B.constants().C_A;
  if (A.constants().C_c && B.constants().C_c) c.C_c = *A.constants().C_c + *B.constants().C_c;
  c.flags.constant_to_constant =
      A.constants().flags.constant_to_constant && B.constants().flags.constant_to_constant;
  c.flags.constant_to_lipschitz =
      A.constants().flags.constant_to_lipschitz && B.constants().flags.constant_to_lipschitz;
  c.flags.lipschitz_to_lipschitz =
      A.constants().flags.lipschitz_to_lipschitz && B.constants().flags.lipschitz_to_lipschitz;
  c.resolutions = intersect(A.constants().resolutions, B.constants().resolutions);
  const bool linear = A.is_linear() && B.is_linear();
  const bool sa = A.is_self_adjoint() && B.is_self_adjoint();
  const std::string name = A.name() + "+" + B.name();
  if (A.domain() == Domain::Continuum) {
    POperator a = A, b = B;
    return POperator::continuum(
        name, [a, b](const Signal& f) { return add_signals(a.apply(f), b.apply(f)); }, std::move(c),
        linear, sa);
  }
  if (A.matrix() && B.matrix()) {
    std::vector<double> D = *A.matrix();
    const std::vector<double>& E = *B.matrix();
    for (std::size_t i = 0; i < D.size(); ++i) D[i] += E[i];
    return POperator::finite_matrix(name, A.grid_n(), std::move(D), std::move(c), sa);
  }
  POperator a = A, b = B;
  return POperator::finite(
      name, A.grid_n(),
      [a, b](const FiniteSignal& x) {
        FiniteSignal ya = a.apply(x), yb = b.apply(x);
        for (int i = 0; i < ya.n(); ++i) ya.values[i] += yb.values[i];
        return ya;
      },
      std::move(c), linear, sa);
}

inline POperator op_scale(const POperator& A, double alpha) {
  OperatorConstants c = A.constants();
  c.C_A = std::abs(alpha) * c.C_A;
  if (c.C_c) c.C_c = std::abs(alpha) * *c.C_c;
  const std::string name = std::to_string(alpha) + "*" + A.name();
  if (A.domain() == Domain::Continuum) {
    POperator a = A;
    return POperator::continuum(
        name, [a, alpha](const Signal& f) { return scale_signal(a.apply(f), alpha); }, std::move(c),
        A.is_linear(), A.is_self_adjoint());
  }
  if (A.matrix()) {
    std::vector<double> D = *A.matrix();
    for (double& d : D) d *= alpha;
    return POperator::finite_matrix(name, A.grid_n(), std::move(D), std::move(c), A.is_self_adjoint());
  }
  POperator a = A;
  return POperator::finite(
      name, A.grid_n(),
      [a, alpha](const FiniteSignal& x) {
        FiniteSignal y = a.apply(x);
        for (double& v : y.values) v *= alpha;
        return y;
      },
      std::move(c), A.is_linear(), A.is_self_adjoint());
}

// outer . inner. The constant bookkeeping needs the inner operator to keep
// piecewise-constant inputs piecewise-constant (C_c = 0); compositions whose
// inner operator smooths are rejected rather than given wrong constants.
inline POperator op_compose(const POperator& outer, const POperator& inner) {
  detail::require_same_domain(outer, inner, "op_compose");
  if (inner.domain() == Domain::Continuum) {
    const bool inner_keeps_pieces = inner.constants().C_c && *inner.constants().C_c == 0.0;
    if (!inner_keeps_pieces)
      throw std::domain_error("op_compose: inner operator must map pieces to pieces (C_c = 0)");
  }
  OperatorConstants c;
  c.C_A = outer.constants().C_A * inner.constants().C_A;
  c.C_c = outer.constants().C_c;
  c.flags.constant_to_constant = outer.constants().flags.constant_to_constant &&
                                 inner.constants().flags.constant_to_constant;
  c.flags.constant_to_lipschitz = inner.constants().flags.constant_to_constant &&
                                  outer.constants().flags.constant_to_lipschitz;
  c.flags.lipschitz_to_lipschitz = outer.constants().flags.lipschitz_to_lipschitz &&
                                   inner.constants().flags.lipschitz_to_lipschitz;
  c.resolutions = intersect(outer.constants().resolutions, inner.constants().resolutions);
  const bool linear = outer.is_linear() && inner.is_linear();
  const std::string name = outer.name() + "." + inner.name();
  if (outer.domain() == Domain::Continuum) {
    POperator o = outer, i = inner;
    return POperator::continuum(
        name, [o, i](const Signal& f) { return o.apply(i.apply(f)); }, std::move(c), linear, false);
  }
  if (outer.matrix() && inner.matrix()) {
    const int n = outer.grid_n();
    const std::vector<double>&O = *outer.matrix(), &I = *inner.matrix();
    std::vector<double> D(static_cast<std::size_t>(n) * n, 0.0);
    for (int u = 0; u < n; ++u)
      for (int k = 0; k < n; ++k) {
        const double o = O[static_cast<std::size_t>(u) * n + k];
        if (o == 0.0) continue;
        for (int v = 0; v < n; ++v)
          D[static_cast<std::size_t>(u) * n + v] += o * I[static_cast<std::size_t>(k) * n + v];
      }
    return POperator::finite_matrix(name, n, std::move(D), std::move(c), false);
  }
  POperator o = outer, i = inner;
  return POperator::finite(
      name, outer.grid_n(), [o, i](const FiniteSignal& x) { return o.apply(i.apply(x)); }, std::move(c),
      linear, false);
}

inline POperator op_power(const POperator& A, int k) {
  if (k < 0) throw std::invalid_argument("op_power: k must be >= 0");
  if (k == 0) return make_identity_op(A.domain(), A.grid_n());
  POperator out = A;
  for (int i = 1; i < k; ++i) out = op_compose(out, A);
  return out;
}

// rho . A for pointwise 1-Lipschitz rho with rho(0) = 0; constants are
// unchanged and piece structure survives, but linearity is lost.
inline POperator op_after_rho(const POperator& A, std::function<double(double)> rho) {
  OperatorConstants c = A.constants();
  const std::string name = "rho." + A.name();
  if (A.domain() == Domain::Continuum) {
    POperator a = A;
    auto apply = [a, rho](const Signal& f) {
      Signal g = a.apply(f);
      if (g.repr() == SignalRepr::PiecewiseConstant) {
        std::vector<double> v = g.values();
        for (double& x : v) x = rho(x);
        return Signal::piecewise_constant(std::move(v));
      }
      Signal base = g;
      auto r = rho;
      return Signal::analytic([base, r](double x) { return r(base(x)); }, g.range_bound(),
                              g.lipschitz_const());
    };
    return POperator::continuum(name, std::move(apply), std::move(c), false, false);
  }
  POperator a = A;
  return POperator::finite(
      name, A.grid_n(),
      [a, rho](const FiniteSignal& x) {
        FiniteSignal y = a.apply(x);
        for (double& v : y.values) v = rho(v);
        return y;
      },
      std::move(c), false, false);
}

// ---- self-adjointness probe --------------------------------------------------

struct SymmetryReport {
  double max_asymmetry = 0.0;
  bool pass = false;
};

// Random-pair check of <Af, g> = <f, Ag> in the domain's inner product.
// Continuum probes use piecewise-constant noise at a dyadic resolution, which
// the ground grid integrates exactly.
inline SymmetryReport check_self_adjoint(const POperator& A, int trials, std::uint64_t seed,
                                         double tol = 1e-9) {
  Rng rng(seed);
  SymmetryReport rep;
  for (int t = 0; t < trials; ++t) {
    double d = 0.0;
    if (A.domain() == Domain::Finite) {
      const int n = A.grid_n();
      FiniteSignal f, g;
      f.values.resize(n);
      g.values.resize(n);
      for (int i = 0; i < n; ++i) f.values[i] = rng.next_in(-1, 1);
      for (int i = 0; i < n; ++i) g.values[i] = rng.next_in(-1, 1);
      d = std::abs(inner_product(A.apply(f), g) - inner_product(f, A.apply(g)));
    } else {
      const int res = 64;
      std::vector<double> fv(res), gv(res);
      for (double& v : fv) v = rng.next_in(-1, 1);
      for (double& v : gv) v = rng.next_in(-1, 1);
      Signal f = Signal::piecewise_constant(std::move(fv));
      Signal g = Signal::piecewise_constant(std::move(gv));
      d = std::abs(inner_product(A.apply(f), g) - inner_product(f, A.apply(g)));
    }
    rep.max_asymmetry = std::max(rep.max_asymmetry, d);
  }
  rep.pass = rep.max_asymmetry <= tol;
  return rep;
}

}  // namespace graphop
