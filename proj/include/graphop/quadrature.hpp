#pragma once

#include <cstddef>
#include <vector>

// Midpoint-rule quadrature on [0,1]. All continuum integrals in the library
// run over a fixed ground grid of kGroundPoints midpoints unless a caller
// overrides the point count. Midpoints (q - 1/2)/Q never coincide with a cell
// boundary j/n, so piecewise structure is never sampled on an edge, and for
// piecewise-constant integrands at a resolution dividing Q the rule is exact.

namespace graphop {

inline constexpr int kGroundPoints = 4096;  // power of two, see pairwise_sum

// Balanced pairwise summation. Besides the usual accuracy gain, for 2^k
// equal summands every partial sum is the value times a power of two, so the
// result is exact; this is what keeps restrict(extend_pc(X)) a true identity
// in floating point.
inline double pairwise_sum(const double* v, std::size_t n) {
  if (n <= 8) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += v[i];
    return s;
  }
  const std::size_t h = n / 2;
  return pairwise_sum(v, h) + pairwise_sum(v + h, n - h);
}

inline double pairwise_sum(const std::vector<double>& v) {
  return pairwise_sum(v.data(), v.size());
}

// Midpoints (q - 1/2)/Q, q = 1..Q.
inline std::vector<double> ground_grid(int q = kGroundPoints) {
  std::vector<double> xs(q);
  for (int i = 0; i < q; ++i) xs[i] = (i + 0.5) / q;
  return xs;
}

// \int_0^1 f dx by the midpoint rule.
template <class F>
double integrate01(F&& f, int q = kGroundPoints) {
  std::vector<double> vals(q);
  for (int i = 0; i < q; ++i) vals[i] = f((i + 0.5) / q);
  return pairwise_sum(vals) / q;
}

// Mean of f over the cell ((u-1)/n, u/n], u in 1..n. The pts sample points
// are interior midpoints of the cell, so they inherit the no-boundary
// guarantee of the ground grid.
template <class F>
double cell_mean(F&& f, int n, int u, int pts) {
  std::vector<double> vals(pts);
  for (int i = 0; i < pts; ++i) vals[i] = f((u - 1 + (i + 0.5) / pts) / static_cast<double>(n));
  return pairwise_sum(vals) / pts;
}

// Points per cell so that n cells use about q ground points in total; a
// power of two whenever n and q are.
inline int cell_points(int n, int q = kGroundPoints) {
  const int p = (q + n - 1) / n;
  return p < 1 ? 1 : p;
}

}  // namespace graphop
