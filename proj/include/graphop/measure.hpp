#pragma once

#include <cmath>
#include <initializer_list>
#include <stdexcept>
#include <vector>

// Uniformly weighted empirical measures on R^dim: every atom carries mass
// 1/size(). Atoms are stored flat, row-major.

namespace graphop {

struct EmpiricalMeasure {
  int dim = 0;
  std::vector<double> coords;

  int size() const { return dim > 0 ? static_cast<int>(coords.size()) / dim : 0; }
  const double* atom(int i) const { return coords.data() + static_cast<std::size_t>(i) * dim; }

  void push_atom(std::initializer_list<double> a) {
    if (static_cast<int>(a.size()) != dim) throw std::invalid_argument("push_atom: wrong length");
    coords.insert(coords.end(), a.begin(), a.end());
  }
  void push_atom(const std::vector<double>& a) {
    if (static_cast<int>(a.size()) != dim) throw std::invalid_argument("push_atom: wrong length");
    coords.insert(coords.end(), a.begin(), a.end());
  }

  void validate() const {
    if (dim < 1) throw std::invalid_argument("EmpiricalMeasure: dim must be positive");
    if (coords.empty()) throw std::invalid_argument("EmpiricalMeasure: needs at least one atom");
    if (coords.size() % dim != 0)
      throw std::invalid_argument("EmpiricalMeasure: coords not a multiple of dim");
  }
};

inline double atom_distance(const EmpiricalMeasure& mu, int i, const EmpiricalMeasure& nu, int j) {
  const double* x = mu.atom(i);
  const double* y = nu.atom(j);
  double s = 0.0;
  for (int d = 0; d < mu.dim; ++d) {
    const double t = x[d] - y[d];
    s += t * t;
  }
  return std::sqrt(s);
}

}  // namespace graphop
