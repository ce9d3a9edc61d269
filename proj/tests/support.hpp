#pragma once

#include "ymlab/lattice.hpp"
#include "ymlab/lie_algebra.hpp"

#include <cmath>
#include <numbers>
#include <random>

namespace ymlab::testing {

inline AlgebraElement random_algebra(std::mt19937_64& rng, int n = 2, double scale = 1.0) {
  std::normal_distribution<double> g(0.0, scale);
  Mat m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = cplx(g(rng), g(rng));
  return AlgebraElement::project(m);
}

inline GroupElement random_unitary(std::mt19937_64& rng, int n = 2) {
  return exponential(random_algebra(rng, n, 1.5));
}

inline double mat_dist(const Mat& a, const Mat& b) { return (a - b).cwiseAbs().maxCoeff(); }

// Single mode amp * sin(2 pi m x^axis / L) * X on every site, one component.
inline LatticeField sine_field(const Grid& g, const AlgebraElement& X, int axis, int m = 1, double amp = 1.0,
                               bool cosine = false) {
  LatticeField f(g, X.n(), 1);
  const double k = 2.0 * std::numbers::pi * m / g.L;
  for (int i = 0; i < g.N; ++i)
    for (int j = 0; j < g.N; ++j)
      for (int l = 0; l < g.N; ++l) {
        const int idx[3] = {i, j, l};
        const double x = g.coord(idx[axis]);
        const double v = amp * (cosine ? std::cos(k * x) : std::sin(k * x));
        f.set(0, g.index(i, j, l), v * X);
      }
  return f;
}

inline double l2(const LatticeField& f) { return std::sqrt(integral_inner(f, f)); }

}  // namespace ymlab::testing
