#pragma once

#include "ymlab/aligned.hpp"
#include "ymlab/lie_algebra.hpp"

#include <cmath>
#include <cstddef>
#include <numbers>
#include <vector>

namespace ymlab {

struct Grid {
  int N = 16;
  double L = 2.0 * std::numbers::pi;

  Grid() = default;
  Grid(int n_sites, double length);

  double h() const { return L / N; }
  std::size_t volume() const { return static_cast<std::size_t>(N) * N * N; }
  // Row-major, x3 fastest.
  std::size_t index(int i, int j, int k) const { return (static_cast<std::size_t>(i) * N + j) * N + k; }
  double coord(int i) const { return i * h(); }
  bool operator==(const Grid& o) const { return N == o.N && L == o.L; }
};

enum class Scheme { spectral, central2 };

// r components of su(n)-valued data stored as real coefficients in the
// orthonormal basis of SuBasis: data[(c * dim + a) * V + site].
class LatticeField {
 public:
  LatticeField() = default;
  LatticeField(const Grid& grid, int n, int rank);

  const Grid& grid() const { return grid_; }
  int n() const { return n_; }
  int rank() const { return rank_; }
  int dim() const { return dim_; }
  std::size_t volume() const { return grid_.volume(); }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }
  const SuBasis& basis() const { return SuBasis::get(n_); }

  double* comp(int c) { return data_.data() + static_cast<std::size_t>(c) * dim_ * volume(); }
  const double* comp(int c) const { return data_.data() + static_cast<std::size_t>(c) * dim_ * volume(); }
  double* coeff(int c, int a) { return comp(c) + static_cast<std::size_t>(a) * volume(); }
  const double* coeff(int c, int a) const { return comp(c) + static_cast<std::size_t>(a) * volume(); }
  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }

  AlgebraElement at(int c, std::size_t site) const;
  void set(int c, std::size_t site, const AlgebraElement& x);

  LatticeField component(int c) const;
  void set_component(int c, const LatticeField& f);

  LatticeField& operator+=(const LatticeField& o);
  LatticeField& operator-=(const LatticeField& o);
  LatticeField& operator*=(double a);
  friend LatticeField operator+(LatticeField a, const LatticeField& b) { return a += b; }
  friend LatticeField operator-(LatticeField a, const LatticeField& b) { return a -= b; }
  friend LatticeField operator*(double s, LatticeField a) { return a *= s; }
  // this += a * x
  LatticeField& axpy(double a, const LatticeField& x);

  bool same_shape(const LatticeField& o) const;
  void require_same_shape(const LatticeField& o) const;
  bool all_finite() const;
  double max_abs() const;

 private:
  Grid grid_;
  int n_ = 0;
  int rank_ = 0;
  int dim_ = 0;
  AlignedVector<double> data_;
};

// Antisymmetric pairs (i<j) stored in three slots: (0,1) (0,2) (1,2).
struct PairSlot {
  int slot;
  double sign;
};
PairSlot pair_slot(int i, int j);

// Pointwise bracket of two fields with equal rank, or of rank-1 with any rank.
// out += coef * [x_cx, y_cy].
void bracket_add(LatticeField& out, int c_out, const LatticeField& x, int cx, const LatticeField& y, int cy,
                 double coef = 1.0);
LatticeField bracket(const LatticeField& x, int cx, const LatticeField& y, int cy);

// Pointwise sum over components of inner(x_c, y_c), one value per site.
std::vector<double> site_inner(const LatticeField& x, const LatticeField& y);
// h^3 sum_sites inner(x, y)
double integral_inner(const LatticeField& x, const LatticeField& y);

// Field operations. Spatial axes are 0, 1, 2 (x1, x2, x3).
LatticeField derivative(const LatticeField& f, int axis, Scheme scheme = Scheme::spectral);
LatticeField laplacian(const LatticeField& f, Scheme scheme = Scheme::spectral);
// rank-1 f -> rank-3 (d_0 f, d_1 f, d_2 f)
LatticeField gradient(const LatticeField& f, Scheme scheme = Scheme::spectral);
// sum_l d_l f_l for rank-3 f
LatticeField divergence(const LatticeField& f, Scheme scheme = Scheme::spectral);
// 2/3-rule truncation
LatticeField dealias(const LatticeField& f);

double sobolev_norm(const LatticeField& f, double k, bool homogeneous = true);
// p = infinity for the sup norm.
double lp_norm(const LatticeField& f, double p);

}  // namespace ymlab
