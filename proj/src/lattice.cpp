#include "ymlab/lattice.hpp"

#include "ymlab/kernels.hpp"
#include "ymlab/spectral.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>
#include <string>

namespace ymlab {

Grid::Grid(int n_sites, double length) : N(n_sites), L(length) {
  if (N < 4 || N % 2 != 0) throw std::invalid_argument("grid N must be even and >= 4, got " + std::to_string(N));
  if (!(L > 0.0)) throw std::invalid_argument("grid L must be positive");
}

LatticeField::LatticeField(const Grid& grid, int n, int rank)
    : grid_(grid), n_(n), rank_(rank), dim_(n * n - 1),
      data_(static_cast<std::size_t>(rank) * (n * n - 1) * grid.volume(), 0.0) {
  if (rank < 1) throw DimensionMismatch("field rank must be positive");
  SuBasis::get(n);
}

AlgebraElement LatticeField::at(int c, std::size_t site) const {
  double tmp[kMaxRank * kMaxRank];
  for (int a = 0; a < dim_; ++a) tmp[a] = coeff(c, a)[site];
  return basis().element(tmp);
}

void LatticeField::set(int c, std::size_t site, const AlgebraElement& x) {
  double tmp[kMaxRank * kMaxRank];
  basis().coefficients(x, tmp);
  for (int a = 0; a < dim_; ++a) coeff(c, a)[site] = tmp[a];
}

LatticeField LatticeField::component(int c) const {
  LatticeField r(grid_, n_, 1);
  std::copy(comp(c), comp(c) + static_cast<std::size_t>(dim_) * volume(), r.data());
  return r;
}

void LatticeField::set_component(int c, const LatticeField& f) {
  if (f.rank() != 1 || !(f.grid() == grid_) || f.n() != n_) throw DimensionMismatch("component shape mismatch");
  std::copy(f.data(), f.data() + static_cast<std::size_t>(dim_) * volume(), comp(c));
}

bool LatticeField::same_shape(const LatticeField& o) const {
  return grid_ == o.grid_ && n_ == o.n_ && rank_ == o.rank_;
}

void LatticeField::require_same_shape(const LatticeField& o) const {
  if (!same_shape(o))
    throw DimensionMismatch("field shape mismatch: rank " + std::to_string(rank_) + " N " + std::to_string(grid_.N) +
                            " vs rank " + std::to_string(o.rank_) + " N " + std::to_string(o.grid_.N));
}

LatticeField& LatticeField::operator+=(const LatticeField& o) { return axpy(1.0, o); }

LatticeField& LatticeField::operator-=(const LatticeField& o) { return axpy(-1.0, o); }

LatticeField& LatticeField::operator*=(double a) {
  const long long m = static_cast<long long>(data_.size());
#pragma omp parallel for simd schedule(static)
  for (long long i = 0; i < m; ++i) data_[i] *= a;
  return *this;
}

LatticeField& LatticeField::axpy(double a, const LatticeField& x) {
  require_same_shape(x);
  kernels::axpy(data_.size(), a, x.data(), data_.data());
  return *this;
}

bool LatticeField::all_finite() const {
  for (double v : data_)
    if (!std::isfinite(v)) return false;
  return true;
}

double LatticeField::max_abs() const {
  double r = 0.0;
  for (double v : data_) r = std::max(r, std::abs(v));
  return r;
}

PairSlot pair_slot(int i, int j) {
  if (i == j || i < 0 || j < 0 || i > 2 || j > 2) throw std::invalid_argument("invalid antisymmetric pair");
  const int a = std::min(i, j), b = std::max(i, j);
  const int slot = (a == 0) ? (b - 1) : 2;
  return {slot, i < j ? 1.0 : -1.0};
}

void bracket_add(LatticeField& out, int c_out, const LatticeField& x, int cx, const LatticeField& y, int cy,
                 double coef) {
  if (!(x.grid() == y.grid()) || !(x.grid() == out.grid()) || x.n() != y.n() || x.n() != out.n())
    throw DimensionMismatch("bracket operands differ in grid or rank");
  kernels::bracket_add(x.basis(), x.volume(), x.comp(cx), y.comp(cy), coef, out.comp(c_out));
}

LatticeField bracket(const LatticeField& x, int cx, const LatticeField& y, int cy) {
  LatticeField r(x.grid(), x.n(), 1);
  bracket_add(r, 0, x, cx, y, cy, 1.0);
  return r;
}

std::vector<double> site_inner(const LatticeField& x, const LatticeField& y) {
  x.require_same_shape(y);
  std::vector<double> out(x.volume());
  kernels::site_dot(x.volume(), x.rank() * x.dim(), x.data(), y.data(), out.data());
  return out;
}

double integral_inner(const LatticeField& x, const LatticeField& y) {
  const std::vector<double> v = site_inner(x, y);
  const double h = x.grid().h();
  return h * h * h * kernels::sum(v.data(), v.size());
}

namespace {

LatticeField central_derivative(const LatticeField& f, int axis) {
  LatticeField r(f.grid(), f.n(), f.rank());
  const int N = f.grid().N;
  const double inv = 1.0 / (2.0 * f.grid().h());
  const int rows = f.rank() * f.dim();
  const std::size_t v = f.volume();
  for (int q = 0; q < rows; ++q) {
    const double* in = f.data() + q * v;
    double* out = r.data() + q * v;
#pragma omp parallel for schedule(static)
    for (int i = 0; i < N; ++i)
      for (int j = 0; j < N; ++j)
        for (int k = 0; k < N; ++k) {
          int ip[3] = {i, j, k}, im[3] = {i, j, k};
          ip[axis] = (ip[axis] + 1) % N;
          im[axis] = (im[axis] + N - 1) % N;
          const std::size_t s = (static_cast<std::size_t>(i) * N + j) * N + k;
          const std::size_t sp = (static_cast<std::size_t>(ip[0]) * N + ip[1]) * N + ip[2];
          const std::size_t sm = (static_cast<std::size_t>(im[0]) * N + im[1]) * N + im[2];
          out[s] = (in[sp] - in[sm]) * inv;
        }
  }
  return r;
}

LatticeField central_laplacian(const LatticeField& f) {
  LatticeField r(f.grid(), f.n(), f.rank());
  const int N = f.grid().N;
  const double inv = 1.0 / (f.grid().h() * f.grid().h());
  const int rows = f.rank() * f.dim();
  const std::size_t v = f.volume();
  for (int q = 0; q < rows; ++q) {
    const double* in = f.data() + q * v;
    double* out = r.data() + q * v;
#pragma omp parallel for schedule(static)
    for (int i = 0; i < N; ++i)
      for (int j = 0; j < N; ++j)
        for (int k = 0; k < N; ++k) {
          auto at = [&](int a, int b, int c) {
            return in[(static_cast<std::size_t>((a + N) % N) * N + (b + N) % N) * N + (c + N) % N];
          };
          out[(static_cast<std::size_t>(i) * N + j) * N + k] =
              (at(i + 1, j, k) + at(i - 1, j, k) + at(i, j + 1, k) + at(i, j - 1, k) + at(i, j, k + 1) +
               at(i, j, k - 1) - 6.0 * at(i, j, k)) *
              inv;
        }
  }
  return r;
}

}  // namespace

LatticeField derivative(const LatticeField& f, int axis, Scheme scheme) {
  if (axis < 0 || axis > 2) throw std::invalid_argument("axis must be 0, 1 or 2");
  if (scheme == Scheme::central2) return central_derivative(f, axis);
  return to_physical(spectral_derivative(to_spectral(f), axis));
}

LatticeField laplacian(const LatticeField& f, Scheme scheme) {
  if (scheme == Scheme::central2) return central_laplacian(f);
  return to_physical(spectral_laplacian(to_spectral(f)));
}

LatticeField gradient(const LatticeField& f, Scheme scheme) {
  if (f.rank() != 1) throw DimensionMismatch("gradient expects a rank-1 field");
  if (scheme == Scheme::spectral) return gradient_from_spectrum(to_spectral(f));
  LatticeField r(f.grid(), f.n(), 3);
  for (int axis = 0; axis < 3; ++axis) r.set_component(axis, central_derivative(f, axis));
  return r;
}

LatticeField divergence(const LatticeField& f, Scheme scheme) {
  if (f.rank() != 3) throw DimensionMismatch("divergence expects a rank-3 field");
  LatticeField r(f.grid(), f.n(), 1);
  if (scheme == Scheme::spectral) {
    const SpectralField s = to_spectral(f);
    SpectralField acc(f.grid(), f.n(), 1);
    for (int l = 0; l < 3; ++l) acc += spectral_derivative(s.component(l), l);
    return to_physical(acc);
  }
  for (int l = 0; l < 3; ++l) r += central_derivative(f.component(l), l);
  return r;
}

LatticeField dealias(const LatticeField& f) {
  SpectralField s = to_spectral(f);
  apply_dealias(s);
  return to_physical(s);
}

double sobolev_norm(const LatticeField& f, double k, bool homogeneous) {
  if (k < 0.0) throw std::invalid_argument("Sobolev index must be nonnegative");
  const SpectralField s = to_spectral(f);
  const Wavenumbers& w = Wavenumbers::get(f.grid());
  const std::size_t m = s.modes();
  const int rows = f.rank() * f.dim();
  // Parseval: int |f|^2 = L^3 / N^6 sum_modes |f_hat|^2.
  const double N3 = static_cast<double>(f.volume());
  const double scale = std::pow(f.grid().L, 3) / (N3 * N3);

  std::vector<double> orders;
  if (homogeneous) {
    orders.push_back(k);
  } else {
    for (int j = 0; j <= static_cast<int>(std::floor(k)); ++j) orders.push_back(j);
    if (k != std::floor(k)) orders.push_back(k);
  }
  std::vector<double> power(m, 0.0);
  for (int q = 0; q < rows; ++q) {
    const cplx* d = s.data() + q * m;
    for (std::size_t p = 0; p < m; ++p) power[p] += std::norm(d[p]);
  }
  double total = 0.0;
  std::vector<double> terms(m);
  for (double order : orders) {
    for (std::size_t p = 0; p < m; ++p) {
      double mult = 1.0;
      if (order > 0.0) mult = w.ksq[p] == 0.0 ? 0.0 : std::pow(w.ksq[p], order);
      terms[p] = w.weight[p] * mult * power[p];
    }
    total += std::sqrt(scale * kernels::sum(terms.data(), m));
  }
  return total;
}

double lp_norm(const LatticeField& f, double p) {
  if (!(p >= 1.0)) throw std::invalid_argument("L^p exponent must be >= 1");
  std::vector<double> v = site_inner(f, f);
  if (std::isinf(p)) {
    double mx = 0.0;
    for (double x : v) mx = std::max(mx, x);
    return std::sqrt(mx);
  }
  for (double& x : v) x = std::pow(x, 0.5 * p);
  const double h = f.grid().h();
  return std::pow(h * h * h * kernels::sum(v.data(), v.size()), 1.0 / p);
}

}  // namespace ymlab
