#pragma once

#include "ymlab/aligned.hpp"
#include "ymlab/lattice.hpp"

#include <cstddef>
#include <vector>

namespace ymlab {

// FFTW plans for one grid size. Forward transforms are unnormalized, backward
// transforms carry the 1/N^3 factor. Executing the plans is thread-safe.
class FftPlan {
 public:
  static const FftPlan& get(int N);
  ~FftPlan();

  int N() const { return n_; }
  std::size_t modes() const { return static_cast<std::size_t>(n_) * n_ * (n_ / 2 + 1); }

  void r2c(const double* in, cplx* out) const;
  // Input is left untouched.
  void c2r(const cplx* in, double* out) const;
  // Faster variant that overwrites `in`.
  void c2r_consume(cplx* in, double* out) const;
  void c2c_forward(const cplx* in, cplx* out) const;
  void c2c_backward(const cplx* in, cplx* out) const;

 private:
  explicit FftPlan(int N);
  int n_;
  void* r2c_ = nullptr;
  void* c2r_ = nullptr;
  void* fwd_ = nullptr;
  void* bwd_ = nullptr;
};

// Wavenumber tables for the r2c half spectrum, mode index (i*N + j)*(N/2+1) + l.
struct Wavenumbers {
  static const Wavenumbers& get(const Grid& grid);

  int N;
  int nz;                          // N/2 + 1
  int cutoff;                      // largest retained |m| under the 2/3 rule
  std::vector<int> m[3];           // signed integer modes per axis (Nyquist as +N/2)
  std::vector<double> k[3];        // 2 pi m / L
  std::vector<double> kd[3];       // first-derivative multiplier, Nyquist removed
  std::vector<double> ksq;         // |k|^2 per mode
  std::vector<unsigned char> keep; // 2/3-rule mask per mode
  std::vector<double> weight;      // Parseval multiplicity of each half-spectrum mode (1 or 2)

  std::size_t modes() const { return ksq.size(); }
  int axis_index(std::size_t mode, int axis) const;
};

class SpectralField {
 public:
  SpectralField() = default;
  SpectralField(const Grid& grid, int n, int rank);

  const Grid& grid() const { return grid_; }
  int n() const { return n_; }
  int rank() const { return rank_; }
  int dim() const { return dim_; }
  std::size_t modes() const { return modes_; }
  std::size_t size() const { return data_.size(); }

  cplx* comp(int c) { return data_.data() + static_cast<std::size_t>(c) * dim_ * modes_; }
  const cplx* comp(int c) const { return data_.data() + static_cast<std::size_t>(c) * dim_ * modes_; }
  cplx* coeff(int c, int a) { return comp(c) + static_cast<std::size_t>(a) * modes_; }
  const cplx* coeff(int c, int a) const { return comp(c) + static_cast<std::size_t>(a) * modes_; }
  cplx* data() { return data_.data(); }
  const cplx* data() const { return data_.data(); }

  SpectralField& operator+=(const SpectralField& o);
  SpectralField& operator-=(const SpectralField& o);
  SpectralField& operator*=(double a);
  SpectralField& axpy(double a, const SpectralField& x);
  void set_zero();
  bool same_shape(const SpectralField& o) const;

  SpectralField component(int c) const;
  void set_component(int c, const SpectralField& f);

 private:
  Grid grid_;
  int n_ = 0;
  int rank_ = 0;
  int dim_ = 0;
  std::size_t modes_ = 0;
  AlignedVector<cplx> data_;
};

SpectralField to_spectral(const LatticeField& f);
LatticeField to_physical(const SpectralField& f);

// Multiply every coefficient block by i*kd_axis.
SpectralField spectral_derivative(const SpectralField& f, int axis);
// -|k|^2
SpectralField spectral_laplacian(const SpectralField& f);
void apply_dealias(SpectralField& f);
// Zero every mode with some |m_axis| > cutoff; negative cutoff keeps everything.
void apply_cutoff(SpectralField& f, int cutoff);
// Largest cutoff K with 3K < N/2: products of a connection, its curvature and one more
// factor of A are then resolved, so covariant identities hold to round-off.
int alias_free_cutoff(int N);
// f <- exp(-|k|^2 tau) f
void apply_heat(SpectralField& f, double tau);

// Trigonometric interpolation onto another grid by integer mode index: modes resolved on both
// grids are copied, Nyquist modes and unresolved modes are dropped. With target.L = lambda L and
// target.N = lambda N this samples x -> f(x / lambda).
LatticeField fourier_resample(const LatticeField& f, const Grid& target);

// Gradient of each component: input rank r, output rank 3r with index 3*c + axis.
LatticeField gradient_from_spectrum(const SpectralField& f);

}  // namespace ymlab
