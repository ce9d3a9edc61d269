#include "ymlab/spectral.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <utility>

namespace ymlab {

namespace {

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

template <class T>
T* scratch(std::size_t n) {
  thread_local AlignedVector<T> buf;
  if (buf.size() < n) buf.resize(n);
  return buf.data();
}

}  // namespace

FftPlan::FftPlan(int N) : n_(N) {
  const std::size_t v = static_cast<std::size_t>(N) * N * N;
  AlignedVector<double> r(v);
  AlignedVector<cplx> c(v);
  auto* rc = reinterpret_cast<fftw_complex*>(c.data());
  // ESTIMATE keeps plan choice (and rounding) identical from run to run.
  r2c_ = fftw_plan_dft_r2c_3d(N, N, N, r.data(), rc, FFTW_ESTIMATE);
  c2r_ = fftw_plan_dft_c2r_3d(N, N, N, rc, r.data(), FFTW_ESTIMATE);
  AlignedVector<cplx> c2(v);
  auto* rc2 = reinterpret_cast<fftw_complex*>(c2.data());
  fwd_ = fftw_plan_dft_3d(N, N, N, rc, rc2, FFTW_FORWARD, FFTW_ESTIMATE);
  bwd_ = fftw_plan_dft_3d(N, N, N, rc, rc2, FFTW_BACKWARD, FFTW_ESTIMATE);
  if (!r2c_ || !c2r_ || !fwd_ || !bwd_) throw std::runtime_error("FFTW planning failed");
}

FftPlan::~FftPlan() {
  fftw_destroy_plan(static_cast<fftw_plan>(r2c_));
  fftw_destroy_plan(static_cast<fftw_plan>(c2r_));
  fftw_destroy_plan(static_cast<fftw_plan>(fwd_));
  fftw_destroy_plan(static_cast<fftw_plan>(bwd_));
}

const FftPlan& FftPlan::get(int N) {
  static std::map<int, std::unique_ptr<FftPlan>> cache;
  std::lock_guard<std::mutex> lock(planner_mutex());
  auto it = cache.find(N);
  if (it == cache.end()) it = cache.emplace(N, std::unique_ptr<FftPlan>(new FftPlan(N))).first;
  return *it->second;
}

void FftPlan::r2c(const double* in, cplx* out) const {
  fftw_execute_dft_r2c(static_cast<fftw_plan>(r2c_), const_cast<double*>(in), reinterpret_cast<fftw_complex*>(out));
}

void FftPlan::c2r(const cplx* in, double* out) const {
  const std::size_t m = modes();
  cplx* tmp = scratch<cplx>(m);
  std::copy(in, in + m, tmp);
  c2r_consume(tmp, out);
}

void FftPlan::c2r_consume(cplx* in, double* out) const {
  fftw_execute_dft_c2r(static_cast<fftw_plan>(c2r_), reinterpret_cast<fftw_complex*>(in), out);
  const double inv = 1.0 / (static_cast<double>(n_) * n_ * n_);
  const std::size_t v = static_cast<std::size_t>(n_) * n_ * n_;
  for (std::size_t i = 0; i < v; ++i) out[i] *= inv;
}

void FftPlan::c2c_forward(const cplx* in, cplx* out) const {
  fftw_execute_dft(static_cast<fftw_plan>(fwd_), reinterpret_cast<fftw_complex*>(const_cast<cplx*>(in)),
                   reinterpret_cast<fftw_complex*>(out));
}

void FftPlan::c2c_backward(const cplx* in, cplx* out) const {
  fftw_execute_dft(static_cast<fftw_plan>(bwd_), reinterpret_cast<fftw_complex*>(const_cast<cplx*>(in)),
                   reinterpret_cast<fftw_complex*>(out));
  const double inv = 1.0 / (static_cast<double>(n_) * n_ * n_);
  const std::size_t v = static_cast<std::size_t>(n_) * n_ * n_;
  for (std::size_t i = 0; i < v; ++i) out[i] *= inv;
}

const Wavenumbers& Wavenumbers::get(const Grid& grid) {
  static std::map<std::pair<int, double>, std::unique_ptr<Wavenumbers>> cache;
  static std::mutex m;
  std::lock_guard<std::mutex> lock(m);
  auto key = std::make_pair(grid.N, grid.L);
  auto it = cache.find(key);
  if (it != cache.end()) return *it->second;

  auto w = std::make_unique<Wavenumbers>();
  const int N = grid.N;
  w->N = N;
  w->nz = N / 2 + 1;
  w->cutoff = (N - 1) / 3;
  const double k0 = 2.0 * std::numbers::pi / grid.L;
  for (int axis = 0; axis < 3; ++axis) {
    const int len = axis == 2 ? w->nz : N;
    for (int i = 0; i < len; ++i) {
      const int mm = i <= N / 2 ? i : i - N;
      w->m[axis].push_back(mm);
      w->k[axis].push_back(k0 * mm);
      w->kd[axis].push_back(mm == N / 2 ? 0.0 : k0 * mm);
    }
  }
  const std::size_t modes = static_cast<std::size_t>(N) * N * w->nz;
  w->ksq.resize(modes);
  w->keep.resize(modes);
  w->weight.resize(modes);
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j)
      for (int l = 0; l < w->nz; ++l) {
        const std::size_t q = (static_cast<std::size_t>(i) * N + j) * w->nz + l;
        const double kx = w->k[0][i], ky = w->k[1][j], kz = w->k[2][l];
        w->ksq[q] = kx * kx + ky * ky + kz * kz;
        const bool keep = std::abs(w->m[0][i]) <= w->cutoff && std::abs(w->m[1][j]) <= w->cutoff &&
                          std::abs(w->m[2][l]) <= w->cutoff;
        w->keep[q] = keep ? 1 : 0;
        w->weight[q] = (l == 0 || l == N / 2) ? 1.0 : 2.0;
      }
  return *cache.emplace(key, std::move(w)).first->second;
}

int Wavenumbers::axis_index(std::size_t mode, int axis) const {
  const std::size_t l = mode % nz;
  const std::size_t ij = mode / nz;
  if (axis == 2) return static_cast<int>(l);
  if (axis == 1) return static_cast<int>(ij % N);
  return static_cast<int>(ij / N);
}

SpectralField::SpectralField(const Grid& grid, int n, int rank)
    : grid_(grid), n_(n), rank_(rank), dim_(n * n - 1),
      modes_(static_cast<std::size_t>(grid.N) * grid.N * (grid.N / 2 + 1)),
      data_(static_cast<std::size_t>(rank) * dim_ * modes_, cplx(0.0, 0.0)) {}

bool SpectralField::same_shape(const SpectralField& o) const {
  return grid_ == o.grid_ && n_ == o.n_ && rank_ == o.rank_;
}

SpectralField& SpectralField::operator+=(const SpectralField& o) {
  if (!same_shape(o)) throw DimensionMismatch("spectral field shape mismatch");
  const long long m = static_cast<long long>(data_.size());
#pragma omp parallel for schedule(static)
  for (long long i = 0; i < m; ++i) data_[i] += o.data_[i];
  return *this;
}

SpectralField& SpectralField::operator-=(const SpectralField& o) {
  if (!same_shape(o)) throw DimensionMismatch("spectral field shape mismatch");
  const long long m = static_cast<long long>(data_.size());
#pragma omp parallel for schedule(static)
  for (long long i = 0; i < m; ++i) data_[i] -= o.data_[i];
  return *this;
}

SpectralField& SpectralField::operator*=(double a) {
  const long long m = static_cast<long long>(data_.size());
#pragma omp parallel for schedule(static)
  for (long long i = 0; i < m; ++i) data_[i] *= a;
  return *this;
}

SpectralField& SpectralField::axpy(double a, const SpectralField& x) {
  if (!same_shape(x)) throw DimensionMismatch("spectral field shape mismatch");
  const long long m = static_cast<long long>(data_.size());
#pragma omp parallel for schedule(static)
  for (long long i = 0; i < m; ++i) data_[i] += a * x.data_[i];
  return *this;
}

void SpectralField::set_zero() { std::fill(data_.begin(), data_.end(), cplx(0.0, 0.0)); }

SpectralField SpectralField::component(int c) const {
  SpectralField r(grid_, n_, 1);
  std::copy(comp(c), comp(c) + dim_ * modes_, r.data());
  return r;
}

void SpectralField::set_component(int c, const SpectralField& f) {
  if (f.rank() != 1 || f.grid() != grid_ || f.n() != n_) throw DimensionMismatch("spectral component shape mismatch");
  std::copy(f.data(), f.data() + dim_ * modes_, comp(c));
}

SpectralField to_spectral(const LatticeField& f) {
  SpectralField s(f.grid(), f.n(), f.rank());
  const FftPlan& plan = FftPlan::get(f.grid().N);
  const int rows = f.rank() * f.dim();
  const std::size_t v = f.volume();
  const std::size_t m = s.modes();
#pragma omp parallel for schedule(dynamic)
  for (int q = 0; q < rows; ++q) plan.r2c(f.data() + q * v, s.data() + q * m);
  return s;
}

LatticeField to_physical(const SpectralField& s) {
  LatticeField f(s.grid(), s.n(), s.rank());
  const FftPlan& plan = FftPlan::get(s.grid().N);
  const int rows = s.rank() * s.dim();
  const std::size_t v = f.volume();
  const std::size_t m = s.modes();
#pragma omp parallel for schedule(dynamic)
  for (int q = 0; q < rows; ++q) plan.c2r(s.data() + q * m, f.data() + q * v);
  return f;
}

SpectralField spectral_derivative(const SpectralField& f, int axis) {
  const Wavenumbers& w = Wavenumbers::get(f.grid());
  SpectralField r(f.grid(), f.n(), f.rank());
  const int rows = f.rank() * f.dim();
  const long long m = static_cast<long long>(f.modes());
  const int N = w.N, nz = w.nz;
  for (int q = 0; q < rows; ++q) {
    const cplx* in = f.data() + q * m;
    cplx* out = r.data() + q * m;
#pragma omp parallel for schedule(static)
    for (long long p = 0; p < m; ++p) {
      int idx;
      if (axis == 2) idx = static_cast<int>(p % nz);
      else if (axis == 1) idx = static_cast<int>((p / nz) % N);
      else idx = static_cast<int>(p / (static_cast<long long>(nz) * N));
      const double k = w.kd[axis][idx];
      out[p] = cplx(-k * in[p].imag(), k * in[p].real());
    }
  }
  return r;
}

SpectralField spectral_laplacian(const SpectralField& f) {
  const Wavenumbers& w = Wavenumbers::get(f.grid());
  SpectralField r(f.grid(), f.n(), f.rank());
  const int rows = f.rank() * f.dim();
  const long long m = static_cast<long long>(f.modes());
  for (int q = 0; q < rows; ++q) {
    const cplx* in = f.data() + q * m;
    cplx* out = r.data() + q * m;
#pragma omp parallel for schedule(static)
    for (long long p = 0; p < m; ++p) out[p] = -w.ksq[p] * in[p];
  }
  return r;
}

void apply_dealias(SpectralField& f) {
  const Wavenumbers& w = Wavenumbers::get(f.grid());
  const int rows = f.rank() * f.dim();
  const long long m = static_cast<long long>(f.modes());
  for (int q = 0; q < rows; ++q) {
    cplx* d = f.data() + q * m;
#pragma omp parallel for schedule(static)
    for (long long p = 0; p < m; ++p)
      if (!w.keep[p]) d[p] = 0.0;
  }
}

int alias_free_cutoff(int N) { return (N / 2 - 1) / 3; }

void apply_cutoff(SpectralField& f, int cutoff) {
  if (cutoff < 0) return;
  const Wavenumbers& w = Wavenumbers::get(f.grid());
  if (cutoff == w.cutoff) {
    apply_dealias(f);
    return;
  }
  const int N = f.grid().N, nz = N / 2 + 1;
  const int rows = f.rank() * f.dim();
  const std::size_t m = f.modes();
  std::vector<unsigned char> keep(m);
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j)
      for (int l = 0; l < nz; ++l)
        keep[(static_cast<std::size_t>(i) * N + j) * nz + l] =
            std::abs(w.m[0][i]) <= cutoff && std::abs(w.m[1][j]) <= cutoff && std::abs(w.m[2][l]) <= cutoff;
  for (int q = 0; q < rows; ++q) {
    cplx* d = f.data() + q * m;
    for (std::size_t p = 0; p < m; ++p)
      if (!keep[p]) d[p] = 0.0;
  }
}

void apply_heat(SpectralField& f, double tau) {
  const Wavenumbers& w = Wavenumbers::get(f.grid());
  const long long m = static_cast<long long>(f.modes());
  std::vector<double> g(m);
  for (long long p = 0; p < m; ++p) g[p] = std::exp(-w.ksq[p] * tau);
  const int rows = f.rank() * f.dim();
  for (int q = 0; q < rows; ++q) {
    cplx* d = f.data() + q * m;
#pragma omp parallel for schedule(static)
    for (long long p = 0; p < m; ++p) d[p] *= g[p];
  }
}

LatticeField gradient_from_spectrum(const SpectralField& f) {
  LatticeField out(f.grid(), f.n(), 3 * f.rank());
  const FftPlan& plan = FftPlan::get(f.grid().N);
  const Wavenumbers& w = Wavenumbers::get(f.grid());
  const int dim = f.dim();
  const std::size_t m = f.modes();
  const int N = w.N, nz = w.nz;
  const int jobs = f.rank() * 3 * dim;
#pragma omp parallel for schedule(dynamic)
  for (int job = 0; job < jobs; ++job) {
    const int a = job % dim;
    const int axis = (job / dim) % 3;
    const int c = job / (3 * dim);
    cplx* tmp = scratch<cplx>(m);
    const cplx* in = f.coeff(c, a);
    for (std::size_t p = 0; p < m; ++p) {
      int idx;
      if (axis == 2) idx = static_cast<int>(p % nz);
      else if (axis == 1) idx = static_cast<int>((p / nz) % N);
      else idx = static_cast<int>(p / (static_cast<std::size_t>(nz) * N));
      const double k = w.kd[axis][idx];
      tmp[p] = cplx(-k * in[p].imag(), k * in[p].real());
    }
    plan.c2r_consume(tmp, out.coeff(3 * c + axis, a));
  }
  return out;
}

LatticeField fourier_resample(const LatticeField& f, const Grid& target) {
  const SpectralField src = to_spectral(f);
  SpectralField dst(target, f.n(), f.rank());
  const Wavenumbers& ws = Wavenumbers::get(f.grid());
  const Wavenumbers& wt = Wavenumbers::get(target);
  const int Ns = f.grid().N, Nt = target.N;
  const int limit = std::min(Ns, Nt) / 2;  // |m| < limit on both grids
  const double scale = std::pow(static_cast<double>(Nt) / Ns, 3);
  for (std::size_t q = 0; q < wt.modes(); ++q) {
    const int m0 = wt.m[0][wt.axis_index(q, 0)], m1 = wt.m[1][wt.axis_index(q, 1)], m2 = wt.m[2][wt.axis_index(q, 2)];
    if (std::abs(m0) >= limit || std::abs(m1) >= limit || std::abs(m2) >= limit) continue;
    const std::size_t i = static_cast<std::size_t>((m0 + Ns) % Ns), j = static_cast<std::size_t>((m1 + Ns) % Ns);
    const std::size_t p = (i * Ns + j) * ws.nz + static_cast<std::size_t>(m2);
    for (int c = 0; c < f.rank(); ++c)
      for (int a = 0; a < src.dim(); ++a) dst.coeff(c, a)[q] = scale * src.coeff(c, a)[p];
  }
  return to_physical(dst);
}

}  // namespace ymlab
