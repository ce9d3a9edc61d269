#include "ymlab/kernels.hpp"

#include <algorithm>
#include <vector>

namespace ymlab::kernels {

namespace {

double tree_sum(const double* v, std::size_t n) {
  if (n <= 8) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += v[i];
    return s;
  }
  const std::size_t h = n / 2;
  return tree_sum(v, h) + tree_sum(v + h, n - h);
}

}  // namespace

namespace serial {

void bracket_add(const SuBasis& basis, std::size_t volume, const double* x, const double* y, double coef,
                 double* out) {
  for (const auto& e : basis.structure()) {
    const double f = coef * e.f;
    const double* xa = x + e.a * volume;
    const double* xb = x + e.b * volume;
    const double* ya = y + e.a * volume;
    const double* yb = y + e.b * volume;
    double* oc = out + e.c * volume;
    for (std::size_t s = 0; s < volume; ++s) oc[s] += f * (xa[s] * yb[s] - xb[s] * ya[s]);
  }
}

void axpy(std::size_t n, double a, const double* x, double* y) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void site_dot(std::size_t volume, int rows, const double* x, const double* y, double* out) {
  for (std::size_t s = 0; s < volume; ++s) out[s] = 0.0;
  for (int q = 0; q < rows; ++q) {
    const double* xq = x + q * volume;
    const double* yq = y + q * volume;
    for (std::size_t s = 0; s < volume; ++s) out[s] += xq[s] * yq[s];
  }
}

void adjoint_apply(std::size_t volume, int dim, const double* ad, const double* x, double* out) {
  for (std::size_t s = 0; s < volume; ++s) {
    const double* m = ad + s * dim * dim;
    for (int b = 0; b < dim; ++b) {
      double acc = 0.0;
      for (int a = 0; a < dim; ++a) acc += m[b * dim + a] * x[a * volume + s];
      out[b * volume + s] = acc;
    }
  }
}

double sum(const double* v, std::size_t n) {
  const std::size_t blocks = (n + kSumBlock - 1) / kSumBlock;
  std::vector<double> partial(blocks);
  for (std::size_t b = 0; b < blocks; ++b) {
    const std::size_t lo = b * kSumBlock;
    partial[b] = tree_sum(v + lo, std::min(kSumBlock, n - lo));
  }
  return tree_sum(partial.data(), blocks);
}

}  // namespace serial

namespace omp {

void bracket_add(const SuBasis& basis, std::size_t volume, const double* x, const double* y, double coef,
                 double* out) {
  const long long v = static_cast<long long>(volume);
  for (const auto& e : basis.structure()) {
    const double f = coef * e.f;
    const double* xa = x + e.a * volume;
    const double* xb = x + e.b * volume;
    const double* ya = y + e.a * volume;
    const double* yb = y + e.b * volume;
    double* oc = out + e.c * volume;
#pragma omp parallel for simd schedule(static)
    for (long long s = 0; s < v; ++s) oc[s] += f * (xa[s] * yb[s] - xb[s] * ya[s]);
  }
}

void axpy(std::size_t n, double a, const double* x, double* y) {
  const long long m = static_cast<long long>(n);
#pragma omp parallel for simd schedule(static)
  for (long long i = 0; i < m; ++i) y[i] += a * x[i];
}

void site_dot(std::size_t volume, int rows, const double* x, const double* y, double* out) {
  const long long v = static_cast<long long>(volume);
#pragma omp parallel for schedule(static)
  for (long long s = 0; s < v; ++s) {
    double acc = 0.0;
    for (int q = 0; q < rows; ++q) acc += x[q * volume + s] * y[q * volume + s];
    out[s] = acc;
  }
}

void adjoint_apply(std::size_t volume, int dim, const double* ad, const double* x, double* out) {
  const long long v = static_cast<long long>(volume);
#pragma omp parallel for schedule(static)
  for (long long s = 0; s < v; ++s) {
    const double* m = ad + s * dim * dim;
    for (int b = 0; b < dim; ++b) {
      double acc = 0.0;
      for (int a = 0; a < dim; ++a) acc += m[b * dim + a] * x[a * volume + s];
      out[b * volume + s] = acc;
    }
  }
}

double sum(const double* v, std::size_t n) {
  const long long blocks = static_cast<long long>((n + kSumBlock - 1) / kSumBlock);
  std::vector<double> partial(blocks);
#pragma omp parallel for schedule(static)
  for (long long b = 0; b < blocks; ++b) {
    const std::size_t lo = static_cast<std::size_t>(b) * kSumBlock;
    partial[b] = tree_sum(v + lo, std::min(kSumBlock, n - lo));
  }
  return tree_sum(partial.data(), static_cast<std::size_t>(blocks));
}

}  // namespace omp

}  // namespace ymlab::kernels
