#pragma once

// Per-site loops over structure-of-arrays field data. Every kernel has a
// serial reference version and an OpenMP version producing bitwise identical
// output; the unqualified names dispatch to the OpenMP version.

#include "ymlab/lie_algebra.hpp"

#include <cstddef>

namespace ymlab::kernels {

// Block length of the fixed summation tree used by all reductions.
inline constexpr std::size_t kSumBlock = 1024;

namespace serial {
// out_c += coef * [x, y]_c for each site; x, y, out are dim x V blocks.
void bracket_add(const SuBasis& basis, std::size_t volume, const double* x, const double* y, double coef,
                 double* out);
// y += a * x
void axpy(std::size_t n, double a, const double* x, double* y);
// out[site] = sum_q x[q][site] * y[q][site], q < rows
void site_dot(std::size_t volume, int rows, const double* x, const double* y, double* out);
// out_b = sum_a ad[b][a] x_a with ad stored per site as dim*dim row-major.
void adjoint_apply(std::size_t volume, int dim, const double* ad, const double* x, double* out);
// Pairwise sum over fixed blocks of kSumBlock.
double sum(const double* v, std::size_t n);
}  // namespace serial

namespace omp {
void bracket_add(const SuBasis& basis, std::size_t volume, const double* x, const double* y, double coef,
                 double* out);
void axpy(std::size_t n, double a, const double* x, double* y);
void site_dot(std::size_t volume, int rows, const double* x, const double* y, double* out);
void adjoint_apply(std::size_t volume, int dim, const double* ad, const double* x, double* out);
double sum(const double* v, std::size_t n);
}  // namespace omp

using omp::adjoint_apply;
using omp::axpy;
using omp::bracket_add;
using omp::site_dot;
using omp::sum;

}  // namespace ymlab::kernels
