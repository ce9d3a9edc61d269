#include "ymlab/kernels.hpp"
#include "ymlab/lie_algebra.hpp"

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

namespace {

using namespace ymlab;

std::vector<double> random_block(std::size_t n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  std::vector<double> v(n);
  for (double& x : v) x = g(rng);
  return v;
}

std::size_t volume(const benchmark::State& state) {
  const auto N = static_cast<std::size_t>(state.range(0));
  return N * N * N;
}

template <bool Omp>
void BM_bracket_add(benchmark::State& state) {
  const SuBasis& basis = SuBasis::get(2);
  const std::size_t V = volume(state);
  const auto x = random_block(3 * V, 1), y = random_block(3 * V, 2);
  std::vector<double> out(3 * V, 0.0);
  for (auto _ : state) {
    if constexpr (Omp)
      kernels::omp::bracket_add(basis, V, x.data(), y.data(), 0.5, out.data());
    else
      kernels::serial::bracket_add(basis, V, x.data(), y.data(), 0.5, out.data());
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(V));
}

template <bool Omp>
void BM_axpy(benchmark::State& state) {
  const std::size_t n = 9 * volume(state);
  const auto x = random_block(n, 3);
  std::vector<double> y(n, 0.0);
  for (auto _ : state) {
    if constexpr (Omp)
      kernels::omp::axpy(n, 1e-3, x.data(), y.data());
    else
      kernels::serial::axpy(n, 1e-3, x.data(), y.data());
    benchmark::DoNotOptimize(y.data());
  }
  state.SetBytesProcessed(state.iterations() * static_cast<long>(3 * n * sizeof(double)));
}

template <bool Omp>
void BM_site_dot(benchmark::State& state) {
  const std::size_t V = volume(state);
  const auto x = random_block(9 * V, 4), y = random_block(9 * V, 5);
  std::vector<double> out(V);
  for (auto _ : state) {
    if constexpr (Omp)
      kernels::omp::site_dot(V, 9, x.data(), y.data(), out.data());
    else
      kernels::serial::site_dot(V, 9, x.data(), y.data(), out.data());
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(V));
}

template <bool Omp>
void BM_adjoint_apply(benchmark::State& state) {
  const std::size_t V = volume(state);
  const auto ad = random_block(9 * V, 6), x = random_block(3 * V, 7);
  std::vector<double> out(3 * V);
  for (auto _ : state) {
    if constexpr (Omp)
      kernels::omp::adjoint_apply(V, 3, ad.data(), x.data(), out.data());
    else
      kernels::serial::adjoint_apply(V, 3, ad.data(), x.data(), out.data());
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(V));
}

template <bool Omp>
void BM_sum(benchmark::State& state) {
  const std::size_t n = volume(state);
  const auto v = random_block(n, 8);
  for (auto _ : state) {
    double s = Omp ? kernels::omp::sum(v.data(), n) : kernels::serial::sum(v.data(), n);
    benchmark::DoNotOptimize(s);
  }
  state.SetBytesProcessed(state.iterations() * static_cast<long>(n * sizeof(double)));
}

#define YM_PAIR(name)                                                                      \
  BENCHMARK_TEMPLATE(name, false)->Name(#name "/serial")->Arg(16)->Arg(32)->Arg(64);      \
  BENCHMARK_TEMPLATE(name, true)->Name(#name "/omp")->Arg(16)->Arg(32)->Arg(64)

YM_PAIR(BM_bracket_add);
YM_PAIR(BM_axpy);
YM_PAIR(BM_site_dot);
YM_PAIR(BM_adjoint_apply);
YM_PAIR(BM_sum);

}  // namespace

BENCHMARK_MAIN();
