#include "ymlab/data.hpp"

#include "ymlab/checkpoint.hpp"
#include "ymlab/gauge_transforms.hpp"
#include "ymlab/spectral.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace ymlab {

namespace {

bool in_half_space(int m1, int m2, int m3) {
  if (m3 != 0) return m3 > 0;
  if (m2 != 0) return m2 > 0;
  return m1 > 0;
}

std::size_t mode_index(const Grid& g, int m1, int m2, int m3) {
  const int N = g.N;
  return (static_cast<std::size_t>((m1 + N) % N) * N + (m2 + N) % N) * (N / 2 + 1) + m3;
}

}  // namespace

LatticeField random_bandlimited(const Grid& grid, int n, int rank, int max_mode, double amplitude,
                                std::uint64_t seed) {
  if (max_mode < 1) throw std::invalid_argument("max_mode must be >= 1");
  if (2 * max_mode >= grid.N) throw std::invalid_argument("max_mode does not fit on the grid");
  SpectralField s(grid, n, rank);
  const int dim = n * n - 1;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const double N3 = static_cast<double>(grid.volume());
  double power = 0.0;
  const int M = max_mode;
  for (int m1 = -M; m1 <= M; ++m1)
    for (int m2 = -M; m2 <= M; ++m2)
      for (int m3 = -M; m3 <= M; ++m3) {
        if (m1 * m1 + m2 * m2 + m3 * m3 > M * M || !in_half_space(m1, m2, m3)) continue;
        for (int c = 0; c < rank; ++c)
          for (int a = 0; a < dim; ++a) {
            const double re = gauss(rng), im = gauss(rng);
            // a cos(k.x) + b sin(k.x) has coefficient N^3 (a - i b) / 2 at +k.
            const cplx v = 0.5 * N3 * cplx(re, -im);
            power += 0.5 * (re * re + im * im);
            if (m3 > 0) {
              s.coeff(c, a)[mode_index(grid, m1, m2, m3)] = v;
            } else {
              s.coeff(c, a)[mode_index(grid, m1, m2, 0)] = v;
              s.coeff(c, a)[mode_index(grid, -m1, -m2, 0)] = std::conj(v);
            }
          }
      }
  const double scale = power > 0.0 ? amplitude / std::sqrt(power / rank) : 0.0;
  s *= scale;
  return to_physical(s);
}

InitialData generate_data(const Grid& grid, int n, const DataSpec& spec) {
  InitialData d{LatticeField(grid, n, 3), LatticeField(grid, n, 3)};
  const std::string& gen = spec.generator;
  if (gen == "zero") return d;

  if (gen == "random-bandlimited") {
    d.A = random_bandlimited(grid, n, 3, spec.max_mode, spec.amplitude, spec.seed);
    // E from an independent draw, made constraint-consistent.
    const LatticeField F = random_bandlimited(grid, n, 3, spec.max_mode, spec.amplitude, spec.seed ^ 0x9e3779b97f4a7c15ULL);
    d.E = constraint_project(d.A, F, spec.projection_tol);
    return d;
  }

  if (gen == "abelian-wave") {
    if (n != 2) throw std::invalid_argument("abelian-wave data is defined for su(2)");
    const double k0 = 2.0 * std::numbers::pi / grid.L;
    const double k[3] = {k0 * spec.wave_mode[0], k0 * spec.wave_mode[1], k0 * spec.wave_mode[2]};
    const double kn = std::sqrt(k[0] * k[0] + k[1] * k[1] + k[2] * k[2]);
    const int pol = spec.polarization - 1;
    if (pol < 0 || pol > 2) throw std::invalid_argument("polarization must be 1..3");
    if (k[pol] != 0.0) throw std::invalid_argument("abelian-wave needs k orthogonal to the polarization");
    const AlgebraElement t3 = i_sigma(3);
    const int N = grid.N;
    for (int i = 0; i < N; ++i)
      for (int j = 0; j < N; ++j)
        for (int l = 0; l < N; ++l) {
          const double phase = k[0] * grid.coord(i) + k[1] * grid.coord(j) + k[2] * grid.coord(l);
          const std::size_t site = grid.index(i, j, l);
          d.A.set(pol, site, (spec.amplitude * std::cos(phase)) * t3);
          d.E.set(pol, site, (spec.amplitude * kn * std::sin(phase)) * t3);
        }
    return d;
  }

  if (gen == "pure-gauge") {
    if (n != 2) throw std::invalid_argument("pure-gauge data is defined for su(2)");
    LatticeField X(grid, n, 1);
    const int N = grid.N;
    const double k0 = 2.0 * std::numbers::pi / grid.L;
    for (int i = 0; i < N; ++i)
      for (int j = 0; j < N; ++j)
        for (int l = 0; l < N; ++l) {
          const AlgebraElement v = (spec.epsilon * std::sin(k0 * grid.coord(i))) * i_sigma(1) +
                                   (spec.epsilon * std::sin(k0 * grid.coord(j))) * i_sigma(2);
          X.set(0, grid.index(i, j, l), v);
        }
    d.A = spatial_log_derivative(frame_exponential(X));
    d.A *= -1.0;
    return d;
  }

  if (gen == "checkpoint") {
    const Checkpoint a = read_checkpoint(spec.path_A);
    d.A = a.field;
    if (!spec.path_E.empty()) d.E = read_checkpoint(spec.path_E).field;
    else d.E = LatticeField(d.A.grid(), d.A.n(), 3);
    return d;
  }

  throw std::invalid_argument("unknown data generator: " + gen);
}

}  // namespace ymlab
