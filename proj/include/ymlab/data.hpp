#pragma once

#include "ymlab/gauge_geometry.hpp"

#include <array>
#include <cstdint>
#include <string>

namespace ymlab {

struct DataSpec {
  std::string generator = "random-bandlimited";  // random-bandlimited | abelian-wave | pure-gauge | zero | checkpoint
  // random-bandlimited
  int max_mode = 4;
  double amplitude = 0.1;
  std::uint64_t seed = 42;
  // abelian-wave: A_pol = amplitude i sigma_3 cos(k.x), k = 2 pi m / L
  std::array<int, 3> wave_mode{1, 0, 0};
  int polarization = 1;
  // pure-gauge: U = exp(epsilon i sigma_1 sin(2 pi x^1 / L) + epsilon i sigma_2 sin(2 pi x^2 / L))
  double epsilon = 0.1;
  // checkpoint
  std::string path_A;
  std::string path_E;
  double projection_tol = 1e-11;
};

struct InitialData {
  LatticeField A;
  LatticeField E;
};

// Gaussian Fourier coefficients on the ball 0 < |m| <= max_mode, drawn in a fixed
// order so the field does not depend on N. Scaled so that the mean over x of
// sum_c inner(f_c, f_c) / rank equals amplitude^2.
LatticeField random_bandlimited(const Grid& grid, int n, int rank, int max_mode, double amplitude,
                                std::uint64_t seed);

InitialData generate_data(const Grid& grid, int n, const DataSpec& spec);

}  // namespace ymlab
