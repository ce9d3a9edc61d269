#pragma once

#include "ymlab/gauge_geometry.hpp"
#include "ymlab/integrator.hpp"
#include "ymlab/spectral.hpp"
#include "ymlab/trajectory.hpp"

#include <stdexcept>
#include <string>
#include <vector>

namespace ymlab {

using ParabolicScheme = StepScheme;

struct ParabolicConfig {
  ParabolicScheme scheme = ParabolicScheme::if_rk2;
  double cfl_sigma = 0.5;
  double s_end = 1.0;
  int record_stride = 1;
  // Requested step; 0 selects the largest admissible one. Must not exceed the scheme bound.
  double ds = 0.0;
  // Truncation of nonlinear terms and of the initial state: 2/3 rule unless a positive
  // per-axis cutoff is given.
  bool dealias = true;
  int cutoff = 0;
  // Extra record points, hit exactly by shortening steps.
  std::vector<double> record_at;
};

// Upper bound on the step: cfl_sigma h^2 / 6 explicit, cfl_sigma h with an integrating factor.
double max_parabolic_step(const Grid& grid, const ParabolicConfig& cfg);
double parabolic_step(const Grid& grid, const ParabolicConfig& cfg);
// Per-axis mode cutoff in effect, -1 for none.
int effective_cutoff(const Grid& grid, const ParabolicConfig& cfg);

struct BlowupError : std::runtime_error {
  BlowupError(const std::string& what, double last_good) : std::runtime_error(what), last_good(last_good) {}
  double last_good;
};

enum class FlowGauge { deturck, caloric };

// Linear parts treated exactly per Fourier mode.
//   laplacian: -|k|^2
//   caloric:   -|k|^2 + k k^T (the curl-curl operator; gradients are not damped)
enum class LinearPart { none, laplacian, caloric };
void propagate_linear(SpectralField& f, LinearPart kind, double tau);
void apply_linear(const SpectralField& f, LinearPart kind, SpectralField& out);  // out += L f

// Nonlinear parts from the spectrum of A (rank 3), returned as spectra truncated at
// `cutoff` (negative: untruncated).
//   DeTurck: 2[A^l, d_l A_i] - [A^l, d_i A_l] + [A^l, [A_l, A_i]]
//   caloric: d^l [A_l, A_i] + [A^l, F_li]
SpectralField deturck_nonlinear(const SpectralField& A_hat, int cutoff);
SpectralField caloric_nonlinear(const SpectralField& A_hat, int cutoff);

// Full right-hand sides, no truncation.
LatticeField deturck_rhs(const FlowState& state);  // Laplacian A_i + nonlinear part
LatticeField caloric_rhs(const FlowState& state);  // D^l F_li

// Nonlinear part of D_s B_i - D^l D_l B_i = 2 [F_il, B^l] around the Laplacian:
// 2[A^l, d_l B_i] + [d^l A_l - A_s, B_i] + [A^l, [A_l, B_i]] + 2 [F_il, B^l].
// F is the curvature of A in pair slots.
SpectralField covariant_linear_nonlinear(const LatticeField& A, const LatticeField& As, const LatticeField& F,
                                         const SpectralField& B_hat, int cutoff);

Trajectory integrate_parabolic(const FlowState& initial, FlowGauge gauge, const ParabolicConfig& cfg);

// B along the stored background trajectory (A_i(s), A_s(s)), interpolated to stage times.
FieldSeries solve_linear_covariant(const Trajectory& background, const LatticeField& B0, const ParabolicConfig& cfg,
                                   std::vector<double>* steps = nullptr);

// Step endpoints on (s0, s1]: equal steps no longer than max_step between consecutive break points.
struct StepPlan {
  std::vector<double> points;
  std::vector<char> is_break;
};
StepPlan plan_steps(double s0, double s1, double max_step, const std::vector<double>& breaks);

}  // namespace ymlab
