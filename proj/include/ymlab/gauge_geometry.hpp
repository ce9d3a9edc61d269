#pragma once

#include "ymlab/lattice.hpp"

#include <optional>
#include <stdexcept>
#include <string>
#include <utility>

namespace ymlab {

enum class GaugeTag { temporal, deturck, caloric, caloric_temporal, none };

std::string to_string(GaugeTag tag);

// Connection at fixed (t, s). A0 absent means temporal interpretation.
struct FlowState {
  LatticeField A;                  // rank 3
  std::optional<LatticeField> A0;  // rank 1
  std::optional<LatticeField> As;  // rank 1, when the s-component is carried explicitly
  std::optional<LatticeField> E;   // rank 3, d_0 A on temporal slices
  double t = 0.0;
  double s = 0.0;
  GaugeTag gauge = GaugeTag::none;

  const Grid& grid() const { return A.grid(); }
  int n() const { return A.n(); }
};

FlowState make_state(LatticeField A, double t = 0.0, double s = 0.0, GaugeTag gauge = GaugeTag::none);

struct DivergedError : std::runtime_error {
  DivergedError(const std::string& what, double residual, int iterations)
      : std::runtime_error(what), residual(residual), iterations(iterations) {}
  double residual;
  int iterations;
};

// F_ij in the three slots of pair_slot.
LatticeField curvature(const FlowState& state, Scheme scheme = Scheme::spectral);
LatticeField curvature(const LatticeField& A, Scheme scheme = Scheme::spectral);

// D_axis B = d_axis B + [A_axis, B], per component of B.
LatticeField covariant_derivative(const FlowState& state, const LatticeField& B, int axis,
                                  Scheme scheme = Scheme::spectral);
LatticeField covariant_derivative(const LatticeField& A, const LatticeField& B, int axis,
                                  Scheme scheme = Scheme::spectral);
// All three directions at once: rank r -> rank 3r with index 3*c + axis.
LatticeField covariant_gradient(const LatticeField& A, const LatticeField& B);
// D^l B_l for rank-3 B.
LatticeField covariant_divergence(const LatticeField& A, const LatticeField& B);

double magnetic_energy(const FlowState& state);
double magnetic_energy(const LatticeField& A);
double conserved_energy(const LatticeField& A, const LatticeField& E);

// d^l E_l + [A^l, E_l]
LatticeField constraint_residual(const LatticeField& A, const LatticeField& E);

struct ProjectionStats {
  int iterations = 0;
  double initial_residual = 0.0;
  double final_residual = 0.0;
  double dphi_l2 = 0.0;
};

// E = F + D phi with D^l D_l phi = -D^l F_l, solved by preconditioned CG.
LatticeField constraint_project(const LatticeField& A, const LatticeField& F, double tol = 1e-10,
                                ProjectionStats* stats = nullptr, int max_iterations = 1000);

// (curl-free, divergence-free); the zero mode goes to the divergence-free part.
std::pair<LatticeField, LatticeField> hodge_decompose(const LatticeField& A);

}  // namespace ymlab
