#pragma once

#include "ymlab/gauge_geometry.hpp"
#include "ymlab/trajectory.hpp"

#include <vector>

namespace ymlab {

struct WaveRhs {
  LatticeField dA;  // d_0 A_i = E_i
  LatticeField dE;  // d_0 E_i
};

// Temporal-gauge equations of motion with E_i = F_0i = d_0 A_i and signature (-+++):
// d_0 E_i = D^l F_li + w_i, i.e. Laplacian A_i - d_i d^l A_l + d^l [A_l, A_i] + [A^l, F_li] + w_i.
// w may be empty (zero source).
WaveRhs ym_rhs(const LatticeField& A, const LatticeField& E, const LatticeField& w = {});

struct HyperbolicConfig {
  double cfl = 0.5;    // bound on |dt| / h
  double dt = 0.0;     // 0 selects cfl * h
  double T_end = 1.0;  // signed duration; negative runs backward in t
  int record_stride = 1;
  std::vector<double> record_at;  // extra absolute record times, hit exactly
  // Per-axis truncation of the state after every step, -1 for none.
  int cutoff = -1;
};

double hyperbolic_step(const Grid& grid, const HyperbolicConfig& cfg);

struct WaveMonitor {
  double t;
  double energy;
  double constraint_l2;
};

struct Evolution {
  Trajectory traj;  // axis t; every state carries E
  std::vector<WaveMonitor> monitors;  // one per recorded state
};

// RK4 method of lines from (A0, E0) at time t0. The source, if given, is sampled in t
// and interpolated linearly.
Evolution evolve(const LatticeField& A0, const LatticeField& E0, const HyperbolicConfig& cfg, double t0 = 0.0,
                 const FieldSeries* w_source = nullptr);

// || d^l E_l + [A^l, E_l] - w0 ||_L2: the defect of the transport equation for d^l A_l.
double transport_residual(const LatticeField& A, const LatticeField& E, const LatticeField& w0 = {});

// Null form Q_mn(psi, phi) = d_m psi d_n phi - d_n psi d_m phi, applied per basis
// coefficient, over the six spacetime pairs (0,1) (0,2) (0,3) (1,2) (1,3) (2,3) with
// spacetime index 0 for time. Inputs are rank 1, with their time derivatives.
struct NullForm {
  LatticeField Q;  // rank 6
  double l2 = 0.0;
};
NullForm null_form(const LatticeField& psi, const LatticeField& dpsi_dt, const LatticeField& phi,
                   const LatticeField& dphi_dt);

}  // namespace ymlab
