#pragma once

#include "ymlab/gauge_transforms.hpp"
#include "ymlab/heat_flow.hpp"
#include "ymlab/hyperbolic_flow.hpp"

#include <vector>

namespace ymlab {

// Temporal-gauge slices (A, E) at t_c + k dt, k = -half..half, evolved from (A, E) at t0.
std::vector<FlowState> temporal_slices(const LatticeField& A, const LatticeField& E, double t0, double t_c,
                                       double dt_slice, int half, const HyperbolicConfig& cfg);

struct FamilyConfig {
  ParabolicConfig flow;  // scheme, step bound, s_end, truncation
  // Centers of the s-clusters where s-derivatives are taken: nodes s* + j ds_cluster with
  // |j| <= cluster_half_width (1 or 2).
  std::vector<double> sample_s;
  double ds_cluster = 1e-3;
  int cluster_half_width = 1;
  // Extra records on the central slice only (e.g. log-spaced for s-weighted norms).
  std::vector<double> meter_s;
  // Graded steps: the first step is ds_start and each next one grows by step_growth
  // until the flow step is reached. 0 means uniform steps.
  double ds_start = 0.0;
  double step_growth = 1.2;
  // Co-integrate d_s G = G A_s from G(s = 0) = Id on every slice.
  bool track_frames = true;
};

struct SliceRecord {
  LatticeField A;   // rank 3, DeTurck gauge
  LatticeField A0;  // rank 1
  LatticeField B;   // rank 3, equals F_i0 in the continuum
  GaugeFrame G;     // empty unless frames are tracked
};

struct FamilyLevel {
  double s = 0.0;
  bool full = false;               // every slice recorded; otherwise only the central one
  std::vector<SliceRecord> slices;  // size = slice count when full, else 1
};

// DeTurck-gauge (t, s)-family with A_0 from the dynamic extension.
struct HpymFamily {
  std::vector<double> t;  // ascending slice times
  int center = 0;
  std::vector<FamilyLevel> levels;  // ascending in s
  std::vector<double> samples;      // cluster centers
  double ds_cluster = 0.0;
  int half_width = 0;
  double s_end = 0.0;
  int cutoff = -1;
  bool frames = false;
  std::vector<FlowState> temporal;  // input slices at s = 0 (A, E, t)

  std::size_t slice_count() const { return t.size(); }
  double dt_slice() const { return t.size() > 1 ? t[center + 1] - t[center] : 0.0; }
  // -1 if no level at s (relative tolerance 1e-12).
  int find_level(double s) const;
  const FamilyLevel& level_at(double s) const;  // throws std::out_of_range
  // Record on a slice; slice index counts from 0 even for central-only levels.
  const SliceRecord& record(const FamilyLevel& lv, std::size_t slice) const;
  // Full state with A_s = d^l A_l.
  FlowState state(const FamilyLevel& lv, std::size_t slice) const;
};

// Flows every slice in DeTurck gauge together with B_i (B(s=0) = -E) and
//   d_s A_0 = d_0 A_s + [A_0, A_s] + D^l B_l,  A_0(s = 0) = 0,
// in one integration; d_0 A_s uses finite-difference weights across the slices.
HpymFamily extend_dynamic(const std::vector<FlowState>& slices, const FamilyConfig& cfg);
HpymFamily extend_dynamic(const Trajectory& temporal_solution, const FamilyConfig& cfg);

struct CaloricTemporalOptions {
  GroupOdeOptions ode{GroupOdeMethod::rk4_project, 4};
  double safety = 10.0;
  bool throw_on_failure = true;
};

struct CaloricTemporal {
  std::vector<GaugeFrame> Ubar;  // per slice, at s_end, Ubar(t_c) = Id
  double as_residual = 0.0;      // max over cluster centers of ||A~_s||_inf on the central slice
  double a0_residual = 0.0;      // ||A~_0(t_c, s_end)||_inf
  double est_s = 0.0, est_t = 0.0, est_ode = 0.0;
  double tolerance = 0.0;
  bool passed = false;
  LatticeField as_field, a0_field;  // residual fields at the worst sample

  // U(t_k, s) = Ubar(t_k) G(t_k, s_end)^-1 G(t_k, s).
  GaugeFrame frame(const HpymFamily& fam, const FamilyLevel& lv, std::size_t slice) const;
  // Transformed spatial connection A~_i.
  LatticeField transform_A(const HpymFamily& fam, const FamilyLevel& lv, std::size_t slice) const;
};

// Builds the caloric-temporal gauge transform. The d_s and d_0 log-derivatives are
// 3-point central differences; their error is estimated by Richardson comparison with
// the doubled spacing, and the Ubar ODE error by substep doubling. The tolerance is
// `safety` times their sum. Needs frames, 5 slices and cluster half-width 2.
CaloricTemporal to_caloric_temporal(const HpymFamily& fam, const CaloricTemporalOptions& opt = {});

}  // namespace ymlab
