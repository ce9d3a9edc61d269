#pragma once

#include "ymlab/family.hpp"

#include <string>
#include <vector>

namespace ymlab {

struct IdentityReport {
  std::string name;
  double residual_l2 = 0.0;
  double reference_scale = 0.0;  // L2 size of the largest term
  double relative = 0.0;         // residual / scale, 0 when both vanish
  double t = 0.0;
  double s = 0.0;
  bool skipped = false;
  std::string note;  // reason for skipping
};

// Yang-Mills tension field w_nu = D^mu F_nu mu on the central slice of a full level, with
// F_i0 = d_i A_0 - d_0 A_i + [A_i, A_0] and d_0 from the slice stencil. Signature (-+++).
struct TensionField {
  LatticeField w;   // rank 3, w_i
  LatticeField w0;  // rank 1
  double w_l2 = 0.0;       // L2 norm of (w_0, w_i)
  double dF_l2 = 0.0;      // L2 norm of all first spacetime derivatives of F_mu nu
  double relative = 0.0;   // w_l2 / dF_l2
  double Fs0_l2 = 0.0;     // F_s0 = D^l B_l
  double w0_plus_Fs0 = 0.0;
  double Fs0_term_scale = 0.0;  // max(||d^l B_l||, ||[A^l, B_l]||)
  double w0_relative = 0.0;     // ||w_0 + F_s0|| / max(||w_0||, ||F_s0||, Fs0_term_scale)
  double t = 0.0;
  double s = 0.0;
};
TensionField tension_field(const HpymFamily& fam, double s);

// At every cluster center on the central slice: covariant Coulomb, D_0 F_s0 = -D^l w_l,
// the parabolic equations for F_ab (spatial pairs) and w_nu, the wave equation for F_s nu,
// and the Bianchi identity over (t, x, s). Skipped reports name what is missing.
std::vector<IdentityReport> covariant_identity_suite(const HpymFamily& fam);

// Base norm ||d^k f||_{L^q} with homogeneity degree 3/q - k; its p-normalized version at
// heat time s is s^{-(3/q - k)/2} ||d^k f||_{L^q}.
struct BaseNorm {
  int k = 0;
  double q = 2.0;
  static BaseNorm hdot(int k) { return {k, 2.0}; }
  static BaseNorm lebesgue(double q) { return {0, q}; }
  double degree() const;
  double operator()(const LatticeField& f) const;
};

// || s^ell X(s) f(s) ||_{L^p(ds/s)} over the recorded s > 0 (trapezoid rule in log s with a
// power-law tail below the first sample); p = infinity gives the supremum.
double pnorm(const FieldSeries& f, double ell, double p, const BaseNorm& base);
double pnorm(const Trajectory& traj, double ell, double p, const BaseNorm& base);  // of A

// Surrogates with derivative counts truncated to m <= 4 and the S^k norms replaced by their
// L^inf_t H^k part, on the central slice:
//   F  = sum_{k=1..4} sup_i (||F_si||_{L^{5/4,inf}_s S^k} + ||F_si||_{L^{5/4,2}_s S^k}), F_si = D^l F_li
//   E  = sum_{m=1..3} ||F_s0||_{L^{1,inf}_s H^{m-1}} + ||F_s0||_{L^{1,2}_s H^m}, F_s0 = D^l B_l
//   Abar = sup_i ||A_i||_{H^4} + sup_i ||d_0 curl A_i||_{H^2} + sum_{k=1..3} sup_i ||A_i||_{H^k} at s_end
//   A0 = ||a||_{L^3} + ||d a||_{L^2} + ||a||_{L^inf} + ||d a||_{L^3} + ||d^2 a||_{L^2}, a = A~_0(s = 0)
// with the time integrals over a unit interval replaced by the central value. With a
// caloric-temporal transform the fields are taken in that gauge, otherwise in DeTurck gauge.
struct QuantityMeters {
  double F = 0.0;
  double E = 0.0;
  double A_bar = 0.0;
  double A0 = 0.0;
  std::string gauge;
  int samples = 0;
};
QuantityMeters quantity_meters(const HpymFamily& fam, const CaloricTemporal* ct = nullptr);

// Least-squares fit y ~ c s^exponent in log-log coordinates.
struct WeightFit {
  std::string name;
  double exponent = 0.0;
  double prefactor = 0.0;
  double r2 = 0.0;
  bool low_fit = false;  // r2 below 0.9 or fewer than 3 points
  int points = 0;
};
WeightFit fit_power_law(const std::string& name, const std::vector<double>& s, const std::vector<double>& y);

// Fitted s-exponents of ||A||_inf, ||F_si||_inf (F_si = D^l F_li), ||dA||_L2 and ||d^2 A||_L2
// over samples with s in [s_min, s_max].
std::vector<WeightFit> associated_weight_report(const Trajectory& traj, double s_min = 0.0, double s_max = 1e300);
// Central slice: A_i, F_si, w_0 (= -F_s0) and A_0 sup norms.
std::vector<WeightFit> associated_weight_report(const HpymFamily& fam, double s_min = 0.0, double s_max = 1e300);

}  // namespace ymlab
