#pragma once

#include "ymlab/aligned.hpp"
#include "ymlab/gauge_geometry.hpp"
#include "ymlab/trajectory.hpp"

#include <stdexcept>
#include <vector>

namespace ymlab {

// One SU(n) element per site, stored entry-major: data[(r*n + c) * V + site].
class GaugeFrame {
 public:
  GaugeFrame() = default;
  GaugeFrame(const Grid& grid, int n);  // identity

  const Grid& grid() const { return grid_; }
  int n() const { return n_; }
  std::size_t volume() const { return grid_.volume(); }
  bool empty() const { return data_.empty(); }

  Mat matrix(std::size_t site) const;
  GroupElement at(std::size_t site) const { return GroupElement::unchecked(matrix(site)); }
  void set(std::size_t site, const Mat& m);
  void set(std::size_t site, const GroupElement& g) { set(site, g.matrix()); }

  cplx* entry(int e) { return data_.data() + static_cast<std::size_t>(e) * volume(); }
  const cplx* entry(int e) const { return data_.data() + static_cast<std::size_t>(e) * volume(); }

  GaugeFrame inverse() const;
  friend GaugeFrame operator*(const GaugeFrame& a, const GaugeFrame& b);
  void reproject();
  double max_unitarity_defect() const;
  double max_det_defect() const;
  double max_distance(const GaugeFrame& o) const;  // max entry difference
  // Entry-wise this += a * x, treating both as matrix fields.
  GaugeFrame& axpy(double a, const GaugeFrame& x);

  char param = 's';
  double value = 0.0;

 private:
  Grid grid_;
  int n_ = 0;
  AlignedVector<cplx> data_;
};

GaugeFrame frame_exponential(const LatticeField& X);  // pointwise exp of rank-1 X

// Matrix field U X for rank-1 X (not a group element).
GaugeFrame frame_times(const GaugeFrame& U, const LatticeField& X);

// U X U^{-1} for every component of X.
LatticeField conjugate_field(const GaugeFrame& U, const LatticeField& X);
// M U^{-1} projected to the algebra, where M is a matrix field with the frame layout.
LatticeField right_quotient(const GaugeFrame& M, const GaugeFrame& U);
// Spectral d_i U U^{-1}, rank 3.
LatticeField spatial_log_derivative(const GaugeFrame& U);
// (U_plus - U_minus) / (2 delta) U^{-1}, rank 1.
LatticeField central_log_derivative(const GaugeFrame& U_plus, const GaugeFrame& U_minus, const GaugeFrame& U,
                                    double delta);

// A_i~ = U A_i U^{-1} - d_i U U^{-1}; the time and heat components transform
// only if the caller supplies d_0 U U^{-1} and d_s U U^{-1}.
FlowState gauge_apply(const GaugeFrame& U, const FlowState& state, const LatticeField* dtU_Uinv = nullptr,
                      const LatticeField* dsU_Uinv = nullptr);

enum class GroupOdeMethod { rk4_project, magnus4 };

struct GroupOdeOptions {
  GroupOdeMethod method = GroupOdeMethod::rk4_project;
  int substeps = 1;  // steps per sample interval of the coefficient series
};

struct GroupOdeStats {
  int steps = 0;
  double max_drift = 0.0;  // unitarity defect before reprojection
};

// dU/dp = U X(p) from U(p0) = U0 to p1, forward or backward. X is interpolated
// from the series; frames are returned at p0, at every series sample strictly
// between p0 and p1, and at p1.
std::vector<GaugeFrame> solve_group_ode(const FieldSeries& X, const GaugeFrame& U0, double p0, double p1,
                                        const GroupOdeOptions& opt = {}, GroupOdeStats* stats = nullptr);

std::vector<GaugeFrame> solve_s_ode(const FieldSeries& As, const GaugeFrame& U0, double s0, double s1,
                                    const GroupOdeOptions& opt = {}, GroupOdeStats* stats = nullptr);
// Integrates from V0.value to both ends of the series; frames ordered by t.
std::vector<GaugeFrame> solve_t_ode(const FieldSeries& A0, const GaugeFrame& V0, const GroupOdeOptions& opt = {},
                                    GroupOdeStats* stats = nullptr);

struct GaugeFailure : std::runtime_error {
  GaugeFailure(const std::string& what, double as_residual, double a0_residual, double tolerance)
      : std::runtime_error(what), as_residual(as_residual), a0_residual(a0_residual), tolerance(tolerance) {}
  double as_residual;
  double a0_residual;
  double tolerance;
};

}  // namespace ymlab
