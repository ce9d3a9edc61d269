#include "ymlab/heat_flow.hpp"

#include "ymlab/kernels.hpp"

#include <algorithm>
#include <cmath>

namespace ymlab {

double max_parabolic_step(const Grid& grid, const ParabolicConfig& cfg) {
  if (!(cfg.cfl_sigma > 0.0 && cfg.cfl_sigma <= 1.0)) throw std::invalid_argument("cfl_sigma must lie in (0, 1]");
  const double h = grid.h();
  return cfg.scheme == ParabolicScheme::rk4_explicit ? cfg.cfl_sigma * h * h / 6.0 : cfg.cfl_sigma * h;
}

double parabolic_step(const Grid& grid, const ParabolicConfig& cfg) {
  const double bound = max_parabolic_step(grid, cfg);
  if (cfg.ds < 0.0) throw std::invalid_argument("step size must be positive");
  if (cfg.ds == 0.0) return bound;
  if (cfg.ds > bound * (1.0 + 1e-12)) throw std::invalid_argument("step size exceeds the scheme bound");
  return cfg.ds;
}

int effective_cutoff(const Grid& grid, const ParabolicConfig& cfg) {
  if (!cfg.dealias) return -1;
  return cfg.cutoff > 0 ? cfg.cutoff : Wavenumbers::get(grid).cutoff;
}

StepPlan plan_steps(double s0, double s1, double max_step, const std::vector<double>& breaks) {
  if (!(max_step > 0.0)) throw std::invalid_argument("step size must be positive");
  std::vector<double> b;
  for (double x : breaks)
    if (x > s0 && x < s1) b.push_back(x);
  b.push_back(s1);
  std::sort(b.begin(), b.end());
  b.erase(std::unique(b.begin(), b.end()), b.end());
  StepPlan plan;
  double from = s0;
  for (double to : b) {
    const int n = step_count(from, to, max_step);
    for (int k = 1; k <= n; ++k) {
      plan.points.push_back(k == n ? to : from + (to - from) * k / n);
      plan.is_break.push_back(k == n ? 1 : 0);
    }
    from = to;
  }
  return plan;
}

namespace {

// out_c_out += coef * d_axis in_c_in, spectrally.
void add_spectral_derivative(SpectralField& out, int c_out, const SpectralField& in, int c_in, int axis,
                             double coef) {
  const Wavenumbers& w = Wavenumbers::get(in.grid());
  const std::size_t m = in.modes();
  for (int a = 0; a < in.dim(); ++a) {
    const cplx* src = in.coeff(c_in, a);
    cplx* dst = out.coeff(c_out, a);
#pragma omp parallel for schedule(static)
    for (std::size_t p = 0; p < m; ++p) dst[p] += cplx(0.0, coef * w.kd[axis][w.axis_index(p, axis)]) * src[p];
  }
}

// Q_slot = [A_i, A_j] for the pairs of pair_slot.
LatticeField pair_brackets(const LatticeField& A) {
  LatticeField Q(A.grid(), A.n(), 3);
  const int pairs[3][2] = {{0, 1}, {0, 2}, {1, 2}};
  for (int p = 0; p < 3; ++p) bracket_add(Q, p, A, pairs[p][0], A, pairs[p][1]);
  return Q;
}

bool spectrum_finite(const SpectralField& f) {
  const cplx* d = f.data();
  for (std::size_t i = 0; i < f.size(); ++i)
    if (!std::isfinite(d[i].real()) || !std::isfinite(d[i].imag())) return false;
  return true;
}

}  // namespace

void propagate_linear(SpectralField& f, LinearPart kind, double tau) {
  if (kind == LinearPart::none || tau == 0.0) return;
  const Wavenumbers& w = Wavenumbers::get(f.grid());
  const std::size_t m = f.modes();
  if (kind == LinearPart::laplacian) {
    std::vector<double> e(m);
    for (std::size_t p = 0; p < m; ++p) e[p] = std::exp(-w.ksq[p] * tau);
    const int rows = f.rank() * f.dim();
    for (int q = 0; q < rows; ++q) {
      cplx* d = f.data() + q * m;
#pragma omp parallel for schedule(static)
      for (std::size_t p = 0; p < m; ++p) d[p] *= e[p];
    }
    return;
  }
  if (f.rank() != 3) throw DimensionMismatch("caloric propagation expects rank 3");
  const int dim = f.dim();
#pragma omp parallel for schedule(static)
  for (std::size_t p = 0; p < m; ++p) {
    const double k[3] = {w.kd[0][w.axis_index(p, 0)], w.kd[1][w.axis_index(p, 1)], w.kd[2][w.axis_index(p, 2)]};
    const double k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
    if (k2 == 0.0) continue;
    const double e = std::exp(-k2 * tau);
    for (int a = 0; a < dim; ++a) {
      cplx* v[3] = {f.coeff(0, a) + p, f.coeff(1, a) + p, f.coeff(2, a) + p};
      const cplx kv = (k[0] * *v[0] + k[1] * *v[1] + k[2] * *v[2]) / k2;
      for (int i = 0; i < 3; ++i) *v[i] = e * (*v[i] - k[i] * kv) + k[i] * kv;
    }
  }
}

void apply_linear(const SpectralField& f, LinearPart kind, SpectralField& out) {
  if (kind == LinearPart::none) return;
  const Wavenumbers& w = Wavenumbers::get(f.grid());
  const std::size_t m = f.modes();
  if (kind == LinearPart::laplacian) {
    const int rows = f.rank() * f.dim();
    for (int q = 0; q < rows; ++q) {
      const cplx* s = f.data() + q * m;
      cplx* d = out.data() + q * m;
#pragma omp parallel for schedule(static)
      for (std::size_t p = 0; p < m; ++p) d[p] -= w.ksq[p] * s[p];
    }
    return;
  }
  if (f.rank() != 3) throw DimensionMismatch("caloric operator expects rank 3");
  const int dim = f.dim();
#pragma omp parallel for schedule(static)
  for (std::size_t p = 0; p < m; ++p) {
    const double k[3] = {w.kd[0][w.axis_index(p, 0)], w.kd[1][w.axis_index(p, 1)], w.kd[2][w.axis_index(p, 2)]};
    const double k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
    for (int a = 0; a < dim; ++a) {
      const cplx kv = k[0] * f.coeff(0, a)[p] + k[1] * f.coeff(1, a)[p] + k[2] * f.coeff(2, a)[p];
      for (int i = 0; i < 3; ++i) out.coeff(i, a)[p] += -k2 * f.coeff(i, a)[p] + k[i] * kv;
    }
  }
}

SpectralField deturck_nonlinear(const SpectralField& A_hat, int cutoff) {
  const LatticeField A = to_physical(A_hat);
  const LatticeField dA = gradient_from_spectrum(A_hat);  // 3c + axis = d_axis A_c
  const LatticeField Q = pair_brackets(A);
  LatticeField out(A.grid(), A.n(), 3);
  for (int i = 0; i < 3; ++i)
    for (int l = 0; l < 3; ++l) {
      bracket_add(out, i, A, l, dA, 3 * i + l, 2.0);
      bracket_add(out, i, A, l, dA, 3 * l + i, -1.0);
      if (l != i) {
        const PairSlot ps = pair_slot(l, i);
        bracket_add(out, i, A, l, Q, ps.slot, ps.sign);
      }
    }
  SpectralField r = to_spectral(out);
  apply_cutoff(r, cutoff);
  return r;
}

SpectralField caloric_nonlinear(const SpectralField& A_hat, int cutoff) {
  const LatticeField A = to_physical(A_hat);
  const LatticeField dA = gradient_from_spectrum(A_hat);
  const LatticeField Q = pair_brackets(A);
  LatticeField F = Q;
  for (int i = 0; i < 3; ++i)
    for (int j = i + 1; j < 3; ++j) {
      const int slot = pair_slot(i, j).slot;
      const std::size_t block = static_cast<std::size_t>(A.dim()) * A.volume();
      kernels::axpy(block, 1.0, dA.comp(3 * j + i), F.comp(slot));
      kernels::axpy(block, -1.0, dA.comp(3 * i + j), F.comp(slot));
    }
  LatticeField phys(A.grid(), A.n(), 3);
  for (int i = 0; i < 3; ++i)
    for (int l = 0; l < 3; ++l) {
      if (l == i) continue;
      const PairSlot ps = pair_slot(l, i);
      bracket_add(phys, i, A, l, F, ps.slot, ps.sign);
    }
  SpectralField r = to_spectral(phys);
  const SpectralField Q_hat = to_spectral(Q);
  for (int i = 0; i < 3; ++i)
    for (int l = 0; l < 3; ++l) {
      if (l == i) continue;
      const PairSlot ps = pair_slot(l, i);
      add_spectral_derivative(r, i, Q_hat, ps.slot, l, ps.sign);
    }
  apply_cutoff(r, cutoff);
  return r;
}

LatticeField deturck_rhs(const FlowState& state) {
  const SpectralField A_hat = to_spectral(state.A);
  SpectralField r = deturck_nonlinear(A_hat, -1);
  apply_linear(A_hat, LinearPart::laplacian, r);
  return to_physical(r);
}

LatticeField caloric_rhs(const FlowState& state) {
  const SpectralField A_hat = to_spectral(state.A);
  SpectralField r = caloric_nonlinear(A_hat, -1);
  apply_linear(A_hat, LinearPart::caloric, r);
  return to_physical(r);
}

SpectralField covariant_linear_nonlinear(const LatticeField& A, const LatticeField& As, const LatticeField& F,
                                         const SpectralField& B_hat, int cutoff) {
  const LatticeField B = to_physical(B_hat);
  const LatticeField dB = gradient_from_spectrum(B_hat);
  LatticeField c = divergence(A);
  if (!As.empty()) c -= As;
  LatticeField out(A.grid(), A.n(), 3);
  LatticeField tmp(A.grid(), A.n(), 1);
  for (int i = 0; i < 3; ++i) {
    bracket_add(out, i, c, 0, B, i);
    for (int l = 0; l < 3; ++l) {
      bracket_add(out, i, A, l, dB, 3 * i + l, 2.0);
      tmp *= 0.0;
      bracket_add(tmp, 0, A, l, B, i);
      bracket_add(out, i, A, l, tmp, 0);
      if (l != i) {
        const PairSlot ps = pair_slot(i, l);
        bracket_add(out, i, F, ps.slot, B, l, 2.0 * ps.sign);
      }
    }
  }
  SpectralField r = to_spectral(out);
  apply_cutoff(r, cutoff);
  return r;
}

namespace {

struct FlowOps {
  LinearPart kind;
  bool exact_linear;
  int cutoff;
  FlowGauge gauge;

  SpectralField rhs(double, const SpectralField& u) const {
    SpectralField r = gauge == FlowGauge::deturck ? deturck_nonlinear(u, cutoff) : caloric_nonlinear(u, cutoff);
    if (!exact_linear) apply_linear(u, kind, r);
    return r;
  }
  void propagate(SpectralField& u, double tau) const {
    if (exact_linear) propagate_linear(u, kind, tau);
  }
  void finish(SpectralField&) const {}
};

FlowState record_state(const SpectralField& u, double s, FlowGauge gauge, double t) {
  FlowState st = make_state(to_physical(u), t, s, gauge == FlowGauge::deturck ? GaugeTag::deturck : GaugeTag::caloric);
  if (gauge == FlowGauge::deturck) st.As = divergence(st.A);
  return st;
}

}  // namespace

Trajectory integrate_parabolic(const FlowState& initial, FlowGauge gauge, const ParabolicConfig& cfg) {
  if (!(cfg.s_end > 0.0)) throw std::invalid_argument("s_end must be positive");
  if (cfg.record_stride < 1) throw std::invalid_argument("record_stride must be >= 1");
  const double ds = parabolic_step(initial.grid(), cfg);
  FlowOps ops{gauge == FlowGauge::deturck ? LinearPart::laplacian : LinearPart::caloric,
              cfg.scheme != ParabolicScheme::rk4_explicit, effective_cutoff(initial.grid(), cfg), gauge};
  const double s0 = initial.s;
  const StepPlan plan = plan_steps(s0, s0 + cfg.s_end, ds, cfg.record_at);

  Trajectory traj;
  traj.axis = Axis::s;
  SpectralField u = to_spectral(initial.A);
  apply_cutoff(u, ops.cutoff);
  traj.states.push_back(record_state(u, s0, gauge, initial.t));
  double s = s0;
  for (std::size_t k = 0; k < plan.points.size(); ++k) {
    const double h = plan.points[k] - s;
    rk_step(cfg.scheme, ops, s, h, u);
    if (!spectrum_finite(u)) throw BlowupError("parabolic flow produced non-finite values", s);
    s = plan.points[k];
    traj.steps.push_back(h);
    if (plan.is_break[k] || (k + 1) % static_cast<std::size_t>(cfg.record_stride) == 0)
      traj.states.push_back(record_state(u, s, gauge, initial.t));
  }
  return traj;
}

namespace {

struct LinearCovOps {
  const FieldSeries& A;
  const FieldSeries& As;
  bool exact_linear;
  int cutoff;

  SpectralField rhs(double s, const SpectralField& u) const {
    const LatticeField a = A.at(s);
    const LatticeField as = As.size() ? As.at(s) : LatticeField();
    SpectralField r = covariant_linear_nonlinear(a, as, curvature(a), u, cutoff);
    if (!exact_linear) apply_linear(u, LinearPart::laplacian, r);
    return r;
  }
  void propagate(SpectralField& u, double tau) const {
    if (exact_linear) propagate_linear(u, LinearPart::laplacian, tau);
  }
  void finish(SpectralField&) const {}
};

}  // namespace

FieldSeries solve_linear_covariant(const Trajectory& background, const LatticeField& B0, const ParabolicConfig& cfg,
                                   std::vector<double>* steps) {
  if (background.empty()) throw std::invalid_argument("empty background trajectory");
  if (B0.rank() != 3) throw DimensionMismatch("B must have rank 3");
  FieldSeries A, As;
  bool has_as = true;
  for (const FlowState& st : background.states) has_as = has_as && st.As.has_value();
  for (const FlowState& st : background.states) {
    A.push(st.s, st.A);
    if (has_as) As.push(st.s, *st.As);
  }
  const double s0 = background.states.front().s;
  const double s1 = s0 + cfg.s_end;
  if (background.states.back().s < s1 - 1e-12 * std::max(1.0, s1))
    throw std::out_of_range("background trajectory does not cover the requested interval");
  const double ds = parabolic_step(B0.grid(), cfg);
  const StepPlan plan = plan_steps(s0, s1, ds, cfg.record_at);
  LinearCovOps ops{A, As, cfg.scheme != ParabolicScheme::rk4_explicit, effective_cutoff(B0.grid(), cfg)};

  FieldSeries out;
  SpectralField u = to_spectral(B0);
  apply_cutoff(u, ops.cutoff);
  out.push(s0, to_physical(u));
  double s = s0;
  for (std::size_t k = 0; k < plan.points.size(); ++k) {
    const double h = plan.points[k] - s;
    rk_step(cfg.scheme, ops, s, h, u);
    if (!spectrum_finite(u)) throw BlowupError("linear covariant flow produced non-finite values", s);
    s = plan.points[k];
    if (steps) steps->push_back(h);
    if (plan.is_break[k] || (k + 1) % static_cast<std::size_t>(cfg.record_stride) == 0) out.push(s, to_physical(u));
  }
  return out;
}

}  // namespace ymlab
