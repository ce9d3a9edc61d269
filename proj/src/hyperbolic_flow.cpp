#include "ymlab/hyperbolic_flow.hpp"

#include "ymlab/heat_flow.hpp"
#include "ymlab/integrator.hpp"
#include "ymlab/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ymlab {

namespace {

LatticeField electric_rate(const LatticeField& A) {
  const SpectralField A_hat = to_spectral(A);
  SpectralField r = caloric_nonlinear(A_hat, -1);
  apply_linear(A_hat, LinearPart::caloric, r);
  return to_physical(r);
}

// Piecewise-linear sample of a series with ascending parameters; constant beyond the ends.
LatticeField linear_sample(const FieldSeries& w, double t) {
  if (w.size() == 0) throw std::invalid_argument("empty source series");
  if (t <= w.param.front()) return w.fields.front();
  if (t >= w.param.back()) return w.fields.back();
  const auto it = std::upper_bound(w.param.begin(), w.param.end(), t);
  const std::size_t j = static_cast<std::size_t>(it - w.param.begin());
  const double a = (t - w.param[j - 1]) / (w.param[j] - w.param[j - 1]);
  LatticeField r = w.fields[j - 1];
  r *= 1.0 - a;
  r.axpy(a, w.fields[j]);
  return r;
}

struct WaveState {
  LatticeField A;
  LatticeField E;
  WaveState& axpy(double a, const WaveState& x) {
    A.axpy(a, x.A);
    E.axpy(a, x.E);
    return *this;
  }
};

struct WaveOps {
  const FieldSeries* w;
  int cutoff;

  WaveState rhs(double t, const WaveState& u) const {
    LatticeField dE = electric_rate(u.A);
    if (w) dE += linear_sample(*w, t);
    return {u.E, std::move(dE)};
  }
  void propagate(WaveState&, double) const {}
  void finish(WaveState& u) const {
    if (cutoff < 0) return;
    for (LatticeField* f : {&u.A, &u.E}) {
      SpectralField s = to_spectral(*f);
      apply_cutoff(s, cutoff);
      *f = to_physical(s);
    }
  }
};

FlowState record(const WaveState& u, double t) {
  FlowState st = make_state(u.A, t, 0.0, GaugeTag::temporal);
  st.E = u.E;
  return st;
}

WaveMonitor monitor(const WaveState& u, double t) {
  return {t, conserved_energy(u.A, u.E), lp_norm(constraint_residual(u.A, u.E), 2.0)};
}

}  // namespace

WaveRhs ym_rhs(const LatticeField& A, const LatticeField& E, const LatticeField& w) {
  A.require_same_shape(E);
  WaveRhs r{E, electric_rate(A)};
  if (!w.empty()) r.dE += w;
  return r;
}

double hyperbolic_step(const Grid& grid, const HyperbolicConfig& cfg) {
  if (!(cfg.cfl > 0.0 && cfg.cfl <= 1.0)) throw std::invalid_argument("cfl must lie in (0, 1]");
  const double bound = cfg.cfl * grid.h();
  if (cfg.dt < 0.0) throw std::invalid_argument("dt must be positive; the direction comes from T_end");
  if (cfg.dt == 0.0) return bound;
  if (cfg.dt > bound * (1.0 + 1e-12)) throw std::invalid_argument("dt exceeds the CFL bound");
  return cfg.dt;
}

Evolution evolve(const LatticeField& A0, const LatticeField& E0, const HyperbolicConfig& cfg, double t0,
                 const FieldSeries* w_source) {
  A0.require_same_shape(E0);
  if (A0.rank() != 3) throw std::invalid_argument("evolve expects rank-3 A and E");
  if (cfg.record_stride < 1) throw std::invalid_argument("record_stride must be >= 1");
  const double dt = hyperbolic_step(A0.grid(), cfg);
  const double dir = cfg.T_end < 0.0 ? -1.0 : 1.0;
  std::vector<double> breaks;
  for (double x : cfg.record_at) breaks.push_back(dir * (x - t0));
  const StepPlan plan = plan_steps(0.0, std::abs(cfg.T_end), dt, breaks);

  WaveOps ops{w_source, cfg.cutoff};
  WaveState u{A0, E0};
  ops.finish(u);
  Evolution ev;
  ev.traj.axis = Axis::t;
  ev.traj.states.push_back(record(u, t0));
  ev.monitors.push_back(monitor(u, t0));
  double p = 0.0;
  for (std::size_t k = 0; k < plan.points.size(); ++k) {
    const double h = plan.points[k] - p;
    rk_step(StepScheme::rk4_explicit, ops, t0 + dir * p, dir * h, u);
    if (!u.A.all_finite() || !u.E.all_finite())
      throw BlowupError("hyperbolic evolution produced non-finite values", t0 + dir * p);
    p = plan.points[k];
    ev.traj.steps.push_back(dir * h);
    if (plan.is_break[k] || (k + 1) % static_cast<std::size_t>(cfg.record_stride) == 0) {
      const double t = k + 1 == plan.points.size() ? t0 + cfg.T_end : t0 + dir * p;
      ev.traj.states.push_back(record(u, t));
      ev.monitors.push_back(monitor(u, t));
    }
  }
  return ev;
}

double transport_residual(const LatticeField& A, const LatticeField& E, const LatticeField& w0) {
  LatticeField r = constraint_residual(A, E);
  if (!w0.empty()) r -= w0;
  return lp_norm(r, 2.0);
}

NullForm null_form(const LatticeField& psi, const LatticeField& dpsi_dt, const LatticeField& phi,
                   const LatticeField& dphi_dt) {
  for (const LatticeField* f : {&dpsi_dt, &phi, &dphi_dt}) psi.require_same_shape(*f);
  if (psi.rank() != 1) throw std::invalid_argument("null_form expects rank-1 fields");
  const LatticeField gpsi = gradient(psi);
  const LatticeField gphi = gradient(phi);
  auto d = [&](const LatticeField& g, const LatticeField& dt, int mu) -> const double* {
    return mu == 0 ? dt.comp(0) : g.comp(mu - 1);
  };
  NullForm out{LatticeField(psi.grid(), psi.n(), 6)};
  const std::size_t block = static_cast<std::size_t>(psi.dim()) * psi.volume();
  int slot = 0;
  for (int m = 0; m < 4; ++m)
    for (int n = m + 1; n < 4; ++n, ++slot) {
      const double* pm = d(gpsi, dpsi_dt, m);
      const double* pn = d(gpsi, dpsi_dt, n);
      const double* fm = d(gphi, dphi_dt, m);
      const double* fn = d(gphi, dphi_dt, n);
      double* q = out.Q.comp(slot);
#pragma omp parallel for schedule(static)
      for (std::size_t i = 0; i < block; ++i) q[i] = pm[i] * fn[i] - pn[i] * fm[i];
    }
  out.l2 = std::sqrt(integral_inner(out.Q, out.Q));
  return out;
}

}  // namespace ymlab
