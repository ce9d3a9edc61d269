#include "ymlab/family.hpp"

#include "ymlab/integrator.hpp"
#include "ymlab/kernels.hpp"
#include "ymlab/spectral.hpp"
#include "ymlab/stencil.hpp"

#include <algorithm>
#include <climits>
#include <cmath>
#include <stdexcept>

namespace ymlab {

namespace {

bool close(double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(a) + std::abs(b)); }

LatticeField truncated(const LatticeField& f, int cutoff) {
  if (cutoff < 0) return f;
  SpectralField s = to_spectral(f);
  apply_cutoff(s, cutoff);
  return to_physical(s);
}

}  // namespace

std::vector<FlowState> temporal_slices(const LatticeField& A, const LatticeField& E, double t0, double t_c,
                                       double dt_slice, int half, const HyperbolicConfig& cfg) {
  if (half < 1 || !(dt_slice > 0.0)) throw std::invalid_argument("temporal_slices: need half >= 1 and dt_slice > 0");
  std::vector<double> nodes;
  for (int k = -half; k <= half; ++k) nodes.push_back(t_c + k * dt_slice);
  std::vector<FlowState> out(nodes.size());
  std::vector<char> done(nodes.size(), 0);
  for (std::size_t k = 0; k < nodes.size(); ++k)
    if (close(nodes[k], t0)) {
      out[k] = make_state(A, t0, 0.0, GaugeTag::temporal);
      out[k].E = E;
      done[k] = 1;
    }
  for (double dir : {1.0, -1.0}) {
    HyperbolicConfig c = cfg;
    c.record_stride = INT_MAX;
    c.record_at.clear();
    double reach = 0.0;
    for (double x : nodes)
      if (dir * (x - t0) > 0.0) {
        c.record_at.push_back(x);
        reach = std::max(reach, dir * (x - t0));
      }
    if (reach == 0.0) continue;
    c.T_end = dir * reach;
    const Evolution ev = evolve(A, E, c, t0);
    for (const FlowState& st : ev.traj.states)
      for (std::size_t k = 0; k < nodes.size(); ++k)
        if (!done[k] && close(st.t, nodes[k])) {
          out[k] = st;
          out[k].t = nodes[k];
          done[k] = 1;
        }
  }
  for (char d : done)
    if (!d) throw std::logic_error("temporal_slices: a slice time was not recorded");
  return out;
}

int HpymFamily::find_level(double s) const {
  for (std::size_t i = 0; i < levels.size(); ++i)
    if (close(levels[i].s, s)) return static_cast<int>(i);
  return -1;
}

const FamilyLevel& HpymFamily::level_at(double s) const {
  const int i = find_level(s);
  if (i < 0) throw std::out_of_range("no family record at the requested s");
  return levels[i];
}

const SliceRecord& HpymFamily::record(const FamilyLevel& lv, std::size_t slice) const {
  if (lv.full) return lv.slices.at(slice);
  if (slice != static_cast<std::size_t>(center)) throw std::out_of_range("level holds only the central slice");
  return lv.slices.front();
}

FlowState HpymFamily::state(const FamilyLevel& lv, std::size_t slice) const {
  const SliceRecord& r = record(lv, slice);
  FlowState st = make_state(r.A, t[slice], lv.s, GaugeTag::deturck);
  st.A0 = r.A0;
  st.As = divergence(r.A);
  return st;
}

namespace {

struct FamilyState {
  std::vector<SpectralField> A, B;
  std::vector<LatticeField> A0;
  std::vector<GaugeFrame> G;

  FamilyState& axpy(double a, const FamilyState& x) {
    for (std::size_t k = 0; k < A.size(); ++k) {
      A[k].axpy(a, x.A[k]);
      B[k].axpy(a, x.B[k]);
      A0[k].axpy(a, x.A0[k]);
      if (!G.empty()) G[k].axpy(a, x.G[k]);
    }
    return *this;
  }
};

// Spatial parts of one slice's rhs, sharing the transforms of A and B.
struct SliceTerms {
  SpectralField dA, dB;  // nonlinear parts, truncated
  LatticeField As;       // d^l A_l
  LatticeField divB;     // D^l B_l
};

SliceTerms slice_terms(const SpectralField& A_hat, const SpectralField& B_hat, int cutoff) {
  const LatticeField A = to_physical(A_hat);
  const LatticeField dA = gradient_from_spectrum(A_hat);  // 3c + axis
  const LatticeField B = to_physical(B_hat);
  const LatticeField dB = gradient_from_spectrum(B_hat);
  const Grid& g = A.grid();
  const int n = A.n();
  const std::size_t block = static_cast<std::size_t>(A.dim()) * A.volume();

  SliceTerms r{{}, {}, LatticeField(g, n, 1), LatticeField(g, n, 1)};
  for (int l = 0; l < 3; ++l) {
    kernels::axpy(block, 1.0, dA.comp(4 * l), r.As.comp(0));
    kernels::axpy(block, 1.0, dB.comp(4 * l), r.divB.comp(0));
    bracket_add(r.divB, 0, A, l, B, l);
  }
  // Q_slot = [A_i, A_j]; F = dA antisymmetrized + Q.
  LatticeField Q(g, n, 3);
  const int pairs[3][2] = {{0, 1}, {0, 2}, {1, 2}};
  for (int p = 0; p < 3; ++p) bracket_add(Q, p, A, pairs[p][0], A, pairs[p][1]);
  LatticeField F = Q;
  for (int p = 0; p < 3; ++p) {
    const int i = pairs[p][0], j = pairs[p][1];
    kernels::axpy(block, 1.0, dA.comp(3 * j + i), F.comp(p));
    kernels::axpy(block, -1.0, dA.comp(3 * i + j), F.comp(p));
  }
  // DeTurck: 2[A^l, d_l A_i] - [A^l, d_i A_l] + [A^l, [A_l, A_i]]
  // B: 2[A^l, d_l B_i] + [A^l, [A_l, B_i]] + 2[F_il, B^l]   (A_s = d^l A_l)
  LatticeField na(g, n, 3), nb(g, n, 3), tmp(g, n, 1);
  for (int i = 0; i < 3; ++i)
    for (int l = 0; l < 3; ++l) {
      bracket_add(na, i, A, l, dA, 3 * i + l, 2.0);
      bracket_add(na, i, A, l, dA, 3 * l + i, -1.0);
      bracket_add(nb, i, A, l, dB, 3 * i + l, 2.0);
      tmp *= 0.0;
      bracket_add(tmp, 0, A, l, B, i);
      bracket_add(nb, i, A, l, tmp, 0);
      if (l != i) {
        const PairSlot q = pair_slot(l, i);
        bracket_add(na, i, A, l, Q, q.slot, q.sign);
        const PairSlot f = pair_slot(i, l);
        bracket_add(nb, i, F, f.slot, B, l, 2.0 * f.sign);
      }
    }
  r.dA = to_spectral(na);
  apply_cutoff(r.dA, cutoff);
  r.dB = to_spectral(nb);
  apply_cutoff(r.dB, cutoff);
  return r;
}

struct FamilyOps {
  std::vector<std::vector<double>> weights;  // d_0 weights at each slice
  int cutoff;
  bool exact_linear;

  FamilyState rhs(double, const FamilyState& u) const {
    const std::size_t m = u.A.size();
    std::vector<SliceTerms> terms;
    std::vector<LatticeField> As;
    for (std::size_t k = 0; k < m; ++k) {
      terms.push_back(slice_terms(u.A[k], u.B[k], cutoff));
      As.push_back(terms.back().As);
    }
    FamilyState r;
    for (std::size_t k = 0; k < m; ++k) {
      SliceTerms& tk = terms[k];
      if (!exact_linear) {
        apply_linear(u.A[k], LinearPart::laplacian, tk.dA);
        apply_linear(u.B[k], LinearPart::laplacian, tk.dB);
      }
      r.A.push_back(std::move(tk.dA));
      r.B.push_back(std::move(tk.dB));
      LatticeField a0 = combine(weights[k], As);
      bracket_add(a0, 0, u.A0[k], 0, As[k], 0);
      a0 += tk.divB;
      r.A0.push_back(truncated(a0, cutoff));
      if (!u.G.empty()) r.G.push_back(frame_times(u.G[k], As[k]));
    }
    return r;
  }
  void propagate(FamilyState& u, double tau) const {
    if (!exact_linear) return;
    for (std::size_t k = 0; k < u.A.size(); ++k) {
      propagate_linear(u.A[k], LinearPart::laplacian, tau);
      propagate_linear(u.B[k], LinearPart::laplacian, tau);
    }
  }
  void finish(FamilyState& u) const {
    for (GaugeFrame& g : u.G) g.reproject();
  }
};

bool finite(const FamilyState& u) {
  for (std::size_t k = 0; k < u.A.size(); ++k)
    if (!u.A0[k].all_finite()) return false;
  for (const auto* v : {&u.A, &u.B})
    for (const SpectralField& f : *v)
      for (std::size_t i = 0; i < f.size(); ++i)
        if (!std::isfinite(f.data()[i].real()) || !std::isfinite(f.data()[i].imag())) return false;
  return true;
}

SliceRecord snapshot(const FamilyState& u, std::size_t k) {
  SliceRecord r{to_physical(u.A[k]), u.A0[k], to_physical(u.B[k]), {}};
  if (!u.G.empty()) r.G = u.G[k];
  return r;
}

}  // namespace

HpymFamily extend_dynamic(const std::vector<FlowState>& slices, const FamilyConfig& cfg) {
  const std::size_t m = slices.size();
  if (m < 3 || m % 2 == 0) throw std::invalid_argument("extend_dynamic needs an odd number (>= 3) of time slices");
  for (const FlowState& st : slices)
    if (!st.E) throw std::invalid_argument("extend_dynamic: every slice must carry E");
  for (std::size_t k = 1; k < m; ++k)
    if (!(slices[k].t > slices[k - 1].t)) throw std::invalid_argument("extend_dynamic: slice times must ascend");
  if (cfg.cluster_half_width < 1 || cfg.cluster_half_width > 2)
    throw std::invalid_argument("cluster_half_width must be 1 or 2");
  if (!(cfg.flow.s_end > 0.0)) throw std::invalid_argument("s_end must be positive");

  const Grid& grid = slices[0].grid();
  const int n = slices[0].n();
  HpymFamily fam;
  for (const FlowState& st : slices) fam.t.push_back(st.t);
  fam.center = static_cast<int>(m / 2);
  fam.ds_cluster = cfg.ds_cluster;
  fam.half_width = cfg.cluster_half_width;
  fam.s_end = cfg.flow.s_end;
  fam.cutoff = effective_cutoff(grid, cfg.flow);
  fam.frames = cfg.track_frames;
  fam.temporal = slices;

  // Record points: full levels at s = 0, s_end and the cluster nodes; central-only extras.
  struct Point {
    double s;
    bool full;
  };
  std::vector<Point> pts{{0.0, true}, {cfg.flow.s_end, true}};
  for (double c : cfg.sample_s) {
    if (!(c - cfg.cluster_half_width * cfg.ds_cluster > 0.0 && c + cfg.cluster_half_width * cfg.ds_cluster < cfg.flow.s_end))
      throw std::invalid_argument("cluster does not fit strictly inside (0, s_end)");
    fam.samples.push_back(c);
    for (int j = -cfg.cluster_half_width; j <= cfg.cluster_half_width; ++j) pts.push_back({c + j * cfg.ds_cluster, true});
  }
  for (double s : cfg.meter_s)
    if (s > 0.0 && s <= cfg.flow.s_end) pts.push_back({s, false});
  std::sort(pts.begin(), pts.end(), [](const Point& a, const Point& b) { return a.s < b.s; });
  std::vector<Point> merged;
  for (const Point& p : pts) {
    if (!merged.empty() && close(merged.back().s, p.s))
      merged.back().full = merged.back().full || p.full;
    else
      merged.push_back(p);
  }
  std::vector<double> breaks;
  for (const Point& p : merged)
    if (p.s > 0.0) breaks.push_back(p.s);
  const double ds = parabolic_step(grid, cfg.flow);
  if (cfg.ds_start > 0.0) {
    if (!(cfg.step_growth >= 1.0)) throw std::invalid_argument("step_growth must be >= 1");
    double s = 0.0, h = cfg.ds_start;
    while (h < ds && s + h < cfg.flow.s_end) {
      s += h;
      breaks.push_back(s);
      h *= cfg.step_growth;
    }
    std::sort(breaks.begin(), breaks.end());
  }

  FamilyOps ops;
  for (std::size_t k = 0; k < m; ++k) ops.weights.push_back(fd_weights(fam.t, fam.t[k], 1));
  ops.cutoff = fam.cutoff;
  ops.exact_linear = cfg.flow.scheme != ParabolicScheme::rk4_explicit;

  FamilyState u;
  for (const FlowState& st : slices) {
    SpectralField a = to_spectral(st.A);
    apply_cutoff(a, ops.cutoff);
    SpectralField b = to_spectral(*st.E);
    b *= -1.0;
    apply_cutoff(b, ops.cutoff);
    u.A.push_back(std::move(a));
    u.B.push_back(std::move(b));
    u.A0.emplace_back(grid, n, 1);
    if (cfg.track_frames) u.G.emplace_back(grid, n);
  }

  auto store = [&](double s, bool full) {
    FamilyLevel lv;
    lv.s = s;
    lv.full = full;
    if (full)
      for (std::size_t k = 0; k < m; ++k) lv.slices.push_back(snapshot(u, k));
    else
      lv.slices.push_back(snapshot(u, fam.center));
    fam.levels.push_back(std::move(lv));
  };
  store(0.0, true);

  const StepPlan plan = plan_steps(0.0, cfg.flow.s_end, ds, breaks);
  double s = 0.0;
  std::size_t next = 1;
  for (std::size_t k = 0; k < plan.points.size(); ++k) {
    rk_step(cfg.flow.scheme, ops, s, plan.points[k] - s, u);
    if (!finite(u)) throw BlowupError("dynamic extension produced non-finite values", s);
    s = plan.points[k];
    if (next < merged.size() && close(s, merged[next].s)) {
      store(merged[next].s, merged[next].full);
      ++next;
    }
  }
  if (next != merged.size()) throw std::logic_error("extend_dynamic: missed a record point");
  return fam;
}

HpymFamily extend_dynamic(const Trajectory& temporal_solution, const FamilyConfig& cfg) {
  if (temporal_solution.axis != Axis::t) throw std::invalid_argument("extend_dynamic expects a trajectory over t");
  std::vector<FlowState> slices = temporal_solution.states;
  std::sort(slices.begin(), slices.end(), [](const FlowState& a, const FlowState& b) { return a.t < b.t; });
  return extend_dynamic(slices, cfg);
}

GaugeFrame CaloricTemporal::frame(const HpymFamily& fam, const FamilyLevel& lv, std::size_t slice) const {
  if (!fam.frames) throw std::invalid_argument("family carries no frames");
  const GaugeFrame& Gend = fam.record(fam.levels.back(), slice).G;
  GaugeFrame U = Ubar.at(slice) * (Gend.inverse() * fam.record(lv, slice).G);
  U.param = 's';
  U.value = lv.s;
  return U;
}

LatticeField CaloricTemporal::transform_A(const HpymFamily& fam, const FamilyLevel& lv, std::size_t slice) const {
  return gauge_apply(frame(fam, lv, slice), make_state(fam.record(lv, slice).A)).A;
}

namespace {

// Ubar on every slice from d_0 Ubar = Ubar A_0(., s_end), Ubar(t_c) = Id.
std::vector<GaugeFrame> solve_ubar(const HpymFamily& fam, const GroupOdeOptions& ode) {
  FieldSeries a0;
  const FamilyLevel& end = fam.levels.back();
  for (std::size_t k = 0; k < fam.slice_count(); ++k) a0.push(fam.t[k], fam.record(end, k).A0);
  const Grid& g = end.slices.front().A.grid();
  GaugeFrame V0(g, end.slices.front().A.n());
  V0.param = 't';
  V0.value = fam.t[fam.center];
  return solve_t_ode(a0, V0, ode);
}

}  // namespace

CaloricTemporal to_caloric_temporal(const HpymFamily& fam, const CaloricTemporalOptions& opt) {
  if (!fam.frames) throw std::invalid_argument("to_caloric_temporal needs a family with tracked frames");
  if (fam.slice_count() < 5) throw std::invalid_argument("to_caloric_temporal needs 5 time slices for its error estimate");
  if (fam.half_width < 2 || fam.samples.empty())
    throw std::invalid_argument("to_caloric_temporal needs s-clusters of half-width 2");
  CaloricTemporal out;
  out.Ubar = solve_ubar(fam, opt.ode);
  GroupOdeOptions fine = opt.ode;
  fine.substeps *= 2;
  const std::vector<GaugeFrame> Ufine = solve_ubar(fam, fine);

  const std::size_t c = fam.center;
  const double dss = fam.ds_cluster;
  double scale = 0.0;
  for (double s0 : fam.samples) {
    const FamilyLevel& mid = fam.level_at(s0);
    const GaugeFrame U = out.frame(fam, mid, c);
    const GaugeFrame p1 = out.frame(fam, fam.level_at(s0 + dss), c), m1 = out.frame(fam, fam.level_at(s0 - dss), c);
    const GaugeFrame p2 = out.frame(fam, fam.level_at(s0 + 2 * dss), c), m2 = out.frame(fam, fam.level_at(s0 - 2 * dss), c);
    const LatticeField d1 = central_log_derivative(p1, m1, U, dss);
    const LatticeField d2 = central_log_derivative(p2, m2, U, 2 * dss);
    const LatticeField As = divergence(fam.record(mid, c).A);
    scale = std::max(scale, As.max_abs());
    LatticeField res = conjugate_field(U, As) - d1;
    const double r = res.max_abs();
    out.est_s = std::max(out.est_s, (d2 - d1).max_abs() / 3.0);
    if (r >= out.as_residual) {
      out.as_residual = r;
      out.as_field = std::move(res);
    }
  }

  const FamilyLevel& end = fam.levels.back();
  const double dt = fam.dt_slice();
  auto a0_tilde = [&](const std::vector<GaugeFrame>& Ub, int stride) {
    const LatticeField d = central_log_derivative(Ub[c + stride], Ub[c - stride], Ub[c], stride * dt);
    return conjugate_field(Ub[c], fam.record(end, c).A0) - d;
  };
  LatticeField a0 = a0_tilde(out.Ubar, 1);
  const LatticeField a0_wide = a0_tilde(out.Ubar, 2);
  const LatticeField a0_fine = a0_tilde(Ufine, 1);
  out.a0_residual = a0.max_abs();
  out.est_t = (a0_wide - a0).max_abs() / 3.0;
  out.est_ode = (a0_fine - a0).max_abs();
  out.a0_field = std::move(a0);
  scale = std::max(scale, fam.record(end, c).A0.max_abs());

  // Round-off floor so exactly transformed data is not reported as a failure.
  const double floor = 1e-12 * std::max(1.0, scale);
  out.tolerance = std::max(opt.safety * (out.est_s + out.est_t + out.est_ode), floor);
  out.passed = out.as_residual <= out.tolerance && out.a0_residual <= out.tolerance;
  if (!out.passed && opt.throw_on_failure)
    throw GaugeFailure("caloric-temporal gauge residual exceeds the tolerance", out.as_residual, out.a0_residual,
                       out.tolerance);
  return out;
}

}  // namespace ymlab
