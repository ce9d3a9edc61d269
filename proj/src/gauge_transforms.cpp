#include "ymlab/gauge_transforms.hpp"

#include "ymlab/kernels.hpp"
#include "ymlab/spectral.hpp"

#include <algorithm>
#include <cmath>

namespace ymlab {

GaugeFrame::GaugeFrame(const Grid& grid, int n)
    : grid_(grid), n_(n), data_(static_cast<std::size_t>(n) * n * grid.volume(), cplx(0.0, 0.0)) {
  if (n < 2 || n > kMaxRank) throw DimensionMismatch("unsupported group rank");
  for (int d = 0; d < n; ++d) std::fill(entry(d * n + d), entry(d * n + d) + volume(), cplx(1.0, 0.0));
}

Mat GaugeFrame::matrix(std::size_t site) const {
  Mat m(n_, n_);
  for (int r = 0; r < n_; ++r)
    for (int c = 0; c < n_; ++c) m(r, c) = entry(r * n_ + c)[site];
  return m;
}

void GaugeFrame::set(std::size_t site, const Mat& m) {
  if (m.rows() != n_ || m.cols() != n_) throw DimensionMismatch("frame entry size mismatch");
  for (int r = 0; r < n_; ++r)
    for (int c = 0; c < n_; ++c) entry(r * n_ + c)[site] = m(r, c);
}

GaugeFrame GaugeFrame::inverse() const {
  GaugeFrame r(grid_, n_);
  r.param = param;
  r.value = value;
  const long long v = static_cast<long long>(volume());
#pragma omp parallel for schedule(static)
  for (long long s = 0; s < v; ++s) r.set(s, Mat(matrix(s).adjoint()));
  return r;
}

GaugeFrame operator*(const GaugeFrame& a, const GaugeFrame& b) {
  if (!(a.grid() == b.grid()) || a.n() != b.n()) throw DimensionMismatch("frame product shape mismatch");
  GaugeFrame r(a.grid(), a.n());
  r.param = a.param;
  r.value = a.value;
  const long long v = static_cast<long long>(a.volume());
#pragma omp parallel for schedule(static)
  for (long long s = 0; s < v; ++s) r.set(s, Mat(a.matrix(s) * b.matrix(s)));
  return r;
}

void GaugeFrame::reproject() {
  const long long v = static_cast<long long>(volume());
#pragma omp parallel for schedule(static)
  for (long long s = 0; s < v; ++s) set(s, project_unitary(matrix(s)).matrix());
}

double GaugeFrame::max_unitarity_defect() const {
  double r = 0.0;
  for (std::size_t s = 0; s < volume(); ++s) r = std::max(r, at(s).unitarity_defect());
  return r;
}

double GaugeFrame::max_det_defect() const {
  double r = 0.0;
  for (std::size_t s = 0; s < volume(); ++s) r = std::max(r, at(s).det_defect());
  return r;
}

double GaugeFrame::max_distance(const GaugeFrame& o) const {
  double r = 0.0;
  for (std::size_t i = 0; i < data_.size(); ++i) r = std::max(r, std::abs(data_[i] - o.data_[i]));
  return r;
}

GaugeFrame& GaugeFrame::axpy(double a, const GaugeFrame& x) {
  if (!(grid_ == x.grid_) || n_ != x.n_) throw DimensionMismatch("frame axpy shape mismatch");
  const std::size_t m = data_.size();
  cplx* d = data_.data();
  const cplx* e = x.data_.data();
#pragma omp parallel for schedule(static)
  for (std::size_t i = 0; i < m; ++i) d[i] += a * e[i];
  return *this;
}

GaugeFrame frame_times(const GaugeFrame& U, const LatticeField& X) {
  if (!(U.grid() == X.grid()) || U.n() != X.n() || X.rank() != 1) throw DimensionMismatch("frame_times shape mismatch");
  GaugeFrame r(U.grid(), U.n());
  const long long v = static_cast<long long>(U.volume());
#pragma omp parallel for schedule(static)
  for (long long s = 0; s < v; ++s) r.set(s, Mat(U.matrix(s) * X.at(0, s).matrix()));
  return r;
}

GaugeFrame frame_exponential(const LatticeField& X) {
  if (X.rank() != 1) throw DimensionMismatch("frame_exponential expects a rank-1 field");
  GaugeFrame U(X.grid(), X.n());
  const long long v = static_cast<long long>(X.volume());
#pragma omp parallel for schedule(static)
  for (long long s = 0; s < v; ++s) U.set(s, exponential(X.at(0, s)));
  return U;
}

LatticeField conjugate_field(const GaugeFrame& U, const LatticeField& X) {
  if (!(U.grid() == X.grid()) || U.n() != X.n()) throw DimensionMismatch("conjugation shape mismatch");
  const SuBasis& basis = X.basis();
  const int dim = X.dim();
  const std::size_t v = X.volume();
  std::vector<double> ad(v * dim * dim);
  const long long vv = static_cast<long long>(v);
#pragma omp parallel for schedule(static)
  for (long long s = 0; s < vv; ++s) basis.adjoint_matrix(U.matrix(s), ad.data() + s * dim * dim);
  LatticeField out(X.grid(), X.n(), X.rank());
  for (int c = 0; c < X.rank(); ++c) kernels::adjoint_apply(v, dim, ad.data(), X.comp(c), out.comp(c));
  return out;
}

LatticeField right_quotient(const GaugeFrame& M, const GaugeFrame& U) {
  LatticeField out(U.grid(), U.n(), 1);
  const long long v = static_cast<long long>(U.volume());
#pragma omp parallel for schedule(static)
  for (long long s = 0; s < v; ++s)
    out.set(0, s, AlgebraElement::project(Mat(M.matrix(s) * U.matrix(s).adjoint())));
  return out;
}

LatticeField spatial_log_derivative(const GaugeFrame& U) {
  const Grid& g = U.grid();
  const int n = U.n();
  const int N = g.N;
  const std::size_t v = U.volume();
  const FftPlan& plan = FftPlan::get(N);
  const double k0 = 2.0 * std::numbers::pi / g.L;
  std::vector<double> kd(N);
  for (int i = 0; i < N; ++i) {
    const int m = i <= N / 2 ? i : i - N;
    kd[i] = (m == N / 2) ? 0.0 : k0 * m;
  }
  LatticeField out(g, n, 3);
  AlignedVector<cplx> spec(v), tmp(v);
  for (int axis = 0; axis < 3; ++axis) {
    GaugeFrame dU(g, n);
    for (int e = 0; e < n * n; ++e) {
      plan.c2c_forward(U.entry(e), spec.data());
      for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j)
          for (int l = 0; l < N; ++l) {
            const std::size_t q = (static_cast<std::size_t>(i) * N + j) * N + l;
            const int idx = axis == 0 ? i : (axis == 1 ? j : l);
            spec[q] *= cplx(0.0, kd[idx]);
          }
      plan.c2c_backward(spec.data(), dU.entry(e));
    }
    out.set_component(axis, right_quotient(dU, U));
  }
  return out;
}

LatticeField central_log_derivative(const GaugeFrame& U_plus, const GaugeFrame& U_minus, const GaugeFrame& U,
                                    double delta) {
  GaugeFrame d(U.grid(), U.n());
  const int nn = U.n() * U.n();
  const std::size_t v = U.volume();
  const double inv = 1.0 / (2.0 * delta);
  for (int e = 0; e < nn; ++e)
    for (std::size_t s = 0; s < v; ++s) d.entry(e)[s] = (U_plus.entry(e)[s] - U_minus.entry(e)[s]) * inv;
  return right_quotient(d, U);
}

FlowState gauge_apply(const GaugeFrame& U, const FlowState& state, const LatticeField* dtU_Uinv,
                      const LatticeField* dsU_Uinv) {
  FlowState out;
  out.t = state.t;
  out.s = state.s;
  out.gauge = GaugeTag::none;
  out.A = conjugate_field(U, state.A);
  out.A -= spatial_log_derivative(U);
  if (state.A0) {
    if (!dtU_Uinv) throw std::invalid_argument("gauge_apply: state carries A0 but d_0 U U^-1 was not supplied");
    LatticeField a0 = conjugate_field(U, *state.A0);
    a0 -= *dtU_Uinv;
    out.A0 = std::move(a0);
  }
  if (state.As) {
    if (!dsU_Uinv) throw std::invalid_argument("gauge_apply: state carries A_s but d_s U U^-1 was not supplied");
    LatticeField as = conjugate_field(U, *state.As);
    as -= *dsU_Uinv;
    out.As = std::move(as);
  }
  if (state.E) out.E = conjugate_field(U, *state.E);
  return out;
}

namespace {

// Coefficient field at one site as a matrix.
Mat algebra_matrix(const LatticeField& X, std::size_t site) { return X.at(0, site).matrix(); }

void rk4_group_step(GaugeFrame& U, const LatticeField& X0, const LatticeField& Xm, const LatticeField& X1, double h,
                    double& drift) {
  const long long v = static_cast<long long>(U.volume());
  double worst = 0.0;
#pragma omp parallel for schedule(static) reduction(max : worst)
  for (long long s = 0; s < v; ++s) {
    const Mat u = U.matrix(s);
    const Mat a0 = algebra_matrix(X0, s), am = algebra_matrix(Xm, s), a1 = algebra_matrix(X1, s);
    const Mat k1 = u * a0;
    const Mat k2 = (u + 0.5 * h * k1) * am;
    const Mat k3 = (u + 0.5 * h * k2) * am;
    const Mat k4 = (u + h * k3) * a1;
    const Mat next = u + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    worst = std::max(worst, GroupElement::unchecked(next).unitarity_defect());
    U.set(s, project_unitary(next).matrix());
  }
  drift = std::max(drift, worst);
}

void magnus_group_step(GaugeFrame& U, const LatticeField& Xg1, const LatticeField& Xg2, double h, double& drift) {
  const long long v = static_cast<long long>(U.volume());
  const double c = std::sqrt(3.0) / 12.0 * h * h;
  double worst = 0.0;
#pragma omp parallel for schedule(static) reduction(max : worst)
  for (long long s = 0; s < v; ++s) {
    const Mat a1 = algebra_matrix(Xg1, s), a2 = algebra_matrix(Xg2, s);
    const Mat omega = 0.5 * h * (a1 + a2) + c * (a1 * a2 - a2 * a1);
    const Mat next = U.matrix(s) * exponential(AlgebraElement::project(omega)).matrix();
    worst = std::max(worst, GroupElement::unchecked(next).unitarity_defect());
    U.set(s, project_unitary(next).matrix());
  }
  drift = std::max(drift, worst);
}

}  // namespace

std::vector<GaugeFrame> solve_group_ode(const FieldSeries& X, const GaugeFrame& U0, double p0, double p1,
                                        const GroupOdeOptions& opt, GroupOdeStats* stats) {
  if (X.size() == 0) throw std::invalid_argument("solve_group_ode: empty coefficient series");
  std::vector<double> nodes{p0};
  const double lo = std::min(p0, p1), hi = std::max(p0, p1);
  std::vector<double> inner;
  for (double p : X.param)
    if (p > lo && p < hi) inner.push_back(p);
  std::sort(inner.begin(), inner.end());
  if (p1 < p0) std::reverse(inner.begin(), inner.end());
  nodes.insert(nodes.end(), inner.begin(), inner.end());
  nodes.push_back(p1);

  std::vector<GaugeFrame> out;
  GaugeFrame U = U0;
  U.value = p0;
  out.push_back(U);
  GroupOdeStats st;
  const int sub = std::max(1, opt.substeps);
  const double g1 = 0.5 - std::sqrt(3.0) / 6.0, g2 = 0.5 + std::sqrt(3.0) / 6.0;
  for (std::size_t k = 0; k + 1 < nodes.size(); ++k) {
    const double a = nodes[k], b = nodes[k + 1];
    if (a == b) continue;
    const double h = (b - a) / sub;
    for (int j = 0; j < sub; ++j) {
      const double p = a + j * h;
      if (opt.method == GroupOdeMethod::rk4_project) {
        rk4_group_step(U, X.at(p), X.at(p + 0.5 * h), X.at(j + 1 == sub ? b : p + h), h, st.max_drift);
      } else {
        magnus_group_step(U, X.at(p + g1 * h), X.at(p + g2 * h), h, st.max_drift);
      }
      ++st.steps;
    }
    U.value = b;
    out.push_back(U);
  }
  if (stats) *stats = st;
  return out;
}

std::vector<GaugeFrame> solve_s_ode(const FieldSeries& As, const GaugeFrame& U0, double s0, double s1,
                                    const GroupOdeOptions& opt, GroupOdeStats* stats) {
  std::vector<GaugeFrame> r = solve_group_ode(As, U0, s0, s1, opt, stats);
  for (auto& f : r) f.param = 's';
  return r;
}

std::vector<GaugeFrame> solve_t_ode(const FieldSeries& A0, const GaugeFrame& V0, const GroupOdeOptions& opt,
                                    GroupOdeStats* stats) {
  if (A0.size() == 0) throw std::invalid_argument("solve_t_ode: empty series");
  const double t0 = V0.value;
  const double lo = *std::min_element(A0.param.begin(), A0.param.end());
  const double hi = *std::max_element(A0.param.begin(), A0.param.end());
  GroupOdeStats a, b;
  std::vector<GaugeFrame> back = solve_group_ode(A0, V0, t0, lo, opt, &a);
  std::vector<GaugeFrame> fwd = solve_group_ode(A0, V0, t0, hi, opt, &b);
  std::vector<GaugeFrame> out(back.rbegin(), back.rend());
  out.insert(out.end(), fwd.begin() + 1, fwd.end());
  for (auto& f : out) f.param = 't';
  if (stats) {
    stats->steps = a.steps + b.steps;
    stats->max_drift = std::max(a.max_drift, b.max_drift);
  }
  return out;
}

}  // namespace ymlab
