#include "ymlab/gauge_geometry.hpp"

#include "ymlab/kernels.hpp"
#include "ymlab/spectral.hpp"

#include <cmath>

namespace ymlab {

std::string to_string(GaugeTag tag) {
  switch (tag) {
    case GaugeTag::temporal: return "temporal";
    case GaugeTag::deturck: return "deturck";
    case GaugeTag::caloric: return "caloric";
    case GaugeTag::caloric_temporal: return "caloric_temporal";
    case GaugeTag::none: return "none";
  }
  return "none";
}

FlowState make_state(LatticeField A, double t, double s, GaugeTag gauge) {
  if (A.rank() != 3) throw DimensionMismatch("connection must have rank 3");
  FlowState st;
  st.A = std::move(A);
  st.t = t;
  st.s = s;
  st.gauge = gauge;
  return st;
}

namespace {

void require_connection(const LatticeField& A) {
  if (A.rank() != 3) throw DimensionMismatch("connection must have rank 3");
}

LatticeField all_derivatives(const LatticeField& f, Scheme scheme) {
  if (scheme == Scheme::spectral) return gradient_from_spectrum(to_spectral(f));
  LatticeField r(f.grid(), f.n(), 3 * f.rank());
  for (int c = 0; c < f.rank(); ++c) {
    const LatticeField fc = f.component(c);
    for (int axis = 0; axis < 3; ++axis) r.set_component(3 * c + axis, derivative(fc, axis, scheme));
  }
  return r;
}

}  // namespace

LatticeField curvature(const LatticeField& A, Scheme scheme) {
  require_connection(A);
  const LatticeField dA = all_derivatives(A, scheme);  // slot 3c + axis = d_axis A_c
  LatticeField F(A.grid(), A.n(), 3);
  const std::size_t block = static_cast<std::size_t>(A.dim()) * A.volume();
  const int pairs[3][2] = {{0, 1}, {0, 2}, {1, 2}};
  for (int p = 0; p < 3; ++p) {
    const int i = pairs[p][0], j = pairs[p][1];
    double* out = F.comp(p);
    kernels::axpy(block, 1.0, dA.comp(3 * j + i), out);
    kernels::axpy(block, -1.0, dA.comp(3 * i + j), out);
    bracket_add(F, p, A, i, A, j);
  }
  return F;
}

LatticeField curvature(const FlowState& state, Scheme scheme) { return curvature(state.A, scheme); }

LatticeField covariant_derivative(const LatticeField& A, const LatticeField& B, int axis, Scheme scheme) {
  require_connection(A);
  if (!(A.grid() == B.grid()) || A.n() != B.n()) throw DimensionMismatch("covariant derivative operand mismatch");
  LatticeField r(B.grid(), B.n(), B.rank());
  for (int c = 0; c < B.rank(); ++c) {
    r.set_component(c, derivative(B.component(c), axis, scheme));
    bracket_add(r, c, A, axis, B, c);
  }
  return r;
}

LatticeField covariant_derivative(const FlowState& state, const LatticeField& B, int axis, Scheme scheme) {
  return covariant_derivative(state.A, B, axis, scheme);
}

LatticeField covariant_gradient(const LatticeField& A, const LatticeField& B) {
  require_connection(A);
  LatticeField r = gradient_from_spectrum(to_spectral(B));
  for (int c = 0; c < B.rank(); ++c)
    for (int axis = 0; axis < 3; ++axis) bracket_add(r, 3 * c + axis, A, axis, B, c);
  return r;
}

LatticeField covariant_divergence(const LatticeField& A, const LatticeField& B) {
  require_connection(A);
  if (B.rank() != 3) throw DimensionMismatch("covariant divergence expects rank 3");
  const SpectralField s = to_spectral(B);
  SpectralField acc(B.grid(), B.n(), 1);
  for (int l = 0; l < 3; ++l) acc += spectral_derivative(s.component(l), l);
  LatticeField r = to_physical(acc);
  for (int l = 0; l < 3; ++l) bracket_add(r, 0, A, l, B, l);
  return r;
}

double magnetic_energy(const LatticeField& A) {
  const LatticeField F = curvature(A);
  return 0.5 * integral_inner(F, F);
}

double magnetic_energy(const FlowState& state) { return magnetic_energy(state.A); }

double conserved_energy(const LatticeField& A, const LatticeField& E) {
  require_connection(E);
  return 0.5 * integral_inner(E, E) + magnetic_energy(A);
}

LatticeField constraint_residual(const LatticeField& A, const LatticeField& E) { return covariant_divergence(A, E); }

namespace {

// -D^l D_l phi
LatticeField neg_cov_laplacian(const LatticeField& A, const LatticeField& phi) {
  LatticeField r = covariant_divergence(A, covariant_gradient(A, phi));
  r *= -1.0;
  return r;
}

// (-Laplacian)^{-1}, with the zero mode weighted by 1/k0^2 so the map stays positive.
LatticeField inverse_laplacian_preconditioner(const LatticeField& f) {
  SpectralField s = to_spectral(f);
  const Wavenumbers& w = Wavenumbers::get(f.grid());
  const double k0 = 2.0 * std::numbers::pi / f.grid().L;
  const std::size_t m = s.modes();
  const int rows = s.rank() * s.dim();
  for (int q = 0; q < rows; ++q) {
    cplx* d = s.data() + q * m;
    for (std::size_t p = 0; p < m; ++p) d[p] /= (w.ksq[p] > 0.0 ? w.ksq[p] : k0 * k0);
  }
  return to_physical(s);
}

}  // namespace

LatticeField constraint_project(const LatticeField& A, const LatticeField& F, double tol, ProjectionStats* stats,
                                int max_iterations) {
  require_connection(A);
  require_connection(F);
  const Grid& g = A.grid();
  auto l2 = [&](const LatticeField& f) { return std::sqrt(integral_inner(f, f)); };

  // Solve M phi = b with M = -D^l D_l, b = D^l F_l.
  const LatticeField b = covariant_divergence(A, F);
  LatticeField phi(g, A.n(), 1);
  LatticeField r = b;
  ProjectionStats st;
  st.initial_residual = l2(r);
  double res = st.initial_residual;
  int it = 0;
  while (res > tol && it < max_iterations) {
    // Restarted CG; the outer loop recomputes the true residual.
    LatticeField z = inverse_laplacian_preconditioner(r);
    LatticeField p = z;
    double rz = integral_inner(r, z);
    for (int inner = 0; inner < 200 && it < max_iterations; ++inner, ++it) {
      const LatticeField Mp = neg_cov_laplacian(A, p);
      const double pMp = integral_inner(p, Mp);
      if (!(pMp > 0.0) || !std::isfinite(pMp)) break;
      const double alpha = rz / pMp;
      phi.axpy(alpha, p);
      r.axpy(-alpha, Mp);
      if (l2(r) <= 0.1 * tol) {
        ++it;
        break;
      }
      z = inverse_laplacian_preconditioner(r);
      const double rz_new = integral_inner(r, z);
      p *= rz_new / rz;
      p += z;
      rz = rz_new;
    }
    r = b - neg_cov_laplacian(A, phi);
    const double next = l2(r);
    if (!std::isfinite(next)) break;
    if (next >= res && next > tol) {
      res = next;
      break;
    }
    res = next;
  }
  st.iterations = it;
  st.final_residual = res;
  LatticeField E = F;
  const LatticeField dphi = covariant_gradient(A, phi);
  E += dphi;
  st.dphi_l2 = l2(dphi);
  if (stats) *stats = st;
  if (!(res <= tol))
    throw DivergedError("constraint_project did not reach tolerance (residual " + std::to_string(res) + ")", res, it);
  return E;
}

std::pair<LatticeField, LatticeField> hodge_decompose(const LatticeField& A) {
  require_connection(A);
  const SpectralField s = to_spectral(A);
  const Wavenumbers& w = Wavenumbers::get(A.grid());
  SpectralField cf(A.grid(), A.n(), 3);
  const std::size_t m = s.modes();
  const int dim = A.dim();
  for (std::size_t p = 0; p < m; ++p) {
    const double k[3] = {w.kd[0][w.axis_index(p, 0)], w.kd[1][w.axis_index(p, 1)], w.kd[2][w.axis_index(p, 2)]};
    const double k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
    if (k2 == 0.0) continue;
    for (int a = 0; a < dim; ++a) {
      const cplx kdotA = k[0] * s.coeff(0, a)[p] + k[1] * s.coeff(1, a)[p] + k[2] * s.coeff(2, a)[p];
      for (int i = 0; i < 3; ++i) cf.coeff(i, a)[p] = k[i] * kdotA / k2;
    }
  }
  LatticeField Acf = to_physical(cf);
  LatticeField Adf = A - Acf;
  return {std::move(Acf), std::move(Adf)};
}

}  // namespace ymlab
