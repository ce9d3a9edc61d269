#include "ymlab/diagnostics.hpp"

#include "ymlab/spectral.hpp"
#include "ymlab/stencil.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <tuple>

namespace ymlab {

namespace {

using Fields = std::vector<LatticeField>;

double l2(const LatticeField& f) { return lp_norm(f, 2.0); }

// Rank-3 field with component l equal to F_il.
LatticeField row(const LatticeField& F, int i) {
  LatticeField r(F.grid(), F.n(), 3);
  for (int l = 0; l < 3; ++l)
    if (l != i) {
      const PairSlot ps = pair_slot(i, l);
      LatticeField c = F.component(ps.slot);
      c *= ps.sign;
      r.set_component(l, c);
    }
  return r;
}

// sum_l D_l D_l X
LatticeField covariant_laplacian(const LatticeField& A, const LatticeField& X) {
  LatticeField r(X.grid(), X.n(), X.rank());
  for (int l = 0; l < 3; ++l) r += covariant_derivative(A, covariant_derivative(A, X, l), l);
  return r;
}

// sum_l [X_l, Y_l] for rank-3 X, Y.
LatticeField bracket_sum(const LatticeField& X, const LatticeField& Y) {
  LatticeField r(X.grid(), X.n(), 1);
  for (int l = 0; l < 3; ++l) bracket_add(r, 0, X, l, Y, l);
  return r;
}

// Fields of one full level on every slice.
struct Level {
  const HpymFamily* fam;
  double s;
  Fields A, A0, As, B, F, Fi0;

  Level(const HpymFamily& f, const FamilyLevel& lv) : fam(&f), s(lv.s) {
    if (!lv.full) throw std::invalid_argument("level does not hold every slice");
    for (std::size_t k = 0; k < f.slice_count(); ++k) {
      const SliceRecord& r = lv.slices[k];
      A.push_back(r.A);
      A0.push_back(r.A0);
      As.push_back(divergence(r.A));
      B.push_back(r.B);
      F.push_back(curvature(r.A));
    }
    const Fields dA = derivative_at_nodes(f.t, A);
    for (std::size_t k = 0; k < A.size(); ++k) {
      LatticeField fi0 = gradient(A0[k]) - dA[k];
      for (int i = 0; i < 3; ++i) bracket_add(fi0, i, A[k], i, A0[k], 0);
      Fi0.push_back(std::move(fi0));
    }
  }
  std::size_t c() const { return fam->center; }
  std::size_t size() const { return A.size(); }

  // D_0 X at every slice.
  Fields d0_all(const Fields& X) const {
    Fields d = derivative_at_nodes(fam->t, X);
    for (std::size_t k = 0; k < d.size(); ++k)
      for (int q = 0; q < X[k].rank(); ++q) bracket_add(d[k], q, A0[k], 0, X[k], q);
    return d;
  }
  // D_0 X at the central slice.
  LatticeField d0(const Fields& X) const {
    LatticeField d = combine(fd_weights(fam->t, fam->t[c()], 1), X);
    for (int q = 0; q < X[c()].rank(); ++q) bracket_add(d, q, A0[c()], 0, X[c()], q);
    return d;
  }
  // D_mu at the central slice, mu = 0 for time and 1..3 for space.
  LatticeField D(int mu, const Fields& X) const {
    return mu == 0 ? d0(X) : covariant_derivative(A[c()], X[c()], mu - 1);
  }

  // F_ab on every slice, a, b in 0..3.
  Fields Fst(int a, int b) const {
    Fields out;
    for (std::size_t k = 0; k < size(); ++k) {
      LatticeField r(A[k].grid(), A[k].n(), 1);
      if (a != b) {
        if (a > 0 && b > 0) {
          const PairSlot ps = pair_slot(a - 1, b - 1);
          r = F[k].component(ps.slot);
          r *= ps.sign;
        } else if (b == 0) {
          r = Fi0[k].component(a - 1);
        } else {
          r = Fi0[k].component(b - 1);
          r *= -1.0;
        }
      }
      out.push_back(std::move(r));
    }
    return out;
  }

  // Tension on every slice: (w_i, w_0).
  std::pair<Fields, Fields> tension_all() const {
    const Fields dF = d0_all(Fi0);
    Fields w, w0;
    for (std::size_t k = 0; k < size(); ++k) {
      LatticeField wi(A[k].grid(), A[k].n(), 3);
      for (int i = 0; i < 3; ++i) {
        LatticeField x = covariant_divergence(A[k], row(F[k], i));
        x -= dF[k].component(i);
        wi.set_component(i, x);
      }
      w.push_back(std::move(wi));
      LatticeField z = covariant_divergence(A[k], Fi0[k]);
      z *= -1.0;
      w0.push_back(std::move(z));
    }
    return {std::move(w), std::move(w0)};
  }

  std::pair<LatticeField, LatticeField> tension_center() const {
    const LatticeField dF = d0(Fi0);
    const std::size_t k = c();
    LatticeField wi(A[k].grid(), A[k].n(), 3);
    for (int i = 0; i < 3; ++i) {
      LatticeField x = covariant_divergence(A[k], row(F[k], i));
      x -= dF.component(i);
      wi.set_component(i, x);
    }
    LatticeField z = covariant_divergence(A[k], Fi0[k]);
    z *= -1.0;
    return {std::move(wi), std::move(z)};
  }
};

// Residual and term norms aggregated over components by root sum of squares.
struct Accumulator {
  double res2 = 0.0;
  std::vector<double> term2;

  void add(const LatticeField& residual, const std::vector<const LatticeField*>& terms) {
    res2 += std::pow(l2(residual), 2);
    if (term2.size() < terms.size()) term2.resize(terms.size(), 0.0);
    for (std::size_t j = 0; j < terms.size(); ++j) term2[j] += std::pow(l2(*terms[j]), 2);
  }
  IdentityReport report(const std::string& name, double t, double s) const {
    IdentityReport r;
    r.name = name;
    r.t = t;
    r.s = s;
    r.residual_l2 = std::sqrt(res2);
    for (double x : term2) r.reference_scale = std::max(r.reference_scale, std::sqrt(x));
    r.relative = r.reference_scale > 0.0 ? r.residual_l2 / r.reference_scale : 0.0;
    return r;
  }
};

const char* const kIdentityNames[] = {"covariant_coulomb", "d0_fs0",        "parabolic_f",
                                      "parabolic_w",       "wave_fs",       "bianchi"};

double spacetime_sign(int mu) { return mu == 0 ? -1.0 : 1.0; }

}  // namespace

TensionField tension_field(const HpymFamily& fam, double s) {
  const FamilyLevel& lv = fam.level_at(s);
  const Level L(fam, lv);
  const std::size_t c = L.c();
  TensionField out;
  out.t = fam.t[c];
  out.s = lv.s;
  std::tie(out.w, out.w0) = L.tension_center();
  out.w_l2 = std::hypot(l2(out.w), l2(out.w0));

  const std::vector<double> wc = fd_weights(fam.t, fam.t[c], 1);
  double d2 = std::pow(l2(combine(wc, L.F)), 2) + std::pow(l2(combine(wc, L.Fi0)), 2);
  for (int a = 0; a < 3; ++a) d2 += std::pow(l2(derivative(L.F[c], a)), 2) + std::pow(l2(derivative(L.Fi0[c], a)), 2);
  out.dF_l2 = std::sqrt(d2);
  out.relative = out.dF_l2 > 0.0 ? out.w_l2 / out.dF_l2 : 0.0;

  const LatticeField Fs0 = covariant_divergence(L.A[c], L.B[c]);
  out.Fs0_l2 = l2(Fs0);
  out.w0_plus_Fs0 = l2(out.w0 + Fs0);
  // Floor: the larger of the two terms of D^l B_l, which cancel when the constraint holds.
  const LatticeField divB = divergence(L.B[c]);
  out.Fs0_term_scale = std::max(l2(divB), l2(Fs0 - divB));
  const double ref = std::max({l2(out.w0), out.Fs0_l2, out.Fs0_term_scale, std::numeric_limits<double>::min()});
  out.w0_relative = out.w0_plus_Fs0 / ref;
  return out;
}

std::vector<IdentityReport> covariant_identity_suite(const HpymFamily& fam) {
  std::vector<IdentityReport> out;
  auto skip_all = [&](double s, const std::string& why) {
    for (const char* name : kIdentityNames) {
      IdentityReport r;
      r.name = name;
      r.t = fam.t.empty() ? 0.0 : fam.t[fam.center];
      r.s = s;
      r.skipped = true;
      r.note = why;
      out.push_back(r);
    }
  };
  if (fam.slice_count() < 3) {
    skip_all(0.0, "fewer than 3 time slices");
    return out;
  }
  if (fam.samples.empty()) {
    skip_all(0.0, "no s-clusters recorded");
    return out;
  }

  for (double s0 : fam.samples) {
    std::vector<double> nodes;
    std::vector<const FamilyLevel*> lvs;
    bool ok = true;
    for (int j = -fam.half_width; j <= fam.half_width; ++j) {
      const int i = fam.find_level(s0 + j * fam.ds_cluster);
      if (i < 0 || !fam.levels[i].full) {
        ok = false;
        break;
      }
      nodes.push_back(fam.levels[i].s);
      lvs.push_back(&fam.levels[i]);
    }
    if (!ok) {
      skip_all(s0, "s-cluster incomplete");
      continue;
    }
    const std::size_t mid = static_cast<std::size_t>(fam.half_width);
    std::vector<Level> levels;
    for (const FamilyLevel* lv : lvs) levels.emplace_back(fam, *lv);
    const Level& L = levels[mid];
    const std::size_t c = L.c();
    const std::size_t m = L.size();
    const double t0 = fam.t[c];
    const std::vector<double> ws = fd_weights(nodes, s0, 1);

    // s-derivative of slice-k data across the cluster.
    auto ds_raw = [&](const std::function<const LatticeField&(const Level&)>& get) {
      std::vector<const LatticeField*> f;
      for (const Level& lv : levels) f.push_back(&get(lv));
      return combine(ws, f);
    };
    // F_si, F_s0 on every slice of the center level.
    Fields Fsi, Fs0;
    {
      const Fields dAs = derivative_at_nodes(fam.t, L.As);
      for (std::size_t k = 0; k < m; ++k) {
        LatticeField fsi = ds_raw([k](const Level& lv) -> const LatticeField& { return lv.A[k]; });
        fsi -= gradient(L.As[k]);
        for (int i = 0; i < 3; ++i) bracket_add(fsi, i, L.As[k], 0, L.A[k], i);
        Fsi.push_back(std::move(fsi));
        LatticeField fs0 = ds_raw([k](const Level& lv) -> const LatticeField& { return lv.A0[k]; });
        fs0 -= dAs[k];
        bracket_add(fs0, 0, L.As[k], 0, L.A0[k], 0);
        Fs0.push_back(std::move(fs0));
      }
    }
    // F_{s nu} on every slice, nu in 0..3.
    auto Fs = [&](int nu) {
      Fields r;
      for (std::size_t k = 0; k < m; ++k) r.push_back(nu == 0 ? Fs0[k] : Fsi[k].component(nu - 1));
      return r;
    };
    // D_s at the central slice of a field known on the central slice of each cluster level.
    auto Ds = [&](const std::function<LatticeField(const Level&)>& get) {
      Fields f;
      for (const Level& lv : levels) f.push_back(get(lv));
      LatticeField d = combine(ws, f);
      for (int q = 0; q < f[mid].rank(); ++q) bracket_add(d, q, L.As[c], 0, f[mid], q);
      return d;
    };

    const auto [w_all, w0_all] = L.tension_all();
    auto w_comp = [&](int nu, std::size_t k) { return nu == 0 ? w0_all[k] : w_all[k].component(nu - 1); };
    std::vector<std::pair<LatticeField, LatticeField>> w_lv;  // central-slice tension per cluster level
    for (std::size_t j = 0; j < levels.size(); ++j) w_lv.push_back(j == mid ? std::make_pair(w_all[c], w0_all[c]) : levels[j].tension_center());
    const LatticeField& Ac = L.A[c];
    const LatticeField& wc = w_all[c];

    // covariant Coulomb: D^l F_sl = 0
    {
      const LatticeField R = covariant_divergence(Ac, Fsi[c]);
      const LatticeField t1 = divergence(Fsi[c]);
      const LatticeField t2 = bracket_sum(Ac, Fsi[c]);
      Accumulator acc;
      acc.add(R, {&t1, &t2});
      out.push_back(acc.report(kIdentityNames[0], t0, s0));
    }
    // D_0 F_s0 = -D^l w_l
    {
      const LatticeField t1 = L.d0(Fs0);
      const LatticeField t2 = covariant_divergence(Ac, wc);
      Accumulator acc;
      acc.add(t1 + t2, {&t1, &t2});
      out.push_back(acc.report(kIdentityNames[1], t0, s0));
    }
    // D_s F_ab = D^l D_l F_ab - 2 [F_a^l, F_bl]
    {
      Accumulator acc;
      for (int a = 0; a < 3; ++a)
        for (int b = a + 1; b < 3; ++b) {
          const PairSlot ps = pair_slot(a, b);
          const LatticeField t1 = Ds([&](const Level& lv) { return lv.F[c].component(ps.slot); });
          const LatticeField Fab = L.F[c].component(ps.slot);
          const LatticeField t2 = covariant_laplacian(Ac, Fab);
          LatticeField t3 = bracket_sum(row(L.F[c], a), row(L.F[c], b));
          t3 *= 2.0;
          acc.add(t1 - t2 + t3, {&t1, &t2, &t3});
        }
      out.push_back(acc.report(kIdentityNames[2], t0, s0));
    }

    // 2 [F^{mu l}, D_mu F_nu l + D_l F_nu mu] summed over mu in 0..3 and spatial l.
    std::vector<Fields> Fst(16);
    auto FF = [&](int a, int b) -> const Fields& {
      Fields& f = Fst[4 * a + b];
      if (f.empty()) f = L.Fst(a, b);
      return f;
    };
    auto cross_term = [&](int nu) {
      LatticeField r(Ac.grid(), Ac.n(), 1);
      for (int mu = 0; mu < 4; ++mu)
        for (int l = 1; l < 4; ++l) {
          if (mu == l) continue;
          LatticeField raised = FF(mu, l)[c];
          raised *= spacetime_sign(mu);
          const LatticeField inner = L.D(mu, FF(nu, l)) + L.D(l, FF(nu, mu));
          bracket_add(r, 0, raised, 0, inner, 0, 2.0);
        }
      return r;
    };
    // 2 [F_nu^l, w_l]
    auto fw_term = [&](int nu) {
      LatticeField r(Ac.grid(), Ac.n(), 1);
      for (int l = 1; l < 4; ++l) bracket_add(r, 0, FF(nu, l)[c], 0, wc, l - 1, 2.0);
      return r;
    };

    // D_s w_nu = D^l D_l w_nu + 2 [F_nu^l, w_l] + 2 [F^{mu l}, D_mu F_nu l + D_l F_nu mu]
    {
      Accumulator acc;
      for (int nu = 0; nu < 4; ++nu) {
        std::size_t j = 0;
        const LatticeField t1 = Ds([&](const Level&) {
          const auto& p = w_lv[j++];
          return nu == 0 ? p.second : p.first.component(nu - 1);
        });
        const LatticeField t2 = covariant_laplacian(Ac, w_comp(nu, c));
        const LatticeField t3 = fw_term(nu);
        const LatticeField t4 = cross_term(nu);
        acc.add(t1 - t2 - t3 - t4, {&t1, &t2, &t3, &t4});
      }
      out.push_back(acc.report(kIdentityNames[3], t0, s0));
    }
    // D^mu D_mu F_s nu = 2 [F_s^mu, F_nu mu] - 2 [F^{mu l}, ...] - D^l D_l w_nu + D_nu D^l w_l - 2 [F_nu^l, w_l]
    if (m < 5) {
      IdentityReport r;
      r.name = kIdentityNames[4];
      r.t = t0;
      r.s = s0;
      r.skipped = true;
      r.note = "needs 5 time slices (third time derivatives of A)";
      out.push_back(r);
    } else {
      Fields divw;
      for (std::size_t k = 0; k < m; ++k) divw.push_back(covariant_divergence(L.A[k], w_all[k]));
      Accumulator acc;
      for (int nu = 0; nu < 4; ++nu) {
        const Fields fs = Fs(nu);
        LatticeField t1 = L.d0(L.d0_all(fs));
        t1 *= -1.0;
        const LatticeField t2 = covariant_laplacian(Ac, fs[c]);
        LatticeField t3(Ac.grid(), Ac.n(), 1);
        for (int mu = 0; mu < 4; ++mu) {
          if (mu == nu) continue;
          const LatticeField fsm = Fs(mu)[c];
          bracket_add(t3, 0, fsm, 0, FF(nu, mu)[c], 0, 2.0 * spacetime_sign(mu));
        }
        LatticeField t4 = cross_term(nu);
        t4 *= -1.0;
        LatticeField t5 = covariant_laplacian(Ac, w_comp(nu, c));
        t5 *= -1.0;
        const LatticeField t6 = L.D(nu, divw);
        LatticeField t7 = fw_term(nu);
        t7 *= -1.0;
        const LatticeField R = t1 + t2 - t3 - t4 - t5 - t6 - t7;
        acc.add(R, {&t1, &t2, &t3, &t4, &t5, &t6, &t7});
      }
      out.push_back(acc.report(kIdentityNames[4], t0, s0));
    }
    // Bianchi: D_a F_bc + D_b F_ca + D_c F_ab = 0 over indices 0..3 (spacetime) and 4 (s).
    {
      auto F5 = [&](int a, int b) -> Fields {
        if (a < 4 && b < 4) return FF(a, b);
        if (a == 4 && b == 4) return Fields(m, LatticeField(Ac.grid(), Ac.n(), 1));
        Fields f = a == 4 ? Fs(b) : Fs(a);
        if (b == 4)
          for (auto& x : f) x *= -1.0;
        return f;
      };
      auto D5 = [&](int a, int b, int cc) {
        if (a < 4) return L.D(a, F5(b, cc));
        return Ds([&](const Level& lv) {
          const Fields f = lv.Fst(b, cc);
          return f[c];
        });
      };
      Accumulator acc;
      for (int a = 0; a < 5; ++a)
        for (int b = a + 1; b < 5; ++b)
          for (int cc = b + 1; cc < 5; ++cc) {
            const LatticeField t1 = D5(a, b, cc), t2 = D5(b, cc, a), t3 = D5(cc, a, b);
            acc.add(t1 + t2 + t3, {&t1, &t2, &t3});
          }
      out.push_back(acc.report(kIdentityNames[5], t0, s0));
    }
  }
  return out;
}

double BaseNorm::degree() const { return 3.0 / q - k; }

double BaseNorm::operator()(const LatticeField& f) const {
  if (k < 0) throw std::invalid_argument("BaseNorm: negative derivative count");
  if (q == 2.0) return sobolev_norm(f, k);
  LatticeField g = f;
  for (int j = 0; j < k; ++j) g = gradient_from_spectrum(to_spectral(g));
  return lp_norm(g, q);
}

double pnorm(const FieldSeries& f, double ell, double p, const BaseNorm& base) {
  if (!(p >= 1.0)) throw std::invalid_argument("pnorm: p must be >= 1");
  std::vector<double> u, g;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double s = f.param[i];
    if (!(s > 0.0)) continue;
    u.push_back(std::log(s));
    g.push_back(std::pow(s, ell - 0.5 * base.degree()) * base(f.fields[i]));
  }
  if (g.empty()) return 0.0;
  if (std::isinf(p)) return *std::max_element(g.begin(), g.end());
  std::vector<double> gp(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) gp[i] = std::pow(g[i], p);
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < g.size(); ++i) total += 0.5 * (gp[i] + gp[i + 1]) * (u[i + 1] - u[i]);
  // Power-law continuation of the integrand below the first sample.
  if (g.size() >= 2 && gp[0] > 0.0 && gp[1] > 0.0) {
    const double beta = (std::log(gp[1]) - std::log(gp[0])) / (u[1] - u[0]);
    if (beta > 0.0) total += gp[0] / beta;
  }
  return std::pow(total, 1.0 / p);
}

double pnorm(const Trajectory& traj, double ell, double p, const BaseNorm& base) {
  FieldSeries f;
  for (const FlowState& st : traj.states) f.push(st.s, st.A);
  return pnorm(f, ell, p, base);
}

namespace {

LatticeField curl(const LatticeField& A) {
  LatticeField r(A.grid(), A.n(), 3);
  for (int i = 0; i < 3; ++i) {
    const int j = (i + 1) % 3, k = (i + 2) % 3;
    LatticeField x = derivative(A.component(k), j);
    x -= derivative(A.component(j), k);
    r.set_component(i, x);
  }
  return r;
}

double sup_components(const LatticeField& f, const std::function<double(const LatticeField&)>& norm) {
  double r = 0.0;
  for (int i = 0; i < f.rank(); ++i) r = std::max(r, norm(f.component(i)));
  return r;
}

}  // namespace

QuantityMeters quantity_meters(const HpymFamily& fam, const CaloricTemporal* ct) {
  QuantityMeters out;
  out.gauge = ct ? "caloric_temporal" : "deturck";
  const std::size_t c = fam.center;
  FieldSeries Fsi[3], Fs0;
  for (const FamilyLevel& lv : fam.levels) {
    const SliceRecord& r = fam.record(lv, c);
    LatticeField fsi = caloric_rhs(make_state(r.A));
    LatticeField fs0 = covariant_divergence(r.A, r.B);
    if (ct) {
      const GaugeFrame U = ct->frame(fam, lv, c);
      fsi = conjugate_field(U, fsi);
      fs0 = conjugate_field(U, fs0);
    }
    for (int i = 0; i < 3; ++i) Fsi[i].push(lv.s, fsi.component(i));
    Fs0.push(lv.s, std::move(fs0));
    if (lv.s > 0.0) ++out.samples;
  }
  const double inf = std::numeric_limits<double>::infinity();
  for (int k = 1; k <= 4; ++k) {
    double best = 0.0;
    for (int i = 0; i < 3; ++i)
      best = std::max(best, pnorm(Fsi[i], 1.25, inf, BaseNorm::hdot(k)) + pnorm(Fsi[i], 1.25, 2.0, BaseNorm::hdot(k)));
    out.F += best;
  }
  for (int k = 1; k <= 3; ++k)
    out.E += pnorm(Fs0, 1.0, inf, BaseNorm::hdot(k - 1)) + pnorm(Fs0, 1.0, 2.0, BaseNorm::hdot(k));

  const FamilyLevel& end = fam.levels.back();
  Fields Abar, curls;
  for (std::size_t k = 0; k < fam.slice_count(); ++k) {
    Abar.push_back(ct ? ct->transform_A(fam, end, k) : fam.record(end, k).A);
    curls.push_back(curl(Abar.back()));
  }
  auto hk = [](int k) { return [k](const LatticeField& f) { return sobolev_norm(f, k); }; };
  out.A_bar = sup_components(Abar[c], hk(4)) +
              sup_components(combine(fd_weights(fam.t, fam.t[c], 1), curls), hk(2));
  for (int k = 1; k <= 3; ++k) out.A_bar += sup_components(Abar[c], hk(k));

  if (ct) {
    const FamilyLevel& start = fam.levels.front();
    const GaugeFrame U = ct->frame(fam, start, c);
    LatticeField a = central_log_derivative(ct->frame(fam, start, c + 1), ct->frame(fam, start, c - 1), U,
                                            fam.dt_slice());
    a *= -1.0;
    const LatticeField da = gradient(a);
    const LatticeField dda = gradient_from_spectrum(to_spectral(da));
    out.A0 = lp_norm(a, 3.0) + l2(da) + lp_norm(a, inf) + lp_norm(da, 3.0) + l2(dda);
  }
  return out;
}

WeightFit fit_power_law(const std::string& name, const std::vector<double>& s, const std::vector<double>& y) {
  WeightFit fit;
  fit.name = name;
  std::vector<double> x, z;
  for (std::size_t i = 0; i < s.size() && i < y.size(); ++i)
    if (s[i] > 0.0 && y[i] > 0.0 && std::isfinite(y[i])) {
      x.push_back(std::log(s[i]));
      z.push_back(std::log(y[i]));
    }
  fit.points = static_cast<int>(x.size());
  if (x.size() < 2) {
    fit.low_fit = true;
    return fit;
  }
  const double n = static_cast<double>(x.size());
  double mx = 0.0, mz = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i] / n;
    mz += z[i] / n;
  }
  double sxx = 0.0, sxz = 0.0, szz = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxz += (x[i] - mx) * (z[i] - mz);
    szz += (z[i] - mz) * (z[i] - mz);
  }
  fit.exponent = sxx > 0.0 ? sxz / sxx : 0.0;
  fit.prefactor = std::exp(mz - fit.exponent * mx);
  double res = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) res += std::pow(z[i] - mz - fit.exponent * (x[i] - mx), 2);
  fit.r2 = szz <= 1e-24 * std::max(1.0, mz * mz) ? 1.0 : 1.0 - res / szz;
  fit.low_fit = fit.r2 < 0.9 || x.size() < 3;
  return fit;
}

std::vector<WeightFit> associated_weight_report(const Trajectory& traj, double s_min, double s_max) {
  std::vector<double> s, a, fs, da, dda;
  for (const FlowState& st : traj.states) {
    if (st.s < s_min || st.s > s_max) continue;
    s.push_back(st.s);
    a.push_back(lp_norm(st.A, std::numeric_limits<double>::infinity()));
    fs.push_back(lp_norm(caloric_rhs(make_state(st.A)), std::numeric_limits<double>::infinity()));
    da.push_back(sobolev_norm(st.A, 1));
    dda.push_back(sobolev_norm(st.A, 2));
  }
  return {fit_power_law("A", s, a), fit_power_law("F_s", s, fs), fit_power_law("dA", s, da),
          fit_power_law("d2A", s, dda)};
}

std::vector<WeightFit> associated_weight_report(const HpymFamily& fam, double s_min, double s_max) {
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> s, a, fs, w0, a0;
  for (const FamilyLevel& lv : fam.levels) {
    if (lv.s < s_min || lv.s > s_max) continue;
    const SliceRecord& r = fam.record(lv, fam.center);
    s.push_back(lv.s);
    a.push_back(lp_norm(r.A, inf));
    fs.push_back(lp_norm(caloric_rhs(make_state(r.A)), inf));
    w0.push_back(lp_norm(covariant_divergence(r.A, r.B), inf));
    a0.push_back(lp_norm(r.A0, inf));
  }
  return {fit_power_law("A", s, a), fit_power_law("F_s", s, fs), fit_power_law("w_0", s, w0),
          fit_power_law("A_0", s, a0)};
}

}  // namespace ymlab
