#include "support.hpp"
#include "ymlab/data.hpp"
#include "ymlab/diagnostics.hpp"

#include <doctest.h>

#include <limits>

using namespace ymlab;
using ymlab::testing::l2;
using ymlab::testing::sine_field;

namespace {

const double kTwoPi = 2.0 * std::numbers::pi;
const double kInf = std::numeric_limits<double>::infinity();

FamilyConfig suite_config(double s_end, double ds, double sample, double ds_cluster) {
  FamilyConfig fc;
  fc.flow.scheme = ParabolicScheme::if_rk4;
  fc.flow.s_end = s_end;
  fc.flow.ds = ds;
  fc.sample_s = {sample};
  fc.ds_cluster = ds_cluster;
  fc.cluster_half_width = 2;
  return fc;
}

// Abelian data with a gradient part (so A_s != 0) and a divergence-free E.
InitialData abelian_data(const Grid& g) {
  const AlgebraElement t3 = i_sigma(3);
  InitialData d{LatticeField(g, 2, 3), LatticeField(g, 2, 3)};
  d.A.set_component(0, sine_field(g, t3, 0, 1, 0.3) + sine_field(g, t3, 1, 1, 0.2));
  d.A.set_component(1, sine_field(g, t3, 2, 2, 0.1, true));
  d.E.set_component(2, sine_field(g, t3, 0, 1, 0.2, true));
  d.E.set_component(0, sine_field(g, t3, 1, 2, 0.1));
  return d;
}

HpymFamily evolved_family(const Grid& g, const InitialData& d, double dt_slice, const FamilyConfig& fc) {
  HyperbolicConfig hc;
  hc.dt = g.h() / 8;
  return extend_dynamic(temporal_slices(d.A, d.E, 0.0, 0.0, dt_slice, 2, hc), fc);
}

}  // namespace

TEST_CASE("zero family: identities, tension and meters vanish") {
  const Grid g(8, kTwoPi);
  std::vector<FlowState> sl;
  for (int k = -2; k <= 2; ++k) {
    FlowState st = make_state(LatticeField(g, 2, 3), 0.1 * k);
    st.E = LatticeField(g, 2, 3);
    sl.push_back(st);
  }
  const HpymFamily fam = extend_dynamic(sl, suite_config(0.5, 0.05, 0.25, 0.01));
  const auto rep = covariant_identity_suite(fam);
  CHECK(rep.size() == 6);
  for (const auto& r : rep) {
    CHECK_FALSE(r.skipped);
    CHECK(r.residual_l2 == 0.0);
    CHECK(r.relative == 0.0);
  }
  const TensionField tf = tension_field(fam, 0.0);
  CHECK(tf.w_l2 == 0.0);
  CHECK(tf.relative == 0.0);
  CHECK(tf.w0_relative == 0.0);
  const QuantityMeters qm = quantity_meters(fam);
  CHECK(qm.F == 0.0);
  CHECK(qm.E == 0.0);
  CHECK(qm.A_bar == 0.0);
  CHECK(qm.A0 == 0.0);
  const QuantityMeters qc = quantity_meters(fam, nullptr);
  CHECK(qc.gauge == qm.gauge);
}

TEST_CASE("abelian family satisfies every identity") {
  const Grid g(16, kTwoPi);
  // w holds second time derivatives, so a wide slice spacing keeps round-off below 1e-9.
  const HpymFamily fam = evolved_family(g, abelian_data(g), 0.05, suite_config(0.5, 0.05, 0.25, 1e-3));
  const auto rep = covariant_identity_suite(fam);
  REQUIRE(rep.size() == 6);
  for (const auto& r : rep) {
    INFO(r.name << " residual " << r.residual_l2 << " scale " << r.reference_scale);
    CHECK_FALSE(r.skipped);
    // Abelian waves have w = 0 and D^l F_sl = 0 termwise; the other identities have O(1) terms.
    if (r.name == "parabolic_f" || r.name == "wave_fs" || r.name == "bianchi") CHECK(r.reference_scale > 1.0);
    CHECK(r.residual_l2 < 1e-9);
    CHECK(r.s == 0.25);
  }
  const TensionField tf = tension_field(fam, 0.25);
  CHECK(tf.w0_plus_Fs0 < 1e-9);
}

TEST_CASE("nonabelian family: small identity residuals and vanishing tension at s = 0") {
  const Grid g(16, kTwoPi);
  DataSpec spec;
  spec.max_mode = 2;
  const HpymFamily fam = evolved_family(g, generate_data(g, 2, spec), g.h() / 8, suite_config(0.2, 0.02, 0.1, 0.01));
  for (const auto& r : covariant_identity_suite(fam)) {
    INFO(r.name << " relative " << r.relative);
    CHECK_FALSE(r.skipped);
    CHECK(r.reference_scale > 0.0);
    CHECK(r.relative < 2e-2);
  }
  const TensionField t0 = tension_field(fam, 0.0);
  CHECK(t0.relative < 1e-3);
  CHECK(t0.w0_relative < 1e-4);
  CHECK(t0.dF_l2 > 1.0);
  // Away from s = 0 the tension is a genuine O(1) quantity.
  const TensionField t1 = tension_field(fam, 0.2);
  CHECK(t1.relative > 1e-3);
  CHECK(t1.w0_relative < 1e-2);
  CHECK_THROWS_AS(tension_field(fam, 0.123), std::out_of_range);
}

TEST_CASE("identity suite skips what its stencils cannot resolve") {
  const Grid g(8, kTwoPi);
  std::vector<FlowState> sl;
  for (int k = -1; k <= 1; ++k) {
    FlowState st = make_state(LatticeField(g, 2, 3), 0.1 * k);
    st.E = LatticeField(g, 2, 3);
    sl.push_back(st);
  }
  FamilyConfig fc = suite_config(0.5, 0.05, 0.25, 0.01);
  fc.cluster_half_width = 1;
  auto rep = covariant_identity_suite(extend_dynamic(sl, fc));
  int skipped = 0;
  for (const auto& r : rep)
    if (r.skipped) {
      ++skipped;
      CHECK(r.name == "wave_fs");
      CHECK_FALSE(r.note.empty());
    }
  CHECK(skipped == 1);
  fc.sample_s.clear();
  rep = covariant_identity_suite(extend_dynamic(sl, fc));
  CHECK(rep.size() == 6);
  for (const auto& r : rep) CHECK(r.skipped);
}

TEST_CASE("p-normalized norms") {
  const Grid g(4, kTwoPi);
  LatticeField f(g, 2, 1);
  for (std::size_t x = 0; x < g.volume(); ++x) f.set(0, x, i_sigma(1));
  const double base = BaseNorm::lebesgue(2)(f);
  CHECK(base == doctest::Approx(l2(f)));
  CHECK(BaseNorm::lebesgue(2).degree() == 1.5);
  CHECK(BaseNorm::hdot(1).degree() == 0.5);
  CHECK(BaseNorm::hdot(1)(f) == 0.0);

  // Constant f: the integrand is s^{ell - 3/4} ||f||, so the p-th power integrates to ||f||^p / (alpha p).
  FieldSeries series;
  const int n = 4001;
  for (int i = 0; i < n; ++i) series.push(std::pow(10.0, -6.0 + 6.0 * i / (n - 1)), f);
  const double ell = 1.25, alpha = ell - 0.75;
  for (double p : {1.0, 2.0}) {
    const double exact = base * std::pow(1.0 / (alpha * p), 1.0 / p);
    CHECK(pnorm(series, ell, p, BaseNorm::lebesgue(2)) == doctest::Approx(exact).epsilon(1e-4));
  }
  CHECK(pnorm(series, ell, kInf, BaseNorm::lebesgue(2)) == doctest::Approx(base));

  FieldSeries one;
  one.push(1.0, f);
  CHECK(pnorm(one, 0.0, kInf, BaseNorm::lebesgue(2)) == doctest::Approx(base));
  FieldSeries zero;
  for (double s : {0.1, 0.5, 1.0}) zero.push(s, LatticeField(g, 2, 1));
  CHECK(pnorm(zero, 1.0, 2.0, BaseNorm::hdot(1)) == 0.0);

  Trajectory traj;
  traj.states.push_back(make_state(LatticeField(g, 2, 3), 0.0, 0.5));
  CHECK(pnorm(traj, 1.0, 2.0, BaseNorm::lebesgue(2)) == 0.0);
}

TEST_CASE("power-law fits") {
  std::vector<double> s, y, c;
  for (int i = 0; i < 20; ++i) {
    s.push_back(std::pow(10.0, -3.0 + 0.1 * i));
    y.push_back(2.0 * std::pow(s.back(), -0.5));
    c.push_back(3.0);
  }
  const WeightFit w = fit_power_law("y", s, y);
  CHECK(w.exponent == doctest::Approx(-0.5));
  CHECK(w.prefactor == doctest::Approx(2.0));
  CHECK(w.r2 == doctest::Approx(1.0));
  CHECK_FALSE(w.low_fit);
  CHECK(w.points == 20);
  const WeightFit k = fit_power_law("c", s, c);
  CHECK(k.exponent == doctest::Approx(0.0));
  CHECK_FALSE(k.low_fit);
  CHECK(fit_power_law("short", {0.1, 0.2}, {1.0, 2.0}).low_fit);
}

TEST_CASE("heat-kernel smoothing costs about s^{-1/2} per derivative") {
  const Grid g(32, kTwoPi);
  // Small amplitude keeps the flow essentially linear; many modes make the data white-ish.
  const LatticeField A = random_bandlimited(g, 2, 3, 10, 1e-4, 7);
  ParabolicConfig pc;
  pc.scheme = ParabolicScheme::if_rk4;
  pc.s_end = 0.3;
  for (int i = 0; i <= 20; ++i) pc.record_at.push_back(0.01 * std::pow(30.0, i / 20.0));
  pc.record_stride = 1 << 30;
  const Trajectory traj = integrate_parabolic(make_state(A), FlowGauge::deturck, pc);
  const auto rep = associated_weight_report(traj, 0.01, 0.3);
  REQUIRE(rep.size() == 4);
  const WeightFit& d1 = rep[2];
  const WeightFit& d2 = rep[3];
  MESSAGE("exponents: dA " << d1.exponent << ", d2A " << d2.exponent);
  CHECK(d1.points >= 15);
  CHECK(std::abs(d2.exponent - d1.exponent + 0.5) <= 0.3);

  // Constant trajectory.
  Trajectory flat;
  for (double s : {0.1, 0.2, 0.4}) flat.states.push_back(make_state(A, 0.0, s));
  for (const WeightFit& w : associated_weight_report(flat)) CHECK(w.exponent == doctest::Approx(0.0).epsilon(1e-9));
}
