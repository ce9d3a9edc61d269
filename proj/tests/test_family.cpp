#include "support.hpp"
#include "ymlab/data.hpp"
#include "ymlab/family.hpp"
#include "ymlab/stencil.hpp"

#include <doctest.h>

using namespace ymlab;
using ymlab::testing::l2;
using ymlab::testing::sine_field;

namespace {

const double kTwoPi = 2.0 * std::numbers::pi;

// phi = 0.3 sin(x^1) i sigma_3 and a divergence-free abelian background.
LatticeField phi(const Grid& g) { return sine_field(g, i_sigma(3), 0, 1, 0.3); }
LatticeField background(const Grid& g) {
  LatticeField A(g, 2, 3);
  A.set_component(0, sine_field(g, i_sigma(3), 1, 1, 0.2));
  A.set_component(2, sine_field(g, i_sigma(3), 0, 2, 0.1, true));
  return A;
}

// Abelian slices A(t) = background + t grad phi with E = 0. The dynamic extension then has
// B = 0, A_s = t e^{-s} lap phi and A_0(s) = (e^{-s} - 1) phi.
std::vector<FlowState> gauge_ramp(const Grid& g, double t_c, double dt, int half) {
  const LatticeField A = background(g), dphi = gradient(phi(g));
  std::vector<FlowState> out;
  for (int k = -half; k <= half; ++k) {
    FlowState st = make_state(A, t_c + k * dt);
    st.A.axpy(st.t, dphi);
    st.E = LatticeField(g, 2, 3);
    out.push_back(std::move(st));
  }
  return out;
}

FamilyConfig base_config(double s_end, double ds) {
  FamilyConfig fc;
  fc.flow.scheme = ParabolicScheme::if_rk4;
  fc.flow.s_end = s_end;
  fc.flow.ds = ds;
  return fc;
}

// F_i0 on the central slice from the family's own records: grad A_0 - d_0 A + [A_i, A_0].
LatticeField fi0_center(const HpymFamily& fam, const FamilyLevel& lv) {
  std::vector<const LatticeField*> A;
  for (std::size_t k = 0; k < fam.slice_count(); ++k) A.push_back(&fam.record(lv, k).A);
  const std::size_t c = fam.center;
  const SliceRecord& r = fam.record(lv, c);
  LatticeField f = gradient(r.A0) - combine(fd_weights(fam.t, fam.t[c], 1), A);
  for (int i = 0; i < 3; ++i) f.set_component(i, f.component(i) + bracket(r.A, i, r.A0, 0));
  return f;
}

}  // namespace

TEST_CASE("temporal slices are centered and ordered") {
  const Grid g(16, kTwoPi);
  DataSpec spec;
  spec.max_mode = 2;
  const InitialData d = generate_data(g, 2, spec);
  HyperbolicConfig hc;
  hc.dt = g.h() / 8;
  const auto sl = temporal_slices(d.A, d.E, 0.0, 0.0, g.h() / 8, 2, hc);
  REQUIRE(sl.size() == 5);
  for (int k = 0; k < 5; ++k) CHECK(sl[k].t == doctest::Approx((k - 2) * g.h() / 8));
  CHECK((sl[2].A - d.A).max_abs() == 0.0);
  CHECK((*sl[2].E - d.E).max_abs() == 0.0);
  CHECK_THROWS_AS(temporal_slices(d.A, d.E, 0.0, 0.0, 0.1, 0, hc), std::invalid_argument);
}

TEST_CASE("zero data gives a zero family") {
  const Grid g(16, kTwoPi);
  std::vector<FlowState> sl;
  for (int k = -1; k <= 1; ++k) {
    FlowState st = make_state(LatticeField(g, 2, 3), 0.1 * k);
    st.E = LatticeField(g, 2, 3);
    sl.push_back(st);
  }
  FamilyConfig fc = base_config(0.5, 0.1);
  fc.sample_s = {0.25};
  const HpymFamily fam = extend_dynamic(sl, fc);
  for (const FamilyLevel& lv : fam.levels)
    for (const SliceRecord& r : lv.slices) {
      CHECK(r.A.max_abs() == 0.0);
      CHECK(r.A0.max_abs() == 0.0);
      CHECK(r.B.max_abs() == 0.0);
      CHECK(r.G.max_distance(GaugeFrame(g, 2)) == 0.0);
    }
}

TEST_CASE("abelian gauge ramp matches the closed-form A_0") {
  const Grid g(16, kTwoPi);
  const auto sl = gauge_ramp(g, 0.5, 0.05, 2);
  FamilyConfig fc = base_config(1.0, 0.05);
  fc.sample_s = {0.5};
  fc.meter_s = {0.1, 0.3};
  const HpymFamily fam = extend_dynamic(sl, fc);
  CHECK(fam.slice_count() == 5);
  CHECK(fam.center == 2);
  CHECK(fam.s_end == 1.0);
  for (const FamilyLevel& lv : fam.levels) {
    const double decay = std::exp(-lv.s);
    for (std::size_t k = 0; k < lv.slices.size(); ++k) {
      const std::size_t slice = lv.full ? k : fam.center;
      const SliceRecord& r = fam.record(lv, slice);
      LatticeField a0 = phi(g);
      a0 *= decay - 1.0;
      CHECK((r.A0 - a0).max_abs() < 1e-7);
      // Every mode has |k| = 1 except the x^3 component (|k| = 2).
      LatticeField A = sl[slice].A;
      A *= decay;
      LatticeField a3 = sine_field(g, i_sigma(3), 0, 2, 0.1 * std::exp(-4.0 * lv.s), true);
      A.set_component(2, a3);
      CHECK((r.A - A).max_abs() < 1e-7);
      CHECK(r.B.max_abs() < 1e-14);
    }
  }
  // Central-only levels at the meter points.
  CHECK_FALSE(fam.level_at(0.1).full);
  CHECK(fam.level_at(0.5).full);
  CHECK_THROWS_AS(fam.record(fam.level_at(0.1), 0), std::out_of_range);
  CHECK_THROWS_AS(fam.level_at(0.77), std::out_of_range);
}

TEST_CASE("graded steps agree with uniform steps") {
  const Grid g(16, kTwoPi);
  const auto sl = gauge_ramp(g, 0.0, 0.05, 1);
  FamilyConfig fc = base_config(0.5, 0.05);
  fc.track_frames = false;
  const HpymFamily uniform = extend_dynamic(sl, fc);
  fc.ds_start = 0.002;
  fc.step_growth = 1.3;
  const HpymFamily graded = extend_dynamic(sl, fc);
  CHECK((uniform.levels.back().slices[0].A0 - graded.levels.back().slices[0].A0).max_abs() < 1e-8);
  fc.step_growth = 0.5;
  CHECK_THROWS_AS(extend_dynamic(sl, fc), std::invalid_argument);
}

TEST_CASE("dynamic extension rejects bad input") {
  const Grid g(16, kTwoPi);
  auto sl = gauge_ramp(g, 0.0, 0.05, 1);
  FamilyConfig fc = base_config(0.5, 0.05);
  fc.sample_s = {0.001};
  fc.ds_cluster = 0.01;
  CHECK_THROWS_AS(extend_dynamic(sl, fc), std::invalid_argument);
  fc.sample_s.clear();
  fc.cluster_half_width = 3;
  CHECK_THROWS_AS(extend_dynamic(sl, fc), std::invalid_argument);
  fc.cluster_half_width = 1;
  sl.pop_back();
  CHECK_THROWS_AS(extend_dynamic(sl, fc), std::invalid_argument);
  sl = gauge_ramp(g, 0.0, 0.05, 1);
  sl[1].E.reset();
  CHECK_THROWS_AS(extend_dynamic(sl, fc), std::invalid_argument);
}

TEST_CASE("B matches F_i0 with an error that shrinks under refinement") {
  const Grid g(16, kTwoPi);
  DataSpec spec;
  spec.max_mode = 2;
  const InitialData d = generate_data(g, 2, spec);
  HyperbolicConfig hc;
  hc.dt = g.h() / 16;
  std::vector<double> err;
  for (int r = 0; r < 2; ++r) {
    const double dt = g.h() / (8 << r);
    const auto sl = temporal_slices(d.A, d.E, 0.0, 0.0, dt, 2, hc);
    FamilyConfig fc = base_config(0.5, 0.1 / (1 << r));
    fc.track_frames = false;
    const HpymFamily fam = extend_dynamic(sl, fc);
    const FamilyLevel& end = fam.levels.back();
    const LatticeField B = fam.record(end, fam.center).B;
    err.push_back(l2(B - fi0_center(fam, end)) / l2(B));
  }
  MESSAGE("relative |B - F_i0|: " << err[0] << " -> " << err[1]);
  CHECK(err[1] < err[0]);
  CHECK(err[1] < 1e-3);
}

TEST_CASE("caloric-temporal transform") {
  SUBCASE("fixed point: no A_s and no A_0 gives U = Id") {
    const Grid g(16, kTwoPi);
    std::vector<FlowState> sl;
    for (int k = -2; k <= 2; ++k) {
      FlowState st = make_state(background(g), 0.1 * k);
      st.E = LatticeField(g, 2, 3);
      sl.push_back(st);
    }
    FamilyConfig fc = base_config(0.5, 0.05);
    fc.sample_s = {0.25};
    fc.cluster_half_width = 2;
    fc.ds_cluster = 1e-3;
    const HpymFamily fam = extend_dynamic(sl, fc);
    const CaloricTemporal ct = to_caloric_temporal(fam);
    const GaugeFrame id(g, 2);
    for (const FamilyLevel& lv : fam.levels)
      for (std::size_t k = 0; k < lv.slices.size(); ++k)
        CHECK(ct.frame(fam, lv, lv.full ? k : fam.center).max_distance(id) < 1e-9);
    CHECK(ct.passed);
  }
  SUBCASE("abelian ramp reaches the gauge to 1e-8 at N = 32") {
    const Grid g(32, kTwoPi);
    const auto sl = gauge_ramp(g, 1.0, 1e-3, 2);
    FamilyConfig fc = base_config(0.5, 0.05);
    fc.sample_s = {0.1, 0.3};
    fc.cluster_half_width = 2;
    fc.ds_cluster = 1e-4;
    const HpymFamily fam = extend_dynamic(sl, fc);
    const CaloricTemporal ct = to_caloric_temporal(fam);
    CHECK(ct.as_residual < 1e-8);
    CHECK(ct.a0_residual < 1e-8);
    CHECK(ct.passed);

    // Composition at s = 0 on the central slice against V A V^-1 - dV V^-1.
    const FamilyLevel& lv0 = fam.levels.front();
    const GaugeFrame V = ct.frame(fam, lv0, fam.center);
    const LatticeField A = fam.record(lv0, fam.center).A;
    const LatticeField expect = conjugate_field(V, A) - spatial_log_derivative(V);
    CHECK((ct.transform_A(fam, lv0, fam.center) - expect).max_abs() < 1e-8);
    CHECK(V.max_unitarity_defect() < 1e-12);
  }
  SUBCASE("nonabelian data passes its own error budget; an impossible budget throws") {
    const Grid g(16, kTwoPi);
    DataSpec spec;
    spec.max_mode = 2;
    const InitialData d = generate_data(g, 2, spec);
    HyperbolicConfig hc;
    hc.dt = g.h() / 8;
    const auto sl = temporal_slices(d.A, d.E, 0.0, 0.0, g.h() / 32, 2, hc);
    FamilyConfig fc = base_config(0.5, 0.02);
    fc.sample_s = {0.25};
    fc.cluster_half_width = 2;
    fc.ds_cluster = 0.01;
    const HpymFamily fam = extend_dynamic(sl, fc);
    const CaloricTemporal ct = to_caloric_temporal(fam);
    CHECK(ct.passed);
    CHECK(ct.as_residual <= ct.tolerance);
    CHECK(ct.a0_residual <= ct.tolerance);
    CHECK(ct.est_s > 0.0);
    CaloricTemporalOptions strict;
    strict.safety = 1e-6;
    CHECK_THROWS_AS(to_caloric_temporal(fam, strict), GaugeFailure);
    strict.throw_on_failure = false;
    const CaloricTemporal soft = to_caloric_temporal(fam, strict);
    CHECK_FALSE(soft.passed);
    CHECK(soft.as_field.rank() == 1);
  }
  SUBCASE("missing frames or stencil width is rejected") {
    const Grid g(16, kTwoPi);
    FamilyConfig fc = base_config(0.5, 0.05);
    fc.track_frames = false;
    const HpymFamily fam = extend_dynamic(gauge_ramp(g, 0.0, 0.05, 2), fc);
    CHECK_THROWS_AS(to_caloric_temporal(fam), std::invalid_argument);
    fc.track_frames = true;
    const HpymFamily narrow = extend_dynamic(gauge_ramp(g, 0.0, 0.05, 1), fc);
    CHECK_THROWS_AS(to_caloric_temporal(narrow), std::invalid_argument);
  }
}
