#include "support.hpp"
#include "ymlab/data.hpp"
#include "ymlab/heat_flow.hpp"

#include <doctest.h>

using namespace ymlab;
using ymlab::testing::l2;
using ymlab::testing::sine_field;

namespace {

const double kTwoPi = 2.0 * std::numbers::pi;

// D^l F_li assembled from curvature() and covariant_derivative(), independent of the flow code.
LatticeField divergence_of_curvature(const LatticeField& A) {
  const LatticeField F = curvature(A);
  LatticeField r(A.grid(), A.n(), 3);
  for (int i = 0; i < 3; ++i) {
    LatticeField acc(A.grid(), A.n(), 1);
    for (int l = 0; l < 3; ++l) {
      if (l == i) continue;
      const PairSlot p = pair_slot(l, i);
      LatticeField Fli = F.component(p.slot);
      Fli *= p.sign;
      acc += covariant_derivative(A, Fli, l);
    }
    r.set_component(i, acc);
  }
  return r;
}

LatticeField abelian_data(const Grid& g) {
  LatticeField A(g, 2, 3);
  A.set_component(0, sine_field(g, i_sigma(3), 1, 1, 0.3) + sine_field(g, i_sigma(3), 2, 2, 0.2, true));
  A.set_component(1, sine_field(g, i_sigma(3), 0, 3, 0.1));
  A.set_component(2, sine_field(g, i_sigma(3), 2, 1, 0.4, true));
  return A;
}

}  // namespace

TEST_CASE("DeTurck right-hand side") {
  const Grid g(16, kTwoPi);
  CHECK(deturck_rhs(make_state(LatticeField(g, 2, 3))).max_abs() == 0.0);
  const LatticeField A = abelian_data(g);
  LatticeField lap(g, 2, 3);
  for (int c = 0; c < 3; ++c) lap.set_component(c, laplacian(A.component(c)));
  CHECK((deturck_rhs(make_state(A)) - lap).max_abs() < 1e-12);
}

TEST_CASE("DeTurck equals the caloric flow plus the gauge term D_i A_s") {
  const Grid g(32, kTwoPi);
  const LatticeField A = random_bandlimited(g, 2, 3, 4, 0.5, 3);
  const LatticeField As = divergence(A);
  LatticeField oracle = divergence_of_curvature(A);
  for (int i = 0; i < 3; ++i) {
    const LatticeField DAs = covariant_derivative(A, As, i);
    LatticeField c = oracle.component(i);
    c += DAs;
    oracle.set_component(i, c);
  }
  const LatticeField r = deturck_rhs(make_state(A));
  CHECK(l2(r - oracle) <= 1e-10 * l2(oracle));
  CHECK(l2(caloric_rhs(make_state(A)) - divergence_of_curvature(A)) <= 1e-10 * l2(oracle));
}

TEST_CASE("caloric right-hand side reduces to curl curl for abelian data") {
  const Grid g(16, kTwoPi);
  CHECK(caloric_rhs(make_state(LatticeField(g, 2, 3))).max_abs() == 0.0);
  const LatticeField A = abelian_data(g);
  const LatticeField divA = divergence(A);
  LatticeField ref(g, 2, 3);
  for (int c = 0; c < 3; ++c) ref.set_component(c, laplacian(A.component(c)) - derivative(divA, c));
  CHECK((caloric_rhs(make_state(A)) - ref).max_abs() < 1e-12);
}

TEST_CASE("energy decrement matches the gradient-flow identity") {
  const Grid g(16, kTwoPi);
  const LatticeField A = random_bandlimited(g, 2, 3, 3, 0.3, 5);
  const LatticeField rhs = caloric_rhs(make_state(A));
  const double rate = integral_inner(rhs, rhs);
  double prev = 0.0;
  for (double ds : {4e-3, 2e-3, 1e-3}) {
    ParabolicConfig cfg;
    cfg.scheme = ParabolicScheme::if_rk4;
    cfg.ds = ds;
    cfg.s_end = ds;
    const Trajectory tr = integrate_parabolic(make_state(A), FlowGauge::caloric, cfg);
    const double dB = magnetic_energy(tr.back()) - magnetic_energy(A);
    const double err = std::abs(dB / ds + rate);
    CHECK(err <= 0.05 * rate);
    if (prev > 0.0) CHECK(err < 0.6 * prev);
    prev = err;
  }
}

TEST_CASE("abelian DeTurck flow matches the heat kernel") {
  const Grid g(32, kTwoPi);
  const LatticeField A = abelian_data(g);
  ParabolicConfig cfg;
  cfg.s_end = 0.1;
  const Trajectory tr = integrate_parabolic(make_state(A), FlowGauge::deturck, cfg);
  SpectralField exact = to_spectral(A);
  apply_heat(exact, 0.1);
  const LatticeField ref = to_physical(exact);
  CHECK(tr.back().s == doctest::Approx(0.1));
  CHECK((tr.back().A - ref).max_abs() <= 1e-6 * ref.max_abs());
  CHECK(tr.back().As.has_value());
}

TEST_CASE("zero data stays zero") {
  const Grid g(8, kTwoPi);
  for (FlowGauge gauge : {FlowGauge::deturck, FlowGauge::caloric}) {
    ParabolicConfig cfg;
    cfg.s_end = 0.2;
    const Trajectory tr = integrate_parabolic(make_state(LatticeField(g, 2, 3)), gauge, cfg);
    for (const auto& st : tr.states) CHECK(st.A.max_abs() == 0.0);
  }
}

TEST_CASE("schemes and step bounds") {
  const Grid g(16, kTwoPi);
  ParabolicConfig cfg;
  cfg.scheme = ParabolicScheme::rk4_explicit;
  CHECK(max_parabolic_step(g, cfg) == doctest::Approx(0.5 * g.h() * g.h() / 6.0));
  cfg.ds = 1.0;
  CHECK_THROWS(parabolic_step(g, cfg));
  cfg.scheme = ParabolicScheme::if_rk2;
  cfg.ds = 0.0;
  CHECK(parabolic_step(g, cfg) == doctest::Approx(0.5 * g.h()));
  const StepPlan plan = plan_steps(0.0, 1.0, 0.3, {0.5, 0.55});
  CHECK(plan.points.back() == 1.0);
  CHECK(std::count(plan.is_break.begin(), plan.is_break.end(), 1) == 3);
  for (std::size_t k = 1; k < plan.points.size(); ++k) CHECK(plan.points[k] - plan.points[k - 1] <= 0.3 + 1e-15);

  // All three schemes agree on nonabelian data.
  const LatticeField A = random_bandlimited(g, 2, 3, 3, 0.3, 9);
  std::vector<LatticeField> ends;
  for (auto scheme : {ParabolicScheme::rk4_explicit, ParabolicScheme::if_rk2, ParabolicScheme::if_rk4}) {
    ParabolicConfig c;
    c.scheme = scheme;
    c.s_end = 0.05;
    c.ds = scheme == ParabolicScheme::rk4_explicit ? 0.001 : 0.005;
    ends.push_back(integrate_parabolic(make_state(A), FlowGauge::deturck, c).back().A);
  }
  CHECK(l2(ends[0] - ends[2]) < 1e-6 * l2(ends[0]));
  CHECK(l2(ends[1] - ends[2]) < 1e-4 * l2(ends[0]));
}

TEST_CASE("non-finite data raises a blowup error") {
  const Grid g(8, kTwoPi);
  LatticeField A = random_bandlimited(g, 2, 3, 2, 0.3, 1);
  A.data()[7] = std::nan("");
  ParabolicConfig cfg;
  cfg.s_end = 0.1;
  CHECK_THROWS_AS(integrate_parabolic(make_state(A), FlowGauge::caloric, cfg), BlowupError);
}

TEST_CASE("magnetic energy decreases along the caloric flow") {
  const Grid g(16, kTwoPi);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    ParabolicConfig cfg;
    cfg.s_end = 0.5;
    cfg.ds = 0.02;
    cfg.scheme = ParabolicScheme::if_rk4;
    const Trajectory tr = integrate_parabolic(make_state(random_bandlimited(g, 2, 3, 4, 0.3, seed)),
                                              FlowGauge::caloric, cfg);
    double prev = magnetic_energy(tr.states[0]);
    for (std::size_t k = 1; k < tr.size(); ++k) {
      const double e = magnetic_energy(tr.states[k]);
      CHECK(e <= prev + 1e-12);
      prev = e;
    }
  }
}

TEST_CASE("covariant Coulomb condition and divergence transport along the caloric flow") {
  const Grid g(32, kTwoPi);
  ParabolicConfig cfg;
  cfg.s_end = 0.2;
  cfg.ds = 0.01;
  cfg.scheme = ParabolicScheme::if_rk4;
  cfg.cutoff = alias_free_cutoff(g.N);
  const Trajectory tr =
      integrate_parabolic(make_state(random_bandlimited(g, 2, 3, 4, 0.2, 42)), FlowGauge::caloric, cfg);
  for (const auto& st : tr.states) {
    const LatticeField Fs = caloric_rhs(st);
    const double r = l2(covariant_divergence(st.A, Fs));
    CHECK(r <= 1e-8 * sobolev_norm(Fs, 1.0));
  }
  // d_s (d^l A_l) = -[A^l, F_sl], by a central difference in s.
  std::vector<double> res;
  for (double ds : {0.01, 0.005}) {
    ParabolicConfig c = cfg;
    c.ds = ds;
    c.s_end = 2 * ds;
    const Trajectory t2 =
        integrate_parabolic(make_state(random_bandlimited(g, 2, 3, 4, 0.2, 42)), FlowGauge::caloric, c);
    LatticeField lhs = divergence(t2.states[2].A) - divergence(t2.states[0].A);
    lhs *= 1.0 / (2 * ds);
    const LatticeField Fs = caloric_rhs(t2.states[1]);
    LatticeField rhs(g, 2, 1);
    for (int l = 0; l < 3; ++l) bracket_add(rhs, 0, t2.states[1].A, l, Fs, l, -1.0);
    // The computed flow only carries modes inside the cutoff.
    SpectralField rh = to_spectral(rhs);
    apply_cutoff(rh, c.cutoff);
    rhs = to_physical(rh);
    res.push_back(l2(lhs - rhs) / l2(rhs));
  }
  CHECK(res[1] < res[0] / 3.0);
}

TEST_CASE("linear covariant equation") {
  const Grid g(16, kTwoPi);
  ParabolicConfig cfg;
  cfg.s_end = 0.1;
  cfg.ds = 0.01;
  cfg.scheme = ParabolicScheme::if_rk4;
  // Zero background: componentwise heat flow.
  const Trajectory zero = integrate_parabolic(make_state(LatticeField(g, 2, 3)), FlowGauge::deturck, cfg);
  const LatticeField B0 = random_bandlimited(g, 2, 3, 3, 1.0, 2);
  const FieldSeries B = solve_linear_covariant(zero, B0, cfg);
  SpectralField exact = to_spectral(B0);
  apply_heat(exact, 0.1);
  CHECK((B.fields.back() - to_physical(exact)).max_abs() < 1e-8);
  const FieldSeries Bz = solve_linear_covariant(zero, LatticeField(g, 2, 3), cfg);
  for (const auto& f : Bz.fields) CHECK(f.max_abs() == 0.0);

  // Growth rate bound, stable under step halving.
  const LatticeField A = random_bandlimited(g, 2, 3, 3, 0.3, 3);
  std::vector<double> rates;
  for (double ds : {0.01, 0.005}) {
    ParabolicConfig c = cfg;
    c.ds = ds;
    c.s_end = 0.2;
    const Trajectory bg = integrate_parabolic(make_state(A), FlowGauge::deturck, c);
    const FieldSeries b = solve_linear_covariant(bg, B0, c);
    double worst = -1e300;
    for (std::size_t k = 1; k < b.size(); ++k)
      worst = std::max(worst, std::log(l2(b.fields[k]) / l2(B0)) / b.param[k]);
    rates.push_back(worst);
  }
  CHECK(std::abs(rates[0] - rates[1]) < 1e-3 * std::max(1.0, std::abs(rates[0])));
  CHECK(rates[0] < 0.0);  // the Laplacian dominates for small backgrounds
}

TEST_CASE("smoothing estimates hold with a seed-independent constant") {
  const Grid g(16, kTwoPi);
  ParabolicConfig cfg;
  cfg.s_end = 1.0;
  cfg.ds = 0.02;
  cfg.scheme = ParabolicScheme::if_rk4;
  std::vector<Trajectory> flows;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    LatticeField A = random_bandlimited(g, 2, 3, 4, 1.0, 100 + seed);
    A *= 0.2 / sobolev_norm(A, 1.0);
    flows.push_back(integrate_parabolic(make_state(A), FlowGauge::deturck, cfg));
  }
  for (int m = 0; m <= 3; ++m) {
    double lo = 1e300, hi = 0.0;
    for (const auto& tr : flows) {
      double sup = 0.0;
      for (const auto& st : tr.states)
        if (st.s > 0.0) sup = std::max(sup, std::pow(st.s, 0.5 * (m + 1)) * sobolev_norm(st.A, m + 1.0));
      sup /= 0.2;
      lo = std::min(lo, sup);
      hi = std::max(hi, sup);
    }
    CHECK(hi < 2.0);
    CHECK(hi / lo < 20.0);
  }
}

TEST_CASE("halving the step reduces the error at the formal order") {
  const Grid g(16, kTwoPi);
  const LatticeField A = random_bandlimited(g, 2, 3, 4, 0.5, 17);
  for (auto [scheme, order] : {std::pair{ParabolicScheme::if_rk2, 2.0}, std::pair{ParabolicScheme::if_rk4, 4.0}}) {
    std::vector<double> norms;
    for (double ds : {0.04, 0.02, 0.01}) {
      ParabolicConfig cfg;
      cfg.scheme = scheme;
      cfg.ds = ds;
      cfg.s_end = 0.4;
      norms.push_back(sobolev_norm(integrate_parabolic(make_state(A), FlowGauge::deturck, cfg).back().A, 1.0));
    }
    const double ratio = std::abs(norms[0] - norms[1]) / std::abs(norms[1] - norms[2]);
    CHECK(std::log2(ratio) > order - 0.5);
  }
}
