#include "support.hpp"
#include "ymlab/data.hpp"
#include "ymlab/spectral.hpp"

#include <doctest.h>

using namespace ymlab;
using ymlab::testing::l2;
using ymlab::testing::sine_field;

TEST_CASE("grid validation") {
  CHECK_THROWS(Grid(5, 1.0));
  CHECK_THROWS(Grid(2, 1.0));
  CHECK_THROWS(Grid(8, 0.0));
  const Grid g(8, 2.0);
  CHECK(g.h() == 0.25);
  CHECK(g.index(1, 2, 3) == 64 + 16 + 3);
}

TEST_CASE("field storage round trip") {
  const Grid g(4, 1.0);
  LatticeField f(g, 2, 3);
  f.set(2, 17, i_sigma(2));
  CHECK((f.at(2, 17).matrix() - i_sigma(2).matrix()).cwiseAbs().maxCoeff() < 1e-15);
  CHECK(f.at(1, 17).max_abs() == 0.0);
  LatticeField other(g, 2, 1);
  CHECK_THROWS_AS(f += other, DimensionMismatch);
}

TEST_CASE("pair slots are antisymmetric") {
  CHECK(pair_slot(0, 1).slot == 0);
  CHECK(pair_slot(1, 0).sign == -1.0);
  CHECK(pair_slot(2, 1).slot == 2);
  CHECK(pair_slot(0, 2).sign == 1.0);
  CHECK_THROWS(pair_slot(1, 1));
}

TEST_CASE("spectral derivative of a sine mode") {
  const Grid g(16, 1.0);
  const double k = 2.0 * std::numbers::pi / g.L;
  const LatticeField f = sine_field(g, i_sigma(3), 0);
  const LatticeField ref = sine_field(g, i_sigma(3), 0, 1, k, true);
  CHECK((derivative(f, 0) - ref).max_abs() < 1e-12);
  CHECK(derivative(f, 1).max_abs() < 1e-12);
  LatticeField c(g, 2, 1);
  for (std::size_t s = 0; s < g.volume(); ++s) c.set(0, s, i_sigma(1));
  for (int a = 0; a < 3; ++a) {
    CHECK(derivative(c, a).max_abs() < 1e-13);
    CHECK(derivative(c, a, Scheme::central2).max_abs() < 1e-13);
  }
  CHECK(laplacian(c).max_abs() < 1e-12);
  CHECK(laplacian(c, Scheme::central2).max_abs() < 1e-12);
}

TEST_CASE("central differences converge at second order") {
  std::vector<double> err;
  for (int N : {16, 32, 64}) {
    const Grid g(N, 1.0);
    const double k = 2.0 * std::numbers::pi / g.L;
    const LatticeField f = sine_field(g, i_sigma(3), 0);
    const LatticeField ref = sine_field(g, i_sigma(3), 0, 1, k, true);
    err.push_back((derivative(f, 0, Scheme::central2) - ref).max_abs());
  }
  const double order1 = std::log2(err[0] / err[1]);
  const double order2 = std::log2(err[1] / err[2]);
  CHECK(std::abs(order1 - 2.0) < 0.1);
  CHECK(std::abs(order2 - 2.0) < 0.1);
}

TEST_CASE("Laplacian") {
  const Grid g(16, 1.0);
  const double k = 2.0 * std::numbers::pi / g.L;
  const LatticeField f = sine_field(g, i_sigma(3), 0);
  CHECK((laplacian(f) + (k * k) * f).max_abs() < 1e-12 * k * k);
  const LatticeField r = random_bandlimited(g, 2, 1, 4, 1.0, 3);
  LatticeField sum(g, 2, 1);
  for (int a = 0; a < 3; ++a) sum += derivative(derivative(r, a), a);
  CHECK((sum - laplacian(r)).max_abs() < 1e-12 * laplacian(r).max_abs());
  // Central stencil: div(grad) with the 2h stencil differs, but the 7-point
  // Laplacian converges to the spectral value.
  const LatticeField lc = laplacian(f, Scheme::central2);
  CHECK((lc - laplacian(f)).max_abs() < 0.02 * k * k);
}

TEST_CASE("gradient and divergence") {
  const Grid g(16, 2.0);
  const LatticeField r = random_bandlimited(g, 2, 1, 3, 1.0, 5);
  const LatticeField gr = gradient(r);
  CHECK((divergence(gr) - laplacian(r)).max_abs() < 1e-11 * laplacian(r).max_abs());
  for (int a = 0; a < 3; ++a) CHECK((gr.component(a) - derivative(r, a)).max_abs() < 1e-13);
}

TEST_CASE("Leibniz rule for dealiased products") {
  const Grid g(32, 2.0 * std::numbers::pi);
  const LatticeField x = random_bandlimited(g, 2, 1, 4, 1.0, 1);
  const LatticeField y = random_bandlimited(g, 2, 1, 4, 1.0, 2);
  // Both factors are within the retained band, so the product is resolved.
  const LatticeField xy = dealias(bracket(x, 0, y, 0));
  for (int a = 0; a < 3; ++a) {
    const LatticeField lhs = derivative(xy, a);
    const LatticeField rhs = bracket(derivative(x, a), 0, y, 0) + bracket(x, 0, derivative(y, a), 0);
    CHECK((lhs - dealias(rhs)).max_abs() < 1e-10 * rhs.max_abs());
  }
}

TEST_CASE("periodicity of the index map") {
  const Grid g(8, 1.0);
  const LatticeField f = random_bandlimited(g, 2, 1, 2, 1.0, 4);
  const int N = g.N;
  double worst = 0.0;
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j)
      for (int l = 0; l < N; ++l) {
        const std::size_t shifted = g.index((i + N) % N, (j + 2 * N) % N, (l + N) % N);
        worst = std::max(worst, (f.at(0, shifted) - f.at(0, g.index(i, j, l))).max_abs());
      }
  CHECK(worst == 0.0);
  // Spectral interpolation is periodic: translating by L leaves the field fixed.
  const Wavenumbers& w = Wavenumbers::get(g);
  SpectralField s = to_spectral(f);
  for (std::size_t p = 0; p < s.modes(); ++p) {
    const double phase = w.k[0][w.axis_index(p, 0)] * g.L;
    for (int a = 0; a < s.dim(); ++a) s.coeff(0, a)[p] *= std::polar(1.0, phase);
  }
  CHECK((to_physical(s) - f).max_abs() < 1e-12);
}

TEST_CASE("Sobolev and Lebesgue norms") {
  const Grid g(16, 1.0);
  const LatticeField f = sine_field(g, i_sigma(3), 0);
  CHECK(sobolev_norm(f, 0.0) == doctest::Approx(1.0).epsilon(1e-12));
  const double k = 2.0 * std::numbers::pi / g.L;
  CHECK(sobolev_norm(f, 1.0) == doctest::Approx(k).epsilon(1e-12));
  const LatticeField f2 = sine_field(g, i_sigma(3), 1, 2);
  CHECK(sobolev_norm(f2, 1.0) == doctest::Approx(2.0 * k * sobolev_norm(f2, 0.0)).epsilon(1e-12));
  CHECK(sobolev_norm(f, 1.0, false) == doctest::Approx(1.0 + k).epsilon(1e-12));
  LatticeField z(g, 2, 3);
  CHECK(sobolev_norm(z, 2.5) == 0.0);
  CHECK(lp_norm(z, 3.0) == 0.0);
  CHECK(lp_norm(z, INFINITY) == 0.0);

  const LatticeField r = random_bandlimited(g, 2, 3, 4, 1.0, 8);
  CHECK(lp_norm(r, 2.0) == doctest::Approx(sobolev_norm(r, 0.0)).epsilon(1e-12));
  CHECK(lp_norm(r, 2.0) == doctest::Approx(l2(r)).epsilon(1e-12));

  LatticeField c(g, 2, 1);
  for (std::size_t s = 0; s < g.volume(); ++s) c.set(0, s, i_sigma(3));
  CHECK(lp_norm(c, INFINITY) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));

  const Grid g64(64, 1.0);
  const LatticeField f64 = sine_field(g64, i_sigma(3), 0);
  CHECK(lp_norm(f64, 4.0) == doctest::Approx(std::pow(1.5, 0.25)).epsilon(1e-6));
}

TEST_CASE("random band-limited data") {
  const Grid g16(16, 2.0 * std::numbers::pi), g32(32, 2.0 * std::numbers::pi);
  const LatticeField a = random_bandlimited(g16, 2, 3, 4, 0.1, 42);
  const LatticeField b = random_bandlimited(g32, 2, 3, 4, 0.1, 42);
  // Mean square per component equals amplitude^2.
  const double ms = integral_inner(a, a) / (g16.L * g16.L * g16.L) / 3.0;
  CHECK(ms == doctest::Approx(0.01).epsilon(1e-12));
  // The same draw on finer grids: compare the shared sites.
  double worst = 0.0;
  for (int i = 0; i < 16; ++i)
    for (int j = 0; j < 16; ++j)
      for (int l = 0; l < 16; ++l)
        for (int c = 0; c < 3; ++c)
          worst = std::max(worst, (a.at(c, g16.index(i, j, l)) - b.at(c, g32.index(2 * i, 2 * j, 2 * l))).max_abs());
  CHECK(worst < 1e-14);
  CHECK((dealias(a) - a).max_abs() < 1e-15);
  CHECK_THROWS(random_bandlimited(g16, 2, 3, 8, 0.1, 1));
}
