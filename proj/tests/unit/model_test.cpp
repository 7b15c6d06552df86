#include <doctest.h>

#include <cmath>

#include "scalesep/model.hpp"

using namespace scalesep;
namespace pc = preset_constants;

TEST_CASE("polynomial potential and derivatives") {
  const auto v = Potential1D::polynomial({1.0, -2.0, 0.5, 0.0, 0.25});
  CHECK(v(2.0) == doctest::Approx(1 - 4 + 2 + 4));
  CHECK(v.gradient(2.0) == doctest::Approx(-2 + 2 + 8));
  CHECK(v.curvature(2.0) == doctest::Approx(1 + 12));
  CHECK(v.has_analytic_derivatives());
  const auto f = Potential1D::from_function([](double x) { return std::sin(x); }, "sin");
  CHECK_FALSE(f.has_analytic_derivatives());
  CHECK(f.gradient(0.3) == doctest::Approx(std::cos(0.3)).epsilon(1e-7));
  CHECK(f.curvature(0.3) == doctest::Approx(-std::sin(0.3)).epsilon(1e-5));
  const auto s = v.plus(Potential1D::harmonic(2.0, 1.0));
  CHECK(s(0.0) == doctest::Approx(1.0 + 1.0));
  CHECK(s.curvature(0.0) == doctest::Approx(1.0 + 2.0));
}

TEST_CASE("double well shape") {
  const double c2 = 3.0, ell = 0.8;
  const auto v = double_well(c2, ell);
  CHECK(v(0.0) == doctest::Approx(0.0));
  CHECK(v(2 * ell) == doctest::Approx(0.0));
  CHECK(v.gradient(2 * ell) == doctest::Approx(0.0));
  CHECK(v.curvature(0.0) == doctest::Approx(c2));
  CHECK(v.curvature(2 * ell) == doctest::Approx(c2));
  // barrier c2/2 ell^2 (1/2 - 1)^2 at x = ell
  CHECK(v(ell) == doctest::Approx(c2 * ell * ell / 8.0));
  CHECK_THROWS_AS(double_well(1.0, 0.0), InvalidInput);
}

TEST_CASE("cubic and product couplings") {
  const auto w = CouplingSpec::cubic(0.3);
  CHECK(w(2.0, 3.0) == doctest::Approx(0.15 * 2 * 9));
  CHECK(w.grad_y(2.0, 3.0) == doctest::Approx(0.3 * 2 * 3));
  CHECK(w.grad_xy(2.0, 3.0) == doctest::Approx(0.3 * 3));
  CHECK(w.unbounded_gradient());
  REQUIRE(w.factors());
  CHECK(w.factors()->first(2.0) * w.factors()->second(3.0) == doctest::Approx(w(2.0, 3.0)));
  CHECK(w.scaled(2.0).eta() == doctest::Approx(0.6));

  const auto p = CouplingSpec::product(Potential1D::polynomial({0, 1}), Potential1D::polynomial({1, 0, 1}));
  CHECK(p(2.0, 3.0) == doctest::Approx(20.0));
  CHECK(p.grad_y(2.0, 3.0) == doctest::Approx(12.0));
  CHECK(p.grad_xy(2.0, 3.0) == doctest::Approx(6.0));
  CHECK_FALSE(p.unbounded_gradient());
  CHECK(CouplingSpec().is_zero());
}

TEST_CASE("coupling sup norms") {
  const Grid1D g(-2.0, 2.0, 16);
  const auto w = CouplingSpec::cubic(1.0);
  const auto s = sample_coupling_derivatives(w, g, g);
  CHECK(s.grad_y == doctest::Approx(4.0));  // |x y| at (-2, -2)
  CHECK(s.grad_xy == doctest::Approx(2.0));
  CHECK(coupling_sup_norms(w, g, g, 2.0).grad_y == doctest::Approx(8.0));
}

TEST_CASE("make_model adds the quartic confinement") {
  const auto m = make_model(Potential1D::harmonic(1.0), Potential1D::harmonic(1.0), {}, 0.1, 0.4);
  CHECK(m.v2(1.0) == doctest::Approx(0.5 + 0.1));
  CHECK(m.kinetic_y() == doctest::Approx(0.01));
  CHECK(m.kinetic_x() == doctest::Approx(1.0));
}

TEST_CASE("rescaling: light-heavy hydrogen example") {
  PhysicalParams p;
  p.mu1 = 1.0;
  p.mu2 = 918.6;
  p.omega1 = 1.0;
  p.omega2 = 0.02005;
  const Rescaled r = rescale(p);
  CHECK(r.epsilon == doctest::Approx(0.03299).epsilon(1e-4));
  CHECK(r.varpi == doctest::Approx(0.02005).epsilon(1e-12));
}

TEST_CASE("rescaling: hydrogen in krypton example") {
  PhysicalParams p;
  p.mu1 = 911.44;
  p.mu2 = 76379.0;
  const Rescaled r = rescale(p);
  CHECK(r.epsilon == doctest::Approx(0.109).epsilon(1e-3));
}

TEST_CASE("rescale and unrescale are inverse") {
  PhysicalParams p;
  p.mu1 = 3.0;
  p.mu2 = 300.0;
  p.omega1 = 0.5;
  p.omega2 = 0.05;
  p.eta_vec = -0.02;
  const Rescaled r = rescale(p);
  const PhysicalParams q = unrescale(r.epsilon, r.varpi, r.eta_prime, p.ell, p.mu1, p.omega1);
  CHECK(q.mu2 == doctest::Approx(p.mu2));
  CHECK(q.omega2 == doctest::Approx(p.omega2));
  CHECK(q.eta_vec == doctest::Approx(p.eta_vec));
}

TEST_CASE("preset constants are consistent") {
  CHECK(pc::a1 == doctest::Approx(std::sqrt(1.0 / (pc::mu1 * pc::omega1))).epsilon(1e-4));
  CHECK(pc::double_well_width == doctest::Approx(pc::ell * pc::a1).epsilon(1e-4));
  CHECK(pc::t1 == doctest::Approx(1.0 / pc::omega1).epsilon(1e-4));
  CHECK(pc::sigma1 == doctest::Approx(pc::a1 / std::sqrt(2.0)).epsilon(1e-4));
}

TEST_CASE("preset coupling strengths follow -k2/(3 a1 ell)") {
  const double L = pc::double_well_width;
  auto k2 = [](Preset p) {
    const double w = preset_parameters(p).omega2;
    return pc::mu2 * w * w;
  };
  const double eta_blue = preset_parameters(Preset::blue).eta;
  CHECK(eta_blue == doctest::Approx(-k2(Preset::blue) / (3 * L)).epsilon(1e-4));
  CHECK(preset_parameters(Preset::red).eta == doctest::Approx(-k2(Preset::red) / (3 * L)).epsilon(1e-4));
  CHECK(preset_parameters(Preset::grey).eta == doctest::Approx(9.0 / 8.0 * eta_blue).epsilon(1e-4));
  CHECK(preset_parameters(Preset::yellow).eta == doctest::Approx(-k2(Preset::yellow) / (4 * L)).epsilon(1e-4));
  CHECK(preset_parameters(Preset::red).varpi == doctest::Approx(0.25 * preset_parameters(Preset::blue).varpi));
  for (Preset p : all_presets()) {
    const auto par = preset_parameters(p);
    CHECK(par.varpi == doctest::Approx(par.omega2 / pc::omega1).epsilon(1e-4));
    CHECK(parse_preset(to_string(p)) == p);
  }
}

TEST_CASE("preset initial widths") {
  for (Preset p : all_presets()) {
    CAPTURE(to_string(p));
    const PresetSetup s = preset(p);
    const auto [fx, fy] = initial_product(s.model, HarmonicGround{}, s.x.grid(), s.y.grid());
    CHECK(std::sqrt(moment(fx, 2, true, MomentMode::average)) == doctest::Approx(pc::sigma1).epsilon(1e-4));
    CHECK(std::sqrt(moment(fy, 2, true, MomentMode::average)) ==
          doctest::Approx(s.parameters.sigma2).epsilon(1e-4));
    CHECK(boundary_mass(fx) < kBoundaryMassLimit);
    CHECK(boundary_mass(fy) < kBoundaryMassLimit);
    CHECK(s.dt == doctest::Approx(pc::t1 / 200));
    CHECK(s.t_final == doctest::Approx(10 * pc::t1));
  }
  CHECK(preset_parameters(Preset::red).sigma2 == doctest::Approx(2 * preset_parameters(Preset::blue).sigma2).epsilon(1e-4));
}

TEST_CASE("wave packet initial data") {
  const auto m = make_model(Potential1D::harmonic(1.0), Potential1D::harmonic(1.0), {}, 0.01);
  const Grid1D gx(-6, 6, 64), gy(-2, 2, 1024);
  WavePacketInit init;
  init.q0 = 0.3;
  init.p0 = 0.5;
  const auto [fx, fy] = initial_product(m, init, gx, gy);
  CHECK(l2_norm(fy) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(moment(fy, 1, false, MomentMode::average) == doctest::Approx(0.3).epsilon(1e-10));
  // Density variance eps/2.
  CHECK(moment(fy, 2, true, MomentMode::average) == doctest::Approx(0.005).epsilon(1e-8));
  const auto unscaled = make_model(Potential1D::harmonic(1.0), Potential1D::harmonic(1.0), {});
  CHECK_THROWS_AS(initial_product(unscaled, init, gx, gy), InvalidInput);
}

TEST_CASE("harmonic ground state rejects non-confining centers") {
  const Grid1D g(-4, 4, 64);
  CHECK_THROWS_AS(harmonic_ground_state(Potential1D::polynomial({0, 1}), 1.0, 0.0, g), InvalidInput);
  CHECK_THROWS_AS(harmonic_ground_state(double_well(1.0, 1.0), 1.0, 1.0, g), InvalidInput);
}
