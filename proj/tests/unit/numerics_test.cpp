#include <doctest.h>

#include <cmath>
#include <numbers>

#include "scalesep/numerics.hpp"

using namespace scalesep;

namespace {

WaveFunction1D gaussian(const Grid1D& g, double center, double width, double k = 0.0) {
  return WaveFunction1D::sample(g, [&](double x) {
    const double z = (x - center) / width;
    return std::pow(std::numbers::pi, -0.25) / std::sqrt(width) * std::exp(-0.5 * z * z) *
           std::polar(1.0, k * x);
  });
}

}  // namespace

TEST_CASE("grid layout and frequencies") {
  const Grid1D g(-4.0, 4.0, 16);
  CHECK(g.size() == 16);
  CHECK(g.spacing() == doctest::Approx(0.5));
  CHECK(g.point(0) == -4.0);
  CHECK(g.point(15) == doctest::Approx(3.5));
  const auto k = g.frequencies();
  const double dk = 2.0 * std::numbers::pi / 8.0;
  CHECK(k[0] == 0.0);
  CHECK(k[1] == doctest::Approx(dk));
  CHECK(k[7] == doctest::Approx(7 * dk));
  CHECK(k[8] == doctest::Approx(-8 * dk));
  CHECK(k[15] == doctest::Approx(-dk));
}

TEST_CASE("grid rejects bad sizes") {
  CHECK_THROWS_AS(Grid1D(0.0, 1.0, 12), InvalidInput);
  CHECK_THROWS_AS(Grid1D(0.0, 1.0, 4), InvalidInput);
  CHECK_THROWS_AS(Grid1D(1.0, 1.0, 16), InvalidInput);
  CHECK(is_power_of_two(1024));
  CHECK_FALSE(is_power_of_two(96));
}

TEST_CASE("gaussian norm and moments") {
  const Grid1D g(-10.0, 10.0, 256);
  const double s = 0.7;
  const auto f = gaussian(g, 1.0, s);
  CHECK(l2_norm(f) == doctest::Approx(1.0).epsilon(1e-12));
  // |f|^2 is normal with mean 1 and variance s^2/2.
  const double var = s * s / 2.0;
  CHECK(moment(f, 1, false, MomentMode::average) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(moment(f, 2, true, MomentMode::average) == doctest::Approx(var).epsilon(1e-12));
  CHECK(moment(f, 4, true, MomentMode::average) == doctest::Approx(3 * var * var).epsilon(1e-12));
  CHECK(moment(f, 2, true, MomentMode::weighted_norm) ==
        doctest::Approx(std::sqrt(3 * var * var)).epsilon(1e-12));
  CHECK(moment(f, 3, true, MomentMode::average) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("spectral derivatives of a band-limited function") {
  const Grid1D g(0.0, 2.0 * std::numbers::pi, 32);
  const auto f = WaveFunction1D::sample(g, [](double x) { return cplx(std::sin(3 * x), std::cos(2 * x)); });
  const auto d = spectral_gradient(f, 0.5);
  const auto dd = spectral_laplacian(f);
  for (std::size_t k = 0; k < g.size(); ++k) {
    const double x = g.point(k);
    CHECK(std::abs(d[k] - 0.5 * cplx(3 * std::cos(3 * x), -2 * std::sin(2 * x))) < 1e-12);
    CHECK(std::abs(dd[k] - cplx(-9 * std::sin(3 * x), -4 * std::cos(2 * x))) < 1e-11);
  }
}

TEST_CASE("2d spectral gradient acts on one axis") {
  const Grid1D gx(0.0, 2.0 * std::numbers::pi, 16), gy(0.0, 2.0 * std::numbers::pi, 32);
  const auto fx = WaveFunction1D::sample(gx, [](double x) { return cplx(std::sin(x)); });
  const auto fy = WaveFunction1D::sample(gy, [](double y) { return cplx(std::cos(2 * y)); });
  const auto psi = WaveFunction2D::outer(fx, fy);
  const auto dx = spectral_gradient(psi, Axis::x);
  const auto dy = spectral_gradient(psi, Axis::y);
  double ex = 0, ey = 0;
  for (std::size_t i = 0; i < gx.size(); ++i) {
    for (std::size_t j = 0; j < gy.size(); ++j) {
      const double x = gx.point(i), y = gy.point(j);
      ex = std::max(ex, std::abs(dx(i, j) - std::cos(x) * std::cos(2 * y)));
      ey = std::max(ey, std::abs(dy(i, j) + 2 * std::sin(x) * std::sin(2 * y)));
    }
  }
  CHECK(ex < 1e-12);
  CHECK(ey < 1e-12);
}

TEST_CASE("unitary transform preserves the discrete norm") {
  const Grid1D g(-5.0, 5.0, 64);
  const auto f = gaussian(g, 0.3, 0.8, 2.0);
  const auto c = unitary_transform(f.values());
  double a = 0, b = 0;
  for (auto v : f.values()) a += std::norm(v);
  for (auto v : c) b += std::norm(v);
  CHECK(b == doctest::Approx(a).epsilon(1e-13));
}

TEST_CASE("interpolation reproduces the sampled function and vanishes outside") {
  const Grid1D g(-8.0, 8.0, 128);
  const auto f = gaussian(g, 0.0, 1.0, 1.5);
  const std::vector<double> pts = {-1.234, 0.0, 0.5 * g.spacing(), 2.71, 20.0, -9.0};
  const auto v = interpolate(f, pts);
  for (std::size_t k = 0; k < 4; ++k) {
    const double x = pts[k];
    const cplx exact = std::pow(std::numbers::pi, -0.25) * std::exp(-0.5 * x * x) * std::polar(1.0, 1.5 * x);
    CHECK(std::abs(v[k] - exact) < 1e-12);
  }
  CHECK(v[4] == cplx(0.0));
  CHECK(v[5] == cplx(0.0));
}

TEST_CASE("inner products and distances") {
  const Grid1D gx(-6.0, 6.0, 64), gy(-6.0, 6.0, 64);
  const auto a = gaussian(gx, 0.0, 1.0);
  const auto b = gaussian(gx, 1.0, 1.0);
  // <a, b> = exp(-d^2/4) for unit-width normalized Gaussians.
  CHECK(inner_product(a, b).real() == doctest::Approx(std::exp(-0.25)).epsilon(1e-12));
  const auto pa = WaveFunction2D::outer(a, gaussian(gy, 0.0, 1.0));
  const auto pb = WaveFunction2D::outer(b, gaussian(gy, 0.0, 1.0));
  CHECK(l2_norm(pa) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(l2_distance(pa, pb) == doctest::Approx(std::sqrt(2.0 - 2.0 * std::exp(-0.25))).epsilon(1e-12));
  CHECK(l2_distance(pa, pa) == 0.0);
}

TEST_CASE("boundary mass") {
  const Grid1D g(-8.0, 8.0, 128);
  CHECK(boundary_mass(gaussian(g, 0.0, 1.0)) < kBoundaryMassLimit);
  CHECK(boundary_mass(gaussian(g, 6.5, 1.0)) > 1e-3);
}
