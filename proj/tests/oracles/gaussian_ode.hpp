#pragma once

#include <complex>
#include <functional>
#include <vector>

namespace oracle {

using cplx = std::complex<double>;

/// Thawed Gaussian u(z) = pi^{-1/4} exp(i a z^2 / 2 + i g) solving
/// i u_t = -u''/2 + k(t) z^2 u / 2, driven along the classical path
/// q' = p, p' = -V'(q) with k(t) = V''(q(t)):
///   a' = -a^2 - k,  g' = i a / 2,  a(0) = i, g(0) = 0.
struct GaussianState {
  double q = 0.0;
  double p = 0.0;
  cplx a{0.0, 1.0};
  cplx g{0.0, 0.0};
};

struct GaussianPath {
  std::vector<double> times;
  std::vector<GaussianState> states;
};

/// Integrates with adaptive Dormand-Prince at tolerance `tol` and records the
/// state at the given times.
GaussianPath integrate_gaussian(const std::function<double(double)>& dv,
                                const std::function<double(double)>& d2v, GaussianState s0,
                                const std::vector<double>& times, double tol = 1e-13);

cplx gaussian_value(const GaussianState& s, double z);

}  // namespace oracle
