#pragma once

#include <vector>

#include "scalesep/model.hpp"
#include "scalesep/numerics.hpp"

namespace oracle {

using scalesep::cplx;

/// Fourier-grid Hamiltonian assembled as a dense real symmetric matrix from the
/// cosine sum of the kinetic symbol (no FFT), diagonalized once with LAPACK.
class DensePropagator {
 public:
  /// H = -kx/2 d_x^2 - ky/2 d_y^2 + V(x, y); evolution exp(-i H t / hbar).
  DensePropagator(const scalesep::ModelSpec& spec, const scalesep::Grid1D& gx,
                  const scalesep::Grid1D& gy);

  std::vector<cplx> evolve(const std::vector<cplx>& psi0, double t) const;
  const std::vector<double>& eigenvalues() const { return w_; }

 private:
  std::size_t n_;
  double hbar_;
  std::vector<double> z_;  // eigenvectors, column-major
  std::vector<double> w_;
};

/// Periodic Fourier-grid kinetic matrix -c/2 d^2 on `g`, dense row-major.
std::vector<double> kinetic_matrix(const scalesep::Grid1D& g, double c);

}  // namespace oracle
