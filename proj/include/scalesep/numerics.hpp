#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace scalesep {

using cplx = std::complex<double>;

/// Thrown when an input violates a documented precondition.
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Thrown when a propagation loses unitarity or produces non-finite values.
class NumericalAbort : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Uniform periodic grid on [min, max) with n points, n a power of two >= 8.
class Grid1D {
 public:
  Grid1D(double min, double max, std::size_t n);

  double min() const { return min_; }
  double max() const { return max_; }
  double length() const { return max_ - min_; }
  double spacing() const { return spacing_; }
  std::size_t size() const { return points_.size(); }

  double point(std::size_t k) const { return points_[k]; }
  std::span<const double> points() const { return points_; }
  /// Angular wavenumbers 2*pi*sigma(k)/length, sigma the signed DFT index map
  /// (0, 1, ..., n/2-1, -n/2, ..., -1).
  std::span<const double> frequencies() const { return frequencies_; }

  friend bool operator==(const Grid1D& a, const Grid1D& b) {
    return a.min_ == b.min_ && a.max_ == b.max_ && a.size() == b.size();
  }

  std::string describe() const;

 private:
  double min_;
  double max_;
  double spacing_;
  std::vector<double> points_;
  std::vector<double> frequencies_;
};

Grid1D make_grid(double min, double max, std::size_t n);

bool is_power_of_two(std::size_t n);

class WaveFunction1D {
 public:
  explicit WaveFunction1D(Grid1D grid);
  WaveFunction1D(Grid1D grid, std::vector<cplx> values);

  template <class F>
  static WaveFunction1D sample(const Grid1D& grid, F&& f) {
    std::vector<cplx> v(grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k) v[k] = f(grid.point(k));
    return WaveFunction1D(grid, std::move(v));
  }

  const Grid1D& grid() const { return grid_; }
  std::size_t size() const { return values_.size(); }
  std::span<const cplx> values() const { return values_; }
  std::span<cplx> values() { return values_; }
  cplx operator[](std::size_t k) const { return values_[k]; }
  cplx& operator[](std::size_t k) { return values_[k]; }

  WaveFunction1D& operator*=(cplx s);

 private:
  Grid1D grid_;
  std::vector<cplx> values_;
};

/// Row-major (nx x ny) complex field; entry (i, j) sits at (x_i, y_j).
class WaveFunction2D {
 public:
  WaveFunction2D(Grid1D gridx, Grid1D gridy);
  WaveFunction2D(Grid1D gridx, Grid1D gridy, std::vector<cplx> values);

  const Grid1D& gridx() const { return gridx_; }
  const Grid1D& gridy() const { return gridy_; }
  std::size_t nx() const { return gridx_.size(); }
  std::size_t ny() const { return gridy_.size(); }
  std::span<const cplx> values() const { return values_; }
  std::span<cplx> values() { return values_; }
  cplx operator()(std::size_t i, std::size_t j) const { return values_[i * ny() + j]; }
  cplx& operator()(std::size_t i, std::size_t j) { return values_[i * ny() + j]; }

  static WaveFunction2D outer(const WaveFunction1D& fx, const WaveFunction1D& fy, cplx factor = 1.0);

 private:
  Grid1D gridx_;
  Grid1D gridy_;
  std::vector<cplx> values_;
};

// ---- quadrature --------------------------------------------------------------

/// <f, g> = spacing * sum conj(f) g.
cplx inner_product(const WaveFunction1D& f, const WaveFunction1D& g);
double l2_norm(const WaveFunction1D& f);

cplx inner_product(const WaveFunction2D& f, const WaveFunction2D& g);
double l2_norm(const WaveFunction2D& f);
double l2_distance(const WaveFunction2D& f, const WaveFunction2D& g);

/// Expectation <f, w f> / <f, f> of a real multiplier sampled on the grid.
double expectation(const WaveFunction1D& f, std::span<const double> weight);
/// ||w f|| for a real multiplier sampled on the grid.
double weighted_norm(const WaveFunction1D& f, std::span<const double> weight);

enum class MomentMode {
  average,        ///< <(y - c)^k> = <f, (y - c)^k f> / ||f||^2
  weighted_norm,  ///< || |y - c|^k f ||
};

/// Moments up to order 6. With `centered`, c = <y>; otherwise c = 0.
double moment(const WaveFunction1D& f, int k, bool centered, MomentMode mode);

// ---- spectral calculus -------------------------------------------------------

/// scale * d/dy f via forward transform, multiplication by i*frequency, inverse.
WaveFunction1D spectral_gradient(const WaveFunction1D& f, double scale = 1.0);

/// scale^2 * d^2/dy^2 f via multiplication by -frequency^2.
WaveFunction1D spectral_laplacian(const WaveFunction1D& f, double scale = 1.0);

enum class Axis { x, y };

WaveFunction2D spectral_gradient(const WaveFunction2D& f, Axis axis, double scale = 1.0);

/// Unitary DFT coefficients c_k = n^{-1/2} sum_j f_j exp(-2 pi i jk/n).
std::vector<cplx> unitary_transform(std::span<const cplx> f);

/// Evaluates the trigonometric interpolant of f at arbitrary points; points
/// outside [min, max) evaluate to zero instead of wrapping around.
std::vector<cplx> interpolate(const WaveFunction1D& f, std::span<const double> points);

/// Probability mass in the outer `edge_fraction` of the grid on each side,
/// relative to the total mass.
double boundary_mass(const WaveFunction1D& f, double edge_fraction = 1.0 / 16.0);
double boundary_mass(const WaveFunction2D& f, double edge_fraction = 1.0 / 16.0);

/// Boundary mass threshold above which the periodic box is considered too small.
inline constexpr double kBoundaryMassLimit = 1e-12;

}  // namespace scalesep
