#pragma once

// Data-parallel grid kernels. Every kernel exists in two flavours selected by
// Exec: a plain serial loop (the reference implementation the tests compare
// against) and an OpenMP version that parallelizes over grid rows. Reductions
// in the OpenMP version accumulate one partial per row and sum the partials in
// row order, so results do not depend on the thread count.

#include <complex>
#include <cstddef>
#include <memory>
#include <span>

namespace scalesep {

using cplx = std::complex<double>;

enum class Exec { serial, parallel };

Exec parse_exec(const char* name);
const char* to_string(Exec exec);

/// In-place complex DFT of fixed length backed by FFTW. Forward uses
/// exp(-i k x); backward is unnormalized.
class Fft1D {
 public:
  explicit Fft1D(std::size_t n);
  std::size_t size() const { return n_; }
  void forward(std::span<cplx> data) const;
  void backward(std::span<cplx> data) const;

 private:
  struct Plans;
  std::size_t n_;
  std::shared_ptr<const Plans> plans_;
};

/// In-place 2D DFT on a row-major (nx x ny) buffer. Serial execution uses a
/// single FFTW 2D plan; parallel execution runs 1D row transforms followed by
/// blocked column transforms inside OpenMP loops.
class Fft2D {
 public:
  Fft2D(std::size_t nx, std::size_t ny);
  std::size_t nx() const { return nx_; }
  std::size_t ny() const { return ny_; }
  void forward(std::span<cplx> data, Exec exec) const;
  void backward(std::span<cplx> data, Exec exec) const;

 private:
  struct Plans;
  void run(std::span<cplx> data, Exec exec, bool forward) const;
  std::size_t nx_;
  std::size_t ny_;
  std::shared_ptr<const Plans> plans_;
};

namespace kernels {

/// data[k] *= factors[k]
void multiply(std::span<cplx> data, std::span<const cplx> factors, Exec exec);

void scale(std::span<cplx> data, double factor, Exec exec);

/// out[i*ny + j] = factor * fx[i] * fy[j]
void outer(std::span<cplx> out, std::span<const cplx> fx, std::span<const cplx> fy, cplx factor,
           Exec exec);

/// sum |a|^2, rows of length `row` summed first.
double squared_norm(std::span<const cplx> a, std::size_t row, Exec exec);

/// sum |a - b|^2
double squared_distance(std::span<const cplx> a, std::span<const cplx> b, std::size_t row,
                        Exec exec);

/// sum conj(a) b
cplx dot(std::span<const cplx> a, std::span<const cplx> b, std::size_t row, Exec exec);

/// sum w |a|^2 for a real weight on the same layout.
double weighted_density_sum(std::span<const cplx> a, std::span<const double> w, std::size_t row,
                            Exec exec);

}  // namespace kernels
}  // namespace scalesep
