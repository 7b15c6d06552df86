#pragma once

#include <functional>
#include <string>
#include <vector>

#include "scalesep/kernels.hpp"
#include "scalesep/model.hpp"
#include "scalesep/numerics.hpp"

namespace scalesep {

struct PropagationConfig {
  double dt = 0.0;
  double t_final = 0.0;
  std::size_t sample_every = 1;
  Exec exec = Exec::parallel;

  /// Throws InvalidInput unless dt > 0, dt <= t_final, sample_every >= 1 and
  /// t_final is an integer multiple of dt (relative tolerance 1e-9).
  void validate() const;
  std::size_t steps() const;
  /// Step 0, every `sample_every`-th step and the final step are sampled.
  bool is_sample(std::size_t step) const;
  std::vector<std::size_t> sample_steps() const;
};

/// Unitarity guard shared by all propagators.
inline constexpr double kNormDriftAbort = 1e-6;

/// One Strang step of i h d_t f = (-c/2 d^2 + V) f on a periodic 1D grid:
/// e^{-i dt V/(2h)} e^{-i dt c k^2/(2h)} e^{-i dt V/(2h)}.
class SplitStep1D {
 public:
  SplitStep1D(const Grid1D& grid, double kinetic, double hbar, double dt);

  void step(std::span<cplx> f, std::span<const double> v) const { step(f, v, v); }
  /// Potential `v_first` for the first half kick, `v_second` for the second.
  void step(std::span<cplx> f, std::span<const double> v_first,
            std::span<const double> v_second) const;
  void kinetic(std::span<cplx> f) const;
  void half_kick(std::span<cplx> f, std::span<const double> v) const;

  double dt() const { return dt_; }

 private:
  const Fft1D* fft_;
  double dt_;
  double hbar_;
  std::vector<cplx> kinetic_phase_;  // includes the 1/n of the inverse transform
};

/// <f, (-c/2 d^2 + V) f> / <f, f>
double energy_1d(const WaveFunction1D& f, double kinetic, std::span<const double> v);

/// Full 2D propagator for i eps d_t psi = H psi.
class ReferencePropagator {
 public:
  ReferencePropagator(const ModelSpec& spec, const Grid1D& gx, const Grid1D& gy, double dt,
                      Exec exec = Exec::parallel);
  void step(WaveFunction2D& psi) const;
  double dt() const { return dt_; }

 private:
  const Fft2D* fft_;
  Grid1D gx_, gy_;
  double dt_;
  Exec exec_;
  std::vector<cplx> half_potential_;
  std::vector<cplx> kinetic_phase_;
};

/// <psi, H psi> / <psi, psi> with the kinetic part evaluated in Fourier space.
double energy(const ModelSpec& spec, const WaveFunction2D& psi, Exec exec = Exec::parallel);

struct Trajectory2D {
  std::vector<double> times;
  std::vector<WaveFunction2D> states;  ///< empty when states were not stored
  std::vector<double> energies;
  std::vector<double> norms;
  std::vector<std::string> warnings;
};

/// Called at every sampled step with the sample index.
using ReferenceObserver = std::function<void(std::size_t, double, const WaveFunction2D&)>;

/// Strang propagation from psi0. Aborts with NumericalAbort when the norm
/// drifts by more than kNormDriftAbort or becomes non-finite.
Trajectory2D propagate_reference(const ModelSpec& spec, const WaveFunction2D& psi0,
                                 const PropagationConfig& cfg,
                                 const ReferenceObserver& observer = {}, bool store_states = true);

/// Warning text when the boundary mass exceeds kBoundaryMassLimit, else empty.
std::string boundary_warning(const WaveFunction2D& psi, const std::string& what);
std::string boundary_warning(const WaveFunction1D& f, const std::string& what);

}  // namespace scalesep
