#pragma once

#include <vector>

#include "scalesep/model.hpp"
#include "scalesep/numerics.hpp"
#include "scalesep/reference.hpp"

namespace scalesep {

enum class Variant { taylor, averaged };

const char* to_string(Variant v);

/// Wave-packet ansatz
///   psi1(x) eps^{-1/4} u2((y - q)/sqrt(eps)) e^{i p (y - q)/eps + i S/eps}.
struct WavePacketState {
  double q = 0.0;
  double p = 0.0;
  double S = 0.0;
  WaveFunction1D u2;    ///< amplitude on the z-grid
  WaveFunction1D psi1;  ///< quantum factor on the x-grid
  double t = 0.0;
  double epsilon = 1.0;
};

struct ClassicalPoint {
  double q = 0.0;
  double p = 0.0;
  double S = 0.0;
};

/// Default amplitude grid.
Grid1D default_z_grid();

/// Initial state matching initial_product(spec, init, gx, .): a sampled on the
/// z-grid and normalized to one, psi1 the harmonic ground state in x.
WavePacketState initial_wavepacket(const ModelSpec& spec, const WavePacketInit& init,
                                   const Grid1D& gx, const Grid1D& gz = default_z_grid());

/// Averages of V2, dV2 and d^2V2 over |u2(z)|^2 at y = q + sqrt(eps) z.
struct BathAverages {
  double v = 0.0;
  double grad = 0.0;
  double hess = 0.0;
};

/// Exact values at q for the Taylor variant, density averages for Averaged.
BathAverages bath_forces(const ModelSpec& spec, double q, const WaveFunction1D& u2,
                         Variant variant);

/// One Stoermer-Verlet step for (q, p) with midpoint-rule action. For the
/// Averaged variant the density `u2` is held fixed over the step.
ClassicalPoint step_trajectory(const ModelSpec& spec, const ClassicalPoint& s,
                               const WaveFunction1D& u2, double dt, Variant variant);

/// Effective x-potential: V1(x) + W(x, q) (Taylor) or V1(x) + <W(x, .)>_y.
std::vector<double> effective_x_potential(const ModelSpec& spec, double q,
                                          const WaveFunction1D& u2, const Grid1D& gx,
                                          Variant variant);

/// One Strang step of i d_t u = -1/2 u'' + k/2 z^2 u with curvature
/// `k_first` in the first half kick and `k_second` in the second.
void step_u2(WaveFunction1D& u2, double dt, double k_first, double k_second);

/// Advances the full ansatz by one step of size dt.
///  Taylor: Verlet (q, p, S); u2 with d^2V2(q_n), d^2V2(q_{n+1}); psi1 with
///  W(x, q_n), W(x, q_{n+1}).
///  Averaged: bath averages at t_n; half kick and drift; u2 predictor and
///  corrector for the end-of-step curvature; final kick with averages at
///  t_{n+1}; psi1 with <W>_y at t_n and t_{n+1}.
void step_wavepacket(const ModelSpec& spec, WavePacketState& state, double dt, Variant variant);

std::vector<WavePacketState> propagate_semiclassical(const ModelSpec& spec,
                                                     const WavePacketState& init,
                                                     const PropagationConfig& cfg,
                                                     Variant variant);

/// Curvature sequence for u2 along a fixed trajectory, for standalone use.
std::vector<WaveFunction1D> propagate_u2(const WaveFunction1D& u0,
                                         const std::function<double(double)>& curvature,
                                         const PropagationConfig& cfg);

/// Evaluates the ansatz on (gx, gy) by band-limited interpolation of u2.
/// Throws InvalidInput when gy has fewer than 8 points per wavelength 2 pi eps/|p|.
WaveFunction2D assemble_semiclassical(const WavePacketState& state, const Grid1D& gy,
                                      Exec exec = Exec::parallel);

}  // namespace scalesep
