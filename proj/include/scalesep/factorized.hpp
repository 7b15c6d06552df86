#pragma once

#include <vector>

#include "scalesep/model.hpp"
#include "scalesep/numerics.hpp"
#include "scalesep/reference.hpp"

namespace scalesep {

/// Product approximation e^{i phase} phix(x) phiy(y). `phase` is the angle in
/// radians: t W(x0, y0)/eps for brute force, int_0^t <W> ds / eps for mean field.
struct ProductState {
  WaveFunction1D phix;
  WaveFunction1D phiy;
  double phase = 0.0;
  double t = 0.0;
};

enum class PhaseSign { plus = 1, minus = -1 };

/// psi_app(x_i, y_j) = e^{i sign phase} phix(x_i) phiy(y_j)
WaveFunction2D assemble(const ProductState& state, PhaseSign sign = PhaseSign::plus,
                        Exec exec = Exec::parallel);

struct Collocation {
  double x0 = 0.0;
  double y0 = 0.0;
};

/// Grid point minimizing |d_x d_y W|; ties go to the point closest to the origin.
Collocation pick_collocation(const ModelSpec& spec, const Grid1D& gx, const Grid1D& gy);

/// phix under H_x + W(x, y0), phiy under H_y + W(x0, y); phase t W(x0, y0)/eps.
std::vector<ProductState> propagate_bruteforce(const ModelSpec& spec, const WaveFunction1D& phix0,
                                               const WaveFunction1D& phiy0,
                                               const PropagationConfig& cfg,
                                               Collocation collocation = {});

struct PartialAverages {
  std::vector<double> over_y;  ///< <W>_y(x) on the x-grid
  std::vector<double> over_x;  ///< <W>_x(y) on the y-grid
  double full = 0.0;           ///< <W>
};

/// Evaluates partial averages of W against normalized densities. Product and
/// cubic couplings use the separated form W1(x) <W2>; other couplings use a
/// tabulated W on the tensor grid.
class AverageEvaluator {
 public:
  AverageEvaluator(const ModelSpec& spec, const Grid1D& gx, const Grid1D& gy,
                   bool allow_fast_path = true);
  PartialAverages operator()(const WaveFunction1D& phix, const WaveFunction1D& phiy) const;
  bool separated() const { return separated_; }

 private:
  bool separated_ = false;
  std::size_t nx_, ny_;
  std::vector<double> w1_, w2_;     // separated factors
  std::vector<double> table_;       // W(x_i, y_j), row-major
};

PartialAverages partial_averages(const ModelSpec& spec, const WaveFunction1D& phix,
                                 const WaveFunction1D& phiy, bool allow_fast_path = true);

/// Time-dependent Hartree propagation. Each step freezes the averages at the
/// midpoint state obtained from a half-step predictor; the phase integral
/// uses the trapezoid rule.
std::vector<ProductState> propagate_meanfield(const ModelSpec& spec, const WaveFunction1D& phix0,
                                              const WaveFunction1D& phiy0,
                                              const PropagationConfig& cfg);

/// <psi_app, H psi_app> for a normalized product; equals the mean-field energy.
double meanfield_energy(const ModelSpec& spec, const ProductState& state);

/// <psi_app, H_bf psi_app> with H_bf = H_x + H_y + W(x, y0) + W(x0, y) - W(x0, y0).
double bruteforce_energy(const ModelSpec& spec, const ProductState& state,
                         Collocation collocation = {});

}  // namespace scalesep
