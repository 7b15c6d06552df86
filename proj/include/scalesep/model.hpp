#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "scalesep/numerics.hpp"

namespace scalesep {

/// Real potential of one variable. Derivatives are analytic when provided and
/// fall back to centered finite differences otherwise.
class Potential1D {
 public:
  using Fn = std::function<double(double)>;

  Potential1D() : Potential1D(Fn([](double) { return 0.0; }), Fn([](double) { return 0.0; }),
                              Fn([](double) { return 0.0; }), "0") {}
  Potential1D(Fn value, Fn d1, Fn d2, std::string label);

  /// sum_k coeffs[k] x^k
  static Potential1D polynomial(std::vector<double> coeffs, std::string label = {});
  static Potential1D harmonic(double k, double center = 0.0);
  /// Sampled function without analytic derivatives.
  static Potential1D from_function(Fn value, std::string label);

  double operator()(double x) const { return value_(x); }
  double gradient(double x, double h = 1e-4) const;
  double curvature(double x, double h = 1e-4) const;
  bool has_analytic_derivatives() const { return static_cast<bool>(d1_) && static_cast<bool>(d2_); }
  const std::string& label() const { return label_; }
  /// Polynomial coefficients when the potential was built from a polynomial.
  const std::optional<std::vector<double>>& coefficients() const { return coeffs_; }

  std::vector<double> sample(const Grid1D& grid) const;

  /// this + other, keeping analytic derivatives when both have them.
  Potential1D plus(const Potential1D& other) const;

 private:
  Fn value_, d1_, d2_;
  std::string label_;
  std::optional<std::vector<double>> coeffs_;
};

enum class CouplingKind { none, cubic, product, slowly_varying, custom };

const char* to_string(CouplingKind kind);

/// Coupling potential W(x, y) between the two subsystems.
class CouplingSpec {
 public:
  using Fn2 = std::function<double(double, double)>;

  CouplingSpec();  // W == 0

  /// W = eta/2 * x * y^2
  static CouplingSpec cubic(double eta);
  /// W = W1(x) * W2(y)
  static CouplingSpec product(Potential1D w1, Potential1D w2);
  /// W = w(x, eta*y); partial derivatives of w are optional.
  static CouplingSpec slowly_varying(Fn2 w, double eta, Fn2 w_y = {}, Fn2 w_xy = {});
  static CouplingSpec custom(Fn2 w, std::string label);

  CouplingKind kind() const { return kind_; }
  double eta() const { return eta_; }
  bool is_zero() const { return kind_ == CouplingKind::none; }
  const std::string& label() const { return label_; }

  double operator()(double x, double y) const { return value_(x, y); }
  double grad_y(double x, double y) const;
  double grad_xy(double x, double y) const;

  /// (W1, W2) with W = W1(x) W2(y) for product and cubic couplings. For the
  /// cubic coupling W1 = x/2 and W2 = eta y^2.
  const std::optional<std::pair<Potential1D, Potential1D>>& factors() const { return factors_; }

  /// True when sup |grad_y W| over R^2 is infinite (cubic).
  bool unbounded_gradient() const { return kind_ == CouplingKind::cubic && eta_ != 0.0; }

  /// User-supplied sup-norm bounds; when absent they are computed over the
  /// simulation box.
  std::optional<double> grad_y_sup;
  std::optional<double> grad_xy_sup;

  /// factor * W. The cubic coupling keeps its kind with eta scaled; a product
  /// coupling scales W2.
  CouplingSpec scaled(double factor) const;

 private:
  CouplingKind kind_ = CouplingKind::none;
  double eta_ = 0.0;
  Fn2 value_, dy_, dxy_;
  std::optional<std::pair<Potential1D, Potential1D>> factors_;
  std::string label_;
};

/// Sup-norms of coupling derivatives over a box, sampled on the grid.
struct CouplingSupNorms {
  double grad_y = 0.0;
  double grad_xy = 0.0;
};

/// Grid-sampled maxima of |d_y W| and |d_x d_y W| (no safety factor).
CouplingSupNorms sample_coupling_derivatives(const CouplingSpec& w, const Grid1D& gx,
                                             const Grid1D& gy);

/// Sup-norms used by the bounds: user-supplied values when present (validated
/// against the sampled maxima), otherwise sampled maxima times `safety`.
CouplingSupNorms coupling_sup_norms(const CouplingSpec& w, const Grid1D& gx, const Grid1D& gy,
                                    double safety = 2.0);

/// H = -1/(2 mass_x) d_x^2 + V1(x) - eps^2/(2 mass_y) d_y^2 + V2(y) + W(x, y),
/// evolved by i eps d_t psi = H psi. epsilon = 1 is the unscaled regime.
struct ModelSpec {
  Potential1D v1;
  Potential1D v2;  ///< includes k4/4 y^4 when k4 > 0 (see make_model)
  CouplingSpec coupling;
  double epsilon = 1.0;
  double k4 = 0.0;
  double mass_x = 1.0;
  double mass_y = 1.0;
  std::string name;

  /// Coefficient c in the kinetic term -c/2 d^2 for each axis.
  double kinetic_x() const { return 1.0 / mass_x; }
  double kinetic_y() const { return epsilon * epsilon / mass_y; }
  double total_potential(double x, double y) const { return v1(x) + v2(y) + coupling(x, y); }
  void validate() const;
};

/// Builds a ModelSpec and adds the quartic confinement k4/4 y^4 to V2.
ModelSpec make_model(Potential1D v1, Potential1D v2, CouplingSpec coupling, double epsilon = 1.0,
                     double k4 = 0.0, double mass_x = 1.0, double mass_y = 1.0,
                     std::string name = {});

/// c2/2 x^2 (x/(2 ell) - 1)^2: minima at 0 and 2 ell, curvature c2 at the origin.
Potential1D double_well(double c2, double ell);

// ---- physical parameters and rescaling ---------------------------------------

/// System-bath model in atomic units (hbar = 1): system potential
/// V_s(X) = mu1 omega1^2 / 2 X^2 (X/(2 ell a1) - 1)^2, harmonic bath, cubic
/// coupling eta/2 X Y^2.
struct PhysicalParams {
  double mu1 = 1.0;
  double mu2 = 1.0;
  double omega1 = 1.0;
  double omega2 = 1.0;
  double eta_vec = 0.0;
  double ell = 4.0;
  void validate() const;
};

struct Rescaled {
  double epsilon;
  double varpi;
  double a1;  ///< natural length sqrt(1/(mu1 omega1))
  double t1;  ///< natural time 1/omega1
  double eta_prime;
  ModelSpec model;  ///< dimensionless, epsilon-scaled form
};

Rescaled rescale(const PhysicalParams& p);

/// Inverse of rescale for given system mass and frequency.
PhysicalParams unrescale(double epsilon, double varpi, double eta_prime, double ell, double mu1,
                         double omega1);

// ---- presets -------------------------------------------------------------------

enum class Preset { blue, red, grey, yellow };

const char* to_string(Preset p);
Preset parse_preset(const std::string& name);
std::vector<Preset> all_presets();

/// Atomic-unit constants shared by all presets.
namespace preset_constants {
inline constexpr double mu1 = 1822.9;
inline constexpr double mu2 = 29166.0;
inline constexpr double omega1 = 0.0091127;
inline constexpr double a1 = 0.24536;
inline constexpr double ell = 4.0;
inline constexpr double double_well_width = 0.98142;  ///< L = ell * a1 in bohr
inline constexpr double t1 = 109.74;
inline constexpr double sigma1 = 0.17349;
}  // namespace preset_constants

struct PresetParameters {
  Preset preset;
  double varpi;
  double omega2;
  double eta;
  double sigma2;
  PhysicalParams physical() const;
};

PresetParameters preset_parameters(Preset p);

struct GridSpec {
  double min;
  double max;
  std::size_t n;
  Grid1D grid() const { return Grid1D(min, max, n); }
};

struct PresetSetup {
  PresetParameters parameters;
  ModelSpec model;
  GridSpec x;
  GridSpec y;
  double dt;       ///< t1 / 200
  double t_final;  ///< 10 t1
  std::size_t sample_every;
  double t1;
};

PresetSetup preset(Preset p);

// ---- initial data ------------------------------------------------------------

struct HarmonicGround {
  double center_x = 0.0;
  double center_y = 0.0;
};

/// eps^{-1/4} a((y - q0)/sqrt(eps)) exp(i p0 (y - q0)/eps) in y; harmonic
/// ground state at center_x in x.
struct WavePacketInit {
  double q0 = 0.0;
  double p0 = 0.0;
  std::function<cplx(double)> amplitude;  ///< empty: normalized Gaussian pi^{-1/4} e^{-z^2/2}
  double center_x = 0.0;
};

/// Ground state of -c/2 d^2 + k/2 (s - center)^2 with k = V''(center).
WaveFunction1D harmonic_ground_state(const Potential1D& v, double kinetic, double center,
                                     const Grid1D& grid);

/// Harmonic ground state in x for the local curvature of V1 + W(., y0) at center_x.
WaveFunction1D initial_x_factor(const ModelSpec& spec, double center_x, double y0,
                                const Grid1D& gx);

std::pair<WaveFunction1D, WaveFunction1D> initial_product(const ModelSpec& spec,
                                                          const HarmonicGround& kind,
                                                          const Grid1D& gx, const Grid1D& gy);
std::pair<WaveFunction1D, WaveFunction1D> initial_product(const ModelSpec& spec,
                                                          const WavePacketInit& kind,
                                                          const Grid1D& gx, const Grid1D& gy);

/// pi^{-1/4} exp(-z^2/2)
cplx standard_gaussian(double z);

}  // namespace scalesep
