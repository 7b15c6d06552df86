#pragma once

#include <array>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "scalesep/factorized.hpp"
#include "scalesep/model.hpp"
#include "scalesep/numerics.hpp"
#include "scalesep/reference.hpp"

namespace scalesep {

// ---- time series helpers -----------------------------------------------------

/// Running trapezoid integral, out[0] = 0.
std::vector<double> cumulative_trapezoid(std::span<const double> t, std::span<const double> f);

/// Slope of the first sampled segment, (f[1] - f[0]) / (t[1] - t[0]).
double initial_slope(std::span<const double> t, std::span<const double> f);

// ---- errors ------------------------------------------------------------------

std::vector<double> l2_error_series(std::span<const WaveFunction2D> ref,
                                    std::span<const WaveFunction2D> approx);
/// Same with explicit sample times; throws InvalidInput on misalignment.
std::vector<double> l2_error_series(std::span<const double> t_ref,
                                    std::span<const WaveFunction2D> ref,
                                    std::span<const double> t_approx,
                                    std::span<const WaveFunction2D> approx);

/// ||d_x (psi - app)|| + ||x (psi - app)|| (axis x) or the y counterpart.
double h1_error(const WaveFunction2D& psi, const WaveFunction2D& app, Axis axis);

// ---- bounds --------------------------------------------------------------------

enum class BoundKind { bruteforce, meanfield };
enum class BoundPath { grad_y, grad_x_grad_y, weighted, product_quadratic };

const char* to_string(BoundKind k);
const char* to_string(BoundPath p);
BoundKind parse_bound_kind(const std::string& s);
BoundPath parse_bound_path(const std::string& s);

struct BoundPathSpec {
  BoundPath path = BoundPath::grad_y;
  double sigma_x = 1.0;
  double sigma_y = 1.0;
};

struct BoundOptions {
  double sup_safety = 2.0;      ///< factor on grid-sampled sup-norms
  Collocation collocation = {}; ///< brute-force collocation point
};

struct NamedSeries {
  std::string name;
  std::vector<double> values;
};

struct FlatBound {
  std::vector<NamedSeries> paths;  ///< one series per evaluated path
  std::vector<double> reported;    ///< pointwise minimum over the paths
};

/// Flat L^2 bounds. All time integrals carry the 1/eps factor of the
/// eps-scaled equation (1 for unscaled models).
///   grad_y:           c ||d_y W|| ||phi0x|| int ||(y - y0) phiy||
///   grad_x_grad_y:    c ||d_x d_y W|| int ||(x - x0) phix|| ||(y - y0) phiy||
///   weighted:         mean field 8 eta_w int ||<x>^sx phix|| ||<y>^sy |y| phiy||;
///                     brute force eta_w int ||(<x>^sx + <x0>^sx) phix||
///                     ||max(<y>, <y0>)^sy |y - y0| phiy||
///   product_quadratic (W = W1(x) eta y^2): mean field
///                     16 |eta| ||W1|| ||phi0x|| int || |y|^2 phiy||; brute force
///                     ||W1 - W1(x0)|| ||phi0x|| int ||(W2 - W2(y0)) phiy||
/// with c = (2, 1) for brute force and (4, 4) for mean field. Sup-norms are
/// taken over the box with the safety factor, except eta_w for the cubic
/// coupling with sigma_x, sigma_y >= 1, which is exactly |eta|.
/// Throws InvalidInput for a cubic coupling unless a weighted path is requested
/// (the box sup-norm paths are still reported alongside).
FlatBound bound_flat_l2(BoundKind kind, std::span<const BoundPathSpec> paths,
                        std::span<const ProductState> states, const ModelSpec& spec,
                        const BoundOptions& options = {});

/// Weight constant eta_w = sup |d_y W| / (<x>^sx <y>^sy) used by the weighted path.
double weighted_coupling_constant(const ModelSpec& spec, const Grid1D& gx, const Grid1D& gy,
                                  double sigma_x, double sigma_y, double safety);

/// Gradient-free bound for W = W1(x) W2(y):
///   mean field ||phi0x|| ||phi0y|| int sqrt(Var_x(W1) Var_y(W2)) / eps,
///   brute force int ||(W1 - W1(x0)) phix|| ||(W2 - W2(y0)) phiy|| / eps.
/// Throws InvalidInput for non-separable couplings.
std::vector<double> bound_gradient_free(std::span<const ProductState> states,
                                        const ModelSpec& spec,
                                        BoundKind kind = BoundKind::meanfield,
                                        Collocation collocation = {});

/// Integrand of the mean-field gradient-free bound at one state.
double gradient_free_integrand(const ProductState& state, const ModelSpec& spec);

/// Constants of the energy-space bound: prefactor K and exponential rate C in
///   K ||d_x d_y W|| int e^{C s} ||y phiy|| (||x phix|| + ||d phix|| + || |x| d phix||) ds
/// (axis x) and the mirrored y expression.
struct H1Constants {
  double prefactor = 1.0;
  double rate = 0.0;
};

std::vector<double> bound_h1(std::span<const ProductState> states, const ModelSpec& spec,
                             Axis axis, H1Constants constants, double sup_safety = 2.0);

/// Prefactor that makes `unit_bound` (computed with prefactor 1) equal to
/// `measured` at the first sample with t > 0.
double calibrate_prefactor(std::span<const double> unit_bound, std::span<const double> measured);

/// Moment functional N(psi_app) (sum of the six moment integrals).
std::vector<double> moment_functional(std::span<const ProductState> states);

// ---- observables -------------------------------------------------------------------

enum class ObservableScaling { standard, semiclassical };

/// Real polynomial symbol of total degree <= 2 in (x, xi_x, y, xi_y), quantized
/// with symmetric (Weyl) ordering. Semiclassical scaling replaces xi_y by
/// -i eps d_y; xi_x stays -i d_x.
class QuadraticObservable {
 public:
  /// Variables in the order x, xi_x, y, xi_y.
  using Exponents = std::array<int, 4>;

  QuadraticObservable() = default;
  void add_term(Exponents e, double coefficient);
  const std::map<Exponents, double>& terms() const { return terms_; }
  int degree() const;
  std::string describe() const;

  ObservableScaling scaling = ObservableScaling::standard;
  double epsilon = 1.0;

  /// <psi, B psi>, unnormalized.
  double expectation(const WaveFunction2D& psi) const;
  /// B psi
  WaveFunction2D apply(const WaveFunction2D& psi) const;

 private:
  std::map<Exponents, double> terms_;
};

/// Parses expressions such as "y^2 + xi_y^2", "0.5*x*px - 2*y", "1".
/// Momentum names: xi_x, px, p_x and xi_y, py, p_y. Degree > 2 is rejected.
QuadraticObservable parse_observable(const std::string& text);

/// e(t) = <psi, B psi> - <app, B app> at each aligned sample.
std::vector<double> observable_error(std::span<const WaveFunction2D> ref,
                                     std::span<const WaveFunction2D> approx,
                                     const QuadraticObservable& b);

// ---- rates ----------------------------------------------------------------------------

enum class RateMode { norm, observable };

struct RateFit {
  double slope = 0.0;
  double intercept = 0.0;
};

/// Least-squares fit of log|error| against log eps.
RateFit semiclassical_rate_fit(const std::map<double, double>& errors_by_epsilon, RateMode mode);

// ---- report ---------------------------------------------------------------------------

struct ErrorReport {
  std::string time_unit = "1";
  std::optional<double> t1;  ///< adds a t/t1 column when set
  std::vector<double> times;
  std::vector<double> err_l2;
  std::vector<NamedSeries> bounds;
  std::vector<NamedSeries> norms;
  std::vector<NamedSeries> energies;
  std::vector<NamedSeries> moment_integrals;
  std::vector<NamedSeries> observable_errors;
  std::vector<NamedSeries> extra;

  /// Throws InvalidInput when a series length differs from times or a bound is negative.
  void validate() const;
  /// Header row with units, then one row per sample; %.17g formatting.
  void write_csv(std::ostream& os) const;
  std::vector<std::string> column_names() const;
};

/// Standard moment integrals of a product trajectory: int ||y phiy||,
/// int ||x phix|| ||y phiy||, int || |y|^2 phiy||.
std::vector<NamedSeries> product_moment_integrals(std::span<const ProductState> states);

}  // namespace scalesep
