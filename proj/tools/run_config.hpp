#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "scalesep/analysis.hpp"
#include "scalesep/kernels.hpp"
#include "scalesep/model.hpp"
#include "scalesep/semiclassical.hpp"

namespace scalesep::cli {

struct PotentialConfig {
  std::string type = "harmonic";  // harmonic | double_well | polynomial
  double k = 1.0;
  double center = 0.0;
  double width = 4.0;
  std::vector<double> coefficients;

  Potential1D build() const;
};

struct ModelConfig {
  std::optional<Preset> preset;
  std::optional<double> eta;  // overrides the preset value
  PotentialConfig v1;
  PotentialConfig v2;
  std::string coupling = "none";  // none | cubic | product
  std::vector<double> w1;         // product coupling factors (polynomial coefficients)
  std::vector<double> w2;
  double epsilon = 1.0;
  double k4 = 0.0;
  double mass_x = 1.0;
  double mass_y = 1.0;
  double t1 = 1.0;
};

enum class Method { reference, bruteforce, meanfield, semiclassical_taylor, semiclassical_averaged };

const char* to_string(Method m);
Method parse_method(const std::string& s);
bool is_semiclassical(Method m);

struct InitialConfig {
  std::string type = "harmonic_ground";  // harmonic_ground | wavepacket
  double center_x = 0.0;
  double center_y = 0.0;
  double q0 = 0.0;
  double p0 = 0.0;
};

struct ObservableConfig {
  std::string name;
  std::string expression;
};

struct BoundsConfig {
  std::vector<BoundPathSpec> paths;
  bool gradient_free = false;
  bool h1 = false;
  std::optional<double> h1_prefactor;  // empty: calibrated at the first sample
  double h1_rate = 0.0;
  double sup_safety = 2.0;
  std::optional<Collocation> collocation;  // empty: pick_collocation

  bool any() const { return !paths.empty() || gradient_free || h1; }
};

struct SweepConfig {
  std::string parameter;  // epsilon | eta | k4 | preset | dt
  std::vector<std::string> values;
  bool active() const { return !parameter.empty(); }
};

struct RunConfig {
  ModelConfig model;
  std::optional<GridSpec> x, y, z;
  std::optional<std::string> dt, t_final;  // raw text, may carry a t1 suffix
  std::optional<std::size_t> sample_every;
  std::vector<Method> methods;
  InitialConfig initial;
  std::vector<ObservableConfig> observables;
  BoundsConfig bounds;
  SweepConfig sweep;
  std::string output_dir = "out";
  bool snapshot = false;
  Exec exec = Exec::parallel;

  bool has(Method m) const;
};

/// Fully resolved problem for one run.
struct ResolvedRun {
  ModelSpec model;
  Grid1D x, y, z;
  PropagationConfig time;
  double t1 = 1.0;
  bool atomic_units = false;
};

/// Parses a config file in INI form. Time values accept a "t1" suffix
/// ("10 t1", "t1/200"). Throws InvalidInput on syntax errors.
RunConfig load_config(const std::string& path);
RunConfig parse_config(std::istream& in);

/// Every diagnostic of the config; empty iff runnable.
std::vector<std::string> validate(const RunConfig& cfg);

/// Resolves defaults (preset grids and times) and builds the model.
ResolvedRun resolve(const RunConfig& cfg);

/// Copy of cfg with one sweep point applied and the sweep removed.
RunConfig apply_sweep_value(const RunConfig& cfg, const std::string& value);

/// INI text with every resolved default written out.
void write_resolved_config(const RunConfig& cfg, std::ostream& os);

/// Parses "10 t1", "t1/200", "0.5" with the given t1.
double parse_time(const std::string& text, double t1);

}  // namespace scalesep::cli
