#include "run_config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <cstdio>
#include <fstream>
#include <map>
#include <regex>
#include <set>
#include <sstream>

namespace scalesep::cli {

namespace pt = boost::property_tree;

Potential1D PotentialConfig::build() const {
  if (type == "harmonic") return Potential1D::harmonic(k, center);
  if (type == "double_well") return double_well(k, width);
  if (type == "polynomial") {
    if (coefficients.empty()) throw InvalidInput("polynomial potential needs coefficients");
    return Potential1D::polynomial(coefficients);
  }
  throw InvalidInput("unknown potential type '" + type + "'");
}

const char* to_string(Method m) {
  switch (m) {
    case Method::reference: return "reference";
    case Method::bruteforce: return "bruteforce";
    case Method::meanfield: return "meanfield";
    case Method::semiclassical_taylor: return "semiclassical_taylor";
    case Method::semiclassical_averaged: return "semiclassical_averaged";
  }
  return "?";
}

Method parse_method(const std::string& s) {
  for (Method m : {Method::reference, Method::bruteforce, Method::meanfield,
                   Method::semiclassical_taylor, Method::semiclassical_averaged}) {
    if (s == to_string(m)) return m;
  }
  throw InvalidInput("unknown method '" + s + "'");
}

bool is_semiclassical(Method m) {
  return m == Method::semiclassical_taylor || m == Method::semiclassical_averaged;
}

bool RunConfig::has(Method m) const {
  return std::find(methods.begin(), methods.end(), m) != methods.end();
}

double parse_time(const std::string& text, double t1) {
  static const std::regex re(
      R"(^\s*([-+]?[0-9]*\.?[0-9]+(?:[eE][-+]?[0-9]+)?)?\s*\*?\s*(t1)?\s*(?:/\s*([0-9]*\.?[0-9]+(?:[eE][-+]?[0-9]+)?))?\s*$)");
  std::smatch m;
  if (!std::regex_match(text, m, re) || (!m[1].matched && !m[2].matched)) {
    throw InvalidInput("cannot parse time value '" + text + "'");
  }
  double v = m[1].matched ? std::stod(m[1].str()) : 1.0;
  if (m[2].matched) v *= t1;
  if (m[3].matched) v /= std::stod(m[3].str());
  return v;
}

namespace {

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ',' || std::isspace(static_cast<unsigned char>(c))) {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

double to_double(const std::string& key, const std::string& s) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  while (used < s.size() && std::isspace(static_cast<unsigned char>(s[used]))) ++used;
  if (used == 0 || used != s.size()) throw InvalidInput(key + ": not a number '" + s + "'");
  return v;
}

std::vector<double> to_doubles(const std::string& key, const std::string& s) {
  std::vector<double> out;
  for (const auto& t : split_list(s)) out.push_back(to_double(key, t));
  return out;
}

bool to_bool(const std::string& key, const std::string& s) {
  if (s == "true" || s == "yes" || s == "1" || s == "on") return true;
  if (s == "false" || s == "no" || s == "0" || s == "off") return false;
  throw InvalidInput(key + ": not a boolean '" + s + "'");
}

std::size_t to_size(const std::string& key, const std::string& s) {
  const double v = to_double(key, s);
  if (v < 0.0 || v != std::floor(v)) throw InvalidInput(key + ": not a non-negative integer");
  return static_cast<std::size_t>(v);
}

const std::map<std::string, std::set<std::string>>& known_keys() {
  static const std::map<std::string, std::set<std::string>> keys = {
      {"model",
       {"preset", "eta", "v1", "v1_k", "v1_center", "v1_width", "v1_coefficients", "v2", "v2_k",
        "v2_center", "v2_width", "v2_coefficients", "coupling", "w1", "w2", "epsilon", "k4",
        "mass_x", "mass_y", "t1"}},
      {"grid", {"x_min", "x_max", "x_n", "y_min", "y_max", "y_n", "z_min", "z_max", "z_n"}},
      {"time", {"dt", "t_final", "sample_every"}},
      {"methods", {"list"}},
      {"initial", {"type", "center_x", "center_y", "q0", "p0"}},
      {"observables", {}},
      {"bounds",
       {"paths", "sigma_x", "sigma_y", "gradient_free", "h1", "h1_prefactor", "h1_rate",
        "sup_safety", "collocation"}},
      {"sweep", {"parameter", "values"}},
      {"output", {"dir", "snapshot"}},
      {"numerics", {"exec"}},
  };
  return keys;
}

PotentialConfig read_potential(const pt::ptree& m, const std::string& p) {
  PotentialConfig c;
  if (auto v = m.get_optional<std::string>(p)) c.type = *v;
  if (auto v = m.get_optional<std::string>(p + "_k")) c.k = to_double(p + "_k", *v);
  if (auto v = m.get_optional<std::string>(p + "_center")) c.center = to_double(p + "_center", *v);
  if (auto v = m.get_optional<std::string>(p + "_width")) c.width = to_double(p + "_width", *v);
  if (auto v = m.get_optional<std::string>(p + "_coefficients")) {
    c.coefficients = to_doubles(p + "_coefficients", *v);
  }
  return c;
}

std::optional<GridSpec> read_grid(const pt::ptree& g, const std::string& a) {
  const auto lo = g.get_optional<std::string>(a + "_min");
  const auto hi = g.get_optional<std::string>(a + "_max");
  const auto n = g.get_optional<std::string>(a + "_n");
  if (!lo && !hi && !n) return std::nullopt;
  if (!lo || !hi || !n) throw InvalidInput("grid." + a + ": min, max and n must be given together");
  return GridSpec{to_double(a + "_min", *lo), to_double(a + "_max", *hi), to_size(a + "_n", *n)};
}

}  // namespace

RunConfig parse_config(std::istream& in) {
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw InvalidInput(std::string("config syntax: ") + e.what());
  }
  const auto& known = known_keys();
  for (const auto& [section, body] : tree) {
    const auto it = known.find(section);
    if (it == known.end()) throw InvalidInput("unknown config section [" + section + "]");
    if (section == "observables") continue;
    for (const auto& [key, _] : body) {
      if (!it->second.count(key)) throw InvalidInput("unknown key " + section + "." + key);
    }
  }
  static const pt::ptree empty;
  auto section = [&](const char* name) -> const pt::ptree& {
    const auto s = tree.get_child_optional(name);
    return s ? *s : empty;
  };

  RunConfig c;
  const pt::ptree& m = section("model");
  if (auto v = m.get_optional<std::string>("preset")) c.model.preset = parse_preset(*v);
  if (auto v = m.get_optional<std::string>("eta")) c.model.eta = to_double("eta", *v);
  c.model.v1 = read_potential(m, "v1");
  c.model.v2 = read_potential(m, "v2");
  if (auto v = m.get_optional<std::string>("coupling")) c.model.coupling = *v;
  if (auto v = m.get_optional<std::string>("w1")) c.model.w1 = to_doubles("w1", *v);
  if (auto v = m.get_optional<std::string>("w2")) c.model.w2 = to_doubles("w2", *v);
  if (auto v = m.get_optional<std::string>("epsilon")) c.model.epsilon = to_double("epsilon", *v);
  if (auto v = m.get_optional<std::string>("k4")) c.model.k4 = to_double("k4", *v);
  if (auto v = m.get_optional<std::string>("mass_x")) c.model.mass_x = to_double("mass_x", *v);
  if (auto v = m.get_optional<std::string>("mass_y")) c.model.mass_y = to_double("mass_y", *v);
  if (auto v = m.get_optional<std::string>("t1")) c.model.t1 = to_double("t1", *v);

  const pt::ptree& g = section("grid");
  c.x = read_grid(g, "x");
  c.y = read_grid(g, "y");
  c.z = read_grid(g, "z");

  const pt::ptree& t = section("time");
  if (auto v = t.get_optional<std::string>("dt")) c.dt = *v;
  if (auto v = t.get_optional<std::string>("t_final")) c.t_final = *v;
  if (auto v = t.get_optional<std::string>("sample_every")) {
    c.sample_every = to_size("sample_every", *v);
  }

  for (const auto& s : split_list(section("methods").get<std::string>("list", ""))) {
    c.methods.push_back(parse_method(s));
  }

  const pt::ptree& i = section("initial");
  c.initial.type = i.get<std::string>("type", c.initial.type);
  if (auto v = i.get_optional<std::string>("center_x")) c.initial.center_x = to_double("center_x", *v);
  if (auto v = i.get_optional<std::string>("center_y")) c.initial.center_y = to_double("center_y", *v);
  if (auto v = i.get_optional<std::string>("q0")) c.initial.q0 = to_double("q0", *v);
  if (auto v = i.get_optional<std::string>("p0")) c.initial.p0 = to_double("p0", *v);

  for (const auto& [name, node] : section("observables")) {
    c.observables.push_back({name, node.data()});
  }

  const pt::ptree& b = section("bounds");
  double sx = 1.0, sy = 1.0;
  if (auto v = b.get_optional<std::string>("sigma_x")) sx = to_double("sigma_x", *v);
  if (auto v = b.get_optional<std::string>("sigma_y")) sy = to_double("sigma_y", *v);
  for (const auto& s : split_list(b.get<std::string>("paths", ""))) {
    c.bounds.paths.push_back({parse_bound_path(s), sx, sy});
  }
  if (auto v = b.get_optional<std::string>("gradient_free")) {
    c.bounds.gradient_free = to_bool("gradient_free", *v);
  }
  if (auto v = b.get_optional<std::string>("h1")) c.bounds.h1 = to_bool("h1", *v);
  if (auto v = b.get_optional<std::string>("h1_prefactor"); v && *v != "calibrate") {
    c.bounds.h1_prefactor = to_double("h1_prefactor", *v);
  }
  if (auto v = b.get_optional<std::string>("h1_rate")) c.bounds.h1_rate = to_double("h1_rate", *v);
  if (auto v = b.get_optional<std::string>("sup_safety")) {
    c.bounds.sup_safety = to_double("sup_safety", *v);
  }
  if (auto v = b.get_optional<std::string>("collocation"); v && *v != "auto") {
    const auto xy = to_doubles("collocation", *v);
    if (xy.size() != 2) throw InvalidInput("collocation: expected 'auto' or two numbers");
    c.bounds.collocation = Collocation{xy[0], xy[1]};
  }

  const pt::ptree& s = section("sweep");
  c.sweep.parameter = s.get<std::string>("parameter", "");
  c.sweep.values = split_list(s.get<std::string>("values", ""));

  const pt::ptree& o = section("output");
  c.output_dir = o.get<std::string>("dir", c.output_dir);
  if (auto v = o.get_optional<std::string>("snapshot")) c.snapshot = to_bool("snapshot", *v);

  const std::string exec = section("numerics").get<std::string>("exec", "parallel");
  if (exec == "parallel") {
    c.exec = Exec::parallel;
  } else if (exec == "serial") {
    c.exec = Exec::serial;
  } else {
    throw InvalidInput("numerics.exec must be 'serial' or 'parallel'");
  }
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open config '" + path + "'");
  return parse_config(in);
}

namespace {

ModelSpec build_model(const ModelConfig& m) {
  if (m.preset) {
    const PresetSetup s = preset(*m.preset);
    const CouplingSpec w = m.eta ? CouplingSpec::cubic(*m.eta) : s.model.coupling;
    return make_model(s.model.v1, s.model.v2, w, 1.0, m.k4, s.model.mass_x, s.model.mass_y,
                      s.model.name);
  }
  CouplingSpec w;
  if (m.coupling == "cubic") {
    w = CouplingSpec::cubic(m.eta.value_or(0.0));
  } else if (m.coupling == "product") {
    if (m.w1.empty() || m.w2.empty()) throw InvalidInput("product coupling needs w1 and w2");
    w = CouplingSpec::product(Potential1D::polynomial(m.w1), Potential1D::polynomial(m.w2));
  } else if (m.coupling != "none") {
    throw InvalidInput("unknown coupling '" + m.coupling + "'");
  }
  return make_model(m.v1.build(), m.v2.build(), w, m.epsilon, m.k4, m.mass_x, m.mass_y, "explicit");
}

}  // namespace

ResolvedRun resolve(const RunConfig& cfg) {
  std::optional<PresetSetup> ps;
  if (cfg.model.preset) ps = preset(*cfg.model.preset);
  const double t1 = ps ? ps->t1 : cfg.model.t1;
  const GridSpec dx = ps ? ps->x : GridSpec{-8.0, 8.0, 128};
  const GridSpec dy = ps ? ps->y : GridSpec{-8.0, 8.0, 128};
  const Grid1D dz = default_z_grid();
  const GridSpec gz = cfg.z.value_or(GridSpec{dz.min(), dz.max(), dz.size()});

  PropagationConfig time;
  if (cfg.dt) {
    time.dt = parse_time(*cfg.dt, t1);
  } else if (ps) {
    time.dt = ps->dt;
  } else {
    throw InvalidInput("time.dt is required for explicit models");
  }
  if (cfg.t_final) {
    time.t_final = parse_time(*cfg.t_final, t1);
  } else if (ps) {
    time.t_final = ps->t_final;
  } else {
    throw InvalidInput("time.t_final is required for explicit models");
  }
  time.sample_every = cfg.sample_every.value_or(ps ? ps->sample_every : 1);
  time.exec = cfg.exec;

  return ResolvedRun{build_model(cfg.model), cfg.x.value_or(dx).grid(), cfg.y.value_or(dy).grid(),
                     gz.grid(), time, t1, ps.has_value()};
}

namespace {

void check_grid(std::vector<std::string>& d, const char* axis, const std::optional<GridSpec>& g) {
  if (!g) return;
  if (!(g->max > g->min)) d.push_back(std::string("grid.") + axis + ": max must exceed min");
  if (!is_power_of_two(g->n) || g->n < 8) {
    d.push_back(std::string("grid.") + axis + "_n = " + std::to_string(g->n) +
                ": n must be a power of two");
  }
}

void validate_point(const RunConfig& cfg, std::vector<std::string>& d) {
  if (cfg.methods.empty()) d.push_back("methods.list: at least one method is required");
  check_grid(d, "x", cfg.x);
  check_grid(d, "y", cfg.y);
  check_grid(d, "z", cfg.z);
  const ModelConfig& m = cfg.model;
  if (m.preset && m.epsilon != 1.0) d.push_back("model.epsilon: presets are in atomic units (epsilon = 1)");
  if (!(m.epsilon > 0.0) || !(m.epsilon <= 1.0)) d.push_back("model.epsilon must lie in (0, 1]");
  if (!(m.mass_x > 0.0) || !(m.mass_y > 0.0)) d.push_back("model.mass_x/mass_y must be positive");
  if (m.k4 < 0.0) d.push_back("model.k4 must be non-negative");
  if (!(m.t1 > 0.0)) d.push_back("model.t1 must be positive");
  if (m.eta && !std::isfinite(*m.eta)) d.push_back("model.eta must be finite");
  if (!m.preset && m.coupling != "none" && m.coupling != "cubic" && m.coupling != "product") {
    d.push_back("model.coupling must be none, cubic or product");
  }

  if ((cfg.bounds.any() || !cfg.observables.empty()) && !cfg.has(Method::reference)) {
    d.push_back("methods.list: 'reference' is required when bounds or observables are requested");
  }
  const bool sc = cfg.has(Method::semiclassical_taylor) || cfg.has(Method::semiclassical_averaged);
  if (sc && !(m.epsilon < 1.0)) d.push_back("semiclassical methods require model.epsilon < 1");
  if (sc && cfg.initial.type != "wavepacket") {
    d.push_back("semiclassical methods require initial.type = wavepacket");
  }
  if (cfg.initial.type != "harmonic_ground" && cfg.initial.type != "wavepacket") {
    d.push_back("initial.type must be harmonic_ground or wavepacket");
  }
  if (cfg.initial.type == "wavepacket" && !(m.epsilon < 1.0)) {
    d.push_back("initial.type = wavepacket requires model.epsilon < 1");
  }
  for (const auto& o : cfg.observables) {
    try {
      parse_observable(o.expression);
    } catch (const InvalidInput& e) {
      d.push_back(std::string("observables.") + o.name + ": " + e.what());
    }
  }
  for (const auto& p : cfg.bounds.paths) {
    if (!(p.sigma_x >= 0.0) || !(p.sigma_y >= 0.0)) d.push_back("bounds.sigma_x/sigma_y must be >= 0");
  }
  if (!(cfg.bounds.sup_safety >= 1.0)) d.push_back("bounds.sup_safety must be >= 1");
  if (cfg.bounds.h1_prefactor && !(*cfg.bounds.h1_prefactor > 0.0)) {
    d.push_back("bounds.h1_prefactor must be positive or 'calibrate'");
  }

  std::optional<ResolvedRun> resolved;
  try {
    resolved = resolve(cfg);
  } catch (const std::exception& e) {
    d.push_back(std::string("model/time: ") + e.what());
    return;
  }
  const ResolvedRun& r = *resolved;
  try {
    r.model.validate();
  } catch (const std::exception& e) {
    d.push_back(std::string("model: ") + e.what());
  }
  try {
    r.time.validate();
  } catch (const std::exception& e) {
    d.push_back(std::string("time: ") + e.what());
  }
  const CouplingSpec& w = r.model.coupling;
  if (w.unbounded_gradient() && !cfg.bounds.paths.empty() &&
      std::none_of(cfg.bounds.paths.begin(), cfg.bounds.paths.end(),
                   [](const BoundPathSpec& p) { return p.path == BoundPath::weighted; })) {
    d.push_back("bounds.paths: the cubic coupling requires the weighted path");
  }
  if (cfg.bounds.gradient_free && !w.is_zero() && !w.factors()) {
    d.push_back("bounds.gradient_free requires a separable coupling");
  }
  const bool product_path = std::any_of(cfg.bounds.paths.begin(), cfg.bounds.paths.end(),
                                        [](const BoundPathSpec& p) {
                                          return p.path == BoundPath::product_quadratic;
                                        });
  if (product_path && !w.factors()) {
    d.push_back("bounds.paths: product_quadratic requires a separable coupling");
  }
  if (sc) {
    if (r.time.dt > r.model.epsilon) {
      std::ostringstream os;
      os << "time.dt = " << r.time.dt << " does not resolve the time scale epsilon = "
         << r.model.epsilon;
      d.push_back(os.str());
    }
  }
  if (cfg.initial.type == "wavepacket" && cfg.initial.p0 != 0.0) {
    const double wl = 2.0 * std::numbers::pi * r.model.epsilon / std::abs(cfg.initial.p0);
    if (r.y.spacing() > wl / 8.0) d.push_back("grid.y does not resolve the wave-packet oscillation");
  }
  // Boundary-mass heuristic for the initial state.
  try {
    std::pair<WaveFunction1D, WaveFunction1D> f =
        cfg.initial.type == "wavepacket"
            ? initial_product(r.model, WavePacketInit{cfg.initial.q0, cfg.initial.p0, {},
                                                      cfg.initial.center_x},
                              r.x, r.y)
            : initial_product(r.model, HarmonicGround{cfg.initial.center_x, cfg.initial.center_y},
                              r.x, r.y);
    if (boundary_mass(f.first) > kBoundaryMassLimit) {
      d.push_back("initial state: x factor carries mass at the box edge; widen grid.x");
    }
    if (boundary_mass(f.second) > kBoundaryMassLimit) {
      d.push_back("initial state: y factor carries mass at the box edge; widen grid.y");
    }
  } catch (const std::exception& e) {
    d.push_back(std::string("initial: ") + e.what());
  }
}

}  // namespace

RunConfig apply_sweep_value(const RunConfig& cfg, const std::string& value) {
  RunConfig c = cfg;
  c.sweep = {};
  const std::string& p = cfg.sweep.parameter;
  if (p == "epsilon") {
    c.model.epsilon = to_double("sweep.values", value);
  } else if (p == "eta") {
    c.model.eta = to_double("sweep.values", value);
  } else if (p == "k4") {
    c.model.k4 = to_double("sweep.values", value);
  } else if (p == "preset") {
    c.model.preset = parse_preset(value);
  } else if (p == "dt") {
    c.dt = value;
  } else {
    throw InvalidInput("sweep.parameter must be epsilon, eta, k4, preset or dt");
  }
  return c;
}

std::vector<std::string> validate(const RunConfig& cfg) {
  std::vector<std::string> d;
  if (!cfg.sweep.active()) {
    if (!cfg.sweep.values.empty()) d.push_back("sweep.values given without sweep.parameter");
    validate_point(cfg, d);
    return d;
  }
  if (cfg.sweep.values.empty()) d.push_back("sweep.values: at least one value is required");
  for (const auto& v : cfg.sweep.values) {
    try {
      std::vector<std::string> sub;
      validate_point(apply_sweep_value(cfg, v), sub);
      for (auto& s : sub) d.push_back("sweep " + cfg.sweep.parameter + "=" + v + ": " + s);
    } catch (const std::exception& e) {
      d.push_back(std::string("sweep: ") + e.what());
    }
  }
  return d;
}

namespace {

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string nums(const std::vector<double>& v) {
  std::string s;
  for (std::size_t k = 0; k < v.size(); ++k) s += (k ? " " : "") + num(v[k]);
  return s;
}

void write_potential(std::ostream& os, const std::string& p, const PotentialConfig& c) {
  os << p << " = " << c.type << "\n";
  os << p << "_k = " << num(c.k) << "\n";
  os << p << "_center = " << num(c.center) << "\n";
  os << p << "_width = " << num(c.width) << "\n";
  if (!c.coefficients.empty()) os << p << "_coefficients = " << nums(c.coefficients) << "\n";
}

}  // namespace

void write_resolved_config(const RunConfig& cfg, std::ostream& os) {
  const ModelConfig& m = cfg.model;
  os << "[model]\n";
  if (m.preset) {
    os << "preset = " << to_string(*m.preset) << "\n";
    os << "eta = " << num(m.eta.value_or(preset_parameters(*m.preset).eta)) << "\n";
  } else {
    write_potential(os, "v1", m.v1);
    write_potential(os, "v2", m.v2);
    os << "coupling = " << m.coupling << "\n";
    if (m.eta) os << "eta = " << num(*m.eta) << "\n";
    if (!m.w1.empty()) os << "w1 = " << nums(m.w1) << "\n";
    if (!m.w2.empty()) os << "w2 = " << nums(m.w2) << "\n";
    os << "epsilon = " << num(m.epsilon) << "\n";
    os << "mass_x = " << num(m.mass_x) << "\n";
    os << "mass_y = " << num(m.mass_y) << "\n";
    os << "t1 = " << num(m.t1) << "\n";
  }
  os << "k4 = " << num(m.k4) << "\n";

  if (!cfg.sweep.active()) {
    const ResolvedRun r = resolve(cfg);
    os << "\n[grid]\n";
    for (const auto& [a, g] : {std::pair<const char*, const Grid1D*>{"x", &r.x}, {"y", &r.y}, {"z", &r.z}}) {
      os << a << "_min = " << num(g->min()) << "\n" << a << "_max = " << num(g->max()) << "\n"
         << a << "_n = " << g->size() << "\n";
    }
    os << "\n[time]\n";
    os << "dt = " << num(r.time.dt) << "\n";
    os << "t_final = " << num(r.time.t_final) << "\n";
    os << "sample_every = " << r.time.sample_every << "\n";
  } else {
    if (cfg.x || cfg.y || cfg.z) {
      os << "\n[grid]\n";
      for (const auto& [a, g] : {std::pair<const char*, const std::optional<GridSpec>*>{"x", &cfg.x},
                                 {"y", &cfg.y}, {"z", &cfg.z}}) {
        if (!*g) continue;
        os << a << "_min = " << num((*g)->min) << "\n" << a << "_max = " << num((*g)->max) << "\n"
           << a << "_n = " << (*g)->n << "\n";
      }
    }
    if (cfg.dt || cfg.t_final || cfg.sample_every) {
      os << "\n[time]\n";
      if (cfg.dt) os << "dt = " << *cfg.dt << "\n";
      if (cfg.t_final) os << "t_final = " << *cfg.t_final << "\n";
      if (cfg.sample_every) os << "sample_every = " << *cfg.sample_every << "\n";
    }
  }

  os << "\n[methods]\nlist = ";
  for (std::size_t k = 0; k < cfg.methods.size(); ++k) os << (k ? ", " : "") << to_string(cfg.methods[k]);
  os << "\n\n[initial]\n";
  os << "type = " << cfg.initial.type << "\n";
  os << "center_x = " << num(cfg.initial.center_x) << "\n";
  os << "center_y = " << num(cfg.initial.center_y) << "\n";
  os << "q0 = " << num(cfg.initial.q0) << "\n";
  os << "p0 = " << num(cfg.initial.p0) << "\n";

  if (!cfg.observables.empty()) {
    os << "\n[observables]\n";
    for (const auto& o : cfg.observables) os << o.name << " = " << o.expression << "\n";
  }

  os << "\n[bounds]\n";
  if (!cfg.bounds.paths.empty()) {
    os << "paths = ";
    for (std::size_t k = 0; k < cfg.bounds.paths.size(); ++k) {
      os << (k ? ", " : "") << to_string(cfg.bounds.paths[k].path);
    }
    os << "\nsigma_x = " << num(cfg.bounds.paths.front().sigma_x) << "\n";
    os << "sigma_y = " << num(cfg.bounds.paths.front().sigma_y) << "\n";
  }
  os << "gradient_free = " << (cfg.bounds.gradient_free ? "true" : "false") << "\n";
  os << "h1 = " << (cfg.bounds.h1 ? "true" : "false") << "\n";
  os << "h1_prefactor = "
     << (cfg.bounds.h1_prefactor ? num(*cfg.bounds.h1_prefactor) : std::string("calibrate")) << "\n";
  os << "h1_rate = " << num(cfg.bounds.h1_rate) << "\n";
  os << "sup_safety = " << num(cfg.bounds.sup_safety) << "\n";
  if (cfg.bounds.collocation) {
    os << "collocation = " << num(cfg.bounds.collocation->x0) << " "
       << num(cfg.bounds.collocation->y0) << "\n";
  } else {
    os << "collocation = auto\n";
  }

  if (cfg.sweep.active()) {
    os << "\n[sweep]\nparameter = " << cfg.sweep.parameter << "\nvalues = ";
    for (std::size_t k = 0; k < cfg.sweep.values.size(); ++k) {
      os << (k ? ", " : "") << cfg.sweep.values[k];
    }
    os << "\n";
  }
  os << "\n[output]\ndir = " << cfg.output_dir << "\nsnapshot = " << (cfg.snapshot ? "true" : "false")
     << "\n";
  os << "\n[numerics]\nexec = " << (cfg.exec == Exec::serial ? "serial" : "parallel") << "\n";
}

}  // namespace scalesep::cli
