#include "runner.hpp"

#include <atomic>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <mutex>
#include <thread>

#include <json.hpp>

#include "scalesep/factorized.hpp"
#include "scalesep/reference.hpp"

namespace scalesep::cli {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

static_assert(std::endian::native == std::endian::little, "snapshot writer assumes little endian");

void write_snapshot(const WaveFunction2D& psi, const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidInput("cannot write snapshot '" + path.string() + "'");
  const char magic[8] = {'P', 'S', 'I', '2', 'D', 'L', 'E', '\0'};
  const std::uint32_t nx = static_cast<std::uint32_t>(psi.nx());
  const std::uint32_t ny = static_cast<std::uint32_t>(psi.ny());
  out.write(magic, 8);
  out.write(reinterpret_cast<const char*>(&nx), 4);
  out.write(reinterpret_cast<const char*>(&ny), 4);
  // std::complex<double> is layout-compatible with double[2].
  out.write(reinterpret_cast<const char*>(psi.values().data()),
            static_cast<std::streamsize>(psi.values().size() * sizeof(cplx)));
}

WaveFunction2D read_snapshot(const fs::path& path, const Grid1D& gx, const Grid1D& gy) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInput("cannot read snapshot '" + path.string() + "'");
  char magic[8];
  std::uint32_t nx = 0, ny = 0;
  in.read(magic, 8);
  in.read(reinterpret_cast<char*>(&nx), 4);
  in.read(reinterpret_cast<char*>(&ny), 4);
  if (!in || std::memcmp(magic, "PSI2DLE", 8) != 0) throw InvalidInput("not a snapshot file");
  if (nx != gx.size() || ny != gy.size()) throw InvalidInput("snapshot grid size mismatch");
  std::vector<cplx> v(static_cast<std::size_t>(nx) * ny);
  in.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(v.size() * sizeof(cplx)));
  if (!in) throw InvalidInput("truncated snapshot");
  return WaveFunction2D(gx, gy, std::move(v));
}

namespace {

struct Approximation {
  Method method;
  std::vector<ProductState> product;          // bruteforce / meanfield
  std::vector<WavePacketState> wavepacket;    // semiclassical
  ErrorReport report;
  std::vector<double> h1_err_x, h1_err_y;
  std::optional<WaveFunction2D> final_state;

  bool is_product() const { return !is_semiclassical(method); }
  std::size_t samples() const { return is_product() ? product.size() : wavepacket.size(); }
  WaveFunction2D state(std::size_t k, const Grid1D& gy, Exec exec) const {
    return is_product() ? assemble(product[k], PhaseSign::plus, exec)
                        : assemble_semiclassical(wavepacket[k], gy, exec);
  }
  double time(std::size_t k) const { return is_product() ? product[k].t : wavepacket[k].t; }
};

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream out(p);
  if (!out) throw InvalidInput("cannot write '" + p.string() + "'");
  out << text;
}

void write_report(const ErrorReport& r, const fs::path& p) {
  std::ofstream out(p);
  if (!out) throw InvalidInput("cannot write '" + p.string() + "'");
  r.write_csv(out);
}

ordered_json grid_json(const Grid1D& g) { return {{"min", g.min()}, {"max", g.max()}, {"n", g.size()}}; }

}  // namespace

RunSummary run_single(const RunConfig& cfg, const fs::path& dir) {
  if (cfg.sweep.active()) throw InvalidInput("run_single called with a sweep config");
  if (const auto d = validate(cfg); !d.empty()) throw InvalidInput(d.front());
  const auto wall0 = std::chrono::steady_clock::now();
  const ResolvedRun r = resolve(cfg);
  const ModelSpec& spec = r.model;
  const Exec exec = cfg.exec;
  fs::create_directories(dir);

  RunSummary summary;
  const bool wavepacket = cfg.initial.type == "wavepacket";
  const WavePacketInit wp{cfg.initial.q0, cfg.initial.p0, {}, cfg.initial.center_x};
  const auto [phix0, phiy0] =
      wavepacket ? initial_product(spec, wp, r.x, r.y)
                 : initial_product(spec, HarmonicGround{cfg.initial.center_x, cfg.initial.center_y},
                                   r.x, r.y);
  const Collocation colloc = cfg.bounds.collocation.value_or(pick_collocation(spec, r.x, r.y));

  std::vector<std::pair<std::string, QuadraticObservable>> observables;
  for (const auto& o : cfg.observables) {
    QuadraticObservable b = parse_observable(o.expression);
    b.scaling = ObservableScaling::semiclassical;
    b.epsilon = spec.epsilon;
    observables.emplace_back(o.name, std::move(b));
  }

  // Approximations first: their trajectories are small, the reference is
  // compared on the fly without storing its states.
  std::vector<Approximation> approx;
  for (Method m : cfg.methods) {
    if (m == Method::reference) continue;
    Approximation a{m, {}, {}, {}, {}, {}, {}};
    if (m == Method::bruteforce) {
      a.product = propagate_bruteforce(spec, phix0, phiy0, r.time, colloc);
    } else if (m == Method::meanfield) {
      a.product = propagate_meanfield(spec, phix0, phiy0, r.time);
    } else {
      const Variant v = m == Method::semiclassical_taylor ? Variant::taylor : Variant::averaged;
      a.wavepacket = propagate_semiclassical(spec, initial_wavepacket(spec, wp, r.x, r.z), r.time, v);
      for (const auto& s : {a.wavepacket.front(), a.wavepacket.back()}) {
        if (auto w = boundary_warning(s.u2, std::string(to_string(m)) + " amplitude"); !w.empty()) {
          summary.warnings.push_back(w);
        }
      }
    }
    approx.push_back(std::move(a));
  }

  const bool has_ref = cfg.has(Method::reference);
  const std::size_t n_samples = r.time.sample_steps().size();
  for (auto& a : approx) {
    if (a.samples() != n_samples) throw NumericalAbort("approximation sample count mismatch");
    a.report.time_unit = r.atomic_units ? "a.u." : "1";
    a.report.t1 = r.t1;
    for (std::size_t k = 0; k < n_samples; ++k) a.report.times.push_back(a.time(k));
    if (has_ref) a.report.err_l2.assign(n_samples, 0.0);
    a.report.norms.push_back({"reference", std::vector<double>(n_samples, 0.0)});
    a.report.norms.push_back({std::string(to_string(a.method)), std::vector<double>(n_samples, 0.0)});
    if (!has_ref) a.report.norms.erase(a.report.norms.begin());
    for (const auto& [name, _] : observables) {
      a.report.observable_errors.push_back({name, std::vector<double>(n_samples, 0.0)});
    }
    if (cfg.bounds.h1 && a.is_product() && has_ref) {
      a.h1_err_x.assign(n_samples, 0.0);
      a.h1_err_y.assign(n_samples, 0.0);
    }
  }

  Trajectory2D ref;
  std::optional<WaveFunction2D> ref_final;
  if (has_ref) {
    const auto psi0 = WaveFunction2D::outer(phix0, phiy0);
    auto observer = [&](std::size_t k, double t, const WaveFunction2D& psi) {
      for (auto& a : approx) {
        if (std::abs(a.time(k) - t) > 1e-9 * std::max(1.0, std::abs(t))) {
          throw NumericalAbort("approximation and reference sample times differ");
        }
        const WaveFunction2D app = a.state(k, r.y, exec);
        a.report.err_l2[k] = l2_distance(psi, app);
        a.report.norms[0].values[k] = l2_norm(psi);
        a.report.norms[1].values[k] = l2_norm(app);
        for (std::size_t o = 0; o < observables.size(); ++o) {
          const auto& b = observables[o].second;
          a.report.observable_errors[o].values[k] = b.expectation(psi) - b.expectation(app);
        }
        if (!a.h1_err_x.empty()) {
          a.h1_err_x[k] = h1_error(psi, app, Axis::x);
          a.h1_err_y[k] = h1_error(psi, app, Axis::y);
        }
        if (k + 1 == n_samples && cfg.snapshot) a.final_state = app;
      }
      if (k + 1 == n_samples && cfg.snapshot) ref_final = psi;
    };
    ref = propagate_reference(spec, psi0, r.time, observer, false);
    for (auto& w : ref.warnings) summary.warnings.push_back(w);
  } else {
    for (auto& a : approx) {
      for (std::size_t k = 0; k < n_samples; ++k) {
        a.report.norms[0].values[k] = l2_norm(a.state(k, r.y, exec));
      }
      if (cfg.snapshot) a.final_state = a.state(n_samples - 1, r.y, exec);
    }
  }

  ordered_json manifest;
  manifest["program"] = "scalesep";
  manifest["version"] = SCALESEP_VERSION;
  ordered_json jm;
  jm["name"] = spec.name;
  if (cfg.model.preset) jm["preset"] = to_string(*cfg.model.preset);
  jm["v1"] = spec.v1.label();
  jm["v2"] = spec.v2.label();
  jm["coupling"] = to_string(spec.coupling.kind());
  jm["eta"] = spec.coupling.eta();
  jm["epsilon"] = spec.epsilon;
  jm["k4"] = spec.k4;
  jm["mass_x"] = spec.mass_x;
  jm["mass_y"] = spec.mass_y;
  jm["t1"] = r.t1;
  jm["units"] = r.atomic_units ? "atomic" : "dimensionless";
  manifest["model"] = jm;
  manifest["grid"] = {{"x", grid_json(r.x)}, {"y", grid_json(r.y)}, {"z", grid_json(r.z)}};
  manifest["time"] = {{"dt", r.time.dt},
                      {"t_final", r.time.t_final},
                      {"sample_every", r.time.sample_every},
                      {"steps", r.time.steps()},
                      {"samples", n_samples}};
  manifest["exec"] = exec == Exec::serial ? "serial" : "parallel";
  manifest["initial"] = {{"type", cfg.initial.type},   {"center_x", cfg.initial.center_x},
                         {"center_y", cfg.initial.center_y}, {"q0", cfg.initial.q0},
                         {"p0", cfg.initial.p0}};
  manifest["collocation"] = {{"x0", colloc.x0}, {"y0", colloc.y0}};
  if (!spec.coupling.unbounded_gradient()) {
    const auto sup = coupling_sup_norms(spec.coupling, r.x, r.y, cfg.bounds.sup_safety);
    manifest["sup_norms"] = {{"grad_y", sup.grad_y}, {"grad_xy", sup.grad_xy},
                             {"safety", cfg.bounds.sup_safety}};
  }
  ordered_json jmethods = ordered_json::object();

  if (has_ref) {
    ErrorReport rr;
    rr.time_unit = r.atomic_units ? "a.u." : "1";
    rr.t1 = r.t1;
    rr.times = ref.times;
    rr.norms.push_back({"reference", ref.norms});
    rr.energies.push_back({"reference", ref.energies});
    std::vector<double> drift(ref.energies.size());
    for (std::size_t k = 0; k < drift.size(); ++k) {
      drift[k] = std::abs(ref.energies[k] - ref.energies[0]) / std::max(std::abs(ref.energies[0]), 1e-300);
    }
    rr.extra.push_back({"energy_relative_drift", drift});
    write_report(rr, dir / "reference.csv");
    summary.files.push_back("reference.csv");
    summary.methods["reference"] = MethodFinal{ref.times.back(), {}, {}, {}};
    jmethods["reference"] = {{"csv", "reference.csv"},
                             {"final_energy_relative_drift", drift.back()}};
    if (ref_final) {
      fs::create_directories(dir / "snapshots");
      write_snapshot(*ref_final, dir / "snapshots" / "reference.psi2d");
      summary.files.push_back("snapshots/reference.psi2d");
    }
  }

  for (auto& a : approx) {
    const std::string name = to_string(a.method);
    ordered_json jmeth;
    ErrorReport& rep = a.report;
    if (a.is_product()) {
      std::vector<double> e(a.product.size());
      const bool bf = a.method == Method::bruteforce;
      for (std::size_t k = 0; k < e.size(); ++k) {
        e[k] = bf ? bruteforce_energy(spec, a.product[k], colloc) : meanfield_energy(spec, a.product[k]);
      }
      if (has_ref) rep.energies.push_back({"reference", ref.energies});
      rep.energies.push_back({name, e});
      const BoundKind kind = bf ? BoundKind::bruteforce : BoundKind::meanfield;
      if (!cfg.bounds.paths.empty()) {
        const FlatBound fb = bound_flat_l2(kind, cfg.bounds.paths, a.product, spec,
                                           BoundOptions{cfg.bounds.sup_safety, colloc});
        for (const auto& s : fb.paths) rep.bounds.push_back(s);
        rep.bounds.push_back({std::string(to_string(kind)) + "_reported", fb.reported});
      }
      if (cfg.bounds.gradient_free) {
        const auto gf = spec.coupling.is_zero() ? std::vector<double>(a.product.size(), 0.0)
                                                : bound_gradient_free(a.product, spec, kind, colloc);
        rep.bounds.push_back({std::string(to_string(kind)) + "_gradient_free", gf});
      }
      if (cfg.bounds.h1 && has_ref) {
        for (Axis axis : {Axis::x, Axis::y}) {
          const bool ax = axis == Axis::x;
          const auto& measured = ax ? a.h1_err_x : a.h1_err_y;
          H1Constants c{1.0, cfg.bounds.h1_rate};
          if (cfg.bounds.h1_prefactor) {
            c.prefactor = *cfg.bounds.h1_prefactor;
          } else {
            c.prefactor = calibrate_prefactor(bound_h1(a.product, spec, axis, c, cfg.bounds.sup_safety),
                                              measured);
          }
          const std::string suffix = ax ? "x" : "y";
          rep.bounds.push_back({std::string(to_string(kind)) + "_h1_" + suffix,
                                bound_h1(a.product, spec, axis, c, cfg.bounds.sup_safety)});
          rep.extra.push_back({"h1_err_" + suffix, measured});
          jmeth["h1_prefactor_" + suffix] = c.prefactor;
          jmeth["h1_rate"] = c.rate;
        }
      }
      rep.moment_integrals = product_moment_integrals(a.product);
      rep.moment_integrals.push_back({"N", moment_functional(a.product)});
      if (bf) jmeth["collocation"] = {{"x0", colloc.x0}, {"y0", colloc.y0}};
    } else {
      std::vector<double> q, p, s;
      for (const auto& w : a.wavepacket) {
        q.push_back(w.q);
        p.push_back(w.p);
        s.push_back(w.S);
      }
      rep.extra.push_back({"q", q});
      rep.extra.push_back({"p", p});
      rep.extra.push_back({"S", s});
    }
    const std::string file = name + ".csv";
    write_report(rep, dir / file);
    summary.files.push_back(file);

    MethodFinal fin;
    fin.t = rep.times.back();
    if (!rep.err_l2.empty()) fin.err_l2 = rep.err_l2.back();
    for (const auto& b : rep.bounds) {
      if (b.name.ends_with("_reported")) fin.bound = b.values.back();
    }
    for (const auto& o : rep.observable_errors) fin.observable_errors[o.name] = o.values.back();
    summary.methods[name] = fin;

    jmeth["csv"] = file;
    if (fin.err_l2) jmeth["final_err_l2"] = *fin.err_l2;
    if (fin.bound) jmeth["final_bound"] = *fin.bound;
    jmethods[name] = jmeth;

    if (a.final_state) {
      fs::create_directories(dir / "snapshots");
      write_snapshot(*a.final_state, dir / "snapshots" / (name + ".psi2d"));
      summary.files.push_back("snapshots/" + name + ".psi2d");
    }
  }
  manifest["methods"] = jmethods;
  manifest["observables"] = ordered_json::object();
  for (const auto& [name, b] : observables) manifest["observables"][name] = b.describe();
  if (!cfg.bounds.paths.empty()) {
    ordered_json jp = ordered_json::array();
    for (const auto& p : cfg.bounds.paths) {
      jp.push_back({{"path", to_string(p.path)}, {"sigma_x", p.sigma_x}, {"sigma_y", p.sigma_y}});
    }
    manifest["bound_paths"] = jp;
  }

  {
    std::ostringstream os;
    write_resolved_config(cfg, os);
    write_text(dir / "resolved_config.ini", os.str());
    summary.files.push_back("resolved_config.ini");
  }
  summary.files.push_back("manifest.json");
  manifest["files"] = summary.files;
  manifest["warnings"] = summary.warnings;
  manifest["wall_clock_seconds"] =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - wall0).count();
  write_text(dir / "manifest.json", manifest.dump(2) + "\n");
  return summary;
}

namespace {

std::string point_dir(const std::string& parameter, const std::string& value) {
  std::string v = value;
  for (char& c : v) {
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '.' && c != '-' && c != '+') c = '_';
  }
  return parameter + "_" + v;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

SweepOutcome run_sweep(const RunConfig& cfg, const fs::path& dir, unsigned jobs) {
  if (!cfg.sweep.active()) throw InvalidInput("run_sweep needs a [sweep] section");
  if (const auto d = validate(cfg); !d.empty()) throw InvalidInput(d.front());
  fs::create_directories(dir);
  const auto& values = cfg.sweep.values;
  std::vector<std::optional<RunSummary>> results(values.size());
  std::vector<std::string> errors(values.size());
  std::vector<char> aborted(values.size(), 0);

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < values.size(); k = next++) {
      try {
        results[k] = run_single(apply_sweep_value(cfg, values[k]),
                                dir / point_dir(cfg.sweep.parameter, values[k]));
      } catch (const NumericalAbort& e) {
        errors[k] = e.what();
        aborted[k] = 1;
      } catch (const std::exception& e) {
        errors[k] = e.what();
      }
    }
  };
  const unsigned n_threads = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(values.size())));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < n_threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  std::vector<std::string> obs_names;
  for (const auto& o : cfg.observables) obs_names.push_back(o.name);

  std::ofstream sum(dir / "summary.csv");
  sum << "parameter,value,method,status,t_final,final_err_l2,final_bound";
  for (const auto& n : obs_names) sum << ",observable:" << n;
  sum << "\n";
  SweepOutcome outcome;
  for (std::size_t k = 0; k < values.size(); ++k) {
    if (!results[k]) {
      ++outcome.failed;
      if (aborted[k]) outcome.numerical_abort = true;
      std::string msg = errors[k];
      for (char& c : msg) {
        if (c == ',' || c == '\n') c = ';';
      }
      sum << cfg.sweep.parameter << "," << values[k] << ",," << (aborted[k] ? "abort: " : "error: ")
          << msg << ",,,";
      for (std::size_t o = 0; o < obs_names.size(); ++o) sum << ",";
      sum << "\n";
      continue;
    }
    for (const auto& [method, fin] : results[k]->methods) {
      if (method == "reference") continue;
      sum << cfg.sweep.parameter << "," << values[k] << "," << method << ",ok," << fmt(fin.t) << ","
          << (fin.err_l2 ? fmt(*fin.err_l2) : "") << "," << (fin.bound ? fmt(*fin.bound) : "");
      for (const auto& n : obs_names) {
        const auto it = fin.observable_errors.find(n);
        sum << "," << (it != fin.observable_errors.end() ? fmt(it->second) : "");
      }
      sum << "\n";
    }
  }

  std::ofstream fits(dir / "fits.csv");
  fits << "method,quantity,mode,points,slope,intercept\n";
  if (cfg.sweep.parameter == "epsilon") {
    for (Method m : cfg.methods) {
      if (m == Method::reference) continue;
      const std::string name = to_string(m);
      std::map<double, double> err;
      std::map<std::string, std::map<double, double>> obs;
      for (std::size_t k = 0; k < values.size(); ++k) {
        if (!results[k]) continue;
        const auto it = results[k]->methods.find(name);
        if (it == results[k]->methods.end()) continue;
        const double eps = std::stod(values[k]);
        if (it->second.err_l2) err[eps] = *it->second.err_l2;
        for (const auto& [n, v] : it->second.observable_errors) obs[n][eps] = v;
      }
      auto emit = [&](const std::string& quantity, const std::map<double, double>& data, RateMode mode) {
        if (data.size() < 3) return;
        try {
          const RateFit f = semiclassical_rate_fit(data, mode);
          fits << name << "," << quantity << "," << (mode == RateMode::norm ? "norm" : "observable")
               << "," << data.size() << "," << fmt(f.slope) << "," << fmt(f.intercept) << "\n";
        } catch (const InvalidInput&) {
          // zero errors (exact methods) have no log-log slope
        }
      };
      emit("err_l2", err, RateMode::norm);
      for (const auto& [n, data] : obs) emit("observable:" + n, data, RateMode::observable);
    }
  }

  ordered_json manifest;
  manifest["program"] = "scalesep";
  manifest["version"] = SCALESEP_VERSION;
  manifest["sweep"] = {{"parameter", cfg.sweep.parameter}, {"values", values}, {"jobs", n_threads}};
  ordered_json points = ordered_json::array();
  for (std::size_t k = 0; k < values.size(); ++k) {
    ordered_json p = {{"value", values[k]}, {"dir", point_dir(cfg.sweep.parameter, values[k])}};
    if (!results[k]) p["error"] = errors[k];
    points.push_back(p);
  }
  manifest["points"] = points;
  manifest["files"] = {"summary.csv", "fits.csv", "resolved_config.ini", "manifest.json"};
  std::ostringstream os;
  write_resolved_config(cfg, os);
  write_text(dir / "resolved_config.ini", os.str());
  write_text(dir / "manifest.json", manifest.dump(2) + "\n");
  return outcome;
}

}  // namespace scalesep::cli
