#include <iomanip>
#include <iostream>
#include <thread>

#include <CLI11.hpp>

#include "runner.hpp"

using namespace scalesep;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitAbort = 3;

int print_diagnostics(const std::vector<std::string>& d) {
  for (const auto& s : d) std::cerr << "invalid: " << s << "\n";
  return d.empty() ? kExitOk : kExitValidation;
}

void list_presets() {
  std::cout << std::left << std::setw(8) << "preset" << std::setw(14) << "varpi" << std::setw(14)
            << "omega2" << std::setw(14) << "eta" << std::setw(10) << "sigma2"
            << "y-grid\n";
  for (Preset p : all_presets()) {
    const PresetParameters a = preset_parameters(p);
    const PresetSetup s = preset(p);
    std::cout << std::setw(8) << to_string(p) << std::setw(14) << a.varpi << std::setw(14) << a.omega2
              << std::setw(14) << a.eta << std::setw(10) << a.sigma2 << "[" << s.y.min << ", "
              << s.y.max << "] n=" << s.y.n << "\n";
  }
  const PresetSetup s = preset(Preset::blue);
  std::cout << "\nall presets: x-grid [" << s.x.min << ", " << s.x.max << "] n=" << s.x.n
            << ", dt = t1/200, t_final = 10 t1, t1 = " << s.t1 << " a.u.\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Composite quantum dynamics: reference, factorized and semiclassical propagation"};
  app.require_subcommand(1);
  std::string config_path;
  std::string output_dir;
  bool snapshot = false;
  unsigned jobs = std::max(1u, std::thread::hardware_concurrency());

  auto* run = app.add_subcommand("run", "run one configuration");
  run->add_option("config", config_path, "config file")->required()->check(CLI::ExistingFile);
  run->add_option("--output-dir", output_dir, "overrides output.dir");
  run->add_flag("--snapshot", snapshot, "write final wave functions as binary snapshots");

  auto* sweep = app.add_subcommand("sweep", "run every point of the [sweep] section");
  sweep->add_option("config", config_path, "config file")->required()->check(CLI::ExistingFile);
  sweep->add_option("--output-dir", output_dir, "overrides output.dir");
  sweep->add_option("--jobs", jobs, "concurrent sweep points")->check(CLI::PositiveNumber);
  sweep->add_flag("--snapshot", snapshot, "write final wave functions as binary snapshots");

  auto* val = app.add_subcommand("validate", "check a configuration without running it");
  val->add_option("config", config_path, "config file")->required()->check(CLI::ExistingFile);

  app.add_subcommand("presets", "list the built-in model presets");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitValidation;
  }

  try {
    if (app.got_subcommand("presets")) {
      list_presets();
      return kExitOk;
    }
    cli::RunConfig cfg = cli::load_config(config_path);
    if (!output_dir.empty()) cfg.output_dir = output_dir;
    if (snapshot) cfg.snapshot = true;

    if (val->parsed()) {
      const auto d = cli::validate(cfg);
      if (d.empty()) std::cout << "ok\n";
      return print_diagnostics(d);
    }
    if (const int rc = print_diagnostics(cli::validate(cfg)); rc != kExitOk) return rc;

    if (run->parsed()) {
      if (cfg.sweep.active()) {
        std::cerr << "invalid: config has a [sweep] section; use 'scalesep sweep'\n";
        return kExitValidation;
      }
      const auto summary = cli::run_single(cfg, cfg.output_dir);
      for (const auto& w : summary.warnings) std::cerr << "warning: " << w << "\n";
      for (const auto& [name, fin] : summary.methods) {
        if (!fin.err_l2) continue;
        std::cout << name << ": err_l2(t=" << fin.t << ") = " << *fin.err_l2;
        if (fin.bound) std::cout << ", bound = " << *fin.bound;
        std::cout << "\n";
      }
      std::cout << "wrote " << summary.files.size() << " files to " << cfg.output_dir << "\n";
      return kExitOk;
    }
    if (!cfg.sweep.active()) {
      std::cerr << "invalid: sweep needs a [sweep] section with parameter and values\n";
      return kExitValidation;
    }
    const auto outcome = cli::run_sweep(cfg, cfg.output_dir, jobs);
    std::cout << "sweep finished: " << cfg.sweep.values.size() - outcome.failed << " of "
              << cfg.sweep.values.size() << " points ok, summary in " << cfg.output_dir
              << "/summary.csv\n";
    if (outcome.numerical_abort) return kExitAbort;
    return outcome.failed ? kExitValidation : kExitOk;
  } catch (const NumericalAbort& e) {
    std::cerr << "numerical abort: " << e.what() << "\n";
    return kExitAbort;
  } catch (const InvalidInput& e) {
    std::cerr << "invalid: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
