#include <doctest.h>

#include <sys/wait.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <random>
#include <sstream>

#include <json.hpp>

#include "run_config.hpp"
#include "runner.hpp"

using namespace scalesep;
using namespace scalesep::cli;
namespace fs = std::filesystem;

namespace {

const char* kSmall = R"(
[model]
v1 = harmonic
v1_k = 1
v2 = harmonic
v2_k = 2
coupling = product
w1 = 0 1
w2 = 0 0 0.1

[grid]
x_min = -8
x_max = 8
x_n = 32
y_min = -8
y_max = 8
y_n = 32

[time]
dt = 0.01
t_final = 0.2
sample_every = 5

[methods]
list = reference, meanfield, bruteforce

[initial]
center_x = 0.5

[observables]
ysq = y^2
mixed = x*py

[bounds]
paths = grad_y, grad_x_grad_y, product_quadratic
gradient_free = true
h1 = true
)";

struct TempDir {
  fs::path path;
  TempDir() {
    std::random_device rd;
    path = fs::temp_directory_path() / ("scalesep_test_" + std::to_string(rd()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

RunConfig parse(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

std::vector<std::string> header(const fs::path& csv) {
  std::ifstream in(csv);
  std::string line;
  std::getline(in, line);
  std::vector<std::string> cols;
  std::stringstream ss(line);
  for (std::string c; std::getline(ss, c, ',');) cols.push_back(c);
  return cols;
}

int tool(const std::string& args) {
  const std::string cmd = std::string(SCALESEP_TOOL_PATH) + " " + args + " >/dev/null 2>&1";
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

bool has_diagnostic(const std::vector<std::string>& d, const std::string& needle) {
  return std::any_of(d.begin(), d.end(), [&](const auto& s) { return s.find(needle) != std::string::npos; });
}

}  // namespace

TEST_CASE("config parses sections and observables") {
  const RunConfig c = parse(kSmall);
  CHECK(c.methods.size() == 3);
  CHECK(c.has(Method::meanfield));
  CHECK(c.observables.size() == 2);
  CHECK(c.bounds.paths.size() == 3);
  CHECK(c.bounds.gradient_free);
  CHECK_FALSE(c.bounds.h1_prefactor);
  REQUIRE(c.x);
  CHECK(c.x->n == 32);
  CHECK(validate(c).empty());
}

TEST_CASE("config rejects unknown sections and keys") {
  CHECK_THROWS_AS(parse("[modle]\npreset = blue\n"), InvalidInput);
  CHECK_THROWS_AS(parse("[model]\npreset = blue\ncolour = red\n"), InvalidInput);
  CHECK_THROWS_AS(parse("[model]\npreset = purple\n"), InvalidInput);
  CHECK_THROWS_AS(parse("[methods]\nlist = reference, magic\n"), InvalidInput);
}

TEST_CASE("time values with t1 suffix") {
  CHECK(parse_time("10 t1", 2.0) == doctest::Approx(20.0));
  CHECK(parse_time("t1/200", 100.0) == doctest::Approx(0.5));
  CHECK(parse_time("0.25", 7.0) == doctest::Approx(0.25));
  CHECK_THROWS_AS(parse_time("ten", 1.0), InvalidInput);
}

TEST_CASE("preset resolution") {
  const RunConfig c = parse("[model]\npreset = blue\n[methods]\nlist = reference, meanfield\n");
  CHECK(validate(c).empty());
  const ResolvedRun r = resolve(c);
  CHECK(r.atomic_units);
  CHECK(r.x.size() == 128);
  CHECK(r.y.size() == 1024);
  CHECK(r.time.dt == doctest::Approx(preset_constants::t1 / 200));
  CHECK(r.time.steps() == 2000);
}

TEST_CASE("validation diagnostics") {
  SUBCASE("no methods") {
    CHECK(has_diagnostic(validate(parse("[model]\npreset = blue\n")), "at least one method"));
  }
  SUBCASE("bounds need the reference") {
    auto c = parse(kSmall);
    c.methods = {Method::meanfield};
    CHECK(has_diagnostic(validate(c), "'reference' is required"));
  }
  SUBCASE("cubic coupling needs the weighted path") {
    const auto d = validate(parse("[model]\npreset = blue\n[methods]\nlist = reference meanfield\n"
                                  "[bounds]\npaths = grad_y\n"));
    CHECK(has_diagnostic(d, "weighted path"));
  }
  SUBCASE("grid size") {
    auto c = parse(kSmall);
    c.x->n = 48;
    CHECK(has_diagnostic(validate(c), "grid.x_n"));
  }
  SUBCASE("epsilon range and presets") {
    auto c = parse(kSmall);
    c.model.epsilon = 1.5;
    CHECK(has_diagnostic(validate(c), "(0, 1]"));
    auto p = parse("[model]\npreset = red\nepsilon = 0.1\n[methods]\nlist = reference\n");
    CHECK(has_diagnostic(validate(p), "presets are in atomic units"));
  }
  SUBCASE("semiclassical methods need a wave packet") {
    auto c = parse(kSmall);
    c.model.epsilon = 0.05;
    c.methods.push_back(Method::semiclassical_taylor);
    CHECK(has_diagnostic(validate(c), "wavepacket"));
  }
  SUBCASE("box too small for the initial state") {
    auto c = parse(kSmall);
    c.initial.center_x = 5.0;
    CHECK(has_diagnostic(validate(c), "widen grid.x"));
  }
  SUBCASE("bad observable") {
    auto c = parse(kSmall);
    c.observables.push_back({"bad", "x^3"});
    CHECK_FALSE(validate(c).empty());
  }
  SUBCASE("sweep points are validated individually") {
    auto c = parse(kSmall);
    c.sweep.parameter = "epsilon";
    c.sweep.values = {"0.5", "2"};
    const auto d = validate(c);
    CHECK(has_diagnostic(d, "epsilon=2"));
    CHECK_FALSE(has_diagnostic(d, "epsilon=0.5"));
  }
}

TEST_CASE("resolved config round-trips") {
  const RunConfig c = parse(kSmall);
  std::ostringstream os;
  write_resolved_config(c, os);
  const RunConfig d = parse(os.str());
  CHECK(validate(d).empty());
  const ResolvedRun a = resolve(c), b = resolve(d);
  CHECK(a.x == b.x);
  CHECK(a.y == b.y);
  CHECK(a.time.dt == b.time.dt);
  CHECK(a.time.steps() == b.time.steps());
  CHECK(d.observables.size() == c.observables.size());
  CHECK(d.bounds.paths.size() == c.bounds.paths.size());
}

TEST_CASE("run writes reports, manifest and deterministic CSV") {
  TempDir t1, t2;
  RunConfig c = parse(kSmall);
  c.snapshot = true;
  const RunSummary s = run_single(c, t1.path);
  run_single(c, t2.path);
  for (const char* f : {"reference.csv", "meanfield.csv", "bruteforce.csv"}) {
    CAPTURE(f);
    REQUIRE(fs::exists(t1.path / f));
    CHECK(slurp(t1.path / f) == slurp(t2.path / f));
  }
  REQUIRE(s.methods.count("meanfield"));
  const MethodFinal& mf = s.methods.at("meanfield");
  REQUIRE(mf.err_l2);
  REQUIRE(mf.bound);
  CHECK(*mf.err_l2 <= *mf.bound);
  CHECK(mf.t == doctest::Approx(0.2));
  CHECK(mf.observable_errors.count("ysq"));

  const auto manifest = nlohmann::json::parse(slurp(t1.path / "manifest.json"));
  CHECK(manifest.contains("methods"));
  CHECK(manifest.contains("grid"));
  CHECK(fs::exists(t1.path / "resolved_config.ini"));

  // Snapshot round trip reproduces the final reference state bit for bit.
  const ResolvedRun r = resolve(c);
  const auto psi = read_snapshot(t1.path / "snapshots" / "reference.psi2d", r.x, r.y);
  const fs::path copy = t2.path / "copy.psi2d";
  write_snapshot(psi, copy);
  CHECK(slurp(copy) == slurp(t1.path / "snapshots" / "reference.psi2d"));
  CHECK(fs::file_size(copy) == 16 + 32 * 32 * 16);
  CHECK(l2_norm(psi) == doctest::Approx(1.0).epsilon(1e-10));
  CHECK_THROWS_AS(read_snapshot(copy, Grid1D(-8, 8, 16), r.y), InvalidInput);
}

TEST_CASE("CSV interface consumed by the plotting scripts") {
  TempDir t;
  RunConfig c = parse(kSmall);
  c.model.t1 = 0.1;
  run_single(c, t.path);
  const auto cols = header(t.path / "meanfield.csv");
  REQUIRE(cols.size() > 4);
  CHECK(cols[0].rfind("t [", 0) == 0);
  CHECK(cols[1] == "t/t1 [1]");
  CHECK(cols[2] == "err_l2 [1]");
  CHECK(std::any_of(cols.begin(), cols.end(), [](const auto& s) { return s.rfind("bound:", 0) == 0; }));
  CHECK(std::any_of(cols.begin(), cols.end(), [](const auto& s) { return s == "observable:ysq [1]"; }));
  for (const auto& col : cols) {
    CAPTURE(col);
    CHECK(col.find(" [") != std::string::npos);
    CHECK(col.back() == ']');
  }
  // Rows: 0, 5, 10, 15, 20 steps; each row has one value per column.
  std::ifstream in(t.path / "meanfield.csv");
  std::string line;
  std::getline(in, line);
  std::size_t rows = 0;
  double last_t = -1;
  while (std::getline(in, line)) {
    ++rows;
    CHECK(static_cast<std::size_t>(std::count(line.begin(), line.end(), ',')) + 1 == cols.size());
    const double tt = std::stod(line.substr(0, line.find(',')));
    CHECK(tt > last_t);
    last_t = tt;
  }
  CHECK(rows == 5);
}

TEST_CASE("sweep writes a summary with a rate fit") {
  TempDir t;
  RunConfig c = parse(kSmall);
  c.bounds = {};
  c.observables.clear();
  c.sweep.parameter = "k4";
  c.sweep.values = {"0", "0.1"};
  const SweepOutcome o = run_sweep(c, t.path, 2);
  CHECK(o.failed == 0);
  CHECK_FALSE(o.numerical_abort);
  const auto cols = header(t.path / "summary.csv");
  REQUIRE(cols.size() >= 7);
  CHECK(cols[0] == "parameter");
  CHECK(cols[1] == "value");
  CHECK(fs::exists(t.path / "k4_0" / "meanfield.csv"));
  CHECK(fs::exists(t.path / "k4_0.1" / "meanfield.csv"));
}

TEST_CASE("tool exit codes") {
  TempDir t;
  const fs::path good = t.path / "good.ini", bad = t.path / "bad.ini", broken = t.path / "broken.ini";
  std::ofstream(good) << kSmall;
  std::ofstream(bad) << "[model]\npreset = blue\n";
  std::ofstream(broken) << "[model]\nnonsense = 1\n";
  CHECK(tool("presets") == 0);
  CHECK(tool("validate " + good.string()) == 0);
  CHECK(tool("validate " + bad.string()) == 2);
  CHECK(tool("validate " + broken.string()) == 2);
  CHECK(tool("run " + (t.path / "missing.ini").string()) == 2);
  CHECK(tool("run " + good.string() + " --output-dir " + (t.path / "out").string()) == 0);
  CHECK(fs::exists(t.path / "out" / "meanfield.csv"));
  CHECK(tool("sweep " + good.string()) == 2);
}
