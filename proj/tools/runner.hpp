#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "run_config.hpp"

namespace scalesep::cli {

/// Last-row values of one method's report.
struct MethodFinal {
  double t = 0.0;
  std::optional<double> err_l2;
  std::optional<double> bound;  ///< reported flat bound when requested
  std::map<std::string, double> observable_errors;
};

struct RunSummary {
  std::map<std::string, MethodFinal> methods;  ///< keyed by method name
  std::vector<std::string> files;              ///< written paths relative to the output dir
  std::vector<std::string> warnings;
};

/// Runs one configuration (no sweep) and writes its outputs into `dir`:
/// one CSV per method, manifest.json, resolved_config.ini and optional
/// snapshots. Throws InvalidInput or NumericalAbort.
RunSummary run_single(const RunConfig& cfg, const std::filesystem::path& dir);

/// Runs every sweep point (up to `jobs` concurrently) into its own
/// subdirectory and writes summary.csv, fits.csv and a sweep manifest.
/// Returns the number of failed points; aborts are reported in the summary.
struct SweepOutcome {
  std::size_t failed = 0;
  bool numerical_abort = false;
};
SweepOutcome run_sweep(const RunConfig& cfg, const std::filesystem::path& dir, unsigned jobs);

/// Little-endian snapshot: "PSI2DLE\0", uint32 nx, uint32 ny, then nx*ny
/// (re, im) float64 pairs in row-major order.
void write_snapshot(const WaveFunction2D& psi, const std::filesystem::path& path);
WaveFunction2D read_snapshot(const std::filesystem::path& path, const Grid1D& gx, const Grid1D& gy);

}  // namespace scalesep::cli
