#ifndef ROTWAVE_HARNESS_HPP
#define ROTWAVE_HARNESS_HPP

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rotwave/mhd.hpp"
#include "rotwave/sphere_solver.hpp"

// Sweep orchestration: flat key-value config files with [sphere] / [mhd] /
// [identities] sections, concurrent epsilon-sweep execution, log-log slope
// fits, and CSV / JSON / SVG emission.

namespace rotwave {

enum ExitCode {
  kExitOk = 0,
  kExitAssertionFailure = 1,
  kExitConfigError = 2,
  kExitNumericFailure = 3,
};

enum class Experiment { sphere, mhd, verify, identities };

struct IdentitiesConfig {
  double delta = 0.25;
  int nr = 48;
  int lmax = 15;
  int cases = 10;
  std::uint64_t seed = 0;
  double tol_commutation = 1e-5;
  double tol_viscosity = 1e-6;
  double tol_curlcurl = 1e-6;
  double tol_traction = 1e-9;
  double tol_lifting = 1e-8;
};

struct SweepConfig {
  Experiment experiment = Experiment::sphere;
  std::vector<double> epsilons;  // descending, distinct, positive
  RunConfig sphere_base;
  MhdConfig mhd_base;
  IdentitiesConfig identities;
  std::string verify_module;  // filter for the verify experiment
  std::string output_dir = ".";
  int parallelism = 1;
  bool timings = true;

  void validate() const;  // throws ConfigError
};

// Parse a config file (throws ConfigError with file:line context).
SweepConfig load_config(const std::string& path);
SweepConfig parse_config_text(const std::string& text,
                              const std::string& origin);

struct SweepRow {
  double epsilon = 0.0;
  // column name -> value, in schema order (epsilon first, wall_ms last)
  std::vector<std::pair<std::string, double>> values;
  bool ok = true;
  std::string error;
};

struct FitResult {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  int points_used = 0;
  int points_excluded = 0;  // below the 1e-14 defect floor
};

struct SweepResult {
  SweepConfig config;
  std::vector<SweepRow> rows;  // sorted by descending epsilon
  bool partial = false;        // some member failed
  std::optional<FitResult> fit;
  std::string fitted_column;
  std::vector<std::string> warnings;
  std::string git_describe;
};

// OLS on (ln x, ln y). Nonpositive coordinates or < 3 surviving points are
// invalid-argument; points with y < 1e-14 are dropped (counted as excluded).
FitResult fit_slope(const std::vector<std::pair<double, double>>& points);

// Run the sweep members (concurrently up to the configured parallelism or
// the ROTWAVE_THREADS override) and fit the defect column.
SweepResult run_sweep(const SweepConfig& cfg);

// Write sweep.csv, sweep.json and sweep.svg into dir.
void emit_outputs(const SweepResult& res, const std::string& dir);

std::string csv_text(const SweepResult& res);  // exposed for tests

}  // namespace rotwave

#endif
