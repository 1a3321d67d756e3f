#pragma once

#include <memory>
#include <optional>

#include "windlab/functional.hpp"
#include "windlab/mc.hpp"
#include "windlab/spectral.hpp"

namespace windlab {

struct McParams {
  int64_t n_paths = 4000;
  double T = 200.0;
  double dt = 5e-3;
  uint64_t seed = 12345;
  Vec x0;  // defaults to the origin
  int hist_bins = 4;
};

struct RateGrid {
  std::vector<Vec> rays;   // directions from hbar
  int points = 5;
  double h_max = 2.0;
  std::vector<Vec> tilts;  // explicit tilt samples for the scgf table
};

struct SolverParams {
  double tol_scale = 1.0;   // scales the reversibility-flag tolerance
  double c_max = 20.0;
  double flag_tol = 1e-6;
  int threads = 0;          // 0 = hardware default
};

/// A complete problem statement: domain, metric, drift, and run parameters.
struct Scenario {
  std::string name;
  int dim = 1;
  std::array<int, 3> resolution{64, 1, 1};
  MetricField metric = MetricField::identity(1);
  DriftField drift = DriftField::constant(Vec::Zero(1));
  SolverParams solver;
  McParams mc;
  RateGrid rate;
  std::optional<Vec> cbar;  // class of g b when closed by construction

  TorusDomain domain() const { return TorusDomain(dim, resolution); }
};

// Built-in scenarios, pinned in code: S1, S2 (= shear), S3, S4, flat-constant.
Scenario builtin_scenario(const std::string& name);
bool is_builtin_scenario(const std::string& name);
std::vector<std::string> builtin_scenario_names();

struct ConfigError : Error {
  ConfigError(const std::string& msg, int line, int column)
      : Error("config error at line " + std::to_string(line) + ", column " +
              std::to_string(column) + ": " + msg),
        line(line), column(column) {}
  int line, column;
};

Scenario parse_scenario_config(const std::string& text, const std::string& name_hint = "config");
Scenario load_scenario_file(const std::string& path);

/// Everything derived from a scenario, built once: grid calculus, generator,
/// invariant measure, harmonic bases, and the scgf solver.
struct Lab {
  Scenario scenario;
  std::unique_ptr<DiscreteCalculus> calc;
  GeneratorMatrix gen;
  InvariantMeasure inv;
  HarmonicBasis basis;
  std::unique_ptr<ScgfSolver> scgf;
  Vec cbar;  // supplied by the drift spec or measured from loop integrals of g b
};

Lab build_lab(const Scenario& scen);

}  // namespace windlab
