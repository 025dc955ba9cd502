#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "covspec/limit_formula.hpp"
#include "covspec/mixed_moments.hpp"
#include "covspec/model.hpp"
#include "covspec/mp_solver.hpp"
#include "covspec/qgraph_oracle.hpp"
#include "covspec/simulate.hpp"

namespace covspec {

struct GridConfig {
  std::optional<double> e_min;  // default: law-dependent bulk window
  std::optional<double> e_max;
  int points = 400;
  double eta = 1e-3;
};

struct MpConfig {
  double c = 0.5;
  SpectralLaw law = SpectralLaw::point_mass(1.0);
  GridConfig grid;
  double tol = 1e-10;
  double damping = 0.5;
  int max_iter = 10000;
};

struct VarianceScanConfig {
  std::vector<int> n_values = {100, 200, 400};  // dimensions N; n = N/c per model ratio
  int reps = 50;
  int k = 2;
};

struct RunConfig {
  // model
  int N = 100;
  int n = 200;
  std::vector<double> breakpoints = {0.0, 1.0};
  std::vector<EnsembleSpec> ensembles = {{}};
  std::optional<double> tau0;  // declared cap; defaults to the observed norms

  // run
  std::uint64_t master_seed = 1;
  int reps = 1;
  int k_max = 3;
  int threads = 1;
  std::vector<EstimatorKind> estimators = {EstimatorKind::kPath, EstimatorKind::kGram};

  OracleCaps oracle_caps;
  CoefficientMode formula_mode = CoefficientMode::kStabilizer;

  MpConfig mp;
  VarianceScanConfig variance_scan;

  // output
  std::filesystem::path out_dir = "out";

  // optional analytic mixed-moment table: canonical words -> limits
  std::map<MixedMomentKey, double> analytic_moments;

  std::string config_hash;  // FNV-1a of the raw config text

  double ratio() const { return static_cast<double>(N) / static_cast<double>(n); }
  void validate() const;  // throws ValidationError with field paths
};

RunConfig parse_config_text(const std::string& text);
RunConfig load_config(const std::filesystem::path& path);

}  // namespace covspec
