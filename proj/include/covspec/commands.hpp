#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "covspec/config.hpp"
#include "covspec/simulate.hpp"

namespace covspec {

struct MomentStats {
  std::vector<std::vector<double>> per_rep;  // [rep][k-1]
  std::vector<double> mean;                  // [k-1]
  std::vector<double> stderr_mean;           // sample std / sqrt(reps)
};

struct SimulateResult {
  std::vector<EstimatorKind> estimators;
  std::vector<MomentStats> stats;               // parallel to estimators
  std::vector<std::vector<double>> pooled_esd;  // pooled eigenvalues per estimator
  std::vector<std::filesystem::path> files;
};

SimulateResult cmd_simulate(const RunConfig& cfg);

struct LimitResult {
  std::vector<double> oracle_moments;   // k = 1..k_max
  std::vector<double> formula_moments;  // empty on formula error (recorded in note)
  std::string formula_note;
  std::vector<std::filesystem::path> files;
};

LimitResult cmd_limit(const RunConfig& cfg);

struct CompareRow {
  EstimatorKind estimator;
  int k = 0;
  double empirical = 0.0;
  double stderr_mean = 0.0;
  double oracle = 0.0;
  double abs_error = 0.0;
  double rel_error = 0.0;
};

struct CompareResult {
  std::vector<CompareRow> rows;
  std::vector<AuditReport> audits;  // k = 1..min(k_max, oracle cap)
  std::vector<std::filesystem::path> files;
};

CompareResult cmd_compare(const RunConfig& cfg);

struct VarianceScanResult {
  std::vector<int> dims;
  std::vector<double> stds;  // sample std of m_k across reps, per dimension
  double loglog_slope = 0.0;
  std::vector<std::filesystem::path> files;
};

VarianceScanResult cmd_variance_scan(const RunConfig& cfg);

struct MpSolveResult {
  StieltjesGrid grid;
  double mass = 0.0;
  double moment1 = 0.0;
  double moment2 = 0.0;
  int unconverged = 0;
  std::vector<std::filesystem::path> files;
};

// Writes the grid CSV before raising ConvergenceError for unconverged points.
MpSolveResult cmd_mp_solve(const RunConfig& cfg);

}  // namespace covspec
