#include "covspec/commands.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>
#include <numeric>
#include <thread>

#include <nlohmann/json.hpp>

#include "covspec/errors.hpp"
#include "covspec/io_util.hpp"
#include "covspec/rng.hpp"
#include "covspec/spectra.hpp"
#include "covspec/version.hpp"

namespace covspec {

namespace {

std::string stamp(const RunConfig& cfg) {
  return std::string("covspec ") + kVersion + " config_hash=" + cfg.config_hash;
}

StepIntegrand build_model(const RunConfig& cfg, int N) {
  StepIntegrand integrand =
      build_integrand(cfg.ensembles, cfg.breakpoints, N, cfg.master_seed);
  if (cfg.tau0) {
    integrand.tau0 = *cfg.tau0;
    integrand.validate();  // declared cap is a hard constraint
  }
  return integrand;
}

void run_indexed(int count, int threads, const std::function<void(int)>& body) {
  const int workers = std::max(1, std::min(threads, count));
  if (workers == 1) {
    for (int i = 0; i < count; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(static_cast<size_t>(workers));
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&, w] {
      for (int i = w; i < count; i += workers) body(i);
    });
  for (auto& t : pool) t.join();
}

void check_psd(const EmpiricalSpectralDistribution& d, const std::string& what) {
  const double trace_over_n =
      std::accumulate(d.eigenvalues.begin(), d.eigenvalues.end(), 0.0) / d.size();
  if (d.eigenvalues.front() < -1e-9 * std::max(1.0, trace_over_n))
    throw InvariantError(what + ": estimator lost positive semidefiniteness");
}

MomentStats aggregate(const std::vector<std::vector<double>>& per_rep, int k_max) {
  MomentStats stats;
  stats.per_rep = per_rep;
  stats.mean.assign(static_cast<size_t>(k_max), 0.0);
  stats.stderr_mean.assign(static_cast<size_t>(k_max), 0.0);
  const int reps = static_cast<int>(per_rep.size());
  for (int k = 0; k < k_max; ++k) {
    double mean = 0.0;
    for (int rep = 0; rep < reps; ++rep) mean += per_rep[static_cast<size_t>(rep)][static_cast<size_t>(k)];
    mean /= reps;
    stats.mean[static_cast<size_t>(k)] = mean;
    if (reps > 1) {
      double ss = 0.0;
      for (int rep = 0; rep < reps; ++rep) {
        const double d = per_rep[static_cast<size_t>(rep)][static_cast<size_t>(k)] - mean;
        ss += d * d;
      }
      stats.stderr_mean[static_cast<size_t>(k)] = std::sqrt(ss / (reps - 1)) / std::sqrt(reps);
    }
  }
  return stats;
}

std::vector<double> esd_moment_row(const EmpiricalSpectralDistribution& d, int k_max) {
  std::vector<double> row(static_cast<size_t>(k_max));
  for (int k = 1; k <= k_max; ++k) row[static_cast<size_t>(k - 1)] = d.moment(k);
  return row;
}

void write_histogram(const std::filesystem::path& path, const RunConfig& cfg,
                     const std::vector<double>& values) {
  const int bins = 60;
  double lo = *std::min_element(values.begin(), values.end());
  double hi = *std::max_element(values.begin(), values.end());
  if (!(hi > lo)) hi = lo + 1.0;
  const double width = (hi - lo) / bins;
  std::vector<long long> counts(static_cast<size_t>(bins), 0);
  for (double v : values) {
    int b = static_cast<int>((v - lo) / width);
    b = std::clamp(b, 0, bins - 1);
    counts[static_cast<size_t>(b)]++;
  }
  CsvWriter csv(path, stamp(cfg), {"bin_left", "bin_right", "count", "density"});
  const double total = static_cast<double>(values.size());
  for (int b = 0; b < bins; ++b)
    csv.row({CsvWriter::cell(lo + b * width), CsvWriter::cell(lo + (b + 1) * width),
             CsvWriter::cell(counts[static_cast<size_t>(b)]),
             CsvWriter::cell(counts[static_cast<size_t>(b)] / (total * width))});
}

// Providers for cmd_limit / cmd_compare: the analytic table wins if present.
std::unique_ptr<MixedMomentProvider> make_provider(const RunConfig& cfg,
                                                   const StepIntegrand& integrand) {
  if (!cfg.analytic_moments.empty())
    return std::make_unique<AnalyticMixedMoments>(cfg.analytic_moments,
                                                  integrand.interval_count());
  return std::make_unique<NumericMixedMoments>(integrand);
}

}  // namespace

SimulateResult cmd_simulate(const RunConfig& cfg) {
  cfg.validate();
  const StepIntegrand integrand = build_model(cfg, cfg.N);

  SimulateResult result;
  result.estimators = cfg.estimators;
  const int reps = cfg.reps;
  const int k_max = cfg.k_max;
  const size_t n_est = cfg.estimators.size();

  std::vector<std::vector<std::vector<double>>> moments(
      n_est, std::vector<std::vector<double>>(static_cast<size_t>(reps)));
  std::vector<std::vector<std::vector<double>>> eigs(
      n_est, std::vector<std::vector<double>>(static_cast<size_t>(reps)));

  run_indexed(reps, cfg.threads, [&](int rep) {
    const std::uint64_t seed = rng::split(cfg.master_seed, static_cast<std::uint64_t>(rep));
    Eigen::MatrixXd increments;
    const bool needs_increments =
        std::count(cfg.estimators.begin(), cfg.estimators.end(), EstimatorKind::kPath) ||
        std::count(cfg.estimators.begin(), cfg.estimators.end(), EstimatorKind::kModified);
    if (needs_increments) increments = simulate_increments(integrand, cfg.n, seed);

    for (size_t e = 0; e < n_est; ++e) {
      CovariationMatrix cov;
      switch (cfg.estimators[e]) {
        case EstimatorKind::kPath:
          cov = path_covariation_from_increments(increments, integrand, cfg.n, seed);
          break;
        case EstimatorKind::kGram:
          cov = simulate_gram(integrand, cfg.n, seed);
          break;
        case EstimatorKind::kModified:
          cov = modified_estimator(increments, cfg.n);
          break;
      }
      cov.rep = rep;
      cov.check_symmetry();
      const EmpiricalSpectralDistribution d = esd(cov.entries);
      if (cfg.estimators[e] != EstimatorKind::kModified)
        check_psd(d, to_string(cfg.estimators[e]));
      moments[e][static_cast<size_t>(rep)] = esd_moment_row(d, k_max);
      eigs[e][static_cast<size_t>(rep)] = d.eigenvalues;
    }
  });

  const auto moments_path = cfg.out_dir / "moments.csv";
  CsvWriter csv(moments_path, stamp(cfg),
                {"source", "estimator", "k", "value", "stderr", "N", "n", "c", "rep"});
  for (size_t e = 0; e < n_est; ++e) {
    const std::string name = to_string(cfg.estimators[e]);
    for (int rep = 0; rep < reps; ++rep)
      for (int k = 1; k <= k_max; ++k)
        csv.row({"rep", name, CsvWriter::cell(k),
                 CsvWriter::cell(moments[e][static_cast<size_t>(rep)][static_cast<size_t>(k - 1)]),
                 CsvWriter::cell(0.0), CsvWriter::cell(cfg.N), CsvWriter::cell(cfg.n),
                 CsvWriter::cell(cfg.ratio()), CsvWriter::cell(rep)});
    const MomentStats stats = aggregate(moments[e], k_max);
    for (int k = 1; k <= k_max; ++k)
      csv.row({"mean", name, CsvWriter::cell(k), CsvWriter::cell(stats.mean[static_cast<size_t>(k - 1)]),
               CsvWriter::cell(stats.stderr_mean[static_cast<size_t>(k - 1)]), CsvWriter::cell(cfg.N),
               CsvWriter::cell(cfg.n), CsvWriter::cell(cfg.ratio()), CsvWriter::cell(-1)});
    result.stats.push_back(stats);

    std::vector<double> pooled;
    for (int rep = 0; rep < reps; ++rep)
      pooled.insert(pooled.end(), eigs[e][static_cast<size_t>(rep)].begin(),
                    eigs[e][static_cast<size_t>(rep)].end());
    const auto hist_path = cfg.out_dir / ("esd_hist_" + name + ".csv");
    write_histogram(hist_path, cfg, pooled);
    result.pooled_esd.push_back(std::move(pooled));
    result.files.push_back(hist_path);
  }
  result.files.push_back(moments_path);
  return result;
}

LimitResult cmd_limit(const RunConfig& cfg) {
  cfg.validate();
  if (cfg.k_max > cfg.oracle_caps.k_cap)
    throw ValidationError("run.k_max exceeds oracle.k_cap");
  const StepIntegrand integrand = build_model(cfg, cfg.N);
  const int m = integrand.interval_count();
  const std::vector<double> deltas = integrand.interval_lengths();
  const double c = cfg.ratio();
  const auto provider = make_provider(cfg, integrand);

  LimitResult result;
  nlohmann::json expansions = nlohmann::json::array();
  const auto moments_path = cfg.out_dir / "moments.csv";
  CsvWriter csv(moments_path, stamp(cfg),
                {"source", "estimator", "k", "value", "stderr", "N", "n", "c", "rep"});

  std::string formula_note;
  for (int k = 1; k <= cfg.k_max; ++k) {
    const MomentExpansion oracle = oracle_moment_expansion(k, m, cfg.oracle_caps);
    const double oracle_value = evaluate_expansion(oracle, c, deltas, *provider);
    result.oracle_moments.push_back(oracle_value);
    csv.row({"oracle", "-", CsvWriter::cell(k), CsvWriter::cell(oracle_value),
             CsvWriter::cell(0.0), CsvWriter::cell(cfg.N), CsvWriter::cell(cfg.n),
             CsvWriter::cell(c), CsvWriter::cell(-1)});

    nlohmann::json entry;
    entry["k"] = k;
    entry["oracle"] = expansion_to_json(oracle);
    try {
      const MomentExpansion formula = closed_form_expansion(k, m, cfg.formula_mode);
      const double formula_value = evaluate_expansion(formula, c, deltas, *provider);
      result.formula_moments.push_back(formula_value);
      csv.row({"formula", "-", CsvWriter::cell(k), CsvWriter::cell(formula_value),
               CsvWriter::cell(0.0), CsvWriter::cell(cfg.N), CsvWriter::cell(cfg.n),
               CsvWriter::cell(c), CsvWriter::cell(-1)});
      entry["formula"] = expansion_to_json(formula);
    } catch (const ValidationError& e) {
      formula_note = e.what();
      entry["formula_error"] = e.what();
    }
    expansions.push_back(std::move(entry));
  }
  result.formula_note = formula_note;

  const auto expansion_path = cfg.out_dir / "expansions.json";
  write_file(expansion_path, nlohmann::json{{"config_hash", cfg.config_hash},
                                            {"mode", to_string(cfg.formula_mode)},
                                            {"expansions", std::move(expansions)}}
                                 .dump(2) +
                                 "\n");
  result.files = {moments_path, expansion_path};
  return result;
}

CompareResult cmd_compare(const RunConfig& cfg) {
  cfg.validate();
  if (cfg.k_max > cfg.oracle_caps.k_cap)
    throw ValidationError("run.k_max exceeds oracle.k_cap");
  const SimulateResult sim = cmd_simulate(cfg);

  const StepIntegrand integrand = build_model(cfg, cfg.N);
  const int m = integrand.interval_count();
  const std::vector<double> deltas = integrand.interval_lengths();
  const double c = cfg.ratio();
  const auto provider = make_provider(cfg, integrand);

  CompareResult result;
  std::vector<double> oracle_values;
  for (int k = 1; k <= cfg.k_max; ++k)
    oracle_values.push_back(
        evaluate_expansion(oracle_moment_expansion(k, m, cfg.oracle_caps), c, deltas, *provider));

  for (size_t e = 0; e < sim.estimators.size(); ++e)
    for (int k = 1; k <= cfg.k_max; ++k) {
      CompareRow row;
      row.estimator = sim.estimators[e];
      row.k = k;
      row.empirical = sim.stats[e].mean[static_cast<size_t>(k - 1)];
      row.stderr_mean = sim.stats[e].stderr_mean[static_cast<size_t>(k - 1)];
      row.oracle = oracle_values[static_cast<size_t>(k - 1)];
      row.abs_error = std::abs(row.empirical - row.oracle);
      row.rel_error = row.oracle != 0.0 ? row.abs_error / std::abs(row.oracle) : row.abs_error;
      result.rows.push_back(row);
    }

  nlohmann::json audits = nlohmann::json::array();
  for (int k = 1; k <= cfg.k_max; ++k) {
    const AuditReport report = compare_formula_oracle(k, m, cfg.formula_mode, cfg.oracle_caps);
    audits.push_back(audit_to_json(report));
    result.audits.push_back(report);
  }

  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : result.rows)
    rows.push_back(nlohmann::json{{"estimator", to_string(row.estimator)},
                                  {"k", row.k},
                                  {"empirical", row.empirical},
                                  {"mc_stderr", row.stderr_mean},
                                  {"oracle", row.oracle},
                                  {"abs_error", row.abs_error},
                                  {"rel_error", row.rel_error}});
  const auto path = cfg.out_dir / "compare.json";
  write_file(path, nlohmann::json{{"config_hash", cfg.config_hash},
                                  {"N", cfg.N},
                                  {"n", cfg.n},
                                  {"c", c},
                                  {"reps", cfg.reps},
                                  {"rows", std::move(rows)},
                                  {"formula_audit", std::move(audits)}}
                       .dump(2) +
                       "\n");
  result.files = sim.files;
  result.files.push_back(path);
  return result;
}

VarianceScanResult cmd_variance_scan(const RunConfig& cfg) {
  cfg.validate();
  const double c = cfg.ratio();
  const int k = cfg.variance_scan.k;
  const int reps = cfg.variance_scan.reps;

  VarianceScanResult result;
  result.dims = cfg.variance_scan.n_values;
  for (int N : result.dims) {
    const int n = static_cast<int>(std::llround(N / c));
    const StepIntegrand integrand = build_model(cfg, N);
    std::vector<double> values(static_cast<size_t>(reps), 0.0);
    run_indexed(reps, cfg.threads, [&](int rep) {
      const std::uint64_t seed =
          rng::split(rng::split(cfg.master_seed, static_cast<std::uint64_t>(N)),
                     static_cast<std::uint64_t>(rep));
      const CovariationMatrix cov = simulate_path_covariation(integrand, n, seed);
      values[static_cast<size_t>(rep)] = esd(cov.entries).moment(k);
    });
    double mean = std::accumulate(values.begin(), values.end(), 0.0) / reps;
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    result.stds.push_back(std::sqrt(ss / (reps - 1)));
  }

  // Least-squares slope of log(std) against log(N).
  const size_t count = result.dims.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (size_t i = 0; i < count; ++i) {
    const double x = std::log(static_cast<double>(result.dims[i]));
    const double y = std::log(result.stds[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  result.loglog_slope = (count * sxy - sx * sy) / (count * sxx - sx * sx);

  const auto csv_path = cfg.out_dir / "variance.csv";
  {
    CsvWriter csv(csv_path, stamp(cfg), {"N", "n", "k", "std", "reps"});
    for (size_t i = 0; i < count; ++i)
      csv.row({CsvWriter::cell(result.dims[i]),
               CsvWriter::cell(static_cast<int>(std::llround(result.dims[i] / c))),
               CsvWriter::cell(k), CsvWriter::cell(result.stds[i]), CsvWriter::cell(reps)});
  }
  const auto json_path = cfg.out_dir / "variance_scan.json";
  write_file(json_path, nlohmann::json{{"config_hash", cfg.config_hash},
                                       {"k", k},
                                       {"N_values", result.dims},
                                       {"stds", result.stds},
                                       {"loglog_slope", result.loglog_slope}}
                            .dump(2) +
                            "\n");
  result.files = {csv_path, json_path};
  return result;
}

MpSolveResult cmd_mp_solve(const RunConfig& cfg) {
  cfg.validate();
  const double c = cfg.mp.c;
  const SpectralLaw& law = cfg.mp.law;

  const double max_atom = *std::max_element(law.atoms.begin(), law.atoms.end());
  const double min_atom = *std::min_element(law.atoms.begin(), law.atoms.end());
  const double sqrt_c = std::sqrt(c);
  const double default_min =
      std::max(0.0, min_atom * (1.0 - sqrt_c) * (1.0 - sqrt_c) - 0.5);
  const double default_max = max_atom * (1.0 + sqrt_c) * (1.0 + sqrt_c) + 0.5;
  const double e_min = cfg.mp.grid.e_min.value_or(default_min);
  const double e_max = cfg.mp.grid.e_max.value_or(default_max);
  if (!(e_max > e_min)) throw ValidationError("mp.grid: e_max must exceed e_min");

  std::vector<double> energies(static_cast<size_t>(cfg.mp.grid.points));
  for (int i = 0; i < cfg.mp.grid.points; ++i)
    energies[static_cast<size_t>(i)] =
        e_min + (e_max - e_min) * i / (cfg.mp.grid.points - 1);

  MpSolveOptions opts;
  opts.damping = cfg.mp.damping;
  opts.tol = cfg.mp.tol;
  opts.max_iter = cfg.mp.max_iter;

  MpSolveResult result;
  result.grid = solve_mp_grid(law, c, energies, cfg.mp.grid.eta, opts, cfg.threads, false);
  for (bool ok : result.grid.converged)
    if (!ok) result.unconverged++;

  result.mass = grid_quadrature(energies, result.grid.density, 0) + result.grid.point_mass_at_zero;
  result.moment1 = grid_quadrature(energies, result.grid.density, 1);
  result.moment2 = grid_quadrature(energies, result.grid.density, 2);

  const auto csv_path = cfg.out_dir / "mp_grid.csv";
  {
    CsvWriter csv(csv_path, stamp(cfg), {"E", "eta", "re_v", "im_v", "re_m", "im_m", "density"});
    for (size_t i = 0; i < energies.size(); ++i)
      csv.row({CsvWriter::cell(energies[i]), CsvWriter::cell(cfg.mp.grid.eta),
               CsvWriter::cell(result.grid.v_values[i].real()),
               CsvWriter::cell(result.grid.v_values[i].imag()),
               CsvWriter::cell(result.grid.m_values[i].real()),
               CsvWriter::cell(result.grid.m_values[i].imag()),
               CsvWriter::cell(result.grid.density[i])});
  }
  const auto json_path = cfg.out_dir / "mp_summary.json";
  write_file(json_path, nlohmann::json{{"config_hash", cfg.config_hash},
                                       {"c", c},
                                       {"eta", cfg.mp.grid.eta},
                                       {"mass", result.mass},
                                       {"point_mass_at_zero", result.grid.point_mass_at_zero},
                                       {"moment1", result.moment1},
                                       {"moment2", result.moment2},
                                       {"unconverged_points", result.unconverged}}
                            .dump(2) +
                            "\n");
  result.files = {csv_path, json_path};

  if (result.unconverged > 0)
    throw ConvergenceError("mp-solve: " + std::to_string(result.unconverged) +
                               " grid points did not converge (outputs written)",
                           0.0);
  return result;
}

}  // namespace covspec
