#include <CLI11.hpp>
#include <iostream>

#include "covspec/commands.hpp"
#include "covspec/errors.hpp"
#include "covspec/io_util.hpp"
#include "covspec/version.hpp"

namespace {

struct CommonArgs {
  std::string config_path;
  int threads = 0;         // 0: keep config value
  std::string out_dir;     // empty: keep config value
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config_path, "Path to the JSON config file")->required();
  cmd->add_option("--threads", args.threads, "Override run.threads");
  cmd->add_option("--out", args.out_dir, "Override output.directory");
}

covspec::RunConfig load(const CommonArgs& args) {
  covspec::RunConfig cfg = covspec::load_config(args.config_path);
  if (args.threads > 0) cfg.threads = args.threads;
  if (!args.out_dir.empty()) cfg.out_dir = args.out_dir;
  return cfg;
}

void print_files(const std::vector<std::filesystem::path>& files) {
  for (const auto& f : files) std::cout << "wrote " << f.string() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"High-dimensional covariation spectra: simulation, limiting moments, "
               "and Marchenko-Pastur solver"};
  app.set_version_flag("--version", covspec::kVersion);
  app.require_subcommand(1);

  CommonArgs sim_args, limit_args, compare_args, scan_args, mp_args;
  CLI::App* sim = app.add_subcommand("simulate", "Sample covariation matrices, emit spectral moments");
  add_common(sim, sim_args);
  CLI::App* limit = app.add_subcommand("limit", "Evaluate limiting moments (oracle and closed form)");
  add_common(limit, limit_args);
  CLI::App* compare = app.add_subcommand("compare", "Empirical vs limiting moments plus formula audit");
  add_common(compare, compare_args);
  CLI::App* scan = app.add_subcommand("variance-scan", "Moment fluctuation decay across dimensions");
  add_common(scan, scan_args);
  CLI::App* mp = app.add_subcommand("mp-solve", "Solve the Marchenko-Pastur equation on a grid");
  add_common(mp, mp_args);

  CLI11_PARSE(app, argc, argv);

  try {
    if (sim->parsed()) {
      print_files(covspec::cmd_simulate(load(sim_args)).files);
    } else if (limit->parsed()) {
      const auto result = covspec::cmd_limit(load(limit_args));
      if (!result.formula_note.empty())
        std::cout << "formula: " << result.formula_note << "\n";
      print_files(result.files);
    } else if (compare->parsed()) {
      print_files(covspec::cmd_compare(load(compare_args)).files);
    } else if (scan->parsed()) {
      const auto result = covspec::cmd_variance_scan(load(scan_args));
      std::cout << "loglog_slope " << result.loglog_slope << "\n";
      print_files(result.files);
    } else if (mp->parsed()) {
      print_files(covspec::cmd_mp_solve(load(mp_args)).files);
    }
  } catch (const covspec::ValidationError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return 2;
  } catch (const covspec::ConvergenceError& e) {
    std::cerr << "convergence error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
