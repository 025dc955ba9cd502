#include "covspec/config.hpp"

#include <nlohmann/json.hpp>

#include "covspec/errors.hpp"
#include "covspec/io_util.hpp"

namespace covspec {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw ValidationError("config: " + path + ": " + what);
}

template <typename T>
T get_or(const json& obj, const std::string& path, const std::string& key, T fallback) {
  if (!obj.contains(key)) return fallback;
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception& e) {
    fail(path + "." + key, e.what());
  }
}

EnsembleSpec parse_ensemble(const json& j, const std::string& path) {
  EnsembleSpec spec;
  if (!j.contains("kind")) fail(path, "missing 'kind'");
  spec.kind = ensemble_kind_from_string(j.at("kind").get<std::string>());
  spec.scale = get_or(j, path, "scale", 1.0);
  spec.spectrum = get_or(j, path, "spectrum", std::vector<double>{});
  if (j.contains("two_point")) {
    const json& tp = j.at("two_point");
    TwoPointLaw law;
    law.value_a = get_or(tp, path + ".two_point", "value_a", 0.0);
    law.value_b = get_or(tp, path + ".two_point", "value_b", 0.0);
    law.weight_a = get_or(tp, path + ".two_point", "weight_a", 0.5);
    spec.two_point = law;
  }
  return spec;
}

}  // namespace

void RunConfig::validate() const {
  if (N < 1) fail("model.N", "must be >= 1");
  if (n < 1) fail("model.n", "must be >= 1");
  if (breakpoints.size() < 2) fail("model.breakpoints", "need at least 2 entries");
  if (breakpoints.front() != 0.0 || breakpoints.back() != 1.0)
    fail("model.breakpoints", "must start at 0 and end at 1");
  for (size_t i = 0; i + 1 < breakpoints.size(); ++i)
    if (!(breakpoints[i] < breakpoints[i + 1]))
      fail("model.breakpoints", "must be strictly increasing");
  if (ensembles.size() + 1 != breakpoints.size())
    fail("model.ensembles", "need exactly one ensemble per interval");
  if (tau0 && !(*tau0 > 0.0)) fail("model.tau0", "must be > 0");

  if (reps < 1) fail("run.reps", "must be >= 1");
  if (k_max < 1) fail("run.k_max", "k_max must be >= 1");
  if (threads < 1) fail("run.threads", "must be >= 1");
  if (estimators.empty()) fail("run.estimators", "must not be empty");

  if (oracle_caps.k_cap < 1) fail("oracle.k_cap", "must be >= 1");
  if (oracle_caps.m_cap < 1) fail("oracle.m_cap", "must be >= 1");

  if (!(mp.c > 0.0)) fail("mp.c", "must be > 0");
  mp.law.validate();
  if (mp.grid.points < 2) fail("mp.grid.points", "must be >= 2");
  if (!(mp.grid.eta > 0.0)) fail("mp.grid.eta", "must be > 0");
  if (!(mp.tol > 0.0)) fail("mp.tol", "must be > 0");
  if (!(mp.damping > 0.0 && mp.damping <= 1.0)) fail("mp.damping", "must be in (0, 1]");
  if (mp.max_iter < 1) fail("mp.max_iter", "must be >= 1");

  if (variance_scan.n_values.empty()) fail("variance_scan.N_values", "must not be empty");
  for (int v : variance_scan.n_values)
    if (v < 1) fail("variance_scan.N_values", "entries must be >= 1");
  if (variance_scan.reps < 2) fail("variance_scan.reps", "must be >= 2");
  if (variance_scan.k < 1) fail("variance_scan.k", "must be >= 1");
}

RunConfig parse_config_text(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("config: invalid JSON: ") + e.what());
  }

  RunConfig cfg;
  cfg.config_hash = to_hex(fnv1a64(text));

  if (root.contains("model")) {
    const json& model = root.at("model");
    cfg.N = get_or(model, "model", "N", cfg.N);
    cfg.n = get_or(model, "model", "n", cfg.n);
    cfg.breakpoints = get_or(model, "model", "breakpoints", cfg.breakpoints);
    if (model.contains("tau0")) cfg.tau0 = model.at("tau0").get<double>();
    if (model.contains("ensembles")) {
      cfg.ensembles.clear();
      const json& arr = model.at("ensembles");
      if (!arr.is_array()) fail("model.ensembles", "must be an array");
      for (size_t i = 0; i < arr.size(); ++i)
        cfg.ensembles.push_back(
            parse_ensemble(arr[i], "model.ensembles[" + std::to_string(i) + "]"));
    }
  }

  if (root.contains("run")) {
    const json& run = root.at("run");
    cfg.master_seed = get_or(run, "run", "master_seed", cfg.master_seed);
    cfg.reps = get_or(run, "run", "reps", cfg.reps);
    cfg.k_max = get_or(run, "run", "k_max", cfg.k_max);
    cfg.threads = get_or(run, "run", "threads", cfg.threads);
    if (run.contains("estimators")) {
      cfg.estimators.clear();
      for (const auto& s : run.at("estimators"))
        cfg.estimators.push_back(estimator_kind_from_string(s.get<std::string>()));
    }
  }

  if (root.contains("oracle")) {
    const json& oracle = root.at("oracle");
    cfg.oracle_caps.k_cap = get_or(oracle, "oracle", "k_cap", cfg.oracle_caps.k_cap);
    cfg.oracle_caps.m_cap = get_or(oracle, "oracle", "m_cap", cfg.oracle_caps.m_cap);
  }

  if (root.contains("formula")) {
    const json& formula = root.at("formula");
    if (formula.contains("mode"))
      cfg.formula_mode = coefficient_mode_from_string(formula.at("mode").get<std::string>());
  }

  if (root.contains("mp")) {
    const json& mp = root.at("mp");
    cfg.mp.c = get_or(mp, "mp", "c", cfg.mp.c);
    cfg.mp.tol = get_or(mp, "mp", "tol", cfg.mp.tol);
    cfg.mp.damping = get_or(mp, "mp", "damping", cfg.mp.damping);
    cfg.mp.max_iter = get_or(mp, "mp", "max_iter", cfg.mp.max_iter);
    if (mp.contains("law")) {
      const json& law = mp.at("law");
      if (!law.contains("atoms") || !law.at("atoms").is_array())
        fail("mp.law.atoms", "must be an array of {x, w}");
      cfg.mp.law.atoms.clear();
      cfg.mp.law.weights.clear();
      for (const auto& atom : law.at("atoms")) {
        cfg.mp.law.atoms.push_back(atom.at("x").get<double>());
        cfg.mp.law.weights.push_back(atom.at("w").get<double>());
      }
    }
    if (mp.contains("grid")) {
      const json& grid = mp.at("grid");
      if (grid.contains("e_min")) cfg.mp.grid.e_min = grid.at("e_min").get<double>();
      if (grid.contains("e_max")) cfg.mp.grid.e_max = grid.at("e_max").get<double>();
      cfg.mp.grid.points = get_or(grid, "mp.grid", "points", cfg.mp.grid.points);
      cfg.mp.grid.eta = get_or(grid, "mp.grid", "eta", cfg.mp.grid.eta);
    }
  }

  if (root.contains("variance_scan")) {
    const json& scan = root.at("variance_scan");
    cfg.variance_scan.n_values =
        get_or(scan, "variance_scan", "N_values", cfg.variance_scan.n_values);
    cfg.variance_scan.reps = get_or(scan, "variance_scan", "reps", cfg.variance_scan.reps);
    cfg.variance_scan.k = get_or(scan, "variance_scan", "k", cfg.variance_scan.k);
  }

  if (root.contains("output")) {
    const json& output = root.at("output");
    if (output.contains("directory"))
      cfg.out_dir = output.at("directory").get<std::string>();
  }

  if (root.contains("mixed_moments")) {
    const json& table = root.at("mixed_moments");
    if (!table.is_array()) fail("mixed_moments", "must be an array of {word, value}");
    for (const auto& entry : table) {
      const auto word = entry.at("word").get<std::vector<int>>();
      cfg.analytic_moments[canonical_rotation(word)] = entry.at("value").get<double>();
    }
  }

  cfg.validate();
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  return parse_config_text(read_file(path));
}

}  // namespace covspec
