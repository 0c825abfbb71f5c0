// Apache License, Version 2.0, refer to LICENSE.txt
#include "fablab/config.hpp"

#include <fstream>
#include <json.hpp>
#include <set>

namespace fablab {

namespace {

using nlohmann::json;

json parse_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path.string() + ": cannot open file");
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  if (!j.is_object()) throw ConfigError(path.string() + ": top level must be an object");
  return j;
}

void reject_unknown_keys(const json& j, const std::set<std::string>& known,
                         const std::string& context) {
  for (const auto& item : j.items()) {
    if (!known.contains(item.key())) {
      throw ConfigError("unknown key \"" + item.key() + "\" in " + context);
    }
  }
}

const json& require(const json& j, const std::string& key,
                    const std::string& context) {
  if (!j.contains(key)) {
    throw ConfigError("missing key \"" + key + "\" in " + context);
  }
  return j.at(key);
}

double as_number(const json& j, const std::string& key, const std::string& context) {
  if (!j.is_number()) {
    throw ConfigError("key \"" + key + "\" in " + context + " must be a number");
  }
  return j.get<double>();
}

int as_int(const json& j, const std::string& key, const std::string& context) {
  if (!j.is_number_integer()) {
    throw ConfigError("key \"" + key + "\" in " + context + " must be an integer");
  }
  return j.get<int>();
}

GenConfig parse_dataset(const json& j, const std::string& context,
                        bool seed_required) {
  if (!j.is_object()) throw ConfigError(context + " must be an object");
  reject_unknown_keys(j, {"seed", "k_true", "n", "dims", "separation", "variance"},
                      context);
  GenConfig cfg;
  if (seed_required || j.contains("seed")) {
    const json& s = require(j, "seed", context);
    if (!s.is_number_unsigned()) {
      throw ConfigError("key \"seed\" in " + context + " must be a non-negative integer");
    }
    cfg.seed = s.get<std::uint64_t>();
  }
  cfg.k_true = as_int(require(j, "k_true", context), "k_true", context);
  cfg.n = as_int(require(j, "n", context), "n", context);
  cfg.dims = as_int(require(j, "dims", context), "dims", context);
  cfg.separation = as_number(require(j, "separation", context), "separation", context);
  cfg.variance = as_number(require(j, "variance", context), "variance", context);
  if (cfg.k_true < 1 || cfg.n < 1 || cfg.dims < 1 || cfg.k_true > cfg.n ||
      !(cfg.separation > 0.0) || !(cfg.variance > 0.0)) {
    throw ConfigError(context + ": values must be positive and k_true <= n");
  }
  return cfg;
}

PriorSpec parse_prior(const json& j, const std::string& context) {
  if (!j.is_object()) throw ConfigError(context + " must be an object");
  reject_unknown_keys(j, {"kind", "dc", "d"}, context);
  const json& kind = require(j, "kind", context);
  if (!kind.is_string()) throw ConfigError("key \"kind\" in " + context + " must be a string");
  const std::string name = kind.get<std::string>();
  if (name == "crp") {
    if (j.contains("dc") || j.contains("d")) {
      throw ConfigError(context + ": crp takes no parameters");
    }
    return PriorSpec::crp();
  }
  if (name == "uniform") {
    if (j.contains("dc") || j.contains("d")) {
      throw ConfigError(context + ": uniform takes no parameters");
    }
    return PriorSpec::uniform();
  }
  if (name == "fic") {
    if (j.contains("d")) throw ConfigError(context + ": fic takes dc, not d");
    // dc optional: the dominance curve rescales it per replication anyway.
    const double dc = j.contains("dc")
                          ? as_number(j.at("dc"), "dc", context)
                          : 2.0;
    return PriorSpec::fic(dc);
  }
  if (name == "gfic") {
    if (j.contains("dc")) throw ConfigError(context + ": gfic takes d, not dc");
    return PriorSpec::gfic(as_number(require(j, "d", context), "d", context));
  }
  throw ConfigError(context + ": unknown prior kind \"" + name + "\"");
}

FabConfig parse_fit(const json& j, const std::string& context) {
  if (!j.is_object()) throw ConfigError(context + " must be an object");
  reject_unknown_keys(j,
                      {"k_init", "max_iters", "rel_tol", "var_floor_scale",
                       "prune_threshold", "init"},
                      context);
  FabConfig cfg;
  cfg.k_init = as_int(require(j, "k_init", context), "k_init", context);
  if (cfg.k_init < 1) throw ConfigError(context + ": k_init must be >= 1");
  if (j.contains("max_iters")) {
    cfg.max_iters = as_int(j.at("max_iters"), "max_iters", context);
    if (cfg.max_iters < 1) throw ConfigError(context + ": max_iters must be >= 1");
  }
  if (j.contains("rel_tol")) {
    cfg.rel_tol = as_number(j.at("rel_tol"), "rel_tol", context);
    if (!(cfg.rel_tol > 0.0)) throw ConfigError(context + ": rel_tol must be > 0");
  }
  if (j.contains("var_floor_scale")) {
    cfg.var_floor_scale = as_number(j.at("var_floor_scale"), "var_floor_scale", context);
    if (!(cfg.var_floor_scale > 0.0)) {
      throw ConfigError(context + ": var_floor_scale must be > 0");
    }
  }
  if (j.contains("prune_threshold")) {
    cfg.prune_threshold = as_number(j.at("prune_threshold"), "prune_threshold", context);
    if (cfg.prune_threshold < 0.0) {
      throw ConfigError(context + ": prune_threshold must be >= 0");
    }
  }
  if (j.contains("init")) {
    const json& init = j.at("init");
    if (!init.is_string()) throw ConfigError(context + ": init must be a string");
    const std::string name = init.get<std::string>();
    if (name == "random") {
      cfg.init = InitMethod::RandomResponsibilities;
    } else if (name == "kmeans") {
      cfg.init = InitMethod::KMeansStyle;
    } else {
      throw ConfigError(context + ": init must be \"random\" or \"kmeans\"");
    }
  }
  return cfg;
}

std::string parse_out(const json& j, const std::string& context) {
  if (!j.contains("out")) return "";
  if (!j.at("out").is_string()) {
    throw ConfigError("key \"out\" in " + context + " must be a string");
  }
  return j.at("out").get<std::string>();
}

}  // namespace

DominanceConfig load_dominance_config(const std::filesystem::path& path) {
  const json j = parse_file(path);
  const std::string root = path.filename().string();
  reject_unknown_keys(j,
                      {"dataset", "replications", "priors", "k_max",
                       "var_floor_scale", "out"},
                      root);
  DominanceConfig cfg;
  cfg.dataset = parse_dataset(require(j, "dataset", root), root + ":dataset", true);

  const json& reps = require(j, "replications", root);
  if (!reps.is_array() || reps.empty()) {
    throw ConfigError(root + ": replications must be a nonempty array");
  }
  for (const auto& r : reps) {
    const int v = as_int(r, "replications", root);
    if (v < 1) throw ConfigError(root + ": replications must be >= 1");
    cfg.replications.push_back(v);
  }

  const json& priors = require(j, "priors", root);
  if (!priors.is_array() || priors.empty()) {
    throw ConfigError(root + ": priors must be a nonempty array");
  }
  for (std::size_t i = 0; i < priors.size(); ++i) {
    cfg.priors.push_back(
        parse_prior(priors.at(i), root + ":priors[" + std::to_string(i) + "]"));
  }

  cfg.k_max = as_int(require(j, "k_max", root), "k_max", root);
  if (cfg.k_max < 1) throw ConfigError(root + ": k_max must be >= 1");
  cfg.var_floor_scale =
      as_number(require(j, "var_floor_scale", root), "var_floor_scale", root);
  if (!(cfg.var_floor_scale > 0.0)) {
    throw ConfigError(root + ": var_floor_scale must be > 0");
  }
  cfg.out = parse_out(j, root);
  return cfg;
}

SelectionConfig load_selection_config(const std::filesystem::path& path) {
  const json j = parse_file(path);
  const std::string root = path.filename().string();
  reject_unknown_keys(j, {"dataset", "d_grid", "seeds", "fit", "out"}, root);
  SelectionConfig cfg;
  cfg.dataset = parse_dataset(require(j, "dataset", root), root + ":dataset", false);

  const json& grid = require(j, "d_grid", root);
  if (!grid.is_array() || grid.empty()) {
    throw ConfigError(root + ": d_grid must be a nonempty array");
  }
  for (const auto& d : grid) {
    const double v = as_number(d, "d_grid", root);
    if (v < 0.0) throw ConfigError(root + ": d values must be >= 0");
    cfg.d_grid.push_back(v);
  }

  const json& seeds = require(j, "seeds", root);
  if (!seeds.is_array() || seeds.empty()) {
    throw ConfigError(root + ": seeds must be a nonempty array");
  }
  for (const auto& s : seeds) {
    if (!s.is_number_unsigned()) {
      throw ConfigError(root + ": seeds must be non-negative integers");
    }
    cfg.seeds.push_back(s.get<std::uint64_t>());
  }

  cfg.fit = parse_fit(require(j, "fit", root), root + ":fit");
  cfg.out = parse_out(j, root);
  return cfg;
}

}  // namespace fablab
