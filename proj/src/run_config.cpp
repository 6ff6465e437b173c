#include "hspace/run_config.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace hspace {

namespace {

using nlohmann::json;

void check_keys(const json& obj, const std::string& where, const std::set<std::string>& allowed) {
  if (!obj.is_object()) throw ConfigError(where + ": expected an object");
  for (const auto& [key, value] : obj.items())
    if (!allowed.count(key)) throw ConfigError(where + ": unknown key '" + key + "'");
}

double get_number(const json& obj, const std::string& key, const std::string& where, double fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number()) throw ConfigError(where + "." + key + ": expected a number");
  return v.get<double>();
}

int get_int(const json& obj, const std::string& key, const std::string& where, int fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number_integer()) throw ConfigError(where + "." + key + ": expected an integer");
  return v.get<int>();
}

std::string get_string(const json& obj, const std::string& key, const std::string& where) {
  const json& v = obj.at(key);
  if (!v.is_string()) throw ConfigError(where + "." + key + ": expected a string");
  return v.get<std::string>();
}

HSpaceConfig parse_space(const json& j) {
  check_keys(j, "space", {"family", "signs", "lambda", "c", "epsilon", "reading", "functions"});
  HSpaceConfig cfg;
  if (!j.contains("family")) throw ConfigError("space.family is required");
  const std::string family = get_string(j, "family", "space");
  const auto f = family_from_string(family);
  if (!f) throw ConfigError("space.family: unknown family '" + family + "' (expected 3(21), (32)1 or (321))");
  cfg.family = *f;

  if (j.contains("signs")) {
    const json& s = j.at("signs");
    check_keys(s, "space.signs", {"e3", "e4", "e5", "e6"});
    cfg.signs.e3 = get_int(s, "e3", "space.signs", cfg.signs.e3);
    cfg.signs.e4 = get_int(s, "e4", "space.signs", cfg.signs.e4);
    cfg.signs.e5 = get_int(s, "e5", "space.signs", cfg.signs.e5);
    cfg.signs.e6 = get_int(s, "e6", "space.signs", cfg.signs.e6);
  }
  cfg.lambda = get_number(j, "lambda", "space", cfg.lambda);
  cfg.c = get_number(j, "c", "space", cfg.c);
  cfg.epsilon = get_int(j, "epsilon", "space", cfg.epsilon);
  if (j.contains("reading")) {
    const std::string r = get_string(j, "reading", "space");
    const auto reading = reading_from_string(r);
    if (!reading) throw ConfigError("space.reading: expected 'printed' or 'amended', got '" + r + "'");
    cfg.reading = *reading;
  }
  if (j.contains("functions")) {
    const json& fns = j.at("functions");
    if (!fns.is_object()) throw ConfigError("space.functions: expected an object");
    for (const auto& [name, expr] : fns.items()) {
      if (!expr.is_string()) throw ConfigError("space.functions." + name + ": expected a string");
      cfg.functions[name] = expr.get<std::string>();
    }
  }
  return cfg;
}

Box parse_box(const json& j) {
  if (!j.is_array() || j.size() != 6) throw ConfigError("sampling.box: expected six [lo, hi] pairs");
  Box box;
  for (int i = 0; i < 6; ++i) {
    const json& pair = j.at(i);
    const std::string where = "sampling.box[" + std::to_string(i) + "]";
    if (!pair.is_array() || pair.size() != 2 || !pair.at(0).is_number() || !pair.at(1).is_number())
      throw ConfigError(where + ": expected [lo, hi]");
    box.lo[i] = pair.at(0).get<double>();
    box.hi[i] = pair.at(1).get<double>();
  }
  return box;
}

Method parse_method(const std::string& s) {
  if (s == "rk4") return Method::kRK4;
  if (s == "rk45") return Method::kRK45;
  throw ConfigError("integration.method: expected 'rk4' or 'rk45', got '" + s + "'");
}

}  // namespace

void validate(const RunConfig& config) {
  HSpace::build(config.space);
  if (config.box) {
    for (int i = 0; i < 6; ++i)
      if (!std::isfinite(config.box->lo[i]) || !std::isfinite(config.box->hi[i]) ||
          !(config.box->hi[i] > config.box->lo[i]))
        throw ConfigError("sampling.box[" + std::to_string(i) + "]: need finite lo < hi");
  }
  if (!(config.integration.dt > 0.0) || !std::isfinite(config.integration.dt))
    throw ConfigError("integration.dt must be positive");
  if (config.integration.n_steps < 0) throw ConfigError("integration.steps must be non-negative");
  if (!(config.integration.rk45_tol > 0.0)) throw ConfigError("integration.rk45_tol must be positive");
  for (double t : {config.tol_residual, config.segre.cluster, config.segre.rank, config.tol_drift})
    if (!(t > 0.0) || !std::isfinite(t)) throw ConfigError("tolerances must be positive and finite");
}

RunConfig parse_run_config(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& err) {
    throw ConfigError(std::string("invalid JSON: ") + err.what());
  }
  check_keys(root, "config", {"space", "sampling", "integration", "tolerances"});
  if (!root.contains("space")) throw ConfigError("config: 'space' is required");

  RunConfig cfg;
  cfg.space = parse_space(root.at("space"));

  if (root.contains("sampling")) {
    const json& s = root.at("sampling");
    check_keys(s, "sampling", {"seed", "box"});
    if (s.contains("seed")) {
      const json& seed = s.at("seed");
      if (!seed.is_number_unsigned()) throw ConfigError("sampling.seed: expected a non-negative integer");
      cfg.seed = seed.get<std::uint64_t>();
    }
    if (s.contains("box")) cfg.box = parse_box(s.at("box"));
  }

  if (root.contains("integration")) {
    const json& j = root.at("integration");
    check_keys(j, "integration", {"dt", "steps", "method", "rk45_tol"});
    cfg.integration.dt = get_number(j, "dt", "integration", cfg.integration.dt);
    cfg.integration.n_steps = get_int(j, "steps", "integration", cfg.integration.n_steps);
    if (j.contains("method")) cfg.integration.method = parse_method(get_string(j, "method", "integration"));
    cfg.integration.rk45_tol = get_number(j, "rk45_tol", "integration", cfg.integration.rk45_tol);
  }

  if (root.contains("tolerances")) {
    const json& j = root.at("tolerances");
    check_keys(j, "tolerances", {"tol_residual", "tol_cluster", "tol_rank", "tol_drift"});
    cfg.tol_residual = get_number(j, "tol_residual", "tolerances", cfg.tol_residual);
    cfg.segre.cluster = get_number(j, "tol_cluster", "tolerances", cfg.segre.cluster);
    cfg.segre.rank = get_number(j, "tol_rank", "tolerances", cfg.segre.rank);
    cfg.tol_drift = get_number(j, "tol_drift", "tolerances", cfg.tol_drift);
  }

  validate(cfg);
  return cfg;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_run_config(text.str());
}

Box sampling_box(const RunConfig& config, const HSpace& space) { return config.box ? *config.box : default_box(space); }

}  // namespace hspace
