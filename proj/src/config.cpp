#include "darkloop/config.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace darkloop::cli {

namespace {

using nlohmann::json;

constexpr std::array<std::pair<Experiment, const char*>, 9> kExperimentNames{{
    {Experiment::ramp, "ramp"},
    {Experiment::loop, "loop"},
    {Experiment::cphase, "cphase"},
    {Experiment::cz, "cz"},
    {Experiment::holonomy, "holonomy"},
    {Experiment::validate_elimination, "validate-elimination"},
    {Experiment::two_reservoirs, "two-reservoirs"},
    {Experiment::feasibility, "feasibility"},
    {Experiment::dfs_check, "dfs-check"},
}};

// Valued options, by normalized key. Flags are handled separately.
const std::vector<std::string> kValueKeys{
    "experiment", "r0", "phi0", "phi", "t", "t1", "t2", "t3", "dt",
    "sample_every", "steps", "n_max", "kappa_ratio", "basis",
    "sweep_r0", "sweep_t", "out", "jobs",
    "g", "kappa", "gamma", "kappa_f", "nu", "omega_over_2delta",
};
const std::vector<std::string> kFlagKeys{"csv", "no_convergence"};

const std::map<std::string, std::string> kHelp{
    {"r0", "squeeze parameter r0"},
    {"phi0", "loop phase phi0 (rad); default pi/|2 nu1 - nu12|"},
    {"phi", "squeeze phase (dfs-check, validate-elimination)"},
    {"t", "ramp/loop duration, elimination window (1/Gamma)"},
    {"t1", "end of step 1 (1/Gamma); default 0.05 T3"},
    {"t2", "end of step 2 (1/Gamma); default 0.95 T3"},
    {"t3", "loop duration T3 (1/Gamma)"},
    {"dt", "RK4 step (1/Gamma); default 0.01"},
    {"sample_every", "monitor sampling interval in steps; default 100"},
    {"steps", "holonomy slices; default 20000"},
    {"n_max", "Fock cutoff for validate-elimination; default 3"},
    {"kappa_ratio", "kappa/beta_r for validate-elimination; default 10"},
    {"basis", "product (16-dim, default) or collective (12-dim e-basis)"},
    {"sweep_r0", "sweep r0 as start:stop:count"},
    {"sweep_t", "sweep T or T3 as start:stop:count"},
    {"out", "output directory; default ."},
    {"jobs", "parallel sweep workers; default 1"},
    {"g", "atom-cavity coupling (MHz)"},
    {"kappa", "cavity decay (MHz)"},
    {"gamma", "atomic spontaneous emission (MHz)"},
    {"kappa_f", "fiber mode decay (MHz)"},
    {"nu", "cavity-fiber coupling (MHz)"},
    {"omega_over_2delta", "drive ratio Omega/(2 Delta)"},
};

std::string normalize_key(std::string key) {
  std::replace(key.begin(), key.end(), '-', '_');
  return key;
}

std::string flag_name(const std::string& key) {
  std::string name = key;
  std::replace(name.begin(), name.end(), '_', '-');
  return "--" + name;
}

double number(const json& v, const std::string& key) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    const std::string s = v.get<std::string>();
    std::size_t used = 0;
    try {
      const double d = std::stod(s, &used);
      if (used == s.size()) return d;
    } catch (const std::exception&) {
    }
    throw ConfigError(key, "'" + key + "' must be a number, got '" + s + "'");
  }
  throw ConfigError(key, "'" + key + "' must be a number");
}

double positive(const json& v, const std::string& key) {
  const double d = number(v, key);
  if (!(d > 0.0) || !std::isfinite(d)) {
    throw ConfigError(key, "'" + key + "' must be positive");
  }
  return d;
}

long long integer(const json& v, const std::string& key, long long min_value) {
  const double d = number(v, key);
  if (d != std::floor(d) || d < static_cast<double>(min_value)) {
    throw ConfigError(key, "'" + key + "' must be an integer >= " + std::to_string(min_value));
  }
  return static_cast<long long>(d);
}

bool boolean(const json& v, const std::string& key) {
  if (v.is_boolean()) return v.get<bool>();
  if (v.is_string()) {
    const std::string s = v.get<std::string>();
    if (s == "true" || s == "1") return true;
    if (s == "false" || s == "0") return false;
  }
  throw ConfigError(key, "'" + key + "' must be true or false");
}

SweepRange sweep(const json& v, const std::string& key) {
  std::vector<json> parts;
  if (v.is_array()) {
    parts.assign(v.begin(), v.end());
  } else if (v.is_string()) {
    std::stringstream ss(v.get<std::string>());
    std::string item;
    while (std::getline(ss, item, ':')) parts.emplace_back(item);
  }
  if (parts.size() != 3) {
    throw ConfigError(key, "'" + key + "' must be start:stop:count");
  }
  SweepRange range;
  range.start = number(parts[0], key);
  range.stop = number(parts[1], key);
  range.count = static_cast<int>(integer(parts[2], key, 1));
  if (range.stop < range.start) {
    throw ConfigError(key, "'" + key + "' has stop < start");
  }
  return range;
}

void require(const std::optional<double>& value, const std::string& key,
             const RunConfig& cfg) {
  if (!value) {
    throw ConfigError(key, "experiment '" + to_string(cfg.experiment) + "' requires '" +
                               key + "'");
  }
}

void validate(const RunConfig& cfg) {
  const bool swept_r0 = cfg.sweep_r0.has_value();
  const bool swept_t = cfg.sweep_t.has_value();
  if (cfg.r0 && *cfg.r0 < 0.0) throw ConfigError("r0", "'r0' must be >= 0");
  if (cfg.sweep_r0 && cfg.sweep_r0->start < 0.0) {
    throw ConfigError("sweep_r0", "'sweep_r0' must stay >= 0");
  }
  if (cfg.sweep_t && !(cfg.sweep_t->start > 0.0)) {
    throw ConfigError("sweep_t", "'sweep_t' times must be positive");
  }
  switch (cfg.experiment) {
    case Experiment::ramp:
    case Experiment::loop:
      if (!swept_r0) require(cfg.r0, "r0", cfg);
      if (!swept_t) require(cfg.t, "t", cfg);
      break;
    case Experiment::cphase:
    case Experiment::two_reservoirs:
      if (!swept_r0) require(cfg.r0, "r0", cfg);
      if (!swept_t) require(cfg.t3, "t3", cfg);
      break;
    case Experiment::cz:
      if (!swept_t) require(cfg.t3, "t3", cfg);
      break;
    case Experiment::holonomy:
    case Experiment::validate_elimination:
      require(cfg.r0, "r0", cfg);
      break;
    case Experiment::dfs_check:
      require(cfg.r0, "r0", cfg);
      require(cfg.phi, "phi", cfg);
      break;
    case Experiment::feasibility:
      break;
  }
  if (cfg.t1 || cfg.t2) {
    const double t3 = cfg.t3.value_or(0.0);
    const double t1 = cfg.t1.value_or(0.05 * t3);
    const double t2 = cfg.t2.value_or(0.95 * t3);
    if (cfg.t3 && !(t1 < t2 && t2 < t3)) {
      throw ConfigError(cfg.t2 ? "t2" : "t1", "need 0 < t1 < t2 < t3");
    }
  }
}

RunConfig build(const json& object) {
  if (!object.is_object()) throw ConfigError("config", "configuration must be a JSON object");
  std::set<std::string> known(kValueKeys.begin(), kValueKeys.end());
  known.insert(kFlagKeys.begin(), kFlagKeys.end());
  json normalized = json::object();
  for (const auto& [raw_key, value] : object.items()) {
    const std::string key = normalize_key(raw_key);
    if (!known.count(key)) throw ConfigError(key, "unknown key '" + raw_key + "'");
    normalized[key] = value;
  }

  RunConfig cfg;
  if (!normalized.contains("experiment")) {
    throw ConfigError("experiment", "no experiment given");
  }
  const json& exp = normalized["experiment"];
  const std::string name = exp.is_string() ? exp.get<std::string>() : exp.dump();
  const auto parsed = experiment_from_string(name);
  if (!parsed) throw ConfigError("experiment", "unknown experiment '" + name + "'");
  cfg.experiment = *parsed;

  const auto get = [&normalized](const char* key) -> const json* {
    auto it = normalized.find(key);
    return it == normalized.end() ? nullptr : &*it;
  };
  if (auto v = get("r0")) cfg.r0 = number(*v, "r0");
  if (auto v = get("phi0")) cfg.phi0 = number(*v, "phi0");
  if (auto v = get("phi")) cfg.phi = number(*v, "phi");
  if (auto v = get("t")) cfg.t = positive(*v, "t");
  if (auto v = get("t1")) cfg.t1 = positive(*v, "t1");
  if (auto v = get("t2")) cfg.t2 = positive(*v, "t2");
  if (auto v = get("t3")) cfg.t3 = positive(*v, "t3");
  if (auto v = get("dt")) cfg.dt = positive(*v, "dt");
  if (auto v = get("sample_every")) cfg.sample_every = integer(*v, "sample_every", 1);
  if (auto v = get("steps")) cfg.steps = integer(*v, "steps", 1);
  if (auto v = get("n_max")) cfg.n_max = static_cast<int>(integer(*v, "n_max", 1));
  if (auto v = get("kappa_ratio")) cfg.kappa_ratio = positive(*v, "kappa_ratio");
  if (auto v = get("basis")) {
    const std::string b = v->is_string() ? v->get<std::string>() : "";
    if (b != "product" && b != "collective") {
      throw ConfigError("basis", "'basis' must be 'product' or 'collective'");
    }
    cfg.collective_basis = b == "collective";
  }
  if (auto v = get("sweep_r0")) cfg.sweep_r0 = sweep(*v, "sweep_r0");
  if (auto v = get("sweep_t")) cfg.sweep_t = sweep(*v, "sweep_t");
  if (auto v = get("out")) {
    if (!v->is_string()) throw ConfigError("out", "'out' must be a path");
    cfg.out_dir = v->get<std::string>();
  }
  if (auto v = get("jobs")) cfg.jobs = static_cast<unsigned>(integer(*v, "jobs", 1));
  if (auto v = get("csv")) cfg.csv = boolean(*v, "csv");
  if (auto v = get("no_convergence")) cfg.check_convergence = !boolean(*v, "no_convergence");

  auto& phys = cfg.physical;
  if (auto v = get("g")) phys.g = positive(*v, "g");
  if (auto v = get("kappa")) phys.kappa = positive(*v, "kappa");
  if (auto v = get("gamma")) phys.gamma = positive(*v, "gamma");
  if (auto v = get("kappa_f")) phys.kappa_f = positive(*v, "kappa_f");
  if (auto v = get("nu")) phys.nu = positive(*v, "nu");
  if (auto v = get("omega_over_2delta")) {
    phys.omega_over_2delta = positive(*v, "omega_over_2delta");
  }

  validate(cfg);
  return cfg;
}

}  // namespace

ConfigError::ConfigError(std::string field, const std::string& message)
    : std::runtime_error(message), field_(std::move(field)) {}

std::string to_string(Experiment e) {
  for (const auto& [value, name] : kExperimentNames) {
    if (value == e) return name;
  }
  return "unknown";
}

std::optional<Experiment> experiment_from_string(const std::string& name) {
  for (const auto& [value, label] : kExperimentNames) {
    if (name == label) return value;
  }
  return std::nullopt;
}

std::vector<double> SweepRange::values() const {
  std::vector<double> out;
  if (count == 1) return {start};
  for (int i = 0; i < count; ++i) {
    out.push_back(start + (stop - start) * static_cast<double>(i) / (count - 1));
  }
  return out;
}

RunConfig config_from_json(const std::string& json_text) {
  json parsed;
  try {
    parsed = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError("config", std::string("malformed JSON: ") + e.what());
  }
  return build(parsed);
}

RunConfig parse_config(const std::vector<std::string>& args) {
  CLI::App app{"Holonomic gate simulator driven by an engineered squeezed reservoir",
               "darkloop"};
  std::string experiment;
  std::string config_path;
  app.add_option("experiment", experiment,
                 "ramp | loop | cphase | cz | holonomy | validate-elimination | "
                 "two-reservoirs | feasibility | dfs-check");
  app.add_option("--config", config_path, "JSON configuration file");

  std::vector<std::pair<std::string, std::string>> values;
  values.reserve(kValueKeys.size());
  std::vector<CLI::Option*> value_options;
  for (const auto& key : kValueKeys) {
    if (key == "experiment") continue;
    values.emplace_back(key, std::string{});
    value_options.push_back(
        app.add_option(flag_name(key), values.back().second, kHelp.at(key)));
  }
  bool csv = false;
  bool no_convergence = false;
  auto* csv_flag = app.add_flag("--csv", csv, "write trajectory.csv / sweep.csv");
  auto* conv_flag = app.add_flag("--no-convergence", no_convergence,
                                 "skip the dt/2 convergence re-run");

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    throw HelpRequested{app.help()};
  } catch (const CLI::ParseError& e) {
    throw ConfigError("", e.what());
  }

  json object = json::object();
  if (!config_path.empty()) {
    std::ifstream in(config_path);
    if (!in) throw ConfigError("config", "cannot open config file '" + config_path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    try {
      object = json::parse(buf.str());
    } catch (const json::parse_error& e) {
      throw ConfigError("config", std::string("malformed JSON in '") + config_path +
                                      "': " + e.what());
    }
    if (!object.is_object()) {
      throw ConfigError("config", "configuration must be a JSON object");
    }
  }
  // Flags win over file values.
  json merged = json::object();
  for (const auto& [k, v] : object.items()) merged[normalize_key(k)] = v;
  if (!experiment.empty()) merged["experiment"] = experiment;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (value_options[i]->count() > 0) merged[values[i].first] = values[i].second;
  }
  if (csv_flag->count() > 0) merged["csv"] = csv;
  if (conv_flag->count() > 0) merged["no_convergence"] = no_convergence;
  return build(merged);
}

}  // namespace darkloop::cli
