#include "ymlab/config.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <set>

namespace ymlab {

namespace {

struct Field {
  std::string key;
  std::function<YAML::Node(const ExperimentConfig&)> yaml;
  std::function<nlohmann::json(const ExperimentConfig&)> json;
  std::function<void(ExperimentConfig&, const YAML::Node&)> set;
};

template <class Ref>
Field field(std::string key, Ref ref) {
  using T = std::remove_reference_t<decltype(ref(std::declval<ExperimentConfig&>()))>;
  auto get = [ref](const ExperimentConfig& c) -> const T& { return ref(const_cast<ExperimentConfig&>(c)); };
  return {std::move(key), [get](const ExperimentConfig& c) { return YAML::Node(get(c)); },
          [get](const ExperimentConfig& c) { return nlohmann::json(get(c)); },
          [ref](ExperimentConfig& c, const YAML::Node& n) { ref(c) = n.as<T>(); }};
}

#define YM_FIELD(key, member) field(key, [](ExperimentConfig& c) -> auto& { return c.member; })

const std::vector<Field>& fields() {
  static const std::vector<Field> f = {
      YM_FIELD("command", command),
      YM_FIELD("grid.N", grid.N),
      YM_FIELD("grid.L", grid.L),
      YM_FIELD("group.n", group.n),
      YM_FIELD("flow.scheme", flow.scheme),
      YM_FIELD("flow.gauge", flow.gauge),
      YM_FIELD("flow.cfl_sigma", flow.cfl_sigma),
      YM_FIELD("flow.ds", flow.ds),
      YM_FIELD("flow.s_end", flow.s_end),
      YM_FIELD("flow.record_stride", flow.record_stride),
      YM_FIELD("flow.dealias", flow.dealias),
      YM_FIELD("flow.cutoff", flow.cutoff),
      YM_FIELD("evolve.dt", evolve.dt),
      YM_FIELD("evolve.cfl", evolve.cfl),
      YM_FIELD("evolve.T_end", evolve.T_end),
      YM_FIELD("evolve.record_stride", evolve.record_stride),
      YM_FIELD("family.t_center", family.t_center),
      YM_FIELD("family.dt_slice", family.dt_slice),
      YM_FIELD("family.half_slices", family.half_slices),
      YM_FIELD("family.s_end", family.s_end),
      YM_FIELD("family.ds", family.ds),
      YM_FIELD("family.sample_s", family.sample_s),
      YM_FIELD("family.ds_cluster", family.ds_cluster),
      YM_FIELD("family.cluster_half_width", family.cluster_half_width),
      YM_FIELD("family.meter_points", family.meter_points),
      YM_FIELD("family.ds_start", family.ds_start),
      YM_FIELD("family.step_growth", family.step_growth),
      YM_FIELD("family.track_frames", family.track_frames),
      YM_FIELD("family.gauge_safety", family.gauge_safety),
      YM_FIELD("family.ode_substeps", family.ode_substeps),
      YM_FIELD("data.generator", data.generator),
      YM_FIELD("data.max_mode", data.max_mode),
      YM_FIELD("data.amplitude", data.amplitude),
      YM_FIELD("data.seed", data.seed),
      YM_FIELD("data.wave_mode", data.wave_mode),
      YM_FIELD("data.polarization", data.polarization),
      YM_FIELD("data.epsilon", data.epsilon),
      YM_FIELD("data.path_A", data.path_A),
      YM_FIELD("data.path_E", data.path_E),
      YM_FIELD("data.projection_tol", data.projection_tol),
      YM_FIELD("scaling.lambda", scaling.lambda),
      YM_FIELD("scaling.T_end", scaling.T_end),
      YM_FIELD("verify.tolerance", verify.tolerance),
      YM_FIELD("output.dir", output.dir),
      YM_FIELD("output.stride", output.stride),
      YM_FIELD("output.formats", output.formats),
  };
  return f;
}

#undef YM_FIELD

const Field& find(const std::string& key) {
  for (const Field& f : fields())
    if (f.key == key) return f;
  throw ConfigError("unknown configuration key '" + key + "'");
}

void flatten(const YAML::Node& node, const std::string& prefix, ExperimentConfig& cfg) {
  if (node.IsMap()) {
    for (const auto& kv : node) {
      const std::string k = kv.first.as<std::string>();
      flatten(kv.second, prefix.empty() ? k : prefix + "." + k, cfg);
    }
    return;
  }
  if (prefix.empty()) throw ConfigError("configuration root must be a map");
  set_config_value(cfg, prefix, node);
}

void require(bool ok, const std::string& what) {
  if (!ok) throw ConfigError(what);
}

}  // namespace

bool ExperimentConfig::wants(const std::string& format) const {
  return std::find(output.formats.begin(), output.formats.end(), format) != output.formats.end();
}

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> k;
    for (const Field& f : fields()) k.push_back(f.key);
    return k;
  }();
  return keys;
}

void set_config_value(ExperimentConfig& cfg, const std::string& key, const YAML::Node& value) {
  const Field& f = find(key);
  try {
    f.set(cfg, value);
  } catch (const YAML::Exception& e) {
    throw ConfigError("bad value for '" + key + "': " + e.what());
  }
}

void apply_yaml(ExperimentConfig& cfg, const YAML::Node& root) {
  if (!root || root.IsNull()) return;
  flatten(root, "", cfg);
}

ExperimentConfig load_config(const std::string& path) {
  ExperimentConfig cfg;
  try {
    apply_yaml(cfg, YAML::LoadFile(path));
  } catch (const YAML::Exception& e) {
    throw ConfigError("cannot read config '" + path + "': " + e.what());
  }
  return cfg;
}

void validate(const ExperimentConfig& c) {
  static const std::set<std::string> commands{"flow", "evolve", "pipeline", "verify", "project-data", "scaling-test"};
  static const std::set<std::string> generators{"random-bandlimited", "abelian-wave", "pure-gauge", "zero",
                                                "checkpoint"};
  static const std::set<std::string> schemes{"if_rk2", "if_rk4", "rk4_explicit"};
  static const std::set<std::string> formats{"csv", "json", "checkpoint"};
  require(commands.count(c.command) > 0, "unknown command '" + c.command + "'");
  require(c.grid.N >= 4 && c.grid.N % 2 == 0, "grid.N must be an even integer >= 4");
  require(c.grid.L > 0.0, "grid.L must be positive");
  require(c.group.n >= 2, "group.n must be >= 2");
  require(schemes.count(c.flow.scheme) > 0, "unknown flow.scheme '" + c.flow.scheme + "'");
  require(c.flow.gauge == "deturck" || c.flow.gauge == "caloric", "flow.gauge must be deturck or caloric");
  require(c.flow.cfl_sigma > 0.0 && c.flow.cfl_sigma <= 1.0, "flow.cfl_sigma must lie in (0, 1]");
  require(c.flow.ds >= 0.0, "flow.ds must be positive (0 selects the bound)");
  require(c.flow.s_end > 0.0, "flow.s_end must be positive");
  require(c.flow.record_stride > 0 && c.evolve.record_stride > 0 && c.output.stride > 0, "strides must be positive");
  require(c.flow.cutoff >= 0, "flow.cutoff must be >= 0 (0 selects the 2/3 rule)");
  require(c.evolve.dt >= 0.0, "evolve.dt must be positive (0 selects h/8)");
  require(c.evolve.cfl > 0.0, "evolve.cfl must be positive");
  require(c.evolve.T_end > 0.0, "evolve.T_end must be positive");
  require(c.family.t_center >= 0.0, "family.t_center must be >= 0");
  require(c.family.dt_slice >= 0.0 && c.family.ds >= 0.0 && c.family.ds_cluster >= 0.0,
          "family step parameters must be positive (0 selects the default)");
  require(c.family.half_slices == 1 || c.family.half_slices == 2, "family.half_slices must be 1 or 2");
  require(c.family.s_end > 0.0, "family.s_end must be positive");
  require(c.family.cluster_half_width == 1 || c.family.cluster_half_width == 2,
          "family.cluster_half_width must be 1 or 2");
  require(c.family.meter_points >= 0, "family.meter_points must be >= 0");
  require(c.family.ds_start >= 0.0 && c.family.step_growth >= 1.0, "family.ds_start >= 0 and step_growth >= 1");
  require(c.family.gauge_safety > 0.0 && c.family.ode_substeps > 0, "family gauge options must be positive");
  for (double s : c.family.sample_s) require(s > 0.0 && s < c.family.s_end, "family.sample_s must lie in (0, s_end)");
  require(generators.count(c.data.generator) > 0, "unknown data.generator '" + c.data.generator + "'");
  require(c.data.max_mode > 0 && c.data.amplitude >= 0.0 && c.data.projection_tol > 0.0,
          "data parameters must be positive");
  require(c.scaling.lambda > 0.0 && c.scaling.T_end > 0.0, "scaling parameters must be positive");
  require(std::abs(c.scaling.lambda - std::round(c.scaling.lambda)) < 1e-12,
          "scaling.lambda must be an integer so the rescaled grid contains the original");
  require(c.verify.tolerance > 0.0, "verify.tolerance must be positive");
  require(!c.output.dir.empty(), "output.dir must not be empty");
  for (const auto& f : c.output.formats) require(formats.count(f) > 0, "unknown output format '" + f + "'");
}

YAML::Node to_yaml(const ExperimentConfig& cfg) {
  YAML::Node root;
  for (const Field& f : fields()) {
    const auto dot = f.key.find('.');
    if (dot == std::string::npos)
      root[f.key] = f.yaml(cfg);
    else
      root[f.key.substr(0, dot)][f.key.substr(dot + 1)] = f.yaml(cfg);
  }
  return root;
}

nlohmann::json to_json(const ExperimentConfig& cfg) {
  nlohmann::json j = nlohmann::json::object();
  for (const Field& f : fields()) {
    const auto dot = f.key.find('.');
    if (dot == std::string::npos)
      j[f.key] = f.json(cfg);
    else
      j[f.key.substr(0, dot)][f.key.substr(dot + 1)] = f.json(cfg);
  }
  return j;
}

std::string emit_yaml(const ExperimentConfig& cfg) {
  YAML::Emitter out;
  out.SetDoublePrecision(17);
  out << to_yaml(cfg);
  return std::string(out.c_str()) + "\n";
}

ExperimentConfig parse_command_line(int argc, const char* const* argv) {
  CLI::App app{"ymlab"};
  app.allow_extras();
  std::string command, config_path;
  app.add_option("command", command, "flow | evolve | pipeline | verify | project-data | scaling-test")->required();
  app.add_option("--config", config_path, "YAML configuration file");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    throw ConfigError(std::string("command line: ") + e.what());
  }
  ExperimentConfig cfg = config_path.empty() ? ExperimentConfig{} : load_config(config_path);
  const std::vector<std::string> rest = app.remaining();
  for (std::size_t i = 0; i < rest.size(); ++i) {
    const std::string& flag = rest[i];
    if (flag.rfind("--", 0) != 0) throw ConfigError("unexpected argument '" + flag + "'");
    std::string key = flag.substr(2), value;
    const auto eq = key.find('=');
    if (eq != std::string::npos) {
      value = key.substr(eq + 1);
      key = key.substr(0, eq);
    } else {
      if (i + 1 >= rest.size()) throw ConfigError("missing value for '" + flag + "'");
      value = rest[++i];
    }
    YAML::Node node;
    try {
      node = YAML::Load(value);
    } catch (const YAML::Exception& e) {
      throw ConfigError("bad value for '" + key + "': " + e.what());
    }
    set_config_value(cfg, key, node);
  }
  cfg.command = command;
  validate(cfg);
  return cfg;
}

}  // namespace ymlab
