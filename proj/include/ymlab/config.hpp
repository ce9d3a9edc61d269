#pragma once

#include "ymlab/data.hpp"

#include <json.hpp>
#include <yaml-cpp/yaml.h>

#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace ymlab {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Step parameters set to 0 are derived from the grid spacing h (see resolved_* below).
struct ExperimentConfig {
  std::string command = "pipeline";  // flow | evolve | pipeline | verify | project-data | scaling-test

  struct {
    int N = 16;
    double L = 2.0 * std::numbers::pi;
  } grid;
  struct {
    int n = 2;
  } group;
  struct {
    std::string scheme = "if_rk4";  // if_rk2 | if_rk4 | rk4_explicit
    std::string gauge = "deturck";  // deturck | caloric
    double cfl_sigma = 0.5;
    double ds = 0.0;  // 0: largest admissible step
    double s_end = 1.0;
    int record_stride = 1;
    bool dealias = true;
    int cutoff = 0;
  } flow;
  struct {
    double dt = 0.0;  // 0: h / 8
    double cfl = 0.5;
    double T_end = 1.0;
    int record_stride = 1;
  } evolve;
  struct {
    double t_center = 0.0;  // slices are taken around this time
    double dt_slice = 0.0;  // 0: h / 32
    int half_slices = 2;
    double s_end = 0.5;
    double ds = 0.0;  // 0: h / 20
    std::vector<double> sample_s{0.1, 0.25};
    double ds_cluster = 0.0;  // 0: h / 40
    int cluster_half_width = 2;
    int meter_points = 12;  // log-spaced central-slice records for the s-weighted norms
    double ds_start = 0.0;
    double step_growth = 1.2;
    bool track_frames = true;
    double gauge_safety = 10.0;
    int ode_substeps = 4;
  } family;
  DataSpec data;
  struct {
    double lambda = 2.0;
    double T_end = 1.0;
  } scaling;
  struct {
    double tolerance = 1e-2;  // bound on relative residuals
  } verify;
  struct {
    std::string dir = "ymlab_out";
    int stride = 1;  // CSV row stride
    std::vector<std::string> formats{"csv", "json"};  // also: checkpoint
  } output;

  double h() const { return grid.L / grid.N; }
  double resolved_dt() const { return evolve.dt > 0.0 ? evolve.dt : h() / 8.0; }
  double resolved_dt_slice() const { return family.dt_slice > 0.0 ? family.dt_slice : h() / 32.0; }
  double resolved_family_ds() const { return family.ds > 0.0 ? family.ds : h() / 20.0; }
  double resolved_ds_cluster() const { return family.ds_cluster > 0.0 ? family.ds_cluster : h() / 40.0; }
  bool wants(const std::string& format) const;
};

// Dotted keys of every field, e.g. "grid.N", in declaration order.
const std::vector<std::string>& config_keys();

// Sets one dotted key from a YAML scalar or sequence; throws ConfigError on unknown keys or bad values.
void set_config_value(ExperimentConfig& cfg, const std::string& key, const YAML::Node& value);
// Nested YAML map; missing keys keep their defaults.
void apply_yaml(ExperimentConfig& cfg, const YAML::Node& root);
ExperimentConfig load_config(const std::string& path);
// Throws ConfigError unless every numeric parameter is in range and the names are known.
void validate(const ExperimentConfig& cfg);

YAML::Node to_yaml(const ExperimentConfig& cfg);
nlohmann::json to_json(const ExperimentConfig& cfg);
std::string emit_yaml(const ExperimentConfig& cfg);

// Parses `<command> [--config path] [--dotted.key value ...]`: the file first, then overrides in order.
ExperimentConfig parse_command_line(int argc, const char* const* argv);

}  // namespace ymlab
