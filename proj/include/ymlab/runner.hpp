#pragma once

#include "ymlab/config.hpp"
#include "ymlab/diagnostics.hpp"

#include <json.hpp>

#include <optional>
#include <string>
#include <vector>

namespace ymlab {

// One CSV row. Columns after the fixed six are command-specific; NaN prints as an empty cell.
struct SeriesRow {
  std::string param;  // "t" or "s"
  double t = 0.0, s = 0.0;
  double energy_conserved = 0.0, energy_magnetic = 0.0, constraint_l2 = 0.0;
  std::vector<double> extra;
};

struct TimeSeries {
  std::vector<std::string> extra_columns;
  std::vector<SeriesRow> rows;
  // %.17g, '.' decimal, header `param,t,s,energy_conserved,energy_magnetic,constraint_l2,...`.
  std::string csv(int stride = 1) const;
};

// Row for a connection with optional E (absent E counts as zero).
SeriesRow state_row(const std::string& param, const LatticeField& A, const LatticeField* E, double t, double s);

InitialData make_data(const ExperimentConfig& cfg);
Grid make_grid(const ExperimentConfig& cfg);
ParabolicConfig parabolic_config(const ExperimentConfig& cfg);
HyperbolicConfig hyperbolic_config(const ExperimentConfig& cfg);
FamilyConfig family_config(const ExperimentConfig& cfg);

// temporal evolve -> DeTurck flow of every slice with the dynamic extension -> caloric-temporal
// transform -> identity suite -> tension -> meters.
struct PipelineResult {
  InitialData data;
  Evolution evolution;  // up to family.t_center (empty when t_center = 0)
  HpymFamily family;
  std::optional<CaloricTemporal> gauge;
  std::vector<IdentityReport> identities;
  std::vector<TensionField> tension;  // at every full level
  QuantityMeters meters;
  std::vector<WeightFit> weights;
};
PipelineResult run_pipeline(const ExperimentConfig& cfg);

nlohmann::json to_json(const IdentityReport& r);
nlohmann::json to_json(const TensionField& t);
nlohmann::json to_json(const QuantityMeters& m);
nlohmann::json to_json(const WeightFit& w);
nlohmann::json to_json(const CaloricTemporal& ct);

struct RunOutcome {
  int exit_code = 0;  // 0 ok, 2 configuration, 3 solver failure, 4 verification failed
  nlohmann::json summary;  // summary on success, error record otherwise
  TimeSeries series;
};

// Runs a validated configuration and writes the artifacts into cfg.output.dir:
// resolved_config.yaml, timeseries.csv, summary.json (or error.json) and optional checkpoints.
RunOutcome run(const ExperimentConfig& cfg);
// Command-line entry: parses, runs, prints the summary or error JSON to stdout.
int run_cli(int argc, const char* const* argv);

}  // namespace ymlab
