#include "ymlab/checkpoint.hpp"
#include "ymlab/config.hpp"
#include "ymlab/runner.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace ymlab;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("ymlab_test_pipeline_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

double rel_diff(const LatticeField& a, const LatticeField& b) {
  const double nb = std::sqrt(integral_inner(b, b));
  return std::sqrt(integral_inner(a - b, a - b)) / (nb > 0.0 ? nb : 1.0);
}

ExperimentConfig parse(std::vector<std::string> args) {
  args.insert(args.begin(), "ymlab");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  return parse_command_line(static_cast<int>(argv.size()), argv.data());
}

ExperimentConfig small_evolve(const fs::path& dir) {
  ExperimentConfig c;
  c.command = "evolve";
  c.grid.N = 8;
  c.data.max_mode = 2;
  c.evolve.T_end = 0.5;
  c.output.dir = dir.string();
  return c;
}

}  // namespace

TEST_CASE("config: defaults, yaml file and command-line overrides compose in order") {
  const fs::path dir = scratch("cfg");
  fs::create_directories(dir);
  const fs::path file = dir / "c.yaml";
  std::ofstream(file) << "grid:\n  N: 24\nflow:\n  scheme: if_rk2\nfamily:\n  sample_s: [0.05, 0.2]\n";
  const ExperimentConfig c = parse({"flow", "--config", file.string(), "--grid.N", "32", "--data.seed=7"});
  CHECK(c.command == "flow");
  CHECK(c.grid.N == 32);
  CHECK(c.flow.scheme == "if_rk2");
  CHECK(c.data.seed == 7);
  CHECK(c.family.sample_s == std::vector<double>{0.05, 0.2});
  CHECK(c.group.n == 2);
}

TEST_CASE("config: resolved yaml round-trips every key") {
  ExperimentConfig c;
  c.grid.N = 12;
  c.flow.ds = 1.0 / 3.0;
  c.family.sample_s = {0.125};
  c.output.formats = {"csv"};
  ExperimentConfig back;
  apply_yaml(back, YAML::Load(emit_yaml(c)));
  CHECK(emit_yaml(back) == emit_yaml(c));
  CHECK(back.flow.ds == c.flow.ds);
}

TEST_CASE("config: unknown keys, bad values and out-of-range parameters are rejected") {
  CHECK_THROWS_AS(parse({"flow", "--grid.M", "3"}), ConfigError);
  CHECK_THROWS_AS(parse({"flow", "--grid.N", "abc"}), ConfigError);
  CHECK_THROWS_AS(parse({"flow", "--grid.N", "15"}), ConfigError);
  CHECK_THROWS_AS(parse({"flow", "--flow.cfl_sigma", "2"}), ConfigError);
  CHECK_THROWS_AS(parse({"flow", "--grid.N"}), ConfigError);
  CHECK_THROWS_AS(parse({"launch"}), ConfigError);
  CHECK_THROWS_AS(parse({"pipeline", "--family.sample_s", "[0.9]"}), ConfigError);
  CHECK_THROWS_AS(parse({"scaling-test", "--scaling.lambda", "1.5"}), ConfigError);
  CHECK_THROWS_AS(parse({"flow", "--output.formats", "[csv, hdf5]"}), ConfigError);
}

TEST_CASE("run: configuration errors exit 2 and write error.json") {
  ExperimentConfig c = small_evolve(scratch("err"));
  c.grid.N = 5;
  const RunOutcome out = run(c);
  CHECK(out.exit_code == 2);
  CHECK(out.summary["error"]["type"] == "ConfigError");
  CHECK(fs::exists(fs::path(c.output.dir) / "error.json"));
}

TEST_CASE("run: evolve writes the artifacts and the CSV header") {
  const fs::path dir = scratch("evolve");
  const RunOutcome out = run(small_evolve(dir));
  REQUIRE(out.exit_code == 0);
  CHECK(fs::exists(dir / "resolved_config.yaml"));
  CHECK(fs::exists(dir / "summary.json"));
  const std::string csv = slurp(dir / "timeseries.csv");
  CHECK(csv.rfind("param,t,s,energy_conserved,energy_magnetic,constraint_l2\n", 0) == 0);
  CHECK(out.summary["evolve"]["max_relative_energy_drift"].get<double>() < 1e-6);
  // The resolved config reproduces the run.
  ExperimentConfig again = load_config((dir / "resolved_config.yaml").string());
  again.output.dir = scratch("evolve_again").string();
  REQUIRE(run(again).exit_code == 0);
  CHECK(slurp(fs::path(again.output.dir) / "timeseries.csv") == csv);
}

TEST_CASE("run: identical configurations give bitwise identical CSV") {
  ExperimentConfig a = small_evolve(scratch("det_a"));
  ExperimentConfig b = small_evolve(scratch("det_b"));
  a.data.seed = b.data.seed = 1234;
  REQUIRE(run(a).exit_code == 0);
  REQUIRE(run(b).exit_code == 0);
  const std::string ca = slurp(fs::path(a.output.dir) / "timeseries.csv");
  CHECK(!ca.empty());
  CHECK(ca == slurp(fs::path(b.output.dir) / "timeseries.csv"));
  ExperimentConfig c = small_evolve(scratch("det_c"));
  c.data.seed = 1235;
  REQUIRE(run(c).exit_code == 0);
  CHECK(ca != slurp(fs::path(c.output.dir) / "timeseries.csv"));
}

TEST_CASE("run: csv row stride keeps the first and last rows") {
  ExperimentConfig c = small_evolve(scratch("stride"));
  c.output.stride = 3;
  const RunOutcome out = run(c);
  REQUIRE(out.exit_code == 0);
  const std::string csv = out.series.csv(3);
  const auto lines = std::count(csv.begin(), csv.end(), '\n');
  const std::size_t rows = out.series.rows.size();
  long expected = 1;
  for (std::size_t i = 0; i < rows; ++i) expected += (i % 3 == 0 || i + 1 == rows) ? 1 : 0;
  CHECK(lines == expected);
  CHECK(out.series.csv(1).find(csv.substr(csv.rfind('\n', csv.size() - 2) + 1)) != std::string::npos);
}

TEST_CASE("run: project-data checkpoints round-trip bitwise and reload as data") {
  const fs::path dir = scratch("project");
  ExperimentConfig c;
  c.command = "project-data";
  c.grid.N = 8;
  c.data.max_mode = 2;
  c.output.dir = dir.string();
  REQUIRE(run(c).exit_code == 0);
  const InitialData d = make_data(c);
  const Checkpoint A = read_checkpoint((dir / "A.ymhf").string());
  const Checkpoint E = read_checkpoint((dir / "E.ymhf").string());
  CHECK(rel_diff(A.field, d.A) <= 1e-15);
  CHECK(rel_diff(E.field, d.E) <= 1e-15);
  write_checkpoint((dir / "A2.ymhf").string(), A.field, A.t, A.s);
  CHECK(slurp(dir / "A2.ymhf") == slurp(dir / "A.ymhf"));

  ExperimentConfig from = small_evolve(scratch("project_evolve"));
  from.data.generator = "checkpoint";
  from.data.path_A = (dir / "A.ymhf").string();
  from.data.path_E = (dir / "E.ymhf").string();
  ExperimentConfig direct = small_evolve(scratch("project_direct"));
  const RunOutcome rf = run(from), rd = run(direct);
  REQUIRE(rf.exit_code == 0);
  REQUIRE(rd.exit_code == 0);
  REQUIRE(rf.series.rows.size() == rd.series.rows.size());
  for (std::size_t i = 0; i < rf.series.rows.size(); ++i)
    CHECK(rf.series.rows[i].energy_conserved == doctest::Approx(rd.series.rows[i].energy_conserved).epsilon(1e-13));
}

TEST_CASE("run: verify passes on zero data") {
  ExperimentConfig c;
  c.command = "verify";
  c.grid.N = 8;
  c.data.generator = "zero";
  c.family.s_end = 0.1;
  c.family.sample_s = {0.05};
  c.family.meter_points = 4;
  c.output.dir = scratch("verify").string();
  const RunOutcome out = run(c);
  CHECK(out.exit_code == 0);
  CHECK(!out.summary["checks"].empty());
  for (const auto& chk : out.summary["checks"]) CHECK(chk["passed"].get<bool>());
}

TEST_CASE("run: verify reports failure with exit 4 when the tolerance is unreachable") {
  ExperimentConfig c;
  c.command = "verify";
  c.grid.N = 8;
  c.data.max_mode = 2;
  c.family.s_end = 0.1;
  c.family.sample_s = {0.05};
  c.family.meter_points = 4;
  c.verify.tolerance = 1e-300;
  c.output.dir = scratch("verify_fail").string();
  const RunOutcome out = run(c);
  CHECK(out.exit_code == 4);
  CHECK(out.summary["error"]["type"] == "VerificationFailed");
  CHECK(fs::exists(fs::path(c.output.dir) / "error.json"));
  CHECK(fs::exists(fs::path(c.output.dir) / "timeseries.csv"));
}

TEST_CASE("run: pipeline csv carries identity and tension columns") {
  ExperimentConfig c;
  c.command = "pipeline";
  c.grid.N = 8;
  c.data.max_mode = 2;
  c.family.s_end = 0.1;
  c.family.sample_s = {0.05};
  c.family.meter_points = 4;
  c.output.dir = scratch("pipe").string();
  const RunOutcome out = run(c);
  REQUIRE(out.exit_code == 0);
  const std::string csv = slurp(fs::path(c.output.dir) / "timeseries.csv");
  const std::string header = csv.substr(0, csv.find('\n'));
  CHECK(header ==
        "param,t,s,energy_conserved,energy_magnetic,constraint_l2,covariant_coulomb,d0_fs0,parabolic_f,"
        "parabolic_w,wave_fs,bianchi,tension_relative,w0_plus_Fs0_relative");
  CHECK(out.summary["pipeline"]["identities"].size() == 6);
  CHECK(out.summary["pipeline"]["gauge"].contains("as_residual"));
}

TEST_CASE("run: scaling-test reproduces the inverse-lambda energy ratio") {
  ExperimentConfig c;
  c.command = "scaling-test";
  c.grid.N = 8;
  c.data.max_mode = 1;
  c.scaling.T_end = 0.25;
  c.output.dir = scratch("scaling").string();
  const RunOutcome out = run(c);
  REQUIRE(out.exit_code == 0);
  const auto& s = out.summary["scaling"];
  // N = 8 aliases the quartic energy term slightly; the rescaled grid resolves it.
  CHECK(std::abs(s["ratio"].get<double>() - 0.5) < 1e-6);
  CHECK(std::abs(s["ratio_at_T"].get<double>() - 0.5) < 1e-6);
  CHECK(s["field_discrepancy_l2"].get<double>() <= 2.0 * s["single_run_error_l2"].get<double>());
}
