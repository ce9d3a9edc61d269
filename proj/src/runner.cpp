#include "ymlab/runner.hpp"

#include "ymlab/checkpoint.hpp"
#include "ymlab/spectral.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>

namespace ymlab {

namespace {

const double kNaN = std::numeric_limits<double>::quiet_NaN();

double l2(const LatticeField& f) { return std::sqrt(integral_inner(f, f)); }

ParabolicScheme scheme_from(const std::string& s) {
  if (s == "if_rk2") return ParabolicScheme::if_rk2;
  if (s == "if_rk4") return ParabolicScheme::if_rk4;
  return ParabolicScheme::rk4_explicit;
}

std::string fmt(double v) {
  if (std::isnan(v)) return "";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_text(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  out << text;
}

// Index of the full level nearest to s among cluster centers, -1 if s is not a center.
int sample_index(const HpymFamily& fam, double s) {
  for (std::size_t i = 0; i < fam.samples.size(); ++i)
    if (std::abs(fam.samples[i] - s) <= 1e-12 * std::max(1.0, s)) return static_cast<int>(i);
  return -1;
}

const char* const kIdentityColumns[] = {"covariant_coulomb", "d0_fs0", "parabolic_f",
                                        "parabolic_w",       "wave_fs", "bianchi"};

// D^l F_sl relative to ||F_s||_{H^1} with F_si = D^l F_li.
double coulomb_relative(const LatticeField& A) {
  const LatticeField Fs = caloric_rhs(make_state(A));
  const double ref = sobolev_norm(Fs, 1.0);
  return ref > 0.0 ? l2(covariant_divergence(A, Fs)) / ref : 0.0;
}

LatticeField subsample(const LatticeField& fine, const Grid& coarse, int stride) {
  LatticeField out(coarse, fine.n(), fine.rank());
  const Grid& g = fine.grid();
  for (int c = 0; c < fine.rank(); ++c)
    for (int a = 0; a < fine.dim(); ++a) {
      const double* src = fine.coeff(c, a);
      double* dst = out.coeff(c, a);
      for (int i = 0; i < coarse.N; ++i)
        for (int j = 0; j < coarse.N; ++j)
          for (int k = 0; k < coarse.N; ++k) dst[coarse.index(i, j, k)] = src[g.index(stride * i, stride * j, stride * k)];
    }
  return out;
}

nlohmann::json error_record(const ExperimentConfig& cfg, const std::string& type, const std::string& message) {
  return {{"status", "error"}, {"command", cfg.command}, {"error", {{"type", type}, {"message", message}}}};
}

struct Check {
  std::string name;
  double value;
  double limit;
};

}  // namespace

std::string TimeSeries::csv(int stride) const {
  std::string out = "param,t,s,energy_conserved,energy_magnetic,constraint_l2";
  for (const auto& c : extra_columns) out += "," + c;
  out += "\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (stride > 1 && i % stride != 0 && i + 1 != rows.size()) continue;
    const SeriesRow& r = rows[i];
    out += r.param + "," + fmt(r.t) + "," + fmt(r.s) + "," + fmt(r.energy_conserved) + "," + fmt(r.energy_magnetic) +
           "," + fmt(r.constraint_l2);
    for (std::size_t c = 0; c < extra_columns.size(); ++c) out += "," + fmt(c < r.extra.size() ? r.extra[c] : kNaN);
    out += "\n";
  }
  return out;
}

SeriesRow state_row(const std::string& param, const LatticeField& A, const LatticeField* E, double t, double s) {
  SeriesRow r;
  r.param = param;
  r.t = t;
  r.s = s;
  r.energy_magnetic = magnetic_energy(A);
  if (E) {
    r.energy_conserved = conserved_energy(A, *E);
    r.constraint_l2 = l2(constraint_residual(A, *E));
  } else {
    r.energy_conserved = r.energy_magnetic;
  }
  return r;
}

Grid make_grid(const ExperimentConfig& cfg) { return Grid(cfg.grid.N, cfg.grid.L); }

InitialData make_data(const ExperimentConfig& cfg) { return generate_data(make_grid(cfg), cfg.group.n, cfg.data); }

ParabolicConfig parabolic_config(const ExperimentConfig& cfg) {
  ParabolicConfig pc;
  pc.scheme = scheme_from(cfg.flow.scheme);
  pc.cfl_sigma = cfg.flow.cfl_sigma;
  pc.ds = cfg.flow.ds;
  pc.s_end = cfg.flow.s_end;
  pc.record_stride = cfg.flow.record_stride;
  pc.dealias = cfg.flow.dealias;
  pc.cutoff = cfg.flow.cutoff;
  return pc;
}

HyperbolicConfig hyperbolic_config(const ExperimentConfig& cfg) {
  HyperbolicConfig hc;
  hc.cfl = cfg.evolve.cfl;
  hc.dt = cfg.resolved_dt();
  hc.T_end = cfg.evolve.T_end;
  hc.record_stride = cfg.evolve.record_stride;
  return hc;
}

FamilyConfig family_config(const ExperimentConfig& cfg) {
  FamilyConfig fc;
  fc.flow = parabolic_config(cfg);
  fc.flow.s_end = cfg.family.s_end;
  fc.flow.ds = cfg.resolved_family_ds();
  fc.sample_s = cfg.family.sample_s;
  fc.ds_cluster = cfg.resolved_ds_cluster();
  fc.cluster_half_width = cfg.family.cluster_half_width;
  for (int j = 0; j < cfg.family.meter_points; ++j)
    fc.meter_s.push_back(cfg.family.s_end * std::pow(10.0, -3.0 + 3.0 * j / cfg.family.meter_points));
  fc.ds_start = cfg.family.ds_start;
  fc.step_growth = cfg.family.step_growth;
  fc.track_frames = cfg.family.track_frames;
  return fc;
}

PipelineResult run_pipeline(const ExperimentConfig& cfg) {
  PipelineResult r;
  r.data = make_data(cfg);
  const HyperbolicConfig hc = hyperbolic_config(cfg);
  const double tc = cfg.family.t_center;
  LatticeField A = r.data.A, E = r.data.E;
  if (tc > 0.0) {
    HyperbolicConfig to_center = hc;
    to_center.T_end = tc;
    r.evolution = evolve(A, E, to_center);
    A = r.evolution.traj.back().A;
    E = *r.evolution.traj.back().E;
  }
  const auto slices = temporal_slices(A, E, tc, tc, cfg.resolved_dt_slice(), cfg.family.half_slices, hc);
  r.family = extend_dynamic(slices, family_config(cfg));
  const bool can_transform = r.family.frames && r.family.slice_count() >= 5 && r.family.half_width >= 2 &&
                             !r.family.samples.empty();
  if (can_transform) {
    CaloricTemporalOptions opt;
    opt.safety = cfg.family.gauge_safety;
    opt.ode.substeps = cfg.family.ode_substeps;
    r.gauge = to_caloric_temporal(r.family, opt);
  }
  r.identities = covariant_identity_suite(r.family);
  for (const FamilyLevel& lv : r.family.levels)
    if (lv.full) r.tension.push_back(tension_field(r.family, lv.s));
  r.meters = quantity_meters(r.family, r.gauge ? &*r.gauge : nullptr);
  r.weights = associated_weight_report(r.family);
  return r;
}

nlohmann::json to_json(const IdentityReport& r) {
  nlohmann::json j = {{"name", r.name},   {"residual_l2", r.residual_l2}, {"reference_scale", r.reference_scale},
                      {"relative", r.relative}, {"t", r.t}, {"s", r.s}, {"skipped", r.skipped}};
  if (!r.note.empty()) j["note"] = r.note;
  return j;
}

nlohmann::json to_json(const TensionField& t) {
  return {{"t", t.t},           {"s", t.s},           {"w_l2", t.w_l2},
          {"dF_l2", t.dF_l2},   {"relative", t.relative}, {"Fs0_l2", t.Fs0_l2},
          {"w0_plus_Fs0", t.w0_plus_Fs0}, {"w0_relative", t.w0_relative}};
}

nlohmann::json to_json(const QuantityMeters& m) {
  return {{"F", m.F}, {"E", m.E}, {"A_bar", m.A_bar}, {"A0", m.A0}, {"gauge", m.gauge}, {"samples", m.samples}};
}

nlohmann::json to_json(const WeightFit& w) {
  return {{"name", w.name}, {"exponent", w.exponent}, {"prefactor", w.prefactor},
          {"r2", w.r2},     {"low_fit", w.low_fit},   {"points", w.points}};
}

nlohmann::json to_json(const CaloricTemporal& ct) {
  return {{"as_residual", ct.as_residual}, {"a0_residual", ct.a0_residual}, {"est_s", ct.est_s},
          {"est_t", ct.est_t},             {"est_ode", ct.est_ode},         {"tolerance", ct.tolerance},
          {"passed", ct.passed}};
}

namespace {

nlohmann::json pipeline_summary(const PipelineResult& p) {
  nlohmann::json j;
  j["meters"] = to_json(p.meters);
  j["identities"] = nlohmann::json::array();
  for (const auto& r : p.identities) j["identities"].push_back(to_json(r));
  j["tension"] = nlohmann::json::array();
  for (const auto& t : p.tension) j["tension"].push_back(to_json(t));
  j["weights"] = nlohmann::json::array();
  for (const auto& w : p.weights) j["weights"].push_back(to_json(w));
  if (p.gauge)
    j["gauge"] = to_json(*p.gauge);
  else
    j["gauge"] = {{"skipped", true}, {"note", "needs frames, 5 slices and cluster half-width 2"}};
  j["slices"] = p.family.t;
  j["levels"] = p.family.levels.size();
  return j;
}

TimeSeries pipeline_series(const PipelineResult& p) {
  TimeSeries ts;
  for (const char* c : kIdentityColumns) ts.extra_columns.push_back(c);
  ts.extra_columns.push_back("tension_relative");
  ts.extra_columns.push_back("w0_plus_Fs0_relative");
  const std::size_t width = ts.extra_columns.size();
  for (std::size_t i = 0; i < p.evolution.traj.size(); ++i) {
    const FlowState& st = p.evolution.traj.states[i];
    SeriesRow r = state_row("t", st.A, &*st.E, st.t, 0.0);
    r.energy_conserved = p.evolution.monitors[i].energy;
    r.constraint_l2 = p.evolution.monitors[i].constraint_l2;
    r.extra.assign(width, kNaN);
    ts.rows.push_back(std::move(r));
  }
  const HpymFamily& fam = p.family;
  std::size_t tension_i = 0;
  for (const FamilyLevel& lv : fam.levels) {
    const SliceRecord& rec = fam.record(lv, fam.center);
    LatticeField E = rec.B;
    E *= -1.0;
    SeriesRow r = state_row("s", rec.A, &E, fam.t[fam.center], lv.s);
    r.extra.assign(width, kNaN);
    const int si = sample_index(fam, lv.s);
    if (si >= 0)
      for (std::size_t c = 0; c < 6; ++c) {
        const IdentityReport& rep = p.identities[6 * si + c];
        if (!rep.skipped) r.extra[c] = rep.relative;
      }
    if (lv.full && tension_i < p.tension.size()) {
      r.extra[6] = p.tension[tension_i].relative;
      r.extra[7] = p.tension[tension_i].w0_relative;
      ++tension_i;
    }
    ts.rows.push_back(std::move(r));
  }
  return ts;
}

RunOutcome run_flow(const ExperimentConfig& cfg) {
  const InitialData d = make_data(cfg);
  const FlowGauge gauge = cfg.flow.gauge == "caloric" ? FlowGauge::caloric : FlowGauge::deturck;
  const Trajectory traj = integrate_parabolic(make_state(d.A), gauge, parabolic_config(cfg));
  RunOutcome out;
  out.series.extra_columns = {"coulomb_relative", "divergence_l2"};
  double worst_coulomb = 0.0, worst_increase = -std::numeric_limits<double>::infinity();
  double prev = std::numeric_limits<double>::infinity();
  for (const FlowState& st : traj.states) {
    SeriesRow r = state_row("s", st.A, nullptr, st.t, st.s);
    const double c = coulomb_relative(st.A);
    worst_coulomb = std::max(worst_coulomb, c);
    if (std::isfinite(prev)) worst_increase = std::max(worst_increase, r.energy_magnetic - prev);
    prev = r.energy_magnetic;
    r.extra = {c, l2(divergence(st.A))};
    out.series.rows.push_back(std::move(r));
  }
  out.summary["flow"] = {{"gauge", cfg.flow.gauge},
                         {"records", traj.size()},
                         {"steps", traj.steps.size()},
                         {"energy_initial", out.series.rows.front().energy_magnetic},
                         {"energy_final", out.series.rows.back().energy_magnetic},
                         {"max_energy_increase", std::isfinite(worst_increase) ? worst_increase : 0.0},
                         {"max_coulomb_relative", worst_coulomb}};
  if (cfg.wants("checkpoint"))
    write_checkpoint((std::filesystem::path(cfg.output.dir) / "A_final.ymhf").string(), traj.back().A, 0.0,
                     traj.back().s);
  return out;
}

RunOutcome run_evolve(const ExperimentConfig& cfg) {
  const InitialData d = make_data(cfg);
  const Evolution ev = evolve(d.A, d.E, hyperbolic_config(cfg));
  RunOutcome out;
  const double e0 = ev.monitors.front().energy, c0 = ev.monitors.front().constraint_l2;
  double drift = 0.0, cmax = c0;
  for (std::size_t i = 0; i < ev.traj.size(); ++i) {
    const FlowState& st = ev.traj.states[i];
    SeriesRow r;
    r.param = "t";
    r.t = st.t;
    r.energy_conserved = ev.monitors[i].energy;
    r.energy_magnetic = magnetic_energy(st.A);
    r.constraint_l2 = ev.monitors[i].constraint_l2;
    drift = std::max(drift, std::abs(r.energy_conserved - e0) / (e0 > 0.0 ? e0 : 1.0));
    cmax = std::max(cmax, r.constraint_l2);
    out.series.rows.push_back(std::move(r));
  }
  const double T = cfg.evolve.T_end;
  out.summary["evolve"] = {{"records", ev.traj.size()},
                           {"dt", cfg.resolved_dt()},
                           {"energy_initial", e0},
                           {"max_relative_energy_drift", drift},
                           {"constraint_initial", c0},
                           {"constraint_growth_per_unit_time", (cmax - c0) / T}};
  if (cfg.wants("checkpoint")) {
    const auto dir = std::filesystem::path(cfg.output.dir);
    write_checkpoint((dir / "A_final.ymhf").string(), ev.traj.back().A, ev.traj.back().t, 0.0);
    write_checkpoint((dir / "E_final.ymhf").string(), *ev.traj.back().E, ev.traj.back().t, 0.0);
  }
  return out;
}

RunOutcome run_pipeline_command(const ExperimentConfig& cfg, bool verify) {
  const PipelineResult p = run_pipeline(cfg);
  RunOutcome out;
  out.series = pipeline_series(p);
  out.summary["pipeline"] = pipeline_summary(p);
  if (!verify) return out;

  std::vector<Check> checks;
  checks.push_back({"data_constraint_l2", l2(constraint_residual(p.data.A, p.data.E)), 1e-9});
  for (const auto& r : p.identities)
    if (!r.skipped) {
      std::ostringstream name;
      name << "identity_" << r.name << "_s" << r.s;
      checks.push_back({name.str(), r.relative, cfg.verify.tolerance});
    }
  if (!p.tension.empty()) {
    checks.push_back({"tension_s0_relative", p.tension.front().relative, cfg.verify.tolerance});
    checks.push_back({"w0_plus_Fs0_s0_relative", p.tension.front().w0_relative, cfg.verify.tolerance});
  }
  if (p.gauge) checks.push_back({"gauge_residual_over_tolerance",
                                 std::max(p.gauge->as_residual, p.gauge->a0_residual) / p.gauge->tolerance, 1.0});
  bool ok = true;
  nlohmann::json arr = nlohmann::json::array();
  for (const Check& c : checks) {
    const bool pass = c.value <= c.limit;
    ok = ok && pass;
    arr.push_back({{"name", c.name}, {"value", c.value}, {"limit", c.limit}, {"passed", pass}});
  }
  out.summary["checks"] = arr;
  if (!ok) out.exit_code = 4;
  return out;
}

RunOutcome run_project_data(const ExperimentConfig& cfg) {
  const InitialData d = make_data(cfg);
  const auto dir = std::filesystem::path(cfg.output.dir);
  write_checkpoint((dir / "A.ymhf").string(), d.A, 0.0, 0.0);
  write_checkpoint((dir / "E.ymhf").string(), d.E, 0.0, 0.0);
  RunOutcome out;
  out.series.rows.push_back(state_row("t", d.A, &d.E, 0.0, 0.0));
  out.summary["data"] = {{"generator", cfg.data.generator},
                         {"constraint_l2", out.series.rows.back().constraint_l2},
                         {"energy_conserved", out.series.rows.back().energy_conserved},
                         {"energy_magnetic", out.series.rows.back().energy_magnetic},
                         {"A", (dir / "A.ymhf").string()},
                         {"E", (dir / "E.ymhf").string()}};
  return out;
}

// A_lambda(t, x) = A(t / lambda, x / lambda) / lambda on the torus of size lambda L, compared
// against the original run after subsampling.
RunOutcome run_scaling(const ExperimentConfig& cfg) {
  const int lam = static_cast<int>(std::lround(cfg.scaling.lambda));
  const Grid g = make_grid(cfg);
  const Grid big(lam * g.N, lam * g.L);
  const Grid fine(2 * g.N, g.L);
  const InitialData d = make_data(cfg);
  const double T = cfg.scaling.T_end, dt = cfg.resolved_dt();

  auto run_to = [&](const LatticeField& A, const LatticeField& E, double t_end, double step) {
    HyperbolicConfig hc = hyperbolic_config(cfg);
    hc.T_end = t_end;
    hc.dt = step;
    hc.record_stride = std::numeric_limits<int>::max();
    return evolve(A, E, hc);
  };
  const Evolution base = run_to(d.A, d.E, T, dt);
  LatticeField As = fourier_resample(d.A, big), Es = fourier_resample(d.E, big);
  As *= 1.0 / lam;
  Es *= 1.0 / (lam * lam);
  const Evolution scaled = run_to(As, Es, lam * T, lam * dt);
  // Single-run error: time-step halving plus spatial refinement of the original run.
  const Evolution half = run_to(d.A, d.E, T, dt / 2);
  const Evolution refined = run_to(fourier_resample(d.A, fine), fourier_resample(d.E, fine), T, dt);

  const LatticeField& A_T = base.traj.back().A;
  LatticeField back = subsample(scaled.traj.back().A, g, lam);
  back *= static_cast<double>(lam);
  const double discrepancy = l2(back - A_T);
  const double err_t = l2(half.traj.back().A - A_T);
  const double err_x = l2(subsample(refined.traj.back().A, g, 2) - A_T);
  const double single = err_t + err_x;

  const double e0 = base.monitors.front().energy, e0s = scaled.monitors.front().energy;
  const double eT = base.monitors.back().energy, eTs = scaled.monitors.back().energy;
  RunOutcome out;
  out.series.extra_columns = {"lambda"};
  for (const auto* ev : {&base, &scaled})
    for (std::size_t i = 0; i < ev->traj.size(); ++i) {
      SeriesRow r;
      r.param = "t";
      r.t = ev->traj.states[i].t;
      r.energy_conserved = ev->monitors[i].energy;
      r.energy_magnetic = magnetic_energy(ev->traj.states[i].A);
      r.constraint_l2 = ev->monitors[i].constraint_l2;
      r.extra = {ev == &base ? 1.0 : static_cast<double>(lam)};
      out.series.rows.push_back(std::move(r));
    }
  out.summary["scaling"] = {{"lambda", lam},
                            {"energy", e0},
                            {"energy_scaled", e0s},
                            {"ratio", e0s / e0},
                            {"ratio_at_T", eTs / eT},
                            {"expected_ratio", 1.0 / lam},
                            {"field_discrepancy_l2", discrepancy},
                            {"single_run_error_l2", single},
                            {"time_error_l2", err_t},
                            {"space_error_l2", err_x}};
  return out;
}

}  // namespace

RunOutcome run(const ExperimentConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  RunOutcome out;
  const std::filesystem::path dir(cfg.output.dir);
  try {
    validate(cfg);
    std::filesystem::create_directories(dir);
    write_text(dir / "resolved_config.yaml", emit_yaml(cfg));
    if (cfg.command == "flow")
      out = run_flow(cfg);
    else if (cfg.command == "evolve")
      out = run_evolve(cfg);
    else if (cfg.command == "pipeline")
      out = run_pipeline_command(cfg, false);
    else if (cfg.command == "verify")
      out = run_pipeline_command(cfg, true);
    else if (cfg.command == "project-data")
      out = run_project_data(cfg);
    else
      out = run_scaling(cfg);
    const nlohmann::json body = out.summary;
    out.summary = {{"status", out.exit_code == 0 ? "ok" : "failed"}, {"command", cfg.command},
                   {"config", to_json(cfg)}};
    out.summary.update(body);
    if (out.exit_code != 0) out.summary["error"] = {{"type", "VerificationFailed"}, {"message", "checks failed"}};
  } catch (const ConfigError& e) {
    out.exit_code = 2;
    out.summary = error_record(cfg, "ConfigError", e.what());
  } catch (const GaugeFailure& e) {
    out.exit_code = 3;
    out.summary = error_record(cfg, "GaugeFailure", e.what());
    out.summary["error"]["as_residual"] = e.as_residual;
    out.summary["error"]["a0_residual"] = e.a0_residual;
    out.summary["error"]["tolerance"] = e.tolerance;
  } catch (const DivergedError& e) {
    out.exit_code = 3;
    out.summary = error_record(cfg, "DivergedError", e.what());
    out.summary["error"]["residual"] = e.residual;
    out.summary["error"]["iterations"] = e.iterations;
  } catch (const BlowupError& e) {
    out.exit_code = 3;
    out.summary = error_record(cfg, "BlowupError", e.what());
    out.summary["error"]["last_good"] = e.last_good;
  } catch (const std::exception& e) {
    out.exit_code = 3;
    out.summary = error_record(cfg, "SolverError", e.what());
  }
  out.summary["wall_clock_s"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  try {
    std::filesystem::create_directories(dir);
    if (out.exit_code == 0 || out.exit_code == 4) {
      if (cfg.wants("csv")) write_text(dir / "timeseries.csv", out.series.csv(cfg.output.stride));
    }
    if (out.exit_code == 0) {
      if (cfg.wants("json")) write_text(dir / "summary.json", out.summary.dump(2) + "\n");
    } else {
      write_text(dir / "error.json", out.summary.dump(2) + "\n");
    }
  } catch (const std::exception& e) {
    out.exit_code = out.exit_code == 0 ? 3 : out.exit_code;
    out.summary = error_record(cfg, "OutputError", e.what());
  }
  return out;
}

int run_cli(int argc, const char* const* argv) {
  ExperimentConfig cfg;
  try {
    cfg = parse_command_line(argc, argv);
  } catch (const ConfigError& e) {
    std::cout << error_record(cfg, "ConfigError", e.what()).dump(2) << std::endl;
    return 2;
  }
  const RunOutcome out = run(cfg);
  std::cout << out.summary.dump(2) << std::endl;
  return out.exit_code;
}

}  // namespace ymlab
