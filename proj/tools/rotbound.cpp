// Command-line front end: minimize, groundstate-omega, scan, evolve, stability, verify.
#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "rotbound/checkpoint.hpp"
#include "rotbound/config.hpp"
#include "rotbound/dynamics.hpp"
#include "rotbound/errors.hpp"
#include "rotbound/modes.hpp"
#include "rotbound/report_io.hpp"
#include "rotbound/verify.hpp"

namespace fs = std::filesystem;
using namespace rotbound;

namespace {

struct Invocation {
  std::string config_path;
  std::vector<std::string> settings;
};

RunConfig resolve(const Invocation& inv) {
  RunConfig cfg = inv.config_path.empty() ? RunConfig{} : load_config(inv.config_path);
  for (const auto& s : inv.settings) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ParseError(0, "command-line setting '" + s + "' is not key=value");
    apply_setting(cfg, s.substr(0, eq), s.substr(eq + 1));
  }
  validate(cfg);
  return cfg;
}

template <typename T>
const T& require(const std::optional<T>& v, const char* key) {
  if (!v) throw ValidationError(std::string("this command needs '") + key + "'");
  return *v;
}

std::string to_text(const std::function<void(std::ostream&)>& write) {
  std::ostringstream out;
  write(out);
  return out.str();
}

std::optional<WaveField> input_field(const RunConfig& cfg, const Grid& grid) {
  if (cfg.input.empty()) return std::nullopt;
  WaveField f = load_checkpoint(cfg.input);
  if (!(f.grid() == grid)) throw ValidationError("input checkpoint grid differs from the configured grid");
  return f;
}

void add_config(ReportWriter& w, const RunConfig& cfg) {
  w.add("n", cfg.grid.n).add("extent", cfg.grid.extent);
  w.add("k", cfg.physics.k).add("lambda", cfg.physics.lambda).add("sigma", cfg.physics.sigma);
  w.add("m", cfg.m);
}

void write_report(const fs::path& dir, const ReportWriter& w) {
  write_text_file(dir, "report.json", to_text([&](std::ostream& o) { w.write(o); }));
}

int finish_minimize(const RunConfig& cfg, const MinimizeReport& rep, ReportWriter& w) {
  const fs::path dir = cfg.output_dir;
  w.add_minimize(rep);
  write_report(dir, w);
  write_text_file(dir, "history.csv", to_text([&](std::ostream& o) { write_history_csv(o, rep.history); }));
  save_checkpoint(dir / "field.nlsb", rep.field);
  std::printf("energy %.15g  omega %.10g  Omega %.10g  residual %.3e  identity %.3e  converged %s\n",
              rep.energy_value, rep.multipliers.omega, rep.multipliers.Omega, rep.residual, rep.identity_gap,
              rep.converged ? "yes" : "no");
  return rep.converged ? 0 : static_cast<int>(ExitCode::kNotConverged);
}

int cmd_minimize(const RunConfig& cfg) {
  const Grid grid = make_grid(cfg);
  const double l = require(cfg.l, "l");
  const MinimizeReport rep = minimize_doubly(cfg.physics, grid, Constraints{cfg.m, l}, cfg.solver, input_field(cfg, grid));
  ReportWriter w;
  w.add("command", "minimize");
  add_config(w, cfg);
  w.add("l", l);
  return finish_minimize(cfg, rep, w);
}

int cmd_groundstate(const RunConfig& cfg) {
  const Grid grid = make_grid(cfg);
  const double Omega = require(cfg.Omega, "Omega");
  const MinimizeReport rep = minimize_mass_only(cfg.physics, grid, cfg.m, Omega, cfg.solver, input_field(cfg, grid));
  ReportWriter w;
  w.add("command", "groundstate-omega");
  add_config(w, cfg);
  w.add("Omega_rotation", Omega);
  w.add("l_Omega", rep.angular_momentum);
  w.add("fraction_outside_n0", to_modes(rep.field, std::max(8, cfg.solver.n_max)).fraction_outside(0));
  return finish_minimize(cfg, rep, w);
}

int cmd_scan(const RunConfig& cfg) {
  if (cfg.l_grid.empty()) throw ValidationError("scan needs 'l_grid' (start:stop:step)");
  const Grid grid = make_grid(cfg);
  const EnergyCurve curve = scan_l(cfg.physics, grid, cfg.m, cfg.l_grid, cfg.solver, cfg.scan_mode);
  const fs::path dir = cfg.output_dir;
  write_text_file(dir, "curve.csv", to_text([&](std::ostream& o) { write_curve_csv(o, curve); }));
  bool all = true;
  for (const auto& r : curve.reports) all = all && r.converged;
  ReportWriter w;
  w.add("command", "scan");
  add_config(w, cfg);
  w.add("scan_mode", cfg.scan_mode == ScanMode::kWarm ? "warm" : "cold");
  w.add("points", static_cast<int>(curve.l_values.size()));
  w.add("all_converged", all);
  w.add("l", curve.l_values).add("e", curve.e_values);
  write_report(dir, w);
  for (std::size_t i = 0; i < curve.l_values.size(); ++i) {
    std::printf("l %8.4f  e %.13f  %s\n", curve.l_values[i], curve.e_values[i],
                curve.reports[i].converged ? "converged" : "NOT converged");
  }
  return all ? 0 : static_cast<int>(ExitCode::kNotConverged);
}

// The input checkpoint when given, otherwise the (m, l) minimizer.
OrbitReference reference_state(const RunConfig& cfg, const Grid& grid) {
  if (auto f = input_field(cfg, grid)) {
    const Multipliers mu = multipliers_estimate(*f, cfg.physics);
    return OrbitReference{*f, mu, Constraints{mass(*f), angular_momentum(*f)}};
  }
  const double l = require(cfg.l, "l (or an input checkpoint)");
  const MinimizeReport rep = minimize_doubly(cfg.physics, grid, Constraints{cfg.m, l}, cfg.solver);
  if (!rep.converged) throw NumericalError("the reference minimizer did not converge");
  return OrbitReference{rep.field, rep.multipliers, Constraints{cfg.m, l}};
}

void add_trace(ReportWriter& w, const EvolveTrace& t) {
  auto mx = [](const std::vector<double>& v) { return v.empty() ? 0.0 : *std::max_element(v.begin(), v.end()); };
  w.add("max_mass_drift", mx(t.mass_drift));
  w.add("max_energy_drift", mx(t.energy_drift));
  w.add("max_angmom_drift", mx(t.angmom_drift));
  if (!t.orbit_distance.empty()) w.add("max_orbit_distance", mx(t.orbit_distance));
}

int cmd_evolve(const RunConfig& cfg) {
  const Grid grid = make_grid(cfg);
  const OrbitReference ref = reference_state(cfg, grid);
  const EvolveTrace trace = evolve(ref.phi, cfg.physics, evolve_options(cfg), &ref);
  const fs::path dir = cfg.output_dir;
  write_text_file(dir, "trace.csv", to_text([&](std::ostream& o) { write_trace_csv(o, trace); }));
  save_checkpoint(dir / "final.nlsb", trace.final_field);
  ReportWriter w;
  w.add("command", "evolve");
  add_config(w, cfg);
  w.add("T", cfg.dynamics.T).add("dt", cfg.dynamics.dt);
  add_trace(w, trace);
  write_report(dir, w);
  std::printf("T %g  mass drift %.2e  energy drift %.2e  L drift %.2e\n", cfg.dynamics.T,
              *std::max_element(trace.mass_drift.begin(), trace.mass_drift.end()),
              *std::max_element(trace.energy_drift.begin(), trace.energy_drift.end()),
              *std::max_element(trace.angmom_drift.begin(), trace.angmom_drift.end()));
  return 0;
}

int cmd_stability(const RunConfig& cfg) {
  const Grid grid = make_grid(cfg);
  const OrbitReference ref = reference_state(cfg, grid);
  const StabilityReport rep =
      stability_experiment(ref, cfg.dynamics.epsilon, cfg.physics, evolve_options(cfg), cfg.rng_seed);
  const fs::path dir = cfg.output_dir;
  write_text_file(dir, "trace.csv", to_text([&](std::ostream& o) { write_trace_csv(o, rep.trace); }));
  save_checkpoint(dir / "reference.nlsb", ref.phi);
  save_checkpoint(dir / "final.nlsb", rep.trace.final_field);
  ReportWriter w;
  w.add("command", "stability");
  add_config(w, cfg);
  w.add("epsilon", cfg.dynamics.epsilon).add("T", cfg.dynamics.T).add("dt", cfg.dynamics.dt);
  w.add("initial_distance", rep.initial_distance).add("sup_distance", rep.sup_distance);
  add_trace(w, rep.trace);
  write_report(dir, w);
  std::printf("epsilon %g  initial distance %.3e  sup distance %.3e\n", cfg.dynamics.epsilon, rep.initial_distance,
              rep.sup_distance);
  return 0;
}

int cmd_verify(const RunConfig& cfg) {
  VerifyOptions o;
  o.n = cfg.grid.n;
  o.extent = cfg.grid.extent;
  o.physics = cfg.physics;
  o.m = cfg.m;
  o.solver = cfg.solver;
  o.solver.keep_history = false;
  o.T = cfg.dynamics.T;
  o.dt = cfg.dynamics.dt;
  o.record_stride = cfg.dynamics.record_stride;
  o.epsilon = cfg.dynamics.epsilon;
  o.rng_seed = cfg.rng_seed;
  o.on_result = [](const CheckResult& r) {
    std::printf("%s\n", format_check(r).c_str());
    std::fflush(stdout);
  };
  const auto results = run_acceptance(o);
  ReportWriter w;
  w.add("command", "verify");
  add_config(w, cfg);
  int failed = 0;
  for (const auto& r : results) {
    w.add("check_" + std::to_string(r.id) + "_pass", r.pass);
    w.add("check_" + std::to_string(r.id) + "_detail", r.detail);
    failed += r.pass ? 0 : 1;
  }
  w.add("failed", failed);
  write_report(cfg.output_dir, w);
  std::printf("%d of %zu checks passed\n", static_cast<int>(results.size()) - failed, results.size());
  return failed == 0 ? 0 : static_cast<int>(ExitCode::kVerificationFailed);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Doubly constrained NLS bound states: minimization, scans, dynamics and checks"};
  app.require_subcommand(1);
  Invocation inv;
  struct Command {
    const char* name;
    const char* help;
    int (*run)(const RunConfig&);
  };
  const std::vector<Command> commands = {
      {"minimize", "minimize E at fixed mass m and angular momentum l", cmd_minimize},
      {"groundstate-omega", "minimize E - Omega L at fixed mass m", cmd_groundstate},
      {"scan", "e(m, l) over l_grid = start:stop:step", cmd_scan},
      {"evolve", "evolve a minimizer (or the input checkpoint) and record drifts", cmd_evolve},
      {"stability", "perturb a minimizer by epsilon and track the orbit distance", cmd_stability},
      {"verify", "run the acceptance checks and print a pass/fail table", cmd_verify},
  };
  int (*chosen)(const RunConfig&) = nullptr;
  for (const auto& c : commands) {
    CLI::App* sub = app.add_subcommand(c.name, c.help);
    sub->add_option("-c,--config", inv.config_path, "key = value configuration file")->check(CLI::ExistingFile);
    sub->add_option("settings", inv.settings, "key=value overrides applied after the file");
    sub->callback([&chosen, run = c.run] { chosen = run; });
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : static_cast<int>(ExitCode::kConfig);
  }

  try {
    const RunConfig cfg = resolve(inv);
    return chosen(cfg);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return static_cast<int>(e.exit_code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
