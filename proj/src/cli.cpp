#include "lcflow/cli.hpp"

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "lcflow/integrator.hpp"
#include "lcflow/io.hpp"
#include "lcflow/sweep.hpp"

namespace lcflow {

namespace {

int cmd_simulate(const std::string& config, const std::string& checkpoint_out, const std::string& diag_out,
                 std::ostream& out) {
  const SimConfig cfg = load_config(config);
  const ChannelGrid g = make_grid(cfg.grid);
  try {
    const RunResult res = run(cfg);
    if (!diag_out.empty()) write_diag_csv(res.trace, diag_out);
    if (!checkpoint_out.empty()) write_checkpoint(res.final, config_hash(cfg), g, checkpoint_out);
    const DiagnosticsRecord& last = res.trace.back();
    out << "t = " << format_double(last.t) << "  steps = " << res.final.step
        << "  kinetic = " << format_double(last.kinetic) << "  elastic = " << format_double(last.elastic)
        << "  unit_dev = " << format_double(last.unit_dev) << "  div_res = " << format_double(last.div_res) << '\n';
  } catch (const RunError& e) {
    if (!diag_out.empty() && !e.partial().empty()) write_diag_csv(e.partial(), diag_out);
    throw;
  }
  return kExitOk;
}

int cmd_sweep(const std::string& config, const std::string& out_dir, std::optional<int> jobs, bool force,
              bool no_timing, std::ostream& out, std::ostream& err) {
  const SimConfig cfg = load_config(config);
  SweepOptions opts;
  opts.jobs = jobs.value_or(cfg.sweep.jobs);
  opts.force = force || cfg.sweep.force;
  if (opts.jobs < 1) throw std::invalid_argument("--jobs must be >= 1");
  validate_ladder(cfg.sweep.ladder, make_grid(cfg.grid), opts.force);

  std::filesystem::create_directories(out_dir);
  const std::filesystem::path dir(out_dir);
  auto emit = [&](SweepResult r) {
    if (no_timing) {
      r.reference_wall_time_s = 0.0;
      for (MemberResult& m : r.members) m.wall_time_s = 0.0;
    }
    if (!r.members.empty()) write_sweep_csv(r, dir / "sweep.csv");
    const std::string report = sweep_report(r);
    write_text(report, dir / "report.txt");
    out << report;
  };
  try {
    emit(run_sweep(cfg, cfg.sweep.ladder, opts));
  } catch (const SweepError& e) {
    err << "error: " << e.what() << '\n';
    emit(e.partial());
    return kExitRuntime;
  }
  return kExitOk;
}

int cmd_diagnose(const std::string& checkpoint, const std::string& config, const std::string& out_csv,
                 std::ostream& out, std::ostream& err) {
  const SimConfig cfg = load_config(config);
  const ChannelGrid g = make_grid(cfg.grid);
  const Checkpoint cp = read_checkpoint(checkpoint, g);
  if (cp.config_hash != config_hash(cfg))
    err << "warning: checkpoint was written with a different configuration (hash mismatch)\n";
  const PoissonSolver solver(g, cfg.poisson, cfg.max_iterations);
  const DiagnosticsRecord r = make_record(cp.state, nullptr, 0.0, cfg, g, solver);
  write_diag_csv({r}, out_csv);
  out << "t = " << format_double(r.t) << "  kinetic = " << format_double(r.kinetic)
      << "  elastic = " << format_double(r.elastic) << '\n';
  return kExitOk;
}

int cmd_rate_fit(const std::string& csv, std::ostream& out) {
  const SweepResult r = result_from_rows(read_sweep_csv(csv));
  out << "fitted_slope_l2 = " << format_double(r.fit_l2.slope) << "  r_squared = " << format_double(r.fit_l2.r_squared)
      << "  status = " << r.status_l2 << '\n';
  out << "fitted_slope_linf = " << format_double(r.fit_linf.slope)
      << "  r_squared = " << format_double(r.fit_linf.r_squared) << "  status = " << r.status_linf << '\n';
  for (const std::string& f : r.flags) out << "flag: " << f << '\n';
  return kExitOk;
}

}  // namespace

int cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Nematic liquid crystal channel flow: simulation, vanishing-viscosity sweeps, diagnostics"};
  app.require_subcommand(1, 1);

  std::string config, checkpoint_out, diag_out, out_dir, checkpoint, out_csv, csv;
  int jobs = 1;
  bool force = false, no_timing = false;

  auto* sim = app.add_subcommand("simulate", "Run one simulation");
  sim->add_option("--config", config, "Config file")->required();
  sim->add_option("--checkpoint-out", checkpoint_out, "Write the final state here");
  sim->add_option("--diag-out", diag_out, "Write the diagnostics CSV here");

  auto* sw = app.add_subcommand("sweep", "Vanishing-viscosity sweep over the eps ladder");
  sw->add_option("--config", config, "Config file")->required();
  sw->add_option("--out", out_dir, "Output directory (sweep.csv, report.txt)")->required();
  auto* jobs_opt = sw->add_option("--jobs", jobs, "Concurrent members");
  sw->add_flag("--force", force, "Run below the resolution guard");
  sw->add_flag("--no-timing", no_timing, "Write wall times as 0 (reproducible output)");

  auto* dg = app.add_subcommand("diagnose", "Recompute diagnostics from a checkpoint");
  dg->add_option("--checkpoint", checkpoint, "Checkpoint file")->required();
  dg->add_option("--config", config, "Config file")->required();
  dg->add_option("--out", out_csv, "Diagnostics CSV")->required();

  auto* rf = app.add_subcommand("rate-fit", "Fit rates from an existing sweep CSV");
  rf->add_option("--csv", csv, "Sweep CSV")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  }

  try {
    if (*sim) return cmd_simulate(config, checkpoint_out, diag_out, out);
    if (*sw)
      return cmd_sweep(config, out_dir, jobs_opt->count() ? std::optional<int>(jobs) : std::nullopt, force,
                       no_timing, out, err);
    if (*dg) return cmd_diagnose(checkpoint, config, out_csv, out, err);
    if (*rf) return cmd_rate_fit(csv, out);
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitValidation;
}

int cli(int argc, const char* const* argv) { return cli(argc, argv, std::cout, std::cerr); }

}  // namespace lcflow
