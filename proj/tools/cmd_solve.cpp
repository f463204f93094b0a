#include <cmath>
#include <fstream>

#include "cli_common.hpp"
#include "decmdp/env/solve2d.hpp"
#include "decmdp/errors.hpp"
#include "decmdp/io/csv.hpp"
#include "decmdp/io/plot.hpp"
#include "decmdp/log.hpp"
#include "decmdp/physics/initial_conditions.hpp"

namespace decmdp::cli {

namespace {

bool has_exact(const std::string& ic, const physics::EquationSpec& spec) {
  return spec.kind == physics::EquationKind::burgers1d ? physics::is_burgers_ic(ic) : physics::is_euler_ic(ic);
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << text;
}

int solve_2d_command(const Invocation& inv, const io::KeyValue& kv, io::RunManifest& manifest) {
  const std::size_t steps = static_cast<std::size_t>(kv.get_int("steps"));
  const double dt = kv.get_double("dt");
  double t_final = kv.get_double("t_final");
  if (t_final <= 0.0) {
    if (steps == 0) throw ConfigError("solve needs steps >= 1 or t_final > 0");
    t_final = static_cast<double>(steps) * dt;
  }
  env::Config2D c = config_2d(kv, kv.get_string("ic"), static_cast<std::size_t>(kv.get_int("cells")), dt, t_final);
  c.snapshot_every = static_cast<std::size_t>(kv.get_int("snapshot_every"));
  const std::string run_id = inv.run_id.empty() ? c.ic + "_2d" : inv.run_id;
  const env::Trajectory2D tr = env::solve_2d(env::WenoOracle{c.coeffs}, c);
  for (std::size_t s = 0; s < tr.snapshots.size(); ++s) {
    const auto csv = manifest.output(io::snapshot_name(run_id, tr.steps[s]));
    io::write_csv(snapshot_table_2d(tr.snapshots[s]), csv);
  }
  const std::string last = io::snapshot_name(run_id, tr.steps.back());
  const std::string png = run_id + "_t" + std::to_string(tr.steps.back()) + "_rho.png";
  io::write_png_heatmap(manifest.directory() / last, "rho", manifest.output(png));

  io::KeyValue summary;
  summary.set("equation", "euler2d");
  summary.set("ic", c.ic);
  summary.set("cells", std::to_string(c.nx) + "x" + std::to_string(c.ny));
  summary.set("steps", std::to_string(tr.steps.back()));
  summary.set("t_final", io::format_exact(tr.times.back()));
  summary.set("min_density", io::format_exact(tr.min_density));
  summary.set("min_pressure", io::format_exact(tr.min_pressure));
  write_text(manifest.output(run_id + "_summary.txt"), summary.to_string());
  return kOk;
}

}  // namespace

int cmd_solve(const Invocation& inv) {
  const io::KeyValue kv = resolve(inv);
  const physics::EquationSpec spec = equation_spec(kv);
  const std::size_t steps = static_cast<std::size_t>(kv.get_int("steps"));
  const double t_final = kv.get_double("t_final");
  if (t_final <= 0.0 && steps == 0) throw ConfigError("solve needs steps >= 1 or t_final > 0");
  const double dt = kv.get_double("dt");
  if (!(dt > 0.0)) throw ConfigError("dt must be positive");

  io::RunManifest manifest("solve", kv, static_cast<std::uint64_t>(kv.get_int("seed")), output_dir(inv));
  manifest.begin();
  write_resolved_config(manifest);
  try {
    if (spec.kind == physics::EquationKind::euler2d) {
      const int rc = solve_2d_command(inv, kv, manifest);
      manifest.finish("ok");
      return rc;
    }
    const std::string ic = kv.get_string("ic");
    const std::string run_id = inv.run_id.empty() ? ic : inv.run_id;
    const auto grid = physics::make_grid(static_cast<std::size_t>(kv.get_int("cells")), kv);
    const physics::State1D u0 = physics::initial_condition(ic, grid, spec, kv);
    weno::SolverOptions opt;
    opt.boundary = physics::boundary_from_name(kv.get_string("boundary"));
    opt.integrator = weno::integrator_from_name(kv.get_string("integrator"));
    opt.coeffs.eps = kv.get_double("weno.eps");
    const std::size_t every = static_cast<std::size_t>(kv.get_int("snapshot_every"));
    const weno::Trajectory tr = t_final > 0.0 ? weno::weno_solve(u0, spec, t_final, dt, opt, every)
                                              : weno::weno_solve_steps(u0, spec, steps, dt, opt, every);
    for (std::size_t s = 0; s < tr.snapshots.size(); ++s) {
      io::write_csv(io::snapshot_table(tr.snapshots[s], spec), manifest.output(io::snapshot_name(run_id, tr.steps[s])));
    }
    const std::size_t last_step = tr.steps.back();
    const double t_end = tr.times.back();

    io::KeyValue summary;
    summary.set("equation", std::string(physics::equation_name(spec.kind)));
    summary.set("ic", ic);
    summary.set("cells", std::to_string(grid.cells));
    summary.set("dt", io::format_exact(dt));
    summary.set("steps", std::to_string(last_step));
    summary.set("t_final", io::format_exact(t_end));
    summary.set("integrator", std::string(weno::integrator_name(opt.integrator)));

    const auto names = physics::field_names(spec);
    const training::L2Metric metric = training::L2Metric::from_config(kv);
    io::LinePlot plot;
    plot.title = ic + ", N = " + std::to_string(grid.cells) + ", t = " + io::format_exact(t_end);
    plot.x_label = "x";
    plot.y_label = names.at(metric.field);
    const std::string final_csv = io::snapshot_name(run_id, last_step);
    plot.series.push_back({manifest.directory() / final_csv, "x", names[metric.field], "WENO"});
    if (has_exact(ic, spec) && opt.boundary == physics::Boundary::outflow) {
      const physics::State1D exact = physics::exact_solution(ic, grid, spec, t_end, kv);
      const std::string exact_csv = run_id + "_exact_t" + std::to_string(last_step) + ".csv";
      io::write_csv(io::snapshot_table(exact, spec), manifest.output(exact_csv));
      plot.series.push_back({manifest.directory() / exact_csv, "x", names[metric.field], "exact"});
      summary.set("l2.metric", metric.describe());
      summary.set("l2.weno_exact", io::format_exact(metric(tr.final_state(), exact)));
    }
    io::write_svg_plot(plot, manifest.output(run_id + "_t" + std::to_string(last_step) + ".svg"));
    write_text(manifest.output(run_id + "_summary.txt"), summary.to_string());
    if (summary.contains("l2.weno_exact")) log::info("L2 vs exact: " + summary.get_string("l2.weno_exact"));
    manifest.finish("ok");
  } catch (const std::exception& e) {
    manifest.finish(std::string("failed: ") + e.what());
    throw;
  }
  return kOk;
}

}  // namespace decmdp::cli
