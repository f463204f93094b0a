#include <fstream>

#include "cli_common.hpp"
#include "decmdp/errors.hpp"
#include "decmdp/io/plot.hpp"
#include "decmdp/log.hpp"
#include "decmdp/physics/initial_conditions.hpp"

namespace decmdp::cli {

namespace {

env::Agent load_agent(const io::KeyValue& kv) {
  const std::string ck = kv.get_string("checkpoint", "");
  if (ck.empty() || ck == "weno") return env::WenoOracle{};
  return policy::load_checkpoint(ck).params;
}

int eval_2d(const Invocation& inv, const io::KeyValue& kv, const env::Agent& agent, io::RunManifest& manifest) {
  const std::string ic = inv.given("ic") ? kv.get_string("ic") : "kelvin-helmholtz";
  const std::size_t cells = static_cast<std::size_t>(inv.given("cells") ? kv.get_int("cells") : kv.get_int("eval.2d.cells"));
  const double dt = inv.given("dt") ? kv.get_double("dt") : kv.get_double("eval.2d.dt");
  const double t_final = inv.given("t_final") ? kv.get_double("t_final") : kv.get_double("eval.2d.t_final");
  const env::Config2D c = config_2d(kv, ic, cells, dt, t_final);
  const std::string run_id = inv.run_id.empty() ? ic : inv.run_id;

  io::KeyValue report;
  report.set("equation", "euler2d");
  report.set("ic", ic);
  report.set("cells", std::to_string(cells) + "x" + std::to_string(cells));
  report.set("dt", io::format_exact(dt));
  report.set("t_final", io::format_exact(t_final));
  bool all_stable = true;
  const std::pair<const char*, env::Agent> runs[] = {{"agent", agent}, {"weno", env::WenoOracle{c.coeffs}}};
  for (const auto& [name, a] : runs) {
    const std::string key = std::string(name) + ".";
    try {
      const env::Trajectory2D tr = env::solve_2d(a, c);
      const std::string csv = run_id + "_" + name + "_t" + std::to_string(tr.steps.back()) + ".csv";
      io::write_csv(snapshot_table_2d(tr.snapshots.back()), manifest.output(csv));
      io::write_png_heatmap(manifest.directory() / csv, "rho",
                            manifest.output(run_id + "_" + name + "_rho.png"));
      report.set(key + "stable", "true");
      report.set(key + "steps", std::to_string(tr.steps.back()));
      report.set(key + "min_density", io::format_exact(tr.min_density));
      report.set(key + "min_pressure", io::format_exact(tr.min_pressure));
      std::printf("%s: stable through %zu steps, min rho %.6g, min p %.6g\n", name, tr.steps.back(), tr.min_density,
                  tr.min_pressure);
    } catch (const BlowUpError& e) {
      all_stable = false;
      report.set(key + "stable", "false");
      report.set(key + "failure", e.what());
      std::printf("%s: %s\n", name, e.what());
    }
  }
  std::ofstream(manifest.output("report.txt"), std::ios::binary) << report.to_string();
  return all_stable ? kOk : kBlowUp;
}

}  // namespace

int cmd_eval(const Invocation& inv) {
  const io::KeyValue kv = resolve(inv);
  const physics::EquationSpec spec = equation_spec(kv);
  if (!kv.contains("checkpoint")) throw ConfigError("eval needs --checkpoint (a file, or 'weno' for the classical scheme)");
  const env::Agent agent = load_agent(kv);

  io::RunManifest manifest("eval", kv, static_cast<std::uint64_t>(kv.get_int("seed")), output_dir(inv));
  manifest.begin();
  write_resolved_config(manifest);
  try {
    if (spec.kind == physics::EquationKind::euler2d) {
      const int rc = eval_2d(inv, kv, agent, manifest);
      manifest.finish(rc == kOk ? "ok" : "blow-up");
      return rc;
    }
    std::vector<std::string> ics = split_list(kv.get_string("eval.ics"));
    if (spec.kind == physics::EquationKind::burgers1d && !inv.given("eval.ics")) ics = {"burgers-rarefaction"};
    const std::vector<std::size_t> ns = split_sizes(kv.get_string("eval.ns"));
    if (ics.empty() || ns.empty()) throw ConfigError("eval needs at least one IC and one grid size");

    training::EvalOptions opt;
    opt.t_final = kv.get_double("t_final");
    opt.dt = inv.given("dt") ? kv.get_double("dt") : 0.0;
    opt.boundary = physics::boundary_from_name(kv.get_string("boundary"));
    opt.coeffs.eps = kv.get_double("weno.eps");
    opt.problem = kv;

    const auto names = physics::field_names(spec);
    io::CsvTable table;
    table.header.push_back("N");
    for (const auto& ic : ics) {
      table.header.push_back(ic + "_agent");
      table.header.push_back(ic + "_weno");
    }
    table.rows.assign(ns.size(), std::vector<double>(table.header.size(), 0.0));
    std::ofstream details(manifest.output("details.csv"), std::ios::binary);
    details << "ic,N,t_final,l2_agent_weno,l2_weno_exact,l2_agent_exact,agent_weno_ratio,max_action_deviation\n";
    io::KeyValue report;
    report.set("equation", std::string(physics::equation_name(spec.kind)));
    report.set("checkpoint", kv.get_string("checkpoint"));
    int rc = kOk;
    for (std::size_t c = 0; c < ics.size(); ++c) {
      for (std::size_t r = 0; r < ns.size(); ++r) {
        const std::string& ic = ics[c];
        const std::string tag = ic + "_n" + std::to_string(ns[r]);
        table.rows[r][0] = static_cast<double>(ns[r]);
        training::EvalReport rep;
        try {
          rep = training::evaluate(agent, ic, ns[r], spec, opt);
        } catch (const BlowUpError& e) {
          log::warn(tag + ": " + e.what());
          table.rows[r][1 + 2 * c] = table.rows[r][2 + 2 * c] = std::nan("");
          report.set(tag + ".failure", e.what());
          rc = kBlowUp;
          continue;
        }
        table.rows[r][1 + 2 * c] = rep.l2_agent_exact;
        table.rows[r][2 + 2 * c] = rep.l2_weno_exact;
        const double ratio = rep.l2_agent_weno / rep.l2_weno_exact;
        details << ic << ',' << ns[r] << ',' << io::format_exact(rep.t_final) << ','
                << io::format_exact(rep.l2_agent_weno) << ',' << io::format_exact(rep.l2_weno_exact) << ','
                << io::format_exact(rep.l2_agent_exact) << ',' << io::format_exact(ratio) << ','
                << io::format_exact(rep.max_action_deviation) << '\n';
        const io::KeyValue rep_kv = rep.to_keyvalue();
        for (const auto& [k, v] : rep_kv.entries()) report.set(tag + "." + k, v);

        io::CsvTable prof;
        prof.header = {"x", "agent", "weno", "exact"};
        const std::size_t f = rep.metric.field;
        for (std::size_t j = 0; j < rep.agent.cells; ++j) {
          prof.rows.push_back({rep.agent.x_center(j), rep.agent(f, j), rep.weno(f, j), rep.exact(f, j)});
        }
        const auto prof_path = manifest.output(tag + "_profile.csv");
        io::write_csv(prof, prof_path);
        io::LinePlot plot;
        plot.title = ic + ", N = " + std::to_string(ns[r]) + ", t = " + io::format_exact(rep.t_final);
        plot.x_label = "x";
        plot.y_label = names.at(f);
        for (const char* col : {"exact", "weno", "agent"}) plot.series.push_back({prof_path, "x", col, col});
        io::write_svg_plot(plot, manifest.output(tag + "_profile.svg"));
        std::printf("%-20s N=%-4zu agent-WENO %.4e  WENO-exact %.4f  agent-exact %.4f  ratio %.4f\n", ic.c_str(),
                    ns[r], rep.l2_agent_weno, rep.l2_weno_exact, rep.l2_agent_exact, ratio);
      }
    }
    io::write_csv(table, manifest.output("table.csv"));
    std::ofstream(manifest.output("report.txt"), std::ios::binary) << report.to_string();
    manifest.finish(rc == kOk ? "ok" : "blow-up");
    return rc;
  } catch (const std::exception& e) {
    manifest.finish(std::string("failed: ") + e.what());
    throw;
  }
}

}  // namespace decmdp::cli
