#include <fstream>

#include "cli_common.hpp"
#include "decmdp/errors.hpp"
#include "decmdp/io/plot.hpp"
#include "decmdp/log.hpp"

namespace decmdp::cli {

namespace {

struct RunOutcome {
  std::string tag;
  std::string reward;
  std::uint64_t seed = 0;
  std::vector<double> curve;
  std::size_t diverged = 0;
};

}  // namespace

int cmd_train(const Invocation& inv_in) {
  Invocation inv = inv_in;
  if (inv.preset.empty()) inv.preset = "desk";
  const io::KeyValue kv = resolve(inv);
  const auto rewards = split_list(kv.get_string("reward"));
  std::vector<std::uint64_t> seeds;
  for (auto s : split_sizes(kv.get_string("seeds", kv.get_string("seed")))) seeds.push_back(s);
  if (rewards.empty() || seeds.empty()) throw ConfigError("train needs at least one reward and one seed");
  for (const auto& r : rewards) env::reward_from_name(r);

  io::RunManifest manifest("train", kv, seeds.front(), output_dir(inv));
  manifest.begin();
  write_resolved_config(manifest);
  std::vector<RunOutcome> outcomes;
  int rc = kOk;
  std::string status = "ok";
  try {
    for (const auto& reward : rewards) {
      for (std::uint64_t seed : seeds) {
        io::KeyValue run_kv = kv;
        run_kv.set("reward", reward);
        run_kv.set("seed", std::to_string(seed));
        const training::TrainConfig tc = train_config(run_kv);
        tc.validate();
        RunOutcome out{(inv.run_id.empty() ? "" : inv.run_id + "_") + reward + "_s" + std::to_string(seed), reward,
                       seed, {}, 0};
        std::vector<training::LogRow> rows;
        training::TrainHooks hooks;
        hooks.on_episode = [&](const training::LogRow& r) {
          rows.push_back(r);
          if (r.episode % 50 == 0 || r.episode == 1) {
            log::info(out.tag + " episode " + std::to_string(r.episode) + " return " + io::format_exact(r.episode_return));
          }
        };
        hooks.on_checkpoint = [&](std::size_t e, const policy::Checkpoint& ck) {
          const std::string name = e == tc.episodes ? out.tag + "_checkpoint.txt"
                                                    : out.tag + "_checkpoint_ep" + std::to_string(e) + ".txt";
          policy::save_checkpoint(ck, manifest.output(name));
        };
        const auto log_path = manifest.directory() / (out.tag + "_log.csv");
        try {
          const training::TrainResult res = training::train(tc, hooks);
          out.curve = res.curve;
        } catch (const training::TrainingDiverged& e) {
          training::write_log_csv(rows, manifest.output(out.tag + "_log.csv"));
          throw;
        }
        training::write_log_csv(rows, manifest.output(out.tag + "_log.csv"));
        for (const auto& r : rows) out.diverged += r.diverged;

        io::LinePlot plot;
        plot.title = "Training return, " + out.tag;
        plot.x_label = "episode";
        plot.y_label = "return";
        plot.smooth = 10;
        plot.series.push_back({log_path, "episode", "return", reward});
        io::write_svg_plot(plot, manifest.output(out.tag + "_curve.svg"));
        outcomes.push_back(std::move(out));
      }
    }

    {
      std::ofstream table(manifest.output("summary.csv"), std::ios::binary);
      table << "reward,seed,episodes,first10_mean,final100_mean,diverged_episodes\n";
      for (const auto& o : outcomes) {
        const std::size_t n = o.curve.size();
        table << o.reward << ',' << o.seed << ',' << n << ',' << io::format_exact(mean_of(o.curve, 0, 10)) << ','
              << io::format_exact(mean_of(o.curve, n > 100 ? n - 100 : 0, n)) << ',' << o.diverged << '\n';
      }
    }
    if (outcomes.size() > 1) {
      io::LinePlot plot;
      plot.title = "Training return by reward formulation";
      plot.x_label = "episode";
      plot.y_label = "return (moving average, 20 episodes)";
      plot.smooth = 20;
      for (const auto& o : outcomes) {
        plot.series.push_back({manifest.directory() / (o.tag + "_log.csv"), "episode", "return", o.tag});
      }
      io::write_svg_plot(plot, manifest.output("comparison.svg"));
    }
    for (const auto& o : outcomes) {
      const std::size_t n = o.curve.size();
      std::printf("%s: first-10 mean %.6g, final-100 mean %.6g\n", o.tag.c_str(), mean_of(o.curve, 0, 10),
                  mean_of(o.curve, n > 100 ? n - 100 : 0, n));
    }
  } catch (const training::TrainingDiverged& e) {
    status = std::string("diverged: ") + e.what();
    rc = kBlowUp;
    log::warn(e.what());
  } catch (const std::exception& e) {
    manifest.finish(std::string("failed: ") + e.what());
    throw;
  }
  manifest.finish(status);
  return rc;
}

}  // namespace decmdp::cli
