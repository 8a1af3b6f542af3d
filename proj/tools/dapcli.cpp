// Command-line front end for the accident-prediction pipeline. Stages read
// their declared inputs and write plain files plus a hashed run manifest
// under the output directory.
//
// Exit codes: 0 success, 2 config error, 3 data error, 4 numeric divergence.

#include <cstdio>
#include <exception>
#include <string>

#include <CLI11.hpp>

#include "dap/pipeline.hpp"

namespace {

struct CommonOpts {
  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  bool seed_set = false;
};

dap::PipelineConfig load(const CommonOpts& opts) {
  dap::PipelineConfig c = dap::load_config(opts.config_path);
  if (!opts.out_dir.empty()) c.out_dir = opts.out_dir;
  if (opts.seed_set) {
    c.train.seeds = {opts.seed};
    c.sampling_seed = opts.seed;
    if (c.synth) c.synth->seed = opts.seed;
  }
  return c;
}

void add_common(CLI::App* cmd, CommonOpts& opts, bool config_required = true) {
  auto* cfg = cmd->add_option("--config", opts.config_path, "pipeline config (JSON)");
  if (config_required) cfg->required();
  cmd->add_option("--out", opts.out_dir, "output directory override");
  cmd->add_option("--seed", opts.seed, "seed override (training, sampling, synth)")
      ->each([&](const std::string&) { opts.seed_set = true; });
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"spatiotemporal accident-risk prediction pipeline"};
  app.require_subcommand(1);

  CommonOpts opts;
  auto* synth = app.add_subcommand("synth", "generate a synthetic fixture city");
  add_common(synth, opts);
  auto* integrate = app.add_subcommand("integrate", "parse inputs and remove duplicates");
  add_common(integrate, opts);
  auto* calibrate = app.add_subcommand("calibrate", "calibrate POI distance thresholds");
  add_common(calibrate, opts);
  auto* annotate = app.add_subcommand("annotate", "augment accidents with POI/weather/daylight");
  add_common(annotate, opts);
  auto* featurize = app.add_subcommand("featurize", "build windowed sample entries and splits");
  add_common(featurize, opts);
  auto* train = app.add_subcommand("train", "train the configured model per seed");
  add_common(train, opts);
  auto* evaluate = app.add_subcommand("evaluate", "evaluate checkpoints on the test split");
  add_common(evaluate, opts);
  auto* ablate = app.add_subcommand("ablate", "run feature-ablation scenarios");
  add_common(ablate, opts);
  auto* gradcheck = app.add_subcommand("gradcheck", "finite-difference check of toy models");
  add_common(gradcheck, opts, /*config_required=*/false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;  // usage problems are config errors
  }

  try {
    if (gradcheck->parsed()) {
      const dap::GradCheckSummary summary = dap::run_gradcheck();
      for (const auto& [name, err] : summary.blocks)
        std::printf("%-28s max_rel_error %.3e\n", name.c_str(), err);
      std::printf("overall max_rel_error %.3e (threshold 1e-4)\n", summary.max_rel_error);
      if (summary.max_rel_error >= 1e-4) {
        std::fprintf(stderr, "gradient check failed\n");
        return 4;
      }
      return 0;
    }

    const dap::PipelineConfig config = load(opts);
    if (synth->parsed()) {
      dap::run_synth(config);
      std::printf("synth: wrote fixture city to %s\n", config.out_dir.c_str());
    } else if (integrate->parsed()) {
      const auto report = dap::run_integrate(config);
      std::printf("integrate: %zu events in, %zu duplicates removed (%.2f%%)\n",
                  report.total_in, report.duplicates_removed,
                  100.0 * report.duplicate_fraction);
    } else if (calibrate->parsed()) {
      const auto tt = dap::run_calibrate(config);
      std::printf("calibrate: intersection %.0fm junction %.0fm\n",
                  tt[dap::PoiType::traffic_signal], tt[dap::PoiType::junction]);
    } else if (annotate->parsed()) {
      dap::run_annotate(config);
      std::printf("annotate: wrote %s\n", dap::stage::augmented(config.out_dir).c_str());
    } else if (featurize->parsed()) {
      const auto split = dap::run_featurize(config);
      std::printf("featurize: %zu train / %zu validation / %zu test entries\n",
                  split.train.size(), split.validation.size(), split.test.size());
    } else if (train->parsed()) {
      dap::run_train(config);
      std::printf("train: wrote checkpoints for %zu seed(s)\n", config.train.seeds.size());
    } else if (evaluate->parsed()) {
      const auto report = dap::run_evaluate(config);
      std::printf("evaluate: %s mean accident-f1 %.4f weighted-f1 %.4f\n",
                  report.configuration.c_str(), report.mean_accident_f1(),
                  report.mean_weighted_f1());
    } else if (ablate->parsed()) {
      const auto reports = dap::run_ablate(config);
      for (const auto& r : reports)
        std::printf("ablate: %-28s accident-f1 %.4f weighted-f1 %.4f\n", r.configuration.c_str(),
                    r.mean_accident_f1(), r.mean_weighted_f1());
    }
    return 0;
  } catch (const dap::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return e.exit_code();
  } catch (const std::exception& e) {
    std::fprintf(stderr, "unexpected error: %s\n", e.what());
    return 3;
  }
}
