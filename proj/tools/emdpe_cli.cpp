// Command-line driver for the experiment harness.
#include <cstdio>
#include <exception>
#include <filesystem>
#include <string>

#include <CLI11.hpp>

#include "emdpe/harness.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Parametric-dictionary parameter estimation experiments"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = "out";
  std::uint64_t seed = 0;
  std::size_t trials = 0;
  unsigned threads = 0;
  bool timing = false;

  for (const char* name : {"separation", "decay", "compression", "snr", "single"}) {
    CLI::App* sub = app.add_subcommand(name, std::string("run the ") + name + " experiment");
    sub->add_option("--config", config_path, "INI experiment description")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--seed", seed, "master seed (overrides the config)");
    sub->add_option("--trials", trials, "trials per axis point (overrides the config)");
    sub->add_option("--threads", threads, "worker threads, 0 for all cores");
    sub->add_flag("--timing", timing, "record wall-clock runtime per trial (output is then not reproducible)");
  }

  CLI11_PARSE(app, argc, argv);

  try {
    const std::string command = app.get_subcommands().front()->get_name();
    emdpe::ExperimentConfig cfg = emdpe::load_config(config_path);
    if (emdpe::experiment_name(cfg.experiment) != command) {
      throw std::invalid_argument("config describes a " + std::string(emdpe::experiment_name(cfg.experiment)) +
                                  " experiment, not " + command);
    }
    if (app.get_subcommands().front()->count("--seed")) cfg.seed = seed;
    if (trials > 0) cfg.trials = trials;
    cfg.threads = threads;
    cfg.timing = timing;
    cfg.validate();

    const emdpe::RunOutput out = emdpe::run_experiment(cfg);
    emdpe::write_outputs(out, out_dir);
    std::printf("%s: %zu records written to %s\n", command.c_str(), out.records.size(), out_dir.c_str());
    for (std::size_t i = 0; i < out.summary.columns.size(); ++i) {
      std::printf("%s%s", i ? "  " : "", out.summary.columns[i].c_str());
    }
    std::printf("\n");
    for (const auto& row : out.summary.rows) {
      for (std::size_t i = 0; i < row.size(); ++i) std::printf("%s%s", i ? "  " : "", row[i].c_str());
      std::printf("\n");
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
