// sleepwake: batch sleep/wake onset detection for minute-level actigraphy.
//
//   sleepwake run   --input DIR --output DIR [--config FILE] [--workers N] ...
//   sleepwake synth --output DIR --subjects N --seed S [--days D] [--jitter SD] ...
//   sleepwake eval  --reports DIR --output DIR

#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "sleepwake/app.hpp"
#include "sleepwake/error.hpp"

using namespace sleepwake;

int main(int argc, char** argv) {
  CLI::App app{"Training-free sleep/wake onset detection from minute-level actigraphy"};
  app.require_subcommand(1);

  RunConfig run;
  std::string config_file;
  std::string input_dir, output_dir;
  int workers = 0;
  double epsilon = 0.0, range_fraction = 0.0;
  bool svg = false, no_plots = false;
  auto* run_cmd = app.add_subcommand("run", "Run the detection pipeline on every *.csv in a directory");
  run_cmd->add_option("--config", config_file, "key = value config file (flags override it)");
  run_cmd->add_option("-i,--input", input_dir, "Directory of per-subject CSV files");
  run_cmd->add_option("-o,--output", output_dir, "Output directory");
  run_cmd->add_option("--timestamp-column", run.csv.timestamp_column, "Timestamp column name");
  run_cmd->add_option("--count-column", run.csv.count_column, "Vector-magnitude column name");
  run_cmd->add_option("-j,--workers", workers, "Worker threads");
  run_cmd->add_option("--epsilon", epsilon, "Screening threshold on R");
  run_cmd->add_option("--range-fraction", range_fraction, "STC dichotomization threshold as a fraction of range");
  run_cmd->add_option("--max-zero-run", run.pipeline.wear.max_zero_run_minutes, "Reject subjects with a zero run this long");
  run_cmd->add_option("--min-days", run.pipeline.wear.min_days, "Reject subjects with fewer days");
  run_cmd->add_flag("--svg", svg, "Also write SVG plots");
  run_cmd->add_flag("--no-plots", no_plots, "Skip plot data files");

  SynthCorpusConfig synth;
  std::string synth_out;
  double day_mean = 500.0, night_mean = 5.0;
  auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic corpus with ground truth");
  synth_cmd->add_option("-o,--output", synth_out, "Output directory")->required();
  synth_cmd->add_option("-n,--subjects", synth.subjects, "Number of subjects");
  synth_cmd->add_option("--seed", synth.seed, "Corpus seed");
  synth_cmd->add_option("--days", synth.base.days, "Days per subject (>= 5)");
  synth_cmd->add_option("--jitter", synth.base.onset_jitter_sd_minutes, "Onset jitter sd in minutes");
  synth_cmd->add_option("--ramp", synth.base.transition_ramp_minutes, "Transition ramp in minutes");
  synth_cmd->add_option("--sleep-onset", synth.base.sleep_onset_mean, "Mean sleep onset, clock minutes");
  synth_cmd->add_option("--wake-onset", synth.base.wake_onset_mean, "Mean wake onset, clock minutes");
  synth_cmd->add_option("--day-mean", day_mean, "Mean awake count");
  synth_cmd->add_option("--night-mean", night_mean, "Mean asleep count");
  synth_cmd->add_option("--day-shape", synth.base.day_gamma.shape, "Gamma shape while awake");
  synth_cmd->add_option("--night-shape", synth.base.night_gamma.shape, "Gamma shape while asleep");

  std::string reports_dir, eval_out;
  auto* eval_cmd = app.add_subcommand("eval", "Recompute cohort statistics from existing reports");
  eval_cmd->add_option("-r,--reports", reports_dir, "Directory of per-subject report JSON files")->required();
  eval_cmd->add_option("-o,--output", eval_out, "Output directory")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run_cmd) {
      if (!config_file.empty()) {
        std::ifstream in(config_file);
        if (!in) throw Error(ErrorCode::ConfigError, "cannot open config " + config_file);
        apply_config(run, read_key_values(in));
      }
      if (!input_dir.empty()) run.input_dir = input_dir;
      if (!output_dir.empty()) run.output_dir = output_dir;
      if (workers != 0) run.worker_count = workers;
      if (epsilon != 0.0) run.pipeline.screen.epsilon = epsilon;
      if (range_fraction != 0.0) run.pipeline.dichotomize.range_fraction = range_fraction;
      if (svg) run.write_svg = true;
      if (no_plots) run.write_plots = false;
      return run_batch(run, std::cout);
    }
    if (*synth_cmd) {
      synth.output_dir = synth_out;
      synth.base.day_gamma.rate = synth.base.day_gamma.shape / day_mean;
      synth.base.night_gamma.rate = synth.base.night_gamma.shape / night_mean;
      return run_synth(synth, std::cout);
    }
    if (*eval_cmd) return run_eval(reports_dir, eval_out, std::cout);
  } catch (const Error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfigError;
  }
  return kExitConfigError;
}
