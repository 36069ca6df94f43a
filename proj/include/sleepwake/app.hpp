#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "sleepwake/pipeline.hpp"
#include "sleepwake/synth.hpp"

namespace sleepwake {

namespace fs = std::filesystem;

enum ExitCode : int { kExitOk = 0, kExitConfigError = 1, kExitSubjectErrors = 2 };

struct RunConfig {
  fs::path input_dir;
  fs::path output_dir;
  CsvOptions csv;
  PipelineConfig pipeline;
  int worker_count = 1;
  bool write_plots = true;
  bool write_svg = false;
};

// key = value lines; '#' starts a comment. Unknown keys raise ConfigError.
std::map<std::string, std::string> read_key_values(std::istream& in);
void apply_config(RunConfig& cfg, const std::map<std::string, std::string>& kv);

// Labels as (value, run length) pairs starting at minute 1.
std::vector<std::pair<int, std::size_t>> run_length_encode(const LabelVector& labels);
LabelVector run_length_decode(const std::vector<std::pair<int, std::size_t>>& runs);

std::string report_json(const EpochSeries& series, const SubjectResult& result, std::size_t longest_zero_run);
SubjectReport parse_report_json(const std::string& text);

// Writes <dir>/<id>_curve.csv (t, timestamp, count, stc_fit, coarse_label, refined_label)
// and <dir>/<id>_dn.csv (t, d_stc, n_stc, d_refined, n_refined); optionally SVG plots.
void emit_plot_data(const fs::path& dir, const EpochSeries& series, const SubjectResult& result, bool svg = false);

void write_cohort_csv(std::ostream& out, const std::vector<SubjectReport>& reports);

// Discovers *.csv in input_dir (sorted), runs every subject, writes
// reports/<id>.json, plots/, cohort.csv, summary.json and timings.csv.
int run_batch(const RunConfig& cfg, std::ostream& log);

struct SynthCorpusConfig {
  fs::path output_dir;
  int subjects = 10;
  std::uint64_t seed = 1;
  SynthConfig base;
};

// Writes <out>/<id>.csv per subject and <out>/truth/<id>.json with the true onsets.
int run_synth(const SynthCorpusConfig& cfg, std::ostream& log);
SynthConfig synth_subject_config(const SynthCorpusConfig& cfg, int index);
std::string truth_json(const EpochSeries& series, const GroundTruth& truth);

// Recomputes cohort.csv and summary.json from an existing reports/ directory.
int run_eval(const fs::path& reports_dir, const fs::path& output_dir, std::ostream& log);

}  // namespace sleepwake
