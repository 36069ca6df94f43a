#include "sleepwake/app.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <istream>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "sleepwake/error.hpp"

namespace sleepwake {

using Json = nlohmann::ordered_json;

namespace {

std::string fmt(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

Json number_or_inf(double v) {
  if (std::isinf(v)) return Json(v > 0 ? "inf" : "-inf");
  return Json(v);
}

double read_number_or_inf(const Json& j) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return kInfiniteR;
    if (s == "-inf") return -kInfiniteR;
    throw Error(ErrorCode::ConfigError, "bad number '" + s + "' in report");
  }
  return j.get<double>();
}

Json cps_json(const CpSet& cps, const EpochSeries* series) {
  Json arr = Json::array();
  for (const ChangePoint& cp : cps) {
    Json o;
    o["index"] = cp.index;
    o["kind"] = to_string(cp.kind);
    o["source"] = to_string(cp.source);
    if (series) o["time"] = Timestamp{series->start_time.minutes + static_cast<std::int64_t>(cp.index) - 1}.iso();
    arr.push_back(std::move(o));
  }
  return arr;
}

CpSet cps_from_json(const Json& arr) {
  CpSet out;
  for (const Json& o : arr) {
    ChangePoint cp;
    cp.index = o.at("index").get<std::size_t>();
    cp.kind = o.at("kind").get<std::string>() == "WakeOnset" ? OnsetKind::WakeOnset : OnsetKind::SleepOnset;
    const auto src = o.at("source").get<std::string>();
    cp.source = src == "PELT" ? CpSource::PELT : src == "Fallback" ? CpSource::Fallback : CpSource::STC;
    out.push_back(cp);
  }
  return out;
}

Json rle_json(const LabelVector& labels) {
  Json arr = Json::array();
  for (const auto& [value, len] : run_length_encode(labels)) arr.push_back(Json::array({value, len}));
  return arr;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(ErrorCode::IoError, "write failed for " + path.string());
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<fs::path> list_files(const fs::path& dir, const std::string& ext) {
  std::vector<fs::path> out;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ext) out.push_back(entry.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

Json cohort_json(const std::vector<SubjectReport>& reports) {
  Json j;
  if (reports.size() < 2) {
    j["note"] = "fewer than two subjects; no cohort statistics";
    j["subjects"] = reports.size();
    return j;
  }
  const CohortSummary s = cohort_summary(reports);
  j["subjects"] = s.subjects;
  j["flagged_count"] = s.flagged_count;
  j["infinite_count"] = s.infinite_count;
  j["finite_pairs"] = s.delta_r.size();
  if (s.test) {
    j["t_stat"] = s.test->t_stat;
    j["p_value"] = s.test->p_value;
    j["df"] = s.test->df;
  } else {
    j["test_note"] = s.test_note;
  }
  Json flagged = Json::array();
  std::vector<const SubjectReport*> ordered;
  for (const auto& r : reports) ordered.push_back(&r);
  std::stable_sort(ordered.begin(), ordered.end(),
                   [](const SubjectReport* a, const SubjectReport* b) { return a->subject_id < b->subject_id; });
  for (const SubjectReport* r : ordered) {
    if (r->flagged) flagged.push_back({{"subject_id", r->subject_id}, {"reason", to_string(*r->flag_reason)}});
  }
  j["flagged"] = std::move(flagged);
  Json deltas = Json::array();
  for (std::size_t i = 0; i < s.delta_r.size(); ++i) {
    deltas.push_back({{"subject_id", s.finite_ids[i]}, {"delta_r", s.delta_r[i]}});
  }
  j["delta_r"] = std::move(deltas);
  return j;
}

void write_cohort_outputs(const fs::path& dir, std::vector<SubjectReport> reports, Json summary) {
  std::sort(reports.begin(), reports.end(),
            [](const SubjectReport& a, const SubjectReport& b) { return a.subject_id < b.subject_id; });
  std::ostringstream csv;
  write_cohort_csv(csv, reports);
  write_text(dir / "cohort.csv", csv.str());
  summary["cohort"] = cohort_json(reports);
  write_text(dir / "summary.json", summary.dump(2) + "\n");
}

std::string svg_polyline(const std::vector<double>& y, double lo, double hi, double width, double height,
                         const char* colour) {
  std::string pts;
  const double span = hi > lo ? hi - lo : 1.0;
  const double dx = y.size() > 1 ? width / static_cast<double>(y.size() - 1) : 0.0;
  char buf[64];
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double px = static_cast<double>(i) * dx;
    const double py = height - (y[i] - lo) / span * height;
    std::snprintf(buf, sizeof buf, "%.2f,%.2f ", px, py);
    pts += buf;
  }
  return std::string("<polyline fill=\"none\" stroke-width=\"0.6\" stroke=\"") + colour + "\" points=\"" + pts +
         "\"/>\n";
}

void write_svg(const fs::path& path, const std::vector<std::pair<std::vector<double>, const char*>>& lines) {
  constexpr double kW = 1600.0, kH = 300.0;
  double lo = 0.0, hi = 0.0;
  for (const auto& [y, c] : lines) {
    for (const double v : y) hi = std::max(hi, v), lo = std::min(lo, v);
  }
  std::string svg = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"1600\" height=\"300\">\n";
  for (const auto& [y, c] : lines) svg += svg_polyline(y, lo, hi, kW, kH, c);
  svg += "</svg>\n";
  write_text(path, svg);
}

struct Outcome {
  enum class Kind { Report, Rejected, Error } kind = Kind::Error;
  SubjectReport report;
  std::string subject_id;
  std::string message;
  std::size_t longest_zero_run = 0;
};

Outcome process_file(const fs::path& file, const RunConfig& cfg) {
  Outcome out;
  out.subject_id = file.stem().string();
  try {
    const EpochSeries series = parse_actigraphy(file, cfg.csv);
    const WearVerdict verdict = validate_wear(series, cfg.pipeline.wear);
    out.longest_zero_run = verdict.longest_zero_run;
    if (!verdict.accepted()) {
      out.kind = Outcome::Kind::Rejected;
      out.message = to_string(*verdict.rejection);
      return out;
    }
    const SubjectResult result = analyze_subject(series, cfg.pipeline);
    write_text(cfg.output_dir / "reports" / (series.subject_id + ".json"),
               report_json(series, result, verdict.longest_zero_run));
    if (cfg.write_plots) emit_plot_data(cfg.output_dir / "plots", series, result, cfg.write_svg);
    out.kind = Outcome::Kind::Report;
    out.report = result.report;
  } catch (const std::exception& e) {
    out.kind = Outcome::Kind::Error;
    out.message = e.what();
  }
  return out;
}

}  // namespace

std::map<std::string, std::string> read_key_values(std::istream& in) {
  std::map<std::string, std::string> kv;
  std::string line;
  int line_no = 0;
  const auto strip = [](std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    const auto e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = strip(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorCode::ConfigError, "line " + std::to_string(line_no) + ": expected key = value");
    }
    kv[strip(line.substr(0, eq))] = strip(line.substr(eq + 1));
  }
  return kv;
}

void apply_config(RunConfig& cfg, const std::map<std::string, std::string>& kv) {
  const auto as_double = [](const std::string& key, const std::string& v) {
    double out = 0.0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || ptr != v.data() + v.size()) throw Error(ErrorCode::ConfigError, key + ": not a number");
    return out;
  };
  const auto as_int = [](const std::string& key, const std::string& v) {
    int out = 0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || ptr != v.data() + v.size()) throw Error(ErrorCode::ConfigError, key + ": not an integer");
    return out;
  };
  const auto as_bool = [](const std::string& key, const std::string& v) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw Error(ErrorCode::ConfigError, key + ": not a boolean");
  };

  auto& p = cfg.pipeline;
  for (const auto& [key, v] : kv) {
    if (key == "input_dir") cfg.input_dir = v;
    else if (key == "output_dir") cfg.output_dir = v;
    else if (key == "timestamp_column") cfg.csv.timestamp_column = v;
    else if (key == "count_column") cfg.csv.count_column = v;
    else if (key == "max_zero_run_minutes") p.wear.max_zero_run_minutes = as_int(key, v);
    else if (key == "min_days") p.wear.min_days = as_int(key, v);
    else if (key == "range_fraction") p.dichotomize.range_fraction = as_double(key, v);
    else if (key == "epsilon") p.screen.epsilon = as_double(key, v);
    else if (key == "zero_shift") p.detect.zero_shift = as_double(key, v);
    else if (key == "schedule_initial_scale") p.detect.schedule.initial_scale = as_double(key, v);
    else if (key == "schedule_decay") p.detect.schedule.decay = as_double(key, v);
    else if (key == "schedule_max_iterations") p.detect.schedule.max_iterations = as_int(key, v);
    else if (key == "schedule_floor_scale") p.detect.schedule.floor_scale = as_double(key, v);
    else if (key == "workers") cfg.worker_count = as_int(key, v);
    else if (key == "write_plots") cfg.write_plots = as_bool(key, v);
    else if (key == "write_svg") cfg.write_svg = as_bool(key, v);
    else throw Error(ErrorCode::ConfigError, "unknown key '" + key + "'");
  }
}

std::vector<std::pair<int, std::size_t>> run_length_encode(const LabelVector& labels) {
  std::vector<std::pair<int, std::size_t>> runs;
  for (const auto l : labels) {
    if (!runs.empty() && runs.back().first == l) {
      ++runs.back().second;
    } else {
      runs.emplace_back(l, 1);
    }
  }
  return runs;
}

LabelVector run_length_decode(const std::vector<std::pair<int, std::size_t>>& runs) {
  LabelVector out;
  for (const auto& [value, len] : runs) out.insert(out.end(), len, static_cast<std::uint8_t>(value));
  return out;
}

std::string report_json(const EpochSeries& series, const SubjectResult& result, std::size_t longest_zero_run) {
  const SubjectReport& r = result.report;
  Json j;
  j["subject_id"] = r.subject_id;
  j["start_time"] = series.start_time.iso();
  j["n"] = series.size();
  j["longest_zero_run"] = longest_zero_run;
  j["stc"] = {{"mes", result.fit.params.mes},
              {"amp", result.fit.params.amp},
              {"phi", result.fit.params.phi},
              {"gamma_hill", result.fit.params.gamma_hill},
              {"m_half", result.fit.params.m_half},
              {"rss", result.fit.rss},
              {"converged", result.fit.converged},
              {"best_start_index", result.fit.best_start_index},
              {"normalization", {{"min", result.fit.normalization.min}, {"max", result.fit.normalization.max}}},
              {"threshold", result.coarse.threshold}};
  j["r_stc"] = number_or_inf(r.r_stc);
  j["r_refined"] = number_or_inf(r.r_refined);
  j["flagged"] = r.flagged;
  j["flag_reason"] = r.flag_reason ? Json(to_string(*r.flag_reason)) : Json(nullptr);
  j["fallback_count"] = result.fallback_count;
  j["cp_stc"] = cps_json(r.cp_stc, &series);
  j["cp_refined"] = cps_json(r.cp_refined, &series);
  j["labels_stc_rle"] = rle_json(result.coarse.labels);
  j["labels_refined_rle"] = rle_json(result.refined_labels);
  return j.dump(2) + "\n";
}

SubjectReport parse_report_json(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::ConfigError, std::string("report is not valid JSON: ") + e.what());
  }
  SubjectReport r;
  try {
    r.subject_id = j.at("subject_id").get<std::string>();
    r.r_stc = read_number_or_inf(j.at("r_stc"));
    r.r_refined = read_number_or_inf(j.at("r_refined"));
    r.flagged = j.at("flagged").get<bool>();
    if (!j.at("flag_reason").is_null()) r.flag_reason = flag_reason_from_string(j.at("flag_reason").get<std::string>());
    r.cp_stc = cps_from_json(j.at("cp_stc"));
    r.cp_refined = cps_from_json(j.at("cp_refined"));
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::ConfigError, std::string("report is missing fields: ") + e.what());
  }
  if (r.flagged != r.flag_reason.has_value()) throw Error(ErrorCode::ConfigError, "flagged/flag_reason mismatch");
  return r;
}

void emit_plot_data(const fs::path& dir, const EpochSeries& series, const SubjectResult& result, bool svg) {
  const std::size_t n = series.size();
  std::string curve = "t,timestamp,count,stc_fit,coarse_label,refined_label\n";
  std::string dn = "t,d_stc,n_stc,d_refined,n_refined\n";
  std::vector<double> fitted(n);
  for (std::size_t i = 0; i < n; ++i) {
    fitted[i] = result.fit.normalization.invert(result.curve[i]);
    const std::string t = std::to_string(i + 1);
    curve += t + ',' + Timestamp{series.start_time.minutes + static_cast<std::int64_t>(i)}.iso() + ',' +
             fmt(series.counts[i]) + ',' + fmt(fitted[i]) + ',' + std::to_string(result.coarse.labels[i]) + ',' +
             std::to_string(result.refined_labels[i]) + '\n';
    dn += t + ',' + fmt(result.stc_split.diurnal[i]) + ',' + fmt(result.stc_split.nocturnal[i]) + ',' +
          fmt(result.refined_split.diurnal[i]) + ',' + fmt(result.refined_split.nocturnal[i]) + '\n';
  }
  fs::create_directories(dir);
  const std::string id = series.subject_id;
  write_text(dir / (id + "_curve.csv"), curve);
  write_text(dir / (id + "_dn.csv"), dn);

  if (!svg) return;
  const double top = result.fit.normalization.max;
  std::vector<double> coarse(n), refined(n);
  for (std::size_t i = 0; i < n; ++i) {
    coarse[i] = result.coarse.labels[i] * top;
    refined[i] = result.refined_labels[i] * top * 0.95;
  }
  write_svg(dir / (id + "_stc.svg"), {{series.counts, "#999999"}, {fitted, "#d62728"}, {coarse, "#1f77b4"}});
  write_svg(dir / (id + "_cp.svg"), {{series.counts, "#999999"}, {coarse, "#1f77b4"}, {refined, "#2ca02c"}});
  write_svg(dir / (id + "_dn.svg"), {{result.stc_split.nocturnal, "#1f77b4"}, {result.refined_split.nocturnal, "#2ca02c"}});
}

void write_cohort_csv(std::ostream& out, const std::vector<SubjectReport>& reports) {
  out << "subject_id,r_stc,r_refined,delta_r,flagged,flag_reason\n";
  for (const SubjectReport& r : reports) {
    out << r.subject_id << ',' << fmt(r.r_stc) << ',' << fmt(r.r_refined) << ',' << fmt(r.r_refined - r.r_stc) << ','
        << (r.flagged ? "true" : "false") << ',' << (r.flag_reason ? to_string(*r.flag_reason) : "") << '\n';
  }
}

int run_batch(const RunConfig& cfg, std::ostream& log) {
  if (cfg.worker_count < 1) {
    log << "config error: worker_count must be >= 1\n";
    return kExitConfigError;
  }
  if (cfg.input_dir.empty() || !fs::is_directory(cfg.input_dir)) {
    log << "config error: input directory '" << cfg.input_dir.string() << "' does not exist\n";
    return kExitConfigError;
  }
  if (cfg.output_dir.empty()) {
    log << "config error: no output directory\n";
    return kExitConfigError;
  }
  const auto files = list_files(cfg.input_dir, ".csv");
  if (files.empty()) {
    log << "no subjects found in " << cfg.input_dir.string() << "\n";
    return kExitConfigError;
  }
  try {
    fs::create_directories(cfg.output_dir / "reports");
    if (cfg.write_plots) fs::create_directories(cfg.output_dir / "plots");
  } catch (const fs::filesystem_error& e) {
    log << "config error: " << e.what() << "\n";
    return kExitConfigError;
  }

  std::vector<Outcome> outcomes(files.size());
  std::vector<double> runtimes(files.size(), 0.0);
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t i = next++; i < files.size(); i = next++) {
      const auto t0 = std::chrono::steady_clock::now();
      outcomes[i] = process_file(files[i], cfg);
      runtimes[i] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
  };
  const auto n_threads = std::min<std::size_t>(static_cast<std::size_t>(cfg.worker_count), files.size());
  std::vector<std::jthread> pool;
  for (std::size_t w = 1; w < n_threads; ++w) pool.emplace_back(worker);
  worker();
  pool.clear();

  std::vector<SubjectReport> reports;
  Json rejected = Json::array(), errors = Json::array();
  std::string timings = "subject_id,runtime_seconds\n";
  for (std::size_t i = 0; i < files.size(); ++i) {
    const Outcome& o = outcomes[i];
    const std::string file = files[i].filename().string();
    switch (o.kind) {
      case Outcome::Kind::Report:
        reports.push_back(o.report);
        timings += o.subject_id + ',' + fmt(runtimes[i]) + '\n';
        log << o.subject_id << ": r_stc=" << fmt(o.report.r_stc) << " r_refined=" << fmt(o.report.r_refined)
            << (o.report.flagged ? std::string(" flagged=") + to_string(*o.report.flag_reason) : std::string{})
            << "\n";
        break;
      case Outcome::Kind::Rejected:
        rejected.push_back({{"file", file}, {"reason", o.message}, {"longest_zero_run", o.longest_zero_run}});
        log << o.subject_id << ": rejected (" << o.message << ")\n";
        break;
      case Outcome::Kind::Error:
        errors.push_back({{"file", file}, {"message", o.message}});
        log << o.subject_id << ": error: " << o.message << "\n";
        break;
    }
  }

  Json summary;
  summary["subjects_found"] = files.size();
  summary["reports"] = reports.size();
  summary["rejected"] = std::move(rejected);
  summary["errors"] = errors;
  try {
    write_cohort_outputs(cfg.output_dir, reports, std::move(summary));
    write_text(cfg.output_dir / "timings.csv", timings);
  } catch (const Error& e) {
    log << "error: " << e.what() << "\n";
    return kExitSubjectErrors;
  }
  return errors.empty() ? kExitOk : kExitSubjectErrors;
}

SynthConfig synth_subject_config(const SynthCorpusConfig& cfg, int index) {
  SynthConfig s = cfg.base;
  char id[32];
  std::snprintf(id, sizeof id, "synth_%03d", index);
  s.subject_id = id;
  // splitmix64 step keeps neighbouring subject seeds decorrelated
  std::uint64_t z = cfg.seed + 0x9E3779B97F4A7C15ULL * static_cast<std::uint64_t>(index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  s.seed = z ^ (z >> 31);
  return s;
}

std::string truth_json(const EpochSeries& series, const GroundTruth& truth) {
  Json j;
  j["subject_id"] = series.subject_id;
  j["start_time"] = series.start_time.iso();
  j["n"] = series.size();
  j["true_cps"] = cps_json(truth.true_cps, &series);
  j["true_labels_rle"] = rle_json(truth.true_labels);
  return j.dump(2) + "\n";
}

int run_synth(const SynthCorpusConfig& cfg, std::ostream& log) {
  if (cfg.subjects < 1 || cfg.output_dir.empty()) {
    log << "config error: need an output directory and at least one subject\n";
    return kExitConfigError;
  }
  try {
    validate(cfg.base);
    fs::create_directories(cfg.output_dir / "truth");
    for (int i = 0; i < cfg.subjects; ++i) {
      const auto [series, truth] = generate_subject(synth_subject_config(cfg, i));
      write_actigraphy(cfg.output_dir / (series.subject_id + ".csv"), series);
      write_text(cfg.output_dir / "truth" / (series.subject_id + ".json"), truth_json(series, truth));
    }
  } catch (const std::exception& e) {
    log << "config error: " << e.what() << "\n";
    return kExitConfigError;
  }
  log << "wrote " << cfg.subjects << " subjects to " << cfg.output_dir.string() << "\n";
  return kExitOk;
}

int run_eval(const fs::path& reports_dir, const fs::path& output_dir, std::ostream& log) {
  if (!fs::is_directory(reports_dir)) {
    log << "config error: '" << reports_dir.string() << "' is not a directory\n";
    return kExitConfigError;
  }
  const auto files = list_files(reports_dir, ".json");
  if (files.empty()) {
    log << "no reports found in " << reports_dir.string() << "\n";
    return kExitConfigError;
  }
  std::vector<SubjectReport> reports;
  Json errors = Json::array();
  for (const auto& f : files) {
    try {
      reports.push_back(parse_report_json(read_text(f)));
    } catch (const std::exception& e) {
      errors.push_back({{"file", f.filename().string()}, {"message", e.what()}});
      log << f.filename().string() << ": error: " << e.what() << "\n";
    }
  }
  Json summary;
  summary["reports"] = reports.size();
  summary["errors"] = errors;
  try {
    fs::create_directories(output_dir);
    write_cohort_outputs(output_dir, reports, std::move(summary));
  } catch (const std::exception& e) {
    log << "error: " << e.what() << "\n";
    return kExitSubjectErrors;
  }
  return errors.empty() ? kExitOk : kExitSubjectErrors;
}

}  // namespace sleepwake
