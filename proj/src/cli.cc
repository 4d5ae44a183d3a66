#include "qtanneal/cli.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "qtanneal/annealer.h"
#include "qtanneal/codec.h"
#include "qtanneal/errors.h"
#include "qtanneal/harness.h"
#include "qtanneal/history.h"
#include "qtanneal/image.h"
#include "qtanneal/iqa.h"
#include "qtanneal/qtable.h"
#include "qtanneal/version.h"

namespace qtanneal {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

// Bad flag combinations detected after parsing; exit code 2.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using Settings = std::vector<std::pair<std::string, std::string>>;

// Every option of `sub` with its effective value (flag, config file or
// default), for output headers.
Settings EffectiveSettings(const CLI::App& sub) {
  Settings s;
  for (const CLI::Option* opt : sub.get_options()) {
    const std::string name = opt->get_single_name();
    if (name == "help" || name.empty()) continue;
    std::string value;
    if (opt->count() > 0) {
      for (const std::string& r : opt->results()) value += (value.empty() ? "" : " ") + r;
    } else {
      value = opt->get_default_str();
    }
    s.emplace_back(name, value);
  }
  return s;
}

std::vector<std::string> HeaderLines(const std::string& command, const Settings& settings) {
  std::vector<std::string> lines = {std::string("qtanneal ") + kVersion, "command: " + command};
  for (const auto& [k, v] : settings) lines.push_back(k + " = " + v);
  return lines;
}

ordered_json SettingsJson(const std::string& command, const Settings& settings) {
  ordered_json j;
  j["tool"] = "qtanneal";
  j["version"] = kVersion;
  j["command"] = command;
  ordered_json s = ordered_json::object();
  for (const auto& [k, v] : settings) s[k] = v;
  j["settings"] = s;
  return j;
}

std::string CommentBlock(const std::vector<std::string>& lines) {
  std::string out;
  for (const std::string& l : lines) out += "# " + l + "\n";
  return out;
}

void WriteText(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("write failed for " + path.string());
}

std::string ReadText(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

QuantTable LoadTableArg(const std::string& arg, std::ostream& err) {
  if (arg == "standard") return StandardTable();
  ParsedTable parsed = ParseTable(ReadText(arg));
  for (const std::string& w : parsed.warnings) err << "warning: " << arg << ": " << w << '\n';
  return parsed.table;
}

// Files are taken as given; directories contribute their .pgm/.ppm files
// in name order.
std::vector<std::string> ExpandImages(const std::vector<std::string>& args) {
  std::vector<std::string> out;
  for (const std::string& a : args) {
    if (!fs::is_directory(a)) {
      out.push_back(a);
      continue;
    }
    std::vector<std::string> found;
    for (const auto& entry : fs::directory_iterator(a)) {
      const std::string ext = entry.path().extension().string();
      if (entry.is_regular_file() && (ext == ".pgm" || ext == ".ppm")) {
        found.push_back(entry.path().string());
      }
    }
    std::sort(found.begin(), found.end());
    out.insert(out.end(), found.begin(), found.end());
  }
  return out;
}

std::vector<ImagePlane> LoadImages(const std::vector<std::string>& paths) {
  std::vector<ImagePlane> images;
  for (const std::string& p : paths) images.push_back(LoadImage(p));
  return images;
}

DatasetPartition LoadPartition(const fs::path& path) {
  const json j = json::parse(ReadText(path));
  return PartitionFromJson(j.contains("partition") ? j.at("partition") : j);
}

std::string FormatDouble(double v) { return json(v).dump(); }

struct Options {
  std::string table = "standard";
  std::string against = "standard";
  std::string in;
  std::string ref;
  std::string test;
  std::string out;
  std::string recon;
  std::string csv;
  std::string best_out;
  std::string partition;
  std::string records;
  std::string metric = "fsim";
  std::string mode = "compression";
  std::string guard_anchor = "baseline";
  std::string formula = "reconstructed";
  std::vector<std::string> images;
  std::vector<std::string> histories;
  std::vector<std::string> tables;
  int quality = 75;
  int steps = 1000;
  int group_size = 10;
  int eval_count = 200;
  int runs = 1;
  int parallelism = 1;
  int samples = 100;
  int repetitions = 30;
  int cells = 10;
  std::uint64_t seed = 0;
  double guard_threshold = 0.01;
  double min_improvement = 0.10;
};

int DoEncode(const Options& o, const Settings& settings, std::ostream& out, std::ostream& err) {
  const ImagePlane image = LoadImage(o.in);
  const QuantTable table = ScaleTable(LoadTableArg(o.table, err), o.quality);
  const DctImage dct(image);
  const std::vector<std::uint8_t> bytes = EncodeJfif(dct, table);
  {
    std::ofstream f(o.out, std::ios::binary);
    if (!f) throw IoError("cannot write " + o.out);
    f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!f) throw IoError("write failed for " + o.out);
  }
  if (!o.recon.empty()) {
    SavePgm(Reconstruct(dct, table), o.recon, HeaderLines("encode", settings));
  }
  out << o.out << ',' << bytes.size() << '\n';
  return kExitOk;
}

int DoScore(const Options& o, std::ostream& out, std::ostream& err) {
  const MetricId metric = ParseMetric(o.metric);
  const MetricScore s = Score(metric, LoadImage(o.ref), LoadImage(o.test));
  if (s.flagged) err << "warning: negative similarity term (contrast inversion)\n";
  out << MetricName(metric) << ',' << o.ref << ',' << o.test << ',' << FormatDouble(s.value)
      << '\n';
  return kExitOk;
}

int DoScale(const Options& o, const Settings& settings, std::ostream& out, std::ostream& err) {
  const QuantTable scaled = ScaleTable(LoadTableArg(o.table, err), o.quality);
  const std::string text = CommentBlock(HeaderLines("scale", settings)) + SerializeTable(scaled);
  if (o.out.empty()) {
    out << text;
  } else {
    WriteText(o.out, text);
  }
  return kExitOk;
}

int DoDiff(const Options& o, const Settings& settings, std::ostream& out, std::ostream& err) {
  const HeatmapDiff d = DiffHeatmap(LoadTableArg(o.table, err), LoadTableArg(o.against, err));
  std::ostringstream s;
  s << CommentBlock(HeaderLines("diff", settings)) << "# signed change\n";
  for (int r = 0; r < kBlockDim; ++r) {
    for (int c = 0; c < kBlockDim; ++c) s << (c ? " " : "") << std::setw(4) << d.deltas[r * 8 + c];
    s << '\n';
  }
  s << "# intensity\n" << std::fixed << std::setprecision(2);
  for (int r = 0; r < kBlockDim; ++r) {
    for (int c = 0; c < kBlockDim; ++c) s << (c ? " " : "") << d.intensities[r * 8 + c];
    s << '\n';
  }
  if (o.out.empty()) {
    out << s.str();
  } else {
    WriteText(o.out, s.str());
  }
  return kExitOk;
}

int DoPartition(const Options& o, const Settings& settings, std::ostream& out) {
  const DatasetPartition p = Partition(ExpandImages(o.images), o.group_size, o.eval_count, o.seed);
  ordered_json j = SettingsJson("partition", settings);
  j["partition"] = PartitionToJson(p);
  const std::string text = j.dump(2) + "\n";
  if (o.out.empty()) {
    out << text;
  } else {
    WriteText(o.out, text);
    out << p.training_groups.size() << " groups of " << o.group_size << ", "
        << p.evaluation_set.size() << " evaluation images\n";
  }
  return kExitOk;
}

AnnealConfig ConfigFromOptions(const Options& o) {
  AnnealConfig c;
  c.mode = ParseMode(o.mode);
  c.quality = o.quality;
  c.metric = ParseMetric(o.metric);
  c.max_steps = o.steps;
  c.seed = o.seed;
  c.guard_threshold = o.guard_threshold;
  c.guard_anchor = ParseAnchor(o.guard_anchor);
  c.formula = ParseFormula(o.formula);
  c.cells_per_step = o.cells;
  c.Validate();
  return c;
}

void PrintRunSummary(std::ostream& out, const std::string& label, const AnnealState& s) {
  out << label << ": final E=" << FormatDouble(s.e_star) << " C=" << FormatDouble(s.c_star)
      << "; best step " << s.best.step << " E=" << FormatDouble(s.best.ratios.error)
      << " C=" << FormatDouble(s.best.ratios.compression) << '\n';
}

int DoAnneal(const Options& o, const Settings& settings, std::ostream& out) {
  AnnealConfig config = ConfigFromOptions(o);
  if (o.partition.empty() == o.images.empty()) {
    throw UsageError("anneal needs exactly one of --images or --partition");
  }
  if (!o.images.empty()) {
    config.training_images = ExpandImages(o.images);
    const TableEvaluator evaluator = DefaultEvaluator(config);
    std::ofstream f(o.out, std::ios::binary);
    if (!f) throw IoError("cannot write " + o.out);
    HistoryWriter writer(f, config);
    const AnnealResult r =
        AnnealRun(config, evaluator, [&](const HistoryRecord& rec) { writer.Append(rec); });
    if (!f) throw IoError("write failed for " + o.out);
    if (!o.best_out.empty()) {
      WriteText(o.best_out, CommentBlock(HeaderLines("anneal", settings)) +
                                "# best step " + std::to_string(r.state.best.step) + "\n" +
                                SerializeTable(r.state.best.table));
    }
    PrintRunSummary(out, o.out, r.state);
    return kExitOk;
  }

  const DatasetPartition partition = LoadPartition(o.partition);
  const std::vector<RunOutput> runs = Orchestrate(partition, config, o.runs, o.parallelism);
  fs::create_directories(o.out);
  ordered_json summary = SettingsJson("anneal", settings);
  summary["runs"] = ordered_json::array();
  int failures = 0;
  for (const RunOutput& r : runs) {
    char name[32];
    std::snprintf(name, sizeof(name), "run_%03d.jsonl", r.run);
    ordered_json entry;
    entry["run"] = r.run;
    entry["seed"] = r.seed;
    if (r.failed) {
      ++failures;
      entry["failure"] = r.failure;
      out << "run " << r.run << " failed: " << r.failure << '\n';
    } else {
      SaveHistory(fs::path(o.out) / name, r.config, r.result.history);
      entry["history"] = name;
      entry["best_step"] = r.result.state.best.step;
      entry["best_E"] = r.result.state.best.ratios.error;
      entry["best_C"] = r.result.state.best.ratios.compression;
      PrintRunSummary(out, name, r.result.state);
    }
    summary["runs"].push_back(entry);
  }
  ordered_json ranking = ordered_json::array();
  for (const RunOutput* r : TopRuns(runs, o.runs)) ranking.push_back(r->run);
  summary["ranking"] = ranking;
  WriteText(fs::path(o.out) / "runs.json", summary.dump(2) + "\n");
  return failures == static_cast<int>(runs.size()) && !runs.empty() ? kExitDomainError : kExitOk;
}

int DoEvaluate(const Options& o, const Settings& settings, const CLI::App& sub,
               std::ostream& out) {
  if (o.partition.empty() == o.images.empty()) {
    throw UsageError("evaluate needs exactly one of --images or --partition");
  }
  const std::vector<std::string> eval_paths =
      o.images.empty() ? LoadPartition(o.partition).evaluation_set : ExpandImages(o.images);
  std::vector<CandidateTable> candidates;
  std::optional<AnnealConfig> first;
  for (const std::string& path : o.histories) {
    const History h = LoadHistory(path);
    if (!first) first = h.config;
    if (h.records.empty()) continue;
    const std::string run = fs::path(path).stem().string();
    for (const SampledTable& s : SubsampleHistory(h.records, o.samples)) {
      candidates.push_back({run, s.step, s.table, s.train});
    }
  }
  if (candidates.empty()) throw InvalidArgument("no history records to evaluate");
  // Evaluation quality and metric follow training unless given explicitly.
  const int quality = sub.count("--quality") ? o.quality : first->quality;
  const MetricId metric = sub.count("--metric") ? ParseMetric(o.metric) : first->metric;
  const std::vector<EvaluationRecord> records =
      EvaluateTables(candidates, LoadImages(eval_paths), quality, metric, o.parallelism);

  std::vector<std::string> header = HeaderLines("evaluate", settings);
  header.push_back("effective quality = " + std::to_string(quality));
  header.push_back("effective metric = " + std::string(MetricName(metric)));
  if (!o.out.empty()) {
    ordered_json j = SettingsJson("evaluate", settings);
    j["quality"] = quality;
    j["metric"] = MetricName(metric);
    j["records"] = ordered_json::array();
    for (const EvaluationRecord& r : records) j["records"].push_back(EvaluationToJson(r));
    WriteText(o.out, j.dump(2) + "\n");
  }
  std::ostringstream csv;
  WriteSummaryCsv(csv, records, header);
  if (o.csv.empty()) {
    out << csv.str();
  } else {
    WriteText(o.csv, csv.str());
    out << records.size() << " tables evaluated\n";
  }
  return kExitOk;
}

int DoSelect(const Options& o, const Settings& settings, std::ostream& out, std::ostream& err) {
  const json j = json::parse(ReadText(o.records));
  std::vector<EvaluationRecord> records;
  for (const json& r : j.at("records")) records.push_back(EvaluationFromJson(r));
  const Selection s = SelectFinal(records, o.min_improvement);
  auto describe = [](const EvaluationRecord& r) {
    return "run " + r.source_run + " step " + std::to_string(r.source_step) +
           " eval_E=" + FormatDouble(r.eval_error_ratio) +
           " eval_C=" + FormatDouble(r.eval_compression_ratio);
  };
  if (!s.qualified) {
    err << "no table improves error by at least " << FormatDouble(o.min_improvement)
        << "; lowest error: " << describe(s.record) << '\n';
    return kExitDomainError;
  }
  out << describe(s.record) << '\n';
  if (!o.out.empty()) {
    WriteText(o.out, CommentBlock(HeaderLines("select", settings)) + "# " + describe(s.record) +
                         "\n" + SerializeTable(s.record.table));
  }
  return kExitOk;
}

int DoTiming(const Options& o, const Settings& settings, std::ostream& out, std::ostream& err) {
  std::vector<NamedTable> tables;
  for (const std::string& t : o.tables) tables.push_back({t, LoadTableArg(t, err)});
  const std::vector<ImagePlane> images = LoadImages(ExpandImages(o.images));
  const std::vector<TimingRow> rows = TimingReport(tables, images, o.quality, o.repetitions);
  std::ostringstream csv;
  csv << CommentBlock(HeaderLines("timing", settings))
      << "table,mean_s,stddev_s,diff_s,pooled_sd,significant\n";
  for (const TimingRow& r : rows) {
    csv << r.name << ',' << FormatDouble(r.mean_seconds) << ',' << FormatDouble(r.stddev_seconds)
        << ',' << FormatDouble(r.mean_difference) << ',' << FormatDouble(r.pooled_stddev) << ','
        << (r.significant ? "yes" : "no") << '\n';
  }
  if (o.out.empty()) {
    out << csv.str();
  } else {
    WriteText(o.out, csv.str());
  }
  return kExitOk;
}

}  // namespace

int RunCli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  // Separate storage per subcommand: a config file may fill options of
  // subcommands that are not run.
  Options oe, osc, osl, od, op, oa, ov, ose, ot;
  CLI::App app("Quantization-table annealing for baseline JPEG", "qtanneal");
  app.set_version_flag("--version", std::string(kVersion));
  app.set_config("--config", "", "Flat key = value file with one [section] per subcommand");
  app.require_subcommand(1);

  const auto quality_range = CLI::Range(1, 100);
  auto add_table = [&](CLI::App* s, Options& o) {
    s->add_option("--table", o.table, "Table file or 'standard'")->capture_default_str();
  };
  auto add_quality = [&](CLI::App* s, Options& o) {
    s->add_option("--quality", o.quality, "Quality 1..100")->check(quality_range)->capture_default_str();
  };

  CLI::App* encode = app.add_subcommand("encode", "Encode a PGM/PPM image as grayscale JFIF");
  encode->add_option("--in", oe.in, "Input image")->required()->check(CLI::ExistingFile);
  add_table(encode, oe);
  add_quality(encode, oe);
  encode->add_option("--out", oe.out, "Output JFIF file")->required();
  encode->add_option("--recon", oe.recon, "Also write the decoded image as PGM");

  CLI::App* score = app.add_subcommand("score", "Score a test image against a reference");
  score->add_option("--metric", osc.metric, "rmse, psnr, ssim, msssim or fsim")->capture_default_str();
  score->add_option("--ref", osc.ref, "Reference image")->required()->check(CLI::ExistingFile);
  score->add_option("--test", osc.test, "Test image")->required()->check(CLI::ExistingFile);

  CLI::App* scale = app.add_subcommand("scale", "Scale a table by a quality factor");
  add_table(scale, osl);
  add_quality(scale, osl);
  scale->add_option("--out", osl.out, "Output table file (default stdout)");

  CLI::App* diff = app.add_subcommand("diff", "Per-cell change of a table against another");
  add_table(diff, od);
  diff->add_option("--against", od.against, "Reference table file or 'standard'")->capture_default_str();
  diff->add_option("--out", od.out, "Output file (default stdout)");

  CLI::App* partition = app.add_subcommand("partition", "Split images into training groups and an evaluation set");
  partition->add_option("--images", op.images, "Image files or directories")->required();
  partition->add_option("--group-size", op.group_size)->check(CLI::PositiveNumber)->capture_default_str();
  partition->add_option("--eval-count", op.eval_count)->check(CLI::NonNegativeNumber)->capture_default_str();
  partition->add_option("--seed", op.seed, "Shuffle seed")->required();
  partition->add_option("--out", op.out, "Output manifest (JSON, default stdout)");

  CLI::App* anneal = app.add_subcommand("anneal", "Anneal a quantization table");
  anneal->add_option("--images", oa.images, "Training images (single run)");
  anneal->add_option("--partition", oa.partition, "Partition manifest (one run per group)");
  anneal->add_option("--runs", oa.runs, "Runs when using --partition")->check(CLI::NonNegativeNumber)->capture_default_str();
  anneal->add_option("--parallelism", oa.parallelism)->check(CLI::PositiveNumber)->capture_default_str();
  add_quality(anneal, oa);
  anneal->add_option("--metric", oa.metric, "fsim, msssim or ssim")->capture_default_str();
  anneal->add_option("--mode", oa.mode, "compression or error")->capture_default_str();
  anneal->add_option("--steps", oa.steps)->check(CLI::NonNegativeNumber)->capture_default_str();
  anneal->add_option("--seed", oa.seed, "Master seed")->required();
  anneal->add_option("--guard-threshold", oa.guard_threshold)->check(CLI::NonNegativeNumber)->capture_default_str();
  anneal->add_option("--guard-anchor", oa.guard_anchor, "baseline or absolute")->capture_default_str();
  anneal->add_option("--formula", oa.formula, "reconstructed or printed")->capture_default_str();
  anneal->add_option("--cells", oa.cells, "Cells perturbed per step")->check(CLI::PositiveNumber)->capture_default_str();
  anneal->add_option("--out", oa.out, "History file (single run) or directory (--partition)")->required();
  anneal->add_option("--best-out", oa.best_out, "Write the best table (single run)");

  CLI::App* evaluate = app.add_subcommand("evaluate", "Evaluate subsampled history tables on held-out images");
  evaluate->add_option("--history", ov.histories, "History files")->required()->check(CLI::ExistingFile);
  evaluate->add_option("--images", ov.images, "Evaluation images");
  evaluate->add_option("--partition", ov.partition, "Use the manifest's evaluation set");
  evaluate->add_option("--samples", ov.samples, "Tables per history")->check(CLI::PositiveNumber)->capture_default_str();
  add_quality(evaluate, ov);
  evaluate->add_option("--metric", ov.metric, "Defaults to the training metric");
  evaluate->add_option("--parallelism", ov.parallelism)->check(CLI::PositiveNumber)->capture_default_str();
  evaluate->add_option("--out", ov.out, "Evaluation records (JSON)");
  evaluate->add_option("--csv", ov.csv, "Summary CSV (default stdout)");

  CLI::App* select = app.add_subcommand("select", "Pick the final table from evaluation records");
  select->add_option("--records", ose.records, "Evaluation records (JSON)")->required()->check(CLI::ExistingFile);
  select->add_option("--min-improvement", ose.min_improvement)->check(CLI::Range(0.0, 1.0))->capture_default_str();
  select->add_option("--out", ose.out, "Write the selected table");

  CLI::App* timing = app.add_subcommand("timing", "Compare encode time of tables against the standard table");
  timing->add_option("--tables", ot.tables, "Table files or 'standard'")->required();
  timing->add_option("--images", ot.images, "Images or directories")->required();
  add_quality(timing, ot);
  timing->add_option("--repetitions", ot.repetitions)->check(CLI::Range(3, 1000000))->capture_default_str();
  timing->add_option("--out", ot.out, "Output CSV (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsageError;
  }

  try {
    if (encode->parsed()) return DoEncode(oe, EffectiveSettings(*encode), out, err);
    if (score->parsed()) return DoScore(osc, out, err);
    if (scale->parsed()) return DoScale(osl, EffectiveSettings(*scale), out, err);
    if (diff->parsed()) return DoDiff(od, EffectiveSettings(*diff), out, err);
    if (partition->parsed()) return DoPartition(op, EffectiveSettings(*partition), out);
    if (anneal->parsed()) return DoAnneal(oa, EffectiveSettings(*anneal), out);
    if (evaluate->parsed()) return DoEvaluate(ov, EffectiveSettings(*evaluate), *evaluate, out);
    if (select->parsed()) return DoSelect(ose, EffectiveSettings(*select), out, err);
    if (timing->parsed()) return DoTiming(ot, EffectiveSettings(*timing), out, err);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsageError;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitDomainError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitDomainError;
  }
  return kExitUsageError;
}

}  // namespace qtanneal
