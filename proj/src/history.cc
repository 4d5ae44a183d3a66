#include "qtanneal/history.h"

#include <fstream>
#include <istream>
#include <ostream>

#include "qtanneal/errors.h"
#include "qtanneal/version.h"

namespace qtanneal {

using nlohmann::json;
using nlohmann::ordered_json;

ordered_json ConfigToJson(const AnnealConfig& config) {
  ordered_json j;
  j["mode"] = ModeName(config.mode);
  j["quality"] = config.quality;
  j["metric"] = MetricName(config.metric);
  j["training_images"] = config.training_images;
  j["max_steps"] = config.max_steps;
  j["seed"] = config.seed;
  j["guard_threshold"] = config.guard_threshold;
  j["guard_anchor"] = AnchorName(config.guard_anchor);
  j["score_exponent"] = config.score_exponent;
  j["temperature_constant"] = config.temperature_constant;
  j["cells_per_step"] = config.cells_per_step;
  j["acceptance_formula"] = FormulaName(config.formula);
  return j;
}

AnnealConfig ConfigFromJson(const json& j) {
  AnnealConfig c;
  c.mode = ParseMode(j.at("mode").get<std::string>());
  c.quality = j.at("quality").get<int>();
  c.metric = ParseMetric(j.at("metric").get<std::string>());
  c.training_images = j.at("training_images").get<std::vector<std::string>>();
  c.max_steps = j.at("max_steps").get<int>();
  c.seed = j.at("seed").get<std::uint64_t>();
  c.guard_threshold = j.at("guard_threshold").get<double>();
  c.guard_anchor = ParseAnchor(j.at("guard_anchor").get<std::string>());
  c.score_exponent = j.at("score_exponent").get<double>();
  c.temperature_constant = j.at("temperature_constant").get<double>();
  c.cells_per_step = j.at("cells_per_step").get<int>();
  c.formula = ParseFormula(j.at("acceptance_formula").get<std::string>());
  return c;
}

ordered_json TableToJson(const QuantTable& table) {
  ordered_json a = ordered_json::array();
  for (int i = 0; i < kBlockSize; ++i) a.push_back(int{table[i]});
  return a;
}

QuantTable TableFromJson(const json& j) {
  if (!j.is_array() || j.size() != kBlockSize) throw FormatError("table must be 64 integers");
  std::array<int, kBlockSize> v;
  for (int i = 0; i < kBlockSize; ++i) v[i] = j[i].get<int>();
  return QuantTable(v);
}

ordered_json RecordToJson(const HistoryRecord& r) {
  ordered_json j;
  j["type"] = "step";
  j["step"] = r.step;
  j["table"] = TableToJson(r.proposed);
  j["E"] = r.e;
  j["C"] = r.c;
  j["S"] = r.s;
  j["p"] = r.acceptance_prob;
  j["accepted"] = r.accepted;
  j["guard_rejected"] = r.guard_rejected;
  return j;
}

HistoryRecord RecordFromJson(const json& j) {
  HistoryRecord r;
  r.step = j.at("step").get<int>();
  r.proposed = TableFromJson(j.at("table"));
  r.e = j.at("E").get<double>();
  r.c = j.at("C").get<double>();
  r.s = j.at("S").get<double>();
  r.acceptance_prob = j.at("p").get<double>();
  r.accepted = j.at("accepted").get<bool>();
  r.guard_rejected = j.at("guard_rejected").get<bool>();
  return r;
}

HistoryWriter::HistoryWriter(std::ostream& out, const AnnealConfig& config) : out_(out) {
  ordered_json header;
  header["type"] = "header";
  header["tool"] = "qtanneal";
  header["version"] = kVersion;
  header["rng"] = Rng::kAlgorithm;
  header["seed"] = config.seed;
  header["config"] = ConfigToJson(config);
  out_ << header.dump() << '\n';
  out_.flush();
}

void HistoryWriter::Append(const HistoryRecord& record) {
  out_ << RecordToJson(record).dump() << '\n';
  out_.flush();
}

void WriteHistory(std::ostream& out, const AnnealConfig& config,
                  std::span<const HistoryRecord> records) {
  HistoryWriter writer(out, config);
  for (const HistoryRecord& r : records) writer.Append(r);
}

void SaveHistory(const std::filesystem::path& path, const AnnealConfig& config,
                 std::span<const HistoryRecord> records) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  WriteHistory(out, config, records);
  if (!out) throw IoError("write failed for " + path.string());
}

History ReadHistory(std::istream& in) {
  History h;
  bool have_header = false;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ParseError(e.what(), line_no, static_cast<int>(e.byte));
    }
    try {
      const std::string type = j.at("type").get<std::string>();
      if (type == "header") {
        h.version = j.at("version").get<std::string>();
        h.rng = j.at("rng").get<std::string>();
        h.config = ConfigFromJson(j.at("config"));
        have_header = true;
      } else if (type == "step") {
        if (!have_header) throw FormatError("history record before header");
        h.records.push_back(RecordFromJson(j));
      }
    } catch (const json::exception& e) {
      throw ParseError(e.what(), line_no, 1);
    }
  }
  if (!have_header) throw FormatError("history has no header record");
  return h;
}

History LoadHistory(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return ReadHistory(in);
}

}  // namespace qtanneal
