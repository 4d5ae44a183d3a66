#ifndef QTANNEAL_HISTORY_H_
#define QTANNEAL_HISTORY_H_

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "qtanneal/annealer.h"

namespace qtanneal {

// JSON-lines history: one header object, then one object per step.
//
//   {"type":"header","tool":"qtanneal","version":...,"rng":"mt19937_64",
//    "seed":...,"config":{...}}
//   {"type":"step","step":1,"table":[64 ints],"E":...,"C":...,"S":...,
//    "p":...,"accepted":...,"guard_rejected":...}
//
// Doubles are written in shortest round-trip form, so equal runs produce
// byte-identical files.

nlohmann::ordered_json ConfigToJson(const AnnealConfig& config);
AnnealConfig ConfigFromJson(const nlohmann::json& j);

nlohmann::ordered_json TableToJson(const QuantTable& table);
QuantTable TableFromJson(const nlohmann::json& j);

nlohmann::ordered_json RecordToJson(const HistoryRecord& record);
HistoryRecord RecordFromJson(const nlohmann::json& j);

// Streams a history: the header is written on construction and each
// Append writes and flushes one line.
class HistoryWriter {
 public:
  HistoryWriter(std::ostream& out, const AnnealConfig& config);
  void Append(const HistoryRecord& record);

 private:
  std::ostream& out_;
};

struct History {
  std::string version;
  std::string rng;
  AnnealConfig config;
  std::vector<HistoryRecord> records;
};

void WriteHistory(std::ostream& out, const AnnealConfig& config,
                  std::span<const HistoryRecord> records);
void SaveHistory(const std::filesystem::path& path, const AnnealConfig& config,
                 std::span<const HistoryRecord> records);

// Throws ParseError (with the line number) for malformed lines and
// FormatError when the header is missing.
History ReadHistory(std::istream& in);
History LoadHistory(const std::filesystem::path& path);

}  // namespace qtanneal

#endif  // QTANNEAL_HISTORY_H_
