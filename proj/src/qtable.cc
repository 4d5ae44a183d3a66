#include "qtanneal/qtable.h"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <sstream>

#include "qtanneal/errors.h"

namespace qtanneal {

namespace {

void CheckDivisor(int value) {
  if (value < kMinDivisor || value > kMaxDivisor) {
    throw InvalidArgument("quantization divisor " + std::to_string(value) +
                          " outside [1, 255]");
  }
}

}  // namespace

const std::array<int, kBlockSize> kZigzagToNatural = {
    0,  1,  8,  16, 9,  2,  3,  10, 17, 24, 32, 25, 18, 11, 4,  5,
    12, 19, 26, 33, 40, 48, 41, 34, 27, 20, 13, 6,  7,  14, 21, 28,
    35, 42, 49, 56, 57, 50, 43, 36, 29, 22, 15, 23, 30, 37, 44, 51,
    58, 59, 52, 45, 38, 31, 39, 46, 53, 60, 61, 54, 47, 55, 62, 63};

QuantTable::QuantTable() { values_.fill(1); }

QuantTable::QuantTable(const std::array<int, kBlockSize>& values) {
  for (int i = 0; i < kBlockSize; ++i) set(i, values[i]);
}

QuantTable QuantTable::Filled(int value) {
  CheckDivisor(value);
  QuantTable t;
  t.values_.fill(static_cast<std::uint8_t>(value));
  return t;
}

void QuantTable::set(int row, int col, int value) {
  set(row * kBlockDim + col, value);
}

void QuantTable::set(int index, int value) {
  CheckDivisor(value);
  values_[index] = static_cast<std::uint8_t>(value);
}

std::array<int, kBlockSize> QuantTable::values() const {
  std::array<int, kBlockSize> out;
  std::copy(values_.begin(), values_.end(), out.begin());
  return out;
}

const QuantTable& StandardTable() {
  static const QuantTable kStandard({
      16, 11, 10, 16, 24,  40,  51,  61,   //
      12, 12, 14, 19, 26,  58,  60,  55,   //
      14, 13, 16, 24, 40,  57,  69,  56,   //
      14, 17, 22, 29, 51,  87,  80,  62,   //
      18, 22, 37, 56, 68,  109, 103, 77,   //
      24, 35, 55, 64, 81,  104, 113, 92,   //
      49, 64, 78, 87, 103, 121, 120, 101,  //
      72, 92, 95, 98, 112, 100, 103, 99,
  });
  return kStandard;
}

QuantTable ScaleTable(const QuantTable& base, int quality) {
  if (quality < 1 || quality > 100) {
    throw InvalidArgument("quality " + std::to_string(quality) +
                          " outside [1, 100]");
  }
  const long scale = quality < 50 ? 5000 / quality : 200 - 2 * quality;
  QuantTable out;
  for (int i = 0; i < kBlockSize; ++i) {
    const long v = (base[i] * scale + 50) / 100;
    out.set(i, static_cast<int>(std::clamp<long>(v, kMinDivisor, kMaxDivisor)));
  }
  return out;
}

ParsedTable ParseTable(std::string_view text) {
  ParsedTable parsed;
  int count = 0;
  int line_no = 0;
  int last_col = 0;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    const std::size_t first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;

    std::size_t i = first;
    while (i < line.size()) {
      if (std::isspace(static_cast<unsigned char>(line[i]))) {
        ++i;
        continue;
      }
      const std::size_t start = i;
      while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
      const std::string token = line.substr(start, i - start);
      const int col = static_cast<int>(start) + 1;
      last_col = col;
      if (!std::all_of(token.begin(), token.end(), [](char c) {
            return std::isdigit(static_cast<unsigned char>(c));
          })) {
        throw ParseError("non-numeric token '" + token + "'", line_no, col);
      }
      if (count == kBlockSize) throw ParseError("more than 64 values", line_no, col);
      if (token.size() > 3 || std::stoi(token) > kMaxDivisor) {
        throw ParseError("value " + token + " exceeds 255", line_no, col);
      }
      int value = std::stoi(token);
      if (value == 0) {
        parsed.warnings.push_back("line " + std::to_string(line_no) + ", column " +
                                  std::to_string(col) + ": divisor 0 clamped to 1");
        value = 1;
      }
      parsed.table.set(count++, value);
    }
  }
  if (count != kBlockSize) {
    throw ParseError("expected 64 values, found " + std::to_string(count),
                     std::max(line_no, 1), last_col + 1);
  }
  return parsed;
}

std::string SerializeTable(const QuantTable& table) {
  std::ostringstream out;
  for (int r = 0; r < kBlockDim; ++r) {
    for (int c = 0; c < kBlockDim; ++c) {
      if (c > 0) out << ' ';
      const int v = table.at(r, c);
      if (v < 100) out << ' ';
      if (v < 10) out << ' ';
      out << v;
    }
    out << '\n';
  }
  return out.str();
}

HeatmapDiff DiffHeatmap(const QuantTable& candidate,
                        const QuantTable& reference) {
  HeatmapDiff diff;
  int max_abs = 0;
  for (int i = 0; i < kBlockSize; ++i) {
    diff.deltas[i] = candidate[i] - reference[i];
    max_abs = std::max(max_abs, std::abs(diff.deltas[i]));
  }
  if (max_abs > 0) {
    for (int i = 0; i < kBlockSize; ++i) {
      diff.intensities[i] = static_cast<double>(std::abs(diff.deltas[i])) / max_abs;
    }
  }
  return diff;
}

}  // namespace qtanneal
