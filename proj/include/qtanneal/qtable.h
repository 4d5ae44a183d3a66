#ifndef QTANNEAL_QTABLE_H_
#define QTANNEAL_QTABLE_H_

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace qtanneal {

inline constexpr int kBlockDim = 8;
inline constexpr int kBlockSize = kBlockDim * kBlockDim;

inline constexpr int kMinDivisor = 1;
inline constexpr int kMaxDivisor = 255;

// An 8x8 luminance quantization table in natural (row-major) order.
// Position (0,0) is the DC divisor. Every entry is a baseline 8-bit divisor
// in [1, 255]; constructors and setters reject anything else.
class QuantTable {
 public:
  // All-ones table.
  QuantTable();
  explicit QuantTable(const std::array<int, kBlockSize>& values);

  static QuantTable Filled(int value);

  int at(int row, int col) const { return values_[row * kBlockDim + col]; }
  int operator[](int index) const { return values_[index]; }

  void set(int row, int col, int value);
  void set(int index, int value);

  std::array<int, kBlockSize> values() const;

  bool operator==(const QuantTable& other) const = default;

 private:
  std::array<std::uint8_t, kBlockSize> values_;
};

// Signed per-cell change of a candidate against a reference table, plus the
// magnitude of each change normalized by the largest one.
struct HeatmapDiff {
  std::array<int, kBlockSize> deltas{};
  std::array<double, kBlockSize> intensities{};
};

struct ParsedTable {
  QuantTable table;
  // One entry per clamped zero divisor.
  std::vector<std::string> warnings;
};

// The libjpeg luminance table.
const QuantTable& StandardTable();

// libjpeg quality scaling: scale = 5000/q below 50, 200 - 2q otherwise;
// entries become (v * scale + 50) / 100 clamped to [1, 255].
// Throws InvalidArgument unless 1 <= quality <= 100.
QuantTable ScaleTable(const QuantTable& base, int quality);

// Reads 64 whitespace-separated unsigned integers in row-major order. Lines
// whose first non-blank character is '#' are comments. Zero entries are
// clamped to 1 and reported in `warnings`. Throws ParseError on a wrong
// count, a value above 255 or a non-numeric token.
ParsedTable ParseTable(std::string_view text);

// Eight lines of eight values; ParseTable(SerializeTable(t)).table == t.
std::string SerializeTable(const QuantTable& table);

HeatmapDiff DiffHeatmap(const QuantTable& candidate,
                        const QuantTable& reference);

// Natural-order index of the k-th coefficient in JPEG zig-zag order.
extern const std::array<int, kBlockSize> kZigzagToNatural;

}  // namespace qtanneal

#endif  // QTANNEAL_QTABLE_H_
