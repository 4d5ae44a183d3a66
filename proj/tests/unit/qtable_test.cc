#include "qtanneal/qtable.h"

#include <gtest/gtest.h>

#include <set>
#include <string>

#include "qtanneal/errors.h"

namespace qtanneal {
namespace {

TEST(StandardTableTest, MatchesLibjpegLuminanceTable) {
  const QuantTable& t = StandardTable();
  EXPECT_EQ(t.at(0, 0), 16);
  EXPECT_EQ(t.at(0, 7), 61);
  EXPECT_EQ(t.at(4, 5), 109);
  EXPECT_EQ(t.at(6, 5), 121);
  EXPECT_EQ(t.at(7, 7), 99);
  int sum = 0;
  for (int v : t.values()) sum += v;
  EXPECT_EQ(sum, 3688);
}

TEST(QuantTableTest, RejectsOutOfRangeDivisors) {
  QuantTable t;
  EXPECT_THROW(t.set(0, 0), InvalidArgument);
  EXPECT_THROW(t.set(3, 256), InvalidArgument);
  EXPECT_THROW(QuantTable::Filled(0), InvalidArgument);
  std::array<int, kBlockSize> v;
  v.fill(7);
  v[10] = -1;
  EXPECT_THROW(QuantTable{v}, InvalidArgument);
}

TEST(ScaleTableTest, QualityFiftyIsIdentity) {
  EXPECT_EQ(ScaleTable(StandardTable(), 50), StandardTable());
}

TEST(ScaleTableTest, QualityHundredIsAllOnes) {
  EXPECT_EQ(ScaleTable(StandardTable(), 100), QuantTable::Filled(1));
}

TEST(ScaleTableTest, QualityOneSaturatesAt255) {
  EXPECT_EQ(ScaleTable(StandardTable(), 1), QuantTable::Filled(255));
}

TEST(ScaleTableTest, QualityNinetyFive) {
  // scale = 10: (v * 10 + 50) / 100.
  const QuantTable expected({
      2, 1, 1, 2, 2, 4, 5, 6,     //
      1, 1, 1, 2, 3, 6, 6, 6,     //
      1, 1, 2, 2, 4, 6, 7, 6,     //
      1, 2, 2, 3, 5, 9, 8, 6,     //
      2, 2, 4, 6, 7, 11, 10, 8,   //
      2, 4, 6, 6, 8, 10, 11, 9,   //
      5, 6, 8, 9, 10, 12, 12, 10,  //
      7, 9, 10, 10, 11, 10, 10, 10,
  });
  EXPECT_EQ(ScaleTable(StandardTable(), 95), expected);
}

TEST(ScaleTableTest, LowQualityUsesReciprocalScale) {
  // q = 10: scale 500, so 16 -> 80 and 99 -> 255 (495 clamped).
  const QuantTable t = ScaleTable(StandardTable(), 10);
  EXPECT_EQ(t.at(0, 0), 80);
  EXPECT_EQ(t.at(0, 2), 50);
  EXPECT_EQ(t.at(7, 7), 255);
}

TEST(ScaleTableTest, RejectsQualityOutsideRange) {
  EXPECT_THROW(ScaleTable(StandardTable(), 0), InvalidArgument);
  EXPECT_THROW(ScaleTable(StandardTable(), 101), InvalidArgument);
}

TEST(ParseTableTest, RoundTripsSerializedTable) {
  const QuantTable t = ScaleTable(StandardTable(), 30);
  const ParsedTable parsed = ParseTable(SerializeTable(t));
  EXPECT_EQ(parsed.table, t);
  EXPECT_TRUE(parsed.warnings.empty());
}

TEST(ParseTableTest, SkipsCommentLines) {
  const std::string text = "# header\n  # indented comment\n" + SerializeTable(StandardTable());
  EXPECT_EQ(ParseTable(text).table, StandardTable());
}

TEST(ParseTableTest, AcceptsArbitraryWhitespaceLayout) {
  std::string text;
  for (int i = 0; i < kBlockSize; ++i) text += std::to_string(i + 1) + (i % 5 == 4 ? "\n" : "\t ");
  const QuantTable t = ParseTable(text).table;
  for (int i = 0; i < kBlockSize; ++i) EXPECT_EQ(t[i], i + 1);
}

TEST(ParseTableTest, ClampsZeroWithWarning) {
  std::string text = "0";
  for (int i = 1; i < kBlockSize; ++i) text += " 5";
  const ParsedTable parsed = ParseTable(text);
  EXPECT_EQ(parsed.table[0], 1);
  ASSERT_EQ(parsed.warnings.size(), 1u);
  EXPECT_NE(parsed.warnings[0].find("line 1, column 1"), std::string::npos);
}

TEST(ParseTableTest, ReportsLineAndColumnOfBadToken) {
  std::string text = SerializeTable(StandardTable());
  text.replace(text.find('\n') + 1 + 4, 3, " x2");
  try {
    ParseTable(text);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2);
    EXPECT_EQ(e.column(), 6);
  }
}

TEST(ParseTableTest, RejectsValueAbove255) {
  std::string text = "256";
  for (int i = 1; i < kBlockSize; ++i) text += " 5";
  EXPECT_THROW(ParseTable(text), ParseError);
}

TEST(ParseTableTest, RejectsWrongCount) {
  std::string text;
  for (int i = 0; i < 63; ++i) text += "5 ";
  EXPECT_THROW(ParseTable(text), ParseError);
  EXPECT_THROW(ParseTable(text + "5 5"), ParseError);
  EXPECT_THROW(ParseTable(""), ParseError);
}

TEST(SerializeTableTest, EightAlignedRows) {
  const std::string s = SerializeTable(StandardTable());
  EXPECT_EQ(s.substr(0, s.find('\n')), " 16  11  10  16  24  40  51  61");
  EXPECT_EQ(std::count(s.begin(), s.end(), '\n'), 8);
}

TEST(DiffHeatmapTest, SignedDeltasAndNormalizedIntensity) {
  QuantTable candidate = StandardTable();
  candidate.set(0, 0, 8);
  candidate.set(7, 7, 103);
  const HeatmapDiff d = DiffHeatmap(candidate, StandardTable());
  EXPECT_EQ(d.deltas[0], -8);
  EXPECT_EQ(d.deltas[63], 4);
  EXPECT_DOUBLE_EQ(d.intensities[0], 1.0);
  EXPECT_DOUBLE_EQ(d.intensities[63], 0.5);
  EXPECT_DOUBLE_EQ(d.intensities[1], 0.0);
}

TEST(DiffHeatmapTest, IdenticalTablesGiveZeros) {
  const HeatmapDiff d = DiffHeatmap(StandardTable(), StandardTable());
  for (int i = 0; i < kBlockSize; ++i) {
    EXPECT_EQ(d.deltas[i], 0);
    EXPECT_EQ(d.intensities[i], 0.0);
  }
}

TEST(ZigzagTest, IsAPermutationEndingAtLastCell) {
  std::set<int> seen(kZigzagToNatural.begin(), kZigzagToNatural.end());
  EXPECT_EQ(seen.size(), 64u);
  EXPECT_EQ(kZigzagToNatural[0], 0);
  EXPECT_EQ(kZigzagToNatural[1], 1);
  EXPECT_EQ(kZigzagToNatural[2], 8);
  EXPECT_EQ(kZigzagToNatural[63], 63);
}

}  // namespace
}  // namespace qtanneal
