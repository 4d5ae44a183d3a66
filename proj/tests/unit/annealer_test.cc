#include "qtanneal/annealer.h"

#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>

#include "qtanneal/errors.h"

namespace qtanneal {
namespace {

// Coarser cells shrink files and raise error; a small table-dependent
// wobble keeps the landscape from being perfectly smooth.
Ratios SyntheticRatios(const QuantTable& t) {
  const QuantTable& s = StandardTable();
  double size = 0.0;
  double error = 0.0;
  std::uint64_t h = 0;
  for (int i = 0; i < kBlockSize; ++i) {
    size += static_cast<double>(s[i]) / t[i];
    error += static_cast<double>(t[i]) / s[i];
    h = Mix64(h ^ static_cast<std::uint64_t>(t[i]));
  }
  const double wobble = (static_cast<double>(h % 1000) / 1000.0 - 0.5) * 0.004;
  return {error / kBlockSize + wobble, size / kBlockSize - wobble};
}

AnnealConfig SmallConfig(std::uint64_t seed, int steps) {
  AnnealConfig c;
  c.seed = seed;
  c.max_steps = steps;
  return c;
}

TEST(AnnealScoreTest, Examples) {
  EXPECT_DOUBLE_EQ(AnnealScore(1.0, 1.0, 20), 1.0);
  EXPECT_NEAR(AnnealScore(0.99, 1.01, 20), 0.99800, 5e-6);
  EXPECT_NEAR(AnnealScore(0.9, 1.0, 20), 0.12158, 5e-6);
  EXPECT_THROW(AnnealScore(0.0, 1.0, 20), InvalidArgument);
  EXPECT_THROW(AnnealScore(1.0, -1.0, 20), InvalidArgument);
}

TEST(TemperatureTest, Examples) {
  EXPECT_DOUBLE_EQ(Temperature(0, 200), 1.0);
  EXPECT_DOUBLE_EQ(Temperature(200, 200), 0.5);
  EXPECT_NEAR(Temperature(2000, 200), 0.090909, 1e-6);
}

TEST(AcceptanceProbabilityTest, PrimaryImprovementAlwaysAccepted) {
  const AnnealConfig c;
  EXPECT_EQ(AcceptanceProbability(5.0, 1.0, 100, true, c), 1.0);
}

TEST(AcceptanceProbabilityTest, AnchorsAtStep2000) {
  const AnnealConfig c;
  // 1% less error, 1% larger files.
  const double p1 = AcceptanceProbability(AnnealScore(0.99, 1.01, 20), 1.0, 2000, false, c);
  EXPECT_NEAR(p1, 0.0871, 5e-4);
  // 10% less error, 1% larger files.
  const double p2 = AcceptanceProbability(AnnealScore(0.90, 1.01, 20), 1.0, 2000, false, c);
  EXPECT_NEAR(p2, 0.458, 1e-3);
}

TEST(AcceptanceProbabilityTest, SelfMoveUsesTemperatureOnly) {
  const AnnealConfig c;
  EXPECT_NEAR(AcceptanceProbability(1.0, 1.0, 200, false, c), 1.0 - std::exp(-0.5), 1e-15);
}

TEST(AcceptanceProbabilityTest, PrintedFormulaNeverAccepts) {
  AnnealConfig c;
  c.formula = AcceptanceFormula::kPrinted;
  for (double s : {0.01, 0.5, 1.0, 3.0}) {
    EXPECT_EQ(AcceptanceProbability(s, 1.0, 10, false, c), 0.0);
  }
  EXPECT_EQ(AcceptanceProbability(3.0, 1.0, 10, true, c), 1.0);
}

TEST(AcceptanceProbabilityTest, MonotoneInStepAndScore) {
  const AnnealConfig c;
  for (double ratio : {0.2, 0.9, 1.0, 1.5, 4.0}) {
    double prev = 1.0;
    for (int i = 0; i <= 5000; i += 50) {
      const double p = AcceptanceProbability(ratio, 1.0, i, false, c);
      ASSERT_LE(p, prev);
      ASSERT_GE(p, 0.0);
      prev = p;
    }
  }
  for (int i : {1, 100, 2000}) {
    double prev = 1.0;
    for (double s = 0.05; s < 5.0; s += 0.05) {
      const double p = AcceptanceProbability(s, 1.0, i, false, c);
      ASSERT_LE(p, prev);
      prev = p;
    }
  }
}

TEST(AcceptanceProbabilityTest, WorseOnBothIsNeverCertain) {
  AnnealConfig c;
  c.guard_threshold = 0.0;
  for (int i : {1, 10, 1000}) {
    EXPECT_LT(AcceptanceProbability(AnnealScore(1.01, 1.01, 20), 1.0, i, false, c), 1.0);
  }
}

TEST(AcceptanceProbabilityTest, RejectsNonPositiveScores) {
  const AnnealConfig c;
  EXPECT_THROW(AcceptanceProbability(0.0, 1.0, 1, false, c), InvalidArgument);
  EXPECT_THROW(AcceptanceProbability(1.0, -2.0, 1, false, c), InvalidArgument);
}

TEST(GuardCheckTest, CompressionModeGuardsError) {
  AnnealConfig c;
  AnnealState s = InitialState(c);
  s.e_star = 1.02;
  EXPECT_FALSE(GuardCheck(1.025, 0.5, s, c));
  EXPECT_TRUE(GuardCheck(1.04, 0.5, s, c));
  c.guard_anchor = GuardAnchor::kAbsolute;
  EXPECT_TRUE(GuardCheck(1.025, 0.5, s, c));
  EXPECT_FALSE(GuardCheck(1.005, 0.5, s, c));
}

TEST(GuardCheckTest, ErrorModeGuardsCompression) {
  AnnealConfig c;
  c.mode = AnnealMode::kMinimizeError;
  const AnnealState s = InitialState(c);
  EXPECT_TRUE(GuardCheck(0.5, 1.011, s, c));
  EXPECT_FALSE(GuardCheck(2.0, 1.009, s, c));
}

TEST(ProposeNeighborTest, ChangesAtMostCellsWithUnitSteps) {
  Rng rng(3);
  const QuantTable base = StandardTable();
  for (int n = 0; n < 2000; ++n) {
    const QuantTable next = ProposeNeighbor(base, rng, 10);
    int changed = 0;
    int l1 = 0;
    for (int i = 0; i < kBlockSize; ++i) {
      changed += next[i] != base[i];
      l1 += std::abs(next[i] - base[i]);
    }
    ASSERT_LE(changed, 10);
    ASSERT_LE(l1, 10);
  }
}

TEST(ProposeNeighborTest, ClampsAtBounds) {
  Rng rng(4);
  QuantTable ones = QuantTable::Filled(1);
  QuantTable maxed = QuantTable::Filled(255);
  for (int n = 0; n < 500; ++n) {
    ones = ProposeNeighbor(ones, rng, 10);
    maxed = ProposeNeighbor(maxed, rng, 10);
    for (int i = 0; i < kBlockSize; ++i) {
      ASSERT_GE(ones[i], 1);
      ASSERT_LE(maxed[i], 255);
    }
  }
}

TEST(ProposeNeighborTest, SelectionProportionalToStandardValues) {
  // One cell per proposal on a table far from the bounds, so the changed
  // cell identifies the draw. 10^6 draws.
  Rng rng(5);
  const QuantTable base = QuantTable::Filled(128);
  std::array<int, kBlockSize> hits{};
  int up = 0;
  constexpr int kDraws = 1000000;
  for (int n = 0; n < kDraws; ++n) {
    const QuantTable next = ProposeNeighbor(base, rng, 1);
    for (int i = 0; i < kBlockSize; ++i) {
      if (next[i] != base[i]) {
        ++hits[i];
        up += next[i] > base[i];
        break;
      }
    }
  }
  const double ratio = static_cast<double>(hits[63]) / hits[0];
  EXPECT_NEAR(ratio, 99.0 / 16.0, 0.02 * 99.0 / 16.0);
  EXPECT_NEAR(static_cast<double>(up) / kDraws, 0.5, 0.002);
  // Cell (6,5) has the largest weight, 121 / 3688.
  EXPECT_NEAR(static_cast<double>(hits[53]) / kDraws, 121.0 / 3688.0, 0.001);
}

TEST(AnnealRunTest, ZeroStepsReturnsInitialState) {
  const AnnealResult r = AnnealRun(SmallConfig(1, 0), SyntheticRatios);
  EXPECT_TRUE(r.history.empty());
  EXPECT_EQ(r.state.baseline, StandardTable());
  EXPECT_EQ(r.state.s_star, 1.0);
  EXPECT_EQ(r.state.step, 0);
}

TEST(AnnealRunTest, EqualSeedsGiveIdenticalHistories) {
  const AnnealResult a = AnnealRun(SmallConfig(42, 300), SyntheticRatios);
  const AnnealResult b = AnnealRun(SmallConfig(42, 300), SyntheticRatios);
  EXPECT_EQ(a.history, b.history);
  const AnnealResult c = AnnealRun(SmallConfig(43, 300), SyntheticRatios);
  EXPECT_NE(a.history, c.history);
}

TEST(AnnealRunTest, RecordsAreConsistentAndReplayReproducesBaseline) {
  const AnnealConfig config = SmallConfig(7, 1000);
  const AnnealResult r = AnnealRun(config, SyntheticRatios);
  ASSERT_EQ(r.history.size(), 1000u);
  QuantTable baseline = StandardTable();
  double e_star = 1.0;
  double c_star = 1.0;
  double s_star = 1.0;
  double best = 1.0;
  for (std::size_t i = 0; i < r.history.size(); ++i) {
    const HistoryRecord& h = r.history[i];
    ASSERT_EQ(h.step, static_cast<int>(i) + 1);
    ASSERT_GE(h.acceptance_prob, 0.0);
    ASSERT_LE(h.acceptance_prob, 1.0);
    ASSERT_FALSE(h.accepted && h.guard_rejected);
    ASSERT_DOUBLE_EQ(h.s, AnnealScore(h.e, h.c, 20));
    if (!h.guard_rejected && h.c < c_star) {
      ASSERT_EQ(h.acceptance_prob, 1.0);
      ASSERT_TRUE(h.accepted);
    }
    if (h.accepted) {
      ASSERT_LE(h.e - e_star, config.guard_threshold);
      baseline = h.proposed;
      e_star = h.e;
      c_star = h.c;
      s_star = h.s;
      best = std::min(best, h.c);
    }
  }
  EXPECT_EQ(baseline, r.state.baseline);
  EXPECT_EQ(e_star, r.state.e_star);
  EXPECT_EQ(s_star, r.state.s_star);
  EXPECT_EQ(best, r.state.best.ratios.compression);
  EXPECT_LT(best, 1.0);
}

TEST(AnnealRunTest, BestByObjectiveIsMonotone) {
  const AnnealConfig config = SmallConfig(8, 400);
  AnnealState state = InitialState(config);
  double prev = state.best.ratios.compression;
  for (int i = 0; i < config.max_steps; ++i) {
    AnnealStep(state, config, SyntheticRatios);
    ASSERT_LE(state.best.ratios.compression, prev);
    ASSERT_EQ(state.s_star, AnnealScore(state.e_star, state.c_star, 20));
    prev = state.best.ratios.compression;
  }
}

TEST(AnnealRunTest, ErrorModeOptimizesError) {
  AnnealConfig config = SmallConfig(9, 600);
  config.mode = AnnealMode::kMinimizeError;
  const AnnealResult r = AnnealRun(config, SyntheticRatios);
  EXPECT_LT(r.state.best.ratios.error, 1.0);
  for (const HistoryRecord& h : r.history) {
    if (h.accepted) ASSERT_FALSE(h.guard_rejected);
  }
}

TEST(AnnealRunTest, EvaluatorFailureCarriesStep) {
  int calls = 0;
  const TableEvaluator failing = [&](const QuantTable& t) {
    if (++calls == 5) throw std::runtime_error("disk on fire");
    return SyntheticRatios(t);
  };
  try {
    AnnealRun(SmallConfig(1, 10), failing);
    FAIL() << "expected an exception";
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("step 5"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("disk on fire"), std::string::npos);
  }
}

TEST(AnnealConfigTest, ValidateRejectsBadFields) {
  AnnealConfig c;
  c.cells_per_step = 0;
  EXPECT_THROW(c.Validate(), InvalidArgument);
  c = AnnealConfig{};
  c.guard_threshold = -0.1;
  EXPECT_THROW(c.Validate(), InvalidArgument);
  c = AnnealConfig{};
  c.quality = 0;
  EXPECT_THROW(c.Validate(), InvalidArgument);
  c = AnnealConfig{};
  c.metric = MetricId::kPsnr;
  EXPECT_THROW(c.Validate(), InvalidArgument);
}

TEST(NamesTest, RoundTrip) {
  EXPECT_EQ(ParseMode(ModeName(AnnealMode::kMinimizeError)), AnnealMode::kMinimizeError);
  EXPECT_EQ(ParseMode("maximize_compression"), AnnealMode::kMaximizeCompression);
  EXPECT_EQ(ParseFormula("printed"), AcceptanceFormula::kPrinted);
  EXPECT_EQ(ParseAnchor("absolute"), GuardAnchor::kAbsolute);
  EXPECT_THROW(ParseMode("speed"), InvalidArgument);
}

}  // namespace
}  // namespace qtanneal
