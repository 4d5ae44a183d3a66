#ifndef QTANNEAL_ANNEALER_H_
#define QTANNEAL_ANNEALER_H_

#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "qtanneal/iqa.h"
#include "qtanneal/qtable.h"
#include "qtanneal/rng.h"

namespace qtanneal {

enum class AnnealMode { kMaximizeCompression, kMinimizeError };

// kPrinted is the expression 1 - exp(S_i / (T(i) S*)) taken literally; it
// is never positive, so every non-improving move is rejected. Kept for
// comparison runs only.
enum class AcceptanceFormula { kReconstructed, kPrinted };

// Where the one-percent guard measures from: the current baseline ratio,
// or the standard table (ratio 1.0).
enum class GuardAnchor { kBaseline, kAbsolute };

std::string_view ModeName(AnnealMode mode);
AnnealMode ParseMode(std::string_view name);
std::string_view FormulaName(AcceptanceFormula formula);
AcceptanceFormula ParseFormula(std::string_view name);
std::string_view AnchorName(GuardAnchor anchor);
GuardAnchor ParseAnchor(std::string_view name);

struct AnnealConfig {
  AnnealMode mode = AnnealMode::kMaximizeCompression;
  int quality = 75;
  MetricId metric = MetricId::kFsim;
  std::vector<std::string> training_images;
  int max_steps = 1000;
  std::uint64_t seed = 0;
  double guard_threshold = 0.01;
  double score_exponent = 20.0;
  double temperature_constant = 200.0;
  int cells_per_step = 10;
  AcceptanceFormula formula = AcceptanceFormula::kReconstructed;
  GuardAnchor guard_anchor = GuardAnchor::kBaseline;

  // Throws InvalidArgument on out-of-range fields.
  void Validate() const;
};

struct Ratios {
  double error = 1.0;
  double compression = 1.0;
};

// Maps a base (unscaled) table to its error and compression ratios against
// the standard table. Must be deterministic.
using TableEvaluator = std::function<Ratios(const QuantTable&)>;

struct ScoredTable {
  QuantTable table;
  Ratios ratios;
  int step = 0;
};

struct AnnealState {
  QuantTable baseline;
  double e_star = 1.0;
  double c_star = 1.0;
  double s_star = 1.0;
  int step = 0;
  Rng rng{0};
  ScoredTable best;
};

struct HistoryRecord {
  int step = 0;
  QuantTable proposed;
  double e = 0.0;
  double c = 0.0;
  double s = 0.0;
  double acceptance_prob = 0.0;
  bool accepted = false;
  bool guard_rejected = false;

  bool operator==(const HistoryRecord&) const = default;
};

// Draws `cells` positions with replacement, weighted by the standard
// table's values, and moves each by +1 or -1 (clamped to [1, 255]).
QuantTable ProposeNeighbor(const QuantTable& table, Rng& rng, int cells = 10);

// (E * C)^exponent. Throws InvalidArgument for non-positive ratios.
double AnnealScore(double e, double c, double exponent);

// constant / (constant + i).
double Temperature(int i, double constant);

// 1 when the primary metric improved, otherwise
// clamp(1 - exp(-T(i) * S* / S_i), 0, 1). Throws InvalidArgument for
// non-positive scores.
double AcceptanceProbability(double s_i, double s_star, int i, bool primary_improved,
                             const AnnealConfig& config);

// True when the candidate worsens the secondary metric by more than the
// guard threshold.
bool GuardCheck(double e_i, double c_i, const AnnealState& state, const AnnealConfig& config);

// Baseline = standard table with all ratios 1.0 and the generator seeded
// from config.seed.
AnnealState InitialState(const AnnealConfig& config);

// Runs one step (state.step + 1) and returns its record.
HistoryRecord AnnealStep(AnnealState& state, const AnnealConfig& config,
                         const TableEvaluator& evaluator);

struct AnnealResult {
  AnnealState state;
  std::vector<HistoryRecord> history;
};

// Runs config.max_steps steps. `on_step`, when set, sees every record as
// it is produced. Evaluator exceptions are rethrown as Error with the step
// number prepended.
AnnealResult AnnealRun(const AnnealConfig& config, const TableEvaluator& evaluator,
                       const std::function<void(const HistoryRecord&)>& on_step = {});

}  // namespace qtanneal

#endif  // QTANNEAL_ANNEALER_H_
