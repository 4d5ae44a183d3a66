#include "qtanneal/annealer.h"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>

#include "qtanneal/errors.h"

namespace qtanneal {

namespace {

std::string Lower(std::string_view s) {
  std::string out;
  for (char c : s) {
    out.push_back(c == '-' ? '_' : static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  return out;
}

// Cumulative standard-table weights; cell i owns [cum[i-1], cum[i]).
const std::array<std::uint32_t, kBlockSize>& CumulativeWeights() {
  static const std::array<std::uint32_t, kBlockSize> cum = [] {
    std::array<std::uint32_t, kBlockSize> c{};
    const QuantTable standard = StandardTable();
    std::uint32_t total = 0;
    for (int i = 0; i < kBlockSize; ++i) {
      total += standard[i];
      c[i] = total;
    }
    return c;
  }();
  return cum;
}

double Objective(const Ratios& r, AnnealMode mode) {
  return mode == AnnealMode::kMaximizeCompression ? r.compression : r.error;
}

double Secondary(const Ratios& r, AnnealMode mode) {
  return mode == AnnealMode::kMaximizeCompression ? r.error : r.compression;
}

bool Better(const Ratios& a, const Ratios& b, AnnealMode mode) {
  if (Objective(a, mode) != Objective(b, mode)) return Objective(a, mode) < Objective(b, mode);
  return Secondary(a, mode) < Secondary(b, mode);
}

}  // namespace

std::string_view ModeName(AnnealMode mode) {
  return mode == AnnealMode::kMaximizeCompression ? "compression" : "error";
}

AnnealMode ParseMode(std::string_view name) {
  const std::string s = Lower(name);
  if (s == "compression" || s == "maximize_compression") return AnnealMode::kMaximizeCompression;
  if (s == "error" || s == "minimize_error") return AnnealMode::kMinimizeError;
  throw InvalidArgument("unknown mode '" + std::string(name) + "' (expected compression or error)");
}

std::string_view FormulaName(AcceptanceFormula formula) {
  return formula == AcceptanceFormula::kReconstructed ? "reconstructed" : "printed";
}

AcceptanceFormula ParseFormula(std::string_view name) {
  const std::string s = Lower(name);
  if (s == "reconstructed") return AcceptanceFormula::kReconstructed;
  if (s == "printed") return AcceptanceFormula::kPrinted;
  throw InvalidArgument("unknown acceptance formula '" + std::string(name) + "'");
}

std::string_view AnchorName(GuardAnchor anchor) {
  return anchor == GuardAnchor::kBaseline ? "baseline" : "absolute";
}

GuardAnchor ParseAnchor(std::string_view name) {
  const std::string s = Lower(name);
  if (s == "baseline") return GuardAnchor::kBaseline;
  if (s == "absolute") return GuardAnchor::kAbsolute;
  throw InvalidArgument("unknown guard anchor '" + std::string(name) + "'");
}

void AnnealConfig::Validate() const {
  if (quality < 1 || quality > 100) throw InvalidArgument("quality must be in 1..100");
  if (max_steps < 0) throw InvalidArgument("max_steps must be non-negative");
  if (guard_threshold < 0) throw InvalidArgument("guard_threshold must be non-negative");
  if (cells_per_step < 1) throw InvalidArgument("cells_per_step must be at least 1");
  if (!(score_exponent > 0)) throw InvalidArgument("score_exponent must be positive");
  if (!(temperature_constant > 0)) throw InvalidArgument("temperature_constant must be positive");
  if (metric != MetricId::kFsim && metric != MetricId::kMsssim && metric != MetricId::kSsim) {
    throw InvalidArgument("annealing metric must be FSIM, MSSSIM or SSIM");
  }
}

QuantTable ProposeNeighbor(const QuantTable& table, Rng& rng, int cells) {
  const auto& cum = CumulativeWeights();
  QuantTable out = table;
  for (int k = 0; k < cells; ++k) {
    const auto r = static_cast<std::uint32_t>(rng.Below(cum.back()));
    const int cell = static_cast<int>(std::upper_bound(cum.begin(), cum.end(), r) - cum.begin());
    const int delta = rng.Coin() ? 1 : -1;
    out.set(cell, std::clamp(int{out[cell]} + delta, kMinDivisor, kMaxDivisor));
  }
  return out;
}

double AnnealScore(double e, double c, double exponent) {
  if (!(e > 0) || !(c > 0)) throw InvalidArgument("score needs positive ratios");
  return std::pow(e * c, exponent);
}

double Temperature(int i, double constant) { return constant / (constant + i); }

double AcceptanceProbability(double s_i, double s_star, int i, bool primary_improved,
                             const AnnealConfig& config) {
  if (!(s_i > 0) || !(s_star > 0)) throw InvalidArgument("acceptance needs positive scores");
  if (primary_improved) return 1.0;
  const double t = Temperature(i, config.temperature_constant);
  const double p = config.formula == AcceptanceFormula::kReconstructed
                       ? 1.0 - std::exp(-t * s_star / s_i)
                       : 1.0 - std::exp(s_i / (t * s_star));
  return std::clamp(p, 0.0, 1.0);
}

bool GuardCheck(double e_i, double c_i, const AnnealState& state, const AnnealConfig& config) {
  const bool compression = config.mode == AnnealMode::kMaximizeCompression;
  const double value = compression ? e_i : c_i;
  double anchor = 1.0;
  if (config.guard_anchor == GuardAnchor::kBaseline) anchor = compression ? state.e_star : state.c_star;
  return value - anchor > config.guard_threshold;
}

AnnealState InitialState(const AnnealConfig& config) {
  AnnealState state;
  state.baseline = StandardTable();
  state.rng = Rng(config.seed);
  state.best = {state.baseline, Ratios{1.0, 1.0}, 0};
  return state;
}

HistoryRecord AnnealStep(AnnealState& state, const AnnealConfig& config,
                         const TableEvaluator& evaluator) {
  HistoryRecord rec;
  rec.step = state.step + 1;
  rec.proposed = ProposeNeighbor(state.baseline, state.rng, config.cells_per_step);
  const Ratios ratios = evaluator(rec.proposed);
  rec.e = ratios.error;
  rec.c = ratios.compression;
  rec.s = AnnealScore(rec.e, rec.c, config.score_exponent);
  // Drawn every step so the stream position never depends on the outcome.
  const double u = state.rng.Uniform();
  rec.guard_rejected = GuardCheck(rec.e, rec.c, state, config);
  if (!rec.guard_rejected) {
    const bool improved = config.mode == AnnealMode::kMaximizeCompression ? rec.c < state.c_star
                                                                         : rec.e < state.e_star;
    rec.acceptance_prob = AcceptanceProbability(rec.s, state.s_star, rec.step, improved, config);
    rec.accepted = u < rec.acceptance_prob;
  }
  if (rec.accepted) {
    state.baseline = rec.proposed;
    state.e_star = rec.e;
    state.c_star = rec.c;
    state.s_star = rec.s;
    if (Better(ratios, state.best.ratios, config.mode)) state.best = {rec.proposed, ratios, rec.step};
  }
  state.step = rec.step;
  return rec;
}

AnnealResult AnnealRun(const AnnealConfig& config, const TableEvaluator& evaluator,
                       const std::function<void(const HistoryRecord&)>& on_step) {
  config.Validate();
  AnnealResult result{InitialState(config), {}};
  result.history.reserve(static_cast<std::size_t>(config.max_steps));
  for (int i = 0; i < config.max_steps; ++i) {
    HistoryRecord rec;
    try {
      rec = AnnealStep(result.state, config, evaluator);
    } catch (const std::exception& e) {
      throw Error("step " + std::to_string(result.state.step + 1) + ": " + e.what());
    }
    if (on_step) on_step(rec);
    result.history.push_back(std::move(rec));
  }
  return result;
}

}  // namespace qtanneal
