#ifndef QTANNEAL_HARNESS_H_
#define QTANNEAL_HARNESS_H_

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "qtanneal/annealer.h"
#include "qtanneal/image.h"
#include "qtanneal/iqa.h"
#include "qtanneal/qtable.h"

namespace qtanneal {

struct DatasetPartition {
  std::vector<std::vector<std::string>> training_groups;
  std::vector<std::string> evaluation_set;
  std::uint64_t seed = 0;
};

// Shuffles `images` with a seeded Fisher-Yates pass, takes the first
// eval_count as the evaluation set and chunks the rest into groups of
// group_size, dropping any remainder. Throws InvalidArgument when fewer
// than eval_count + group_size images are given.
DatasetPartition Partition(std::vector<std::string> images, int group_size, int eval_count,
                           std::uint64_t seed);

nlohmann::ordered_json PartitionToJson(const DatasetPartition& partition);
DatasetPartition PartitionFromJson(const nlohmann::json& j);

// Builds the evaluator for one run from its config (training_images filled
// in). The default loads the images and scores against the standard table.
using EvaluatorFactory = std::function<TableEvaluator(const AnnealConfig&)>;
TableEvaluator DefaultEvaluator(const AnnealConfig& config);

struct RunOutput {
  int run = 0;
  std::uint64_t seed = 0;
  AnnealConfig config;
  bool failed = false;
  std::string failure;
  AnnealResult result;
};

// Runs run_count annealing processes, run k on training group k with seed
// DeriveSeed(template.seed, k), on up to `parallelism` threads. A run that
// throws is reported with failed = true and the others continue. Output is
// indexed by run and does not depend on parallelism.
std::vector<RunOutput> Orchestrate(const DatasetPartition& partition,
                                   const AnnealConfig& config_template, int run_count,
                                   int parallelism,
                                   const EvaluatorFactory& factory = DefaultEvaluator);

// Runs with the lowest best-so-far training compression (error mode: error),
// ties broken by the other ratio, then by run index. Failed runs are skipped.
std::vector<const RunOutput*> TopRuns(std::span<const RunOutput> runs, int count);

struct SampledTable {
  int step = 0;
  QuantTable table;
  // Training ratios of that baseline.
  Ratios train;
};

// Replays accepted records and returns the baseline after steps
// floor(j * N / count), j = 1..min(count, N), N = history length. Always
// ends at the final step. Throws InvalidArgument for an empty history or
// count < 1.
std::vector<SampledTable> SubsampleHistory(std::span<const HistoryRecord> history, int count);

struct CandidateTable {
  std::string source_run;
  int source_step = 0;
  QuantTable table;
  std::optional<Ratios> train;
};

struct EvaluationRecord {
  std::string source_run;
  int source_step = 0;
  QuantTable table;
  std::optional<Ratios> train;
  double eval_error_ratio = 1.0;
  double eval_compression_ratio = 1.0;
};

// Ratios of each table against the standard table over the evaluation
// images, at the given quality. Errors are rethrown with the table's source.
std::vector<EvaluationRecord> EvaluateTables(std::span<const CandidateTable> tables,
                                             std::vector<ImagePlane> evaluation_set, int quality,
                                             MetricId metric, int parallelism = 1);

struct Selection {
  // False when no record met the error bar; `record` is then the one with
  // the lowest error ratio.
  bool qualified = false;
  EvaluationRecord record;
};

// Among records with eval_error_ratio <= 1 - min_error_improvement, the one
// with the smallest compression ratio (ties: lower error). Throws
// InvalidArgument for an empty list.
Selection SelectFinal(std::span<const EvaluationRecord> records,
                      double min_error_improvement = 0.10);

nlohmann::ordered_json EvaluationToJson(const EvaluationRecord& record);
EvaluationRecord EvaluationFromJson(const nlohmann::json& j);

// CSV with columns run,step,train_E,train_C,eval_E,eval_C. Lines starting
// with '#' before the column header carry provenance. Missing training
// ratios are left empty.
void WriteSummaryCsv(std::ostream& out, std::span<const EvaluationRecord> records,
                     std::span<const std::string> header_comments = {});

struct TimingRow {
  std::string name;
  double mean_seconds = 0.0;
  double stddev_seconds = 0.0;
  // Against the standard-table series.
  double mean_difference = 0.0;
  double pooled_stddev = 0.0;
  bool significant = false;
};

struct SeriesComparison {
  double mean_difference = 0.0;
  double pooled_stddev = 0.0;
  bool significant = false;
};

// Two-sample comparison used by TimingReport: difference of means, pooled
// standard deviation sqrt((s_a^2 + s_b^2) / 2) from sample standard
// deviations, significant when |difference| > 2 * pooled. Each series needs
// at least two values.
SeriesComparison CompareSeries(std::span<const double> a, std::span<const double> b);

struct NamedTable {
  std::string name;
  QuantTable table;
};

// Times a full encode (DCT, quantization, entropy coding into memory) of
// every image, once per table per repetition. Tables and the standard
// reference are interleaved within each repetition. A row is significant
// when |mean difference| > 2 * sqrt((s_table^2 + s_standard^2) / 2).
// Throws InvalidArgument when repetitions < 3 or inputs are empty.
std::vector<TimingRow> TimingReport(std::span<const NamedTable> tables,
                                    std::span<const ImagePlane> images, int quality,
                                    int repetitions);

}  // namespace qtanneal

#endif  // QTANNEAL_HARNESS_H_
