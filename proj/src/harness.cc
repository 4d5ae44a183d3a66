#include "qtanneal/harness.h"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <ostream>
#include <thread>

#include "qtanneal/codec.h"
#include "qtanneal/errors.h"
#include "qtanneal/history.h"
#include "qtanneal/rng.h"
#include "qtanneal/summation.h"

namespace qtanneal {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

// Runs fn(i) for i in [0, count) on up to `parallelism` threads. Exceptions
// escape only through fn's own handling.
void ParallelFor(int count, int parallelism, const std::function<void(int)>& fn) {
  const int workers = std::clamp(parallelism, 1, std::max(1, count));
  if (workers == 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::jthread> threads;
  for (int t = 0; t < workers; ++t) {
    threads.emplace_back([&] {
      for (int i = next++; i < count; i = next++) fn(i);
    });
  }
}

double Mean(std::span<const double> v) { return CompensatedTotal(v) / static_cast<double>(v.size()); }

double SampleStddev(std::span<const double> v) {
  const double m = Mean(v);
  CompensatedSum sq;
  for (double x : v) sq.Add((x - m) * (x - m));
  return std::sqrt(sq.value() / static_cast<double>(v.size() - 1));
}

}  // namespace

DatasetPartition Partition(std::vector<std::string> images, int group_size, int eval_count,
                           std::uint64_t seed) {
  if (group_size < 1) throw InvalidArgument("group size must be at least 1");
  if (eval_count < 0) throw InvalidArgument("evaluation count must be non-negative");
  if (images.size() < static_cast<std::size_t>(eval_count) + group_size) {
    throw InvalidArgument("need at least " + std::to_string(eval_count + group_size) +
                          " images, got " + std::to_string(images.size()));
  }
  Rng rng(seed);
  for (std::size_t i = images.size(); i > 1; --i) {
    std::swap(images[i - 1], images[rng.Below(i)]);
  }
  DatasetPartition p;
  p.seed = seed;
  p.evaluation_set.assign(images.begin(), images.begin() + eval_count);
  const std::size_t groups = (images.size() - eval_count) / group_size;
  for (std::size_t g = 0; g < groups; ++g) {
    const auto begin = images.begin() + eval_count + static_cast<std::ptrdiff_t>(g * group_size);
    p.training_groups.emplace_back(begin, begin + group_size);
  }
  return p;
}

ordered_json PartitionToJson(const DatasetPartition& p) {
  ordered_json j;
  j["seed"] = p.seed;
  j["training_groups"] = p.training_groups;
  j["evaluation_set"] = p.evaluation_set;
  return j;
}

DatasetPartition PartitionFromJson(const json& j) {
  DatasetPartition p;
  p.seed = j.at("seed").get<std::uint64_t>();
  p.training_groups = j.at("training_groups").get<std::vector<std::vector<std::string>>>();
  p.evaluation_set = j.at("evaluation_set").get<std::vector<std::string>>();
  return p;
}

TableEvaluator DefaultEvaluator(const AnnealConfig& config) {
  std::vector<ImagePlane> images;
  for (const std::string& path : config.training_images) images.push_back(LoadImage(path));
  auto evaluator = std::make_shared<RatioEvaluator>(std::move(images), StandardTable(),
                                                    config.quality, config.metric);
  return [evaluator](const QuantTable& table) {
    const RatioReport r = evaluator->Evaluate(table);
    return Ratios{r.error_ratio, r.compression_ratio};
  };
}

std::vector<RunOutput> Orchestrate(const DatasetPartition& partition,
                                   const AnnealConfig& config_template, int run_count,
                                   int parallelism, const EvaluatorFactory& factory) {
  if (run_count < 0 || static_cast<std::size_t>(run_count) > partition.training_groups.size()) {
    throw InvalidArgument("run count " + std::to_string(run_count) + " exceeds " +
                          std::to_string(partition.training_groups.size()) + " training groups");
  }
  std::vector<RunOutput> outputs(run_count);
  ParallelFor(run_count, parallelism, [&](int k) {
    RunOutput& out = outputs[k];
    out.run = k;
    out.seed = DeriveSeed(config_template.seed, static_cast<std::uint64_t>(k));
    out.config = config_template;
    out.config.seed = out.seed;
    out.config.training_images = partition.training_groups[k];
    try {
      out.result = AnnealRun(out.config, factory(out.config));
    } catch (const std::exception& e) {
      out.failed = true;
      out.failure = e.what();
      out.result = {};
    }
  });
  return outputs;
}

std::vector<const RunOutput*> TopRuns(std::span<const RunOutput> runs, int count) {
  std::vector<const RunOutput*> ok;
  for (const RunOutput& r : runs) {
    if (!r.failed) ok.push_back(&r);
  }
  auto key = [](const RunOutput* r) {
    const Ratios& b = r->result.state.best.ratios;
    return r->config.mode == AnnealMode::kMaximizeCompression
               ? std::make_tuple(b.compression, b.error, r->run)
               : std::make_tuple(b.error, b.compression, r->run);
  };
  std::sort(ok.begin(), ok.end(), [&](auto* a, auto* b) { return key(a) < key(b); });
  if (ok.size() > static_cast<std::size_t>(std::max(0, count))) ok.resize(std::max(0, count));
  return ok;
}

std::vector<SampledTable> SubsampleHistory(std::span<const HistoryRecord> history, int count) {
  if (history.empty()) throw InvalidArgument("cannot subsample an empty history");
  if (count < 1) throw InvalidArgument("sample count must be at least 1");
  const std::size_t n = history.size();
  const std::size_t samples = std::min<std::size_t>(static_cast<std::size_t>(count), n);
  std::vector<SampledTable> out;
  out.reserve(samples);
  SampledTable current{0, StandardTable(), Ratios{1.0, 1.0}};
  std::size_t j = 1;
  for (std::size_t i = 0; i < n && j <= samples; ++i) {
    const HistoryRecord& r = history[i];
    if (r.accepted) {
      current.table = r.proposed;
      current.train = {r.e, r.c};
    }
    const std::size_t target = j * n / samples;  // 1-based index into history
    if (i + 1 == target) {
      current.step = r.step;
      out.push_back(current);
      ++j;
    }
  }
  return out;
}

std::vector<EvaluationRecord> EvaluateTables(std::span<const CandidateTable> tables,
                                             std::vector<ImagePlane> evaluation_set, int quality,
                                             MetricId metric, int parallelism) {
  if (tables.empty()) throw InvalidArgument("no tables to evaluate");
  const RatioEvaluator evaluator(std::move(evaluation_set), StandardTable(), quality, metric);
  std::vector<EvaluationRecord> records(tables.size());
  std::vector<std::exception_ptr> errors(tables.size());
  ParallelFor(static_cast<int>(tables.size()), parallelism, [&](int i) {
    const CandidateTable& t = tables[i];
    try {
      const RatioReport r = evaluator.Evaluate(t.table);
      records[i] = {t.source_run, t.source_step, t.table, t.train, r.error_ratio,
                    r.compression_ratio};
    } catch (...) {
      errors[i] = std::current_exception();
    }
  });
  for (std::size_t i = 0; i < errors.size(); ++i) {
    if (!errors[i]) continue;
    try {
      std::rethrow_exception(errors[i]);
    } catch (const std::exception& e) {
      throw Error("table from run " + tables[i].source_run + " step " +
                  std::to_string(tables[i].source_step) + ": " + e.what());
    }
  }
  return records;
}

Selection SelectFinal(std::span<const EvaluationRecord> records, double min_error_improvement) {
  if (records.empty()) throw InvalidArgument("no evaluation records to select from");
  const double bar = 1.0 - min_error_improvement;
  const EvaluationRecord* best = nullptr;
  for (const EvaluationRecord& r : records) {
    if (r.eval_error_ratio > bar) continue;
    if (best == nullptr || r.eval_compression_ratio < best->eval_compression_ratio ||
        (r.eval_compression_ratio == best->eval_compression_ratio &&
         r.eval_error_ratio < best->eval_error_ratio)) {
      best = &r;
    }
  }
  if (best != nullptr) return {true, *best};
  const auto lowest = std::min_element(records.begin(), records.end(), [](auto& a, auto& b) {
    return a.eval_error_ratio < b.eval_error_ratio;
  });
  return {false, *lowest};
}

ordered_json EvaluationToJson(const EvaluationRecord& r) {
  ordered_json j;
  j["run"] = r.source_run;
  j["step"] = r.source_step;
  j["table"] = TableToJson(r.table);
  if (r.train) {
    j["train_E"] = r.train->error;
    j["train_C"] = r.train->compression;
  }
  j["eval_E"] = r.eval_error_ratio;
  j["eval_C"] = r.eval_compression_ratio;
  return j;
}

EvaluationRecord EvaluationFromJson(const json& j) {
  EvaluationRecord r;
  r.source_run = j.at("run").get<std::string>();
  r.source_step = j.at("step").get<int>();
  r.table = TableFromJson(j.at("table"));
  if (j.contains("train_E")) r.train = Ratios{j["train_E"].get<double>(), j["train_C"].get<double>()};
  r.eval_error_ratio = j.at("eval_E").get<double>();
  r.eval_compression_ratio = j.at("eval_C").get<double>();
  return r;
}

void WriteSummaryCsv(std::ostream& out, std::span<const EvaluationRecord> records,
                     std::span<const std::string> header_comments) {
  for (const std::string& c : header_comments) out << "# " << c << '\n';
  out << "run,step,train_E,train_C,eval_E,eval_C\n";
  for (const EvaluationRecord& r : records) {
    out << r.source_run << ',' << r.source_step << ',';
    if (r.train) {
      out << json(r.train->error).dump() << ',' << json(r.train->compression).dump();
    } else {
      out << ',';
    }
    out << ',' << json(r.eval_error_ratio).dump() << ',' << json(r.eval_compression_ratio).dump()
        << '\n';
  }
}

SeriesComparison CompareSeries(std::span<const double> a, std::span<const double> b) {
  if (a.size() < 2 || b.size() < 2) throw InvalidArgument("each series needs two values");
  const double sa = SampleStddev(a);
  const double sb = SampleStddev(b);
  SeriesComparison c;
  c.mean_difference = Mean(a) - Mean(b);
  c.pooled_stddev = std::sqrt((sa * sa + sb * sb) / 2.0);
  c.significant = std::abs(c.mean_difference) > 2.0 * c.pooled_stddev;
  return c;
}

std::vector<TimingRow> TimingReport(std::span<const NamedTable> tables,
                                    std::span<const ImagePlane> images, int quality,
                                    int repetitions) {
  if (repetitions < 3) throw InvalidArgument("timing needs at least 3 repetitions");
  if (tables.empty() || images.empty()) throw InvalidArgument("timing needs tables and images");
  std::vector<QuantTable> scaled;
  scaled.push_back(ScaleTable(StandardTable(), quality));
  for (const NamedTable& t : tables) scaled.push_back(ScaleTable(t.table, quality));

  std::vector<std::vector<double>> seconds(scaled.size());
  std::size_t sink = 0;
  for (int rep = 0; rep < repetitions; ++rep) {
    for (std::size_t t = 0; t < scaled.size(); ++t) {
      const auto start = std::chrono::steady_clock::now();
      for (const ImagePlane& image : images) sink += EncodeJfif(image, scaled[t]).size();
      const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
      seconds[t].push_back(elapsed.count());
    }
  }
  if (sink == 0) throw Error("encoder produced no output");

  std::vector<TimingRow> rows;
  auto row = [&](const std::string& name, const std::vector<double>& s) {
    const SeriesComparison c = CompareSeries(s, seconds[0]);
    return TimingRow{name, Mean(s), SampleStddev(s), c.mean_difference, c.pooled_stddev,
                     c.significant};
  };
  rows.push_back(row("standard (reference)", seconds[0]));
  for (std::size_t t = 0; t < tables.size(); ++t) rows.push_back(row(tables[t].name, seconds[t + 1]));
  return rows;
}

}  // namespace qtanneal
