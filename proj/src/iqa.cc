#include "qtanneal/iqa.h"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <limits>
#include <thread>

#include "qtanneal/errors.h"
#include "qtanneal/summation.h"

namespace qtanneal {

namespace {

constexpr int kSsimWindow = 11;
constexpr double kSsimSigma = 1.5;
constexpr double kC1 = (0.01 * 255) * (0.01 * 255);
constexpr double kC2 = (0.03 * 255) * (0.03 * 255);
constexpr std::array<double, 5> kMsssimWeights = {0.0448, 0.2856, 0.3001, 0.2363, 0.1333};

void CheckSameSize(const ImagePlane& a, const ImagePlane& b) {
  if (a.width() != b.width() || a.height() != b.height()) {
    throw DimensionMismatch("image sizes differ: " + std::to_string(a.width()) + "x" +
                            std::to_string(a.height()) + " vs " + std::to_string(b.width()) +
                            "x" + std::to_string(b.height()));
  }
}

const std::array<double, kSsimWindow>& GaussianTaps() {
  static const std::array<double, kSsimWindow> taps = [] {
    std::array<double, kSsimWindow> t;
    double sum = 0.0;
    for (int i = 0; i < kSsimWindow; ++i) {
      const double d = i - (kSsimWindow - 1) / 2.0;
      t[i] = std::exp(-d * d / (2 * kSsimSigma * kSsimSigma));
      sum += t[i];
    }
    for (double& v : t) v /= sum;
    return t;
  }();
  return taps;
}

struct Raster {
  int width = 0;
  int height = 0;
  std::vector<double> v;
  double at(int x, int y) const { return v[static_cast<std::size_t>(y) * width + x]; }
};

Raster ToRaster(const ImagePlane& image) {
  return Raster{image.width(), image.height(),
                std::vector<double>(image.samples().begin(), image.samples().end())};
}

// Separable Gaussian filter keeping only the 'valid' region.
Raster FilterValid(const Raster& in) {
  const auto& taps = GaussianTaps();
  const int ow = in.width - kSsimWindow + 1;
  const int oh = in.height - kSsimWindow + 1;
  Raster horizontal{ow, in.height, std::vector<double>(static_cast<std::size_t>(ow) * in.height)};
  for (int y = 0; y < in.height; ++y) {
    const double* row = &in.v[static_cast<std::size_t>(y) * in.width];
    for (int x = 0; x < ow; ++x) {
      double acc = 0.0;
      for (int k = 0; k < kSsimWindow; ++k) acc += taps[k] * row[x + k];
      horizontal.v[static_cast<std::size_t>(y) * ow + x] = acc;
    }
  }
  Raster out{ow, oh, std::vector<double>(static_cast<std::size_t>(ow) * oh)};
  for (int y = 0; y < oh; ++y) {
    for (int x = 0; x < ow; ++x) {
      double acc = 0.0;
      for (int k = 0; k < kSsimWindow; ++k) acc += taps[k] * horizontal.at(x, y + k);
      out.v[static_cast<std::size_t>(y) * ow + x] = acc;
    }
  }
  return out;
}

struct SsimMeans {
  double ssim = 0.0;
  double contrast_structure = 0.0;
};

SsimMeans SsimStats(const Raster& a, const Raster& b) {
  Raster aa = a, bb = b, ab = a;
  for (std::size_t i = 0; i < a.v.size(); ++i) {
    aa.v[i] = a.v[i] * a.v[i];
    bb.v[i] = b.v[i] * b.v[i];
    ab.v[i] = a.v[i] * b.v[i];
  }
  const Raster mu1 = FilterValid(a);
  const Raster mu2 = FilterValid(b);
  const Raster e11 = FilterValid(aa);
  const Raster e22 = FilterValid(bb);
  const Raster e12 = FilterValid(ab);
  CompensatedSum ssim_sum;
  CompensatedSum cs_sum;
  const std::size_t n = mu1.v.size();
  for (std::size_t i = 0; i < n; ++i) {
    const double m1 = mu1.v[i];
    const double m2 = mu2.v[i];
    const double s11 = e11.v[i] - m1 * m1;
    const double s22 = e22.v[i] - m2 * m2;
    const double s12 = e12.v[i] - m1 * m2;
    const double cs = (2.0 * s12 + kC2) / (s11 + s22 + kC2);
    const double l = (2.0 * m1 * m2 + kC1) / (m1 * m1 + m2 * m2 + kC1);
    ssim_sum.Add(l * cs);
    cs_sum.Add(cs);
  }
  return {ssim_sum.value() / n, cs_sum.value() / n};
}

// 2x2 mean, replicating the last row/column on odd sizes.
Raster Halve(const Raster& in) {
  const int ow = (in.width + 1) / 2;
  const int oh = (in.height + 1) / 2;
  Raster out{ow, oh, std::vector<double>(static_cast<std::size_t>(ow) * oh)};
  for (int y = 0; y < oh; ++y) {
    const int y0 = 2 * y;
    const int y1 = std::min(y0 + 1, in.height - 1);
    for (int x = 0; x < ow; ++x) {
      const int x0 = 2 * x;
      const int x1 = std::min(x0 + 1, in.width - 1);
      out.v[static_cast<std::size_t>(y) * ow + x] =
          (in.at(x0, y0) + in.at(x0, y1) + in.at(x1, y0) + in.at(x1, y1)) / 4.0;
    }
  }
  return out;
}

bool UsableForRatio(MetricId metric) {
  return metric == MetricId::kSsim || metric == MetricId::kMsssim || metric == MetricId::kFsim;
}

}  // namespace

std::string_view MetricName(MetricId metric) {
  switch (metric) {
    case MetricId::kRmse: return "RMSE";
    case MetricId::kPsnr: return "PSNR";
    case MetricId::kSsim: return "SSIM";
    case MetricId::kMsssim: return "MSSSIM";
    case MetricId::kFsim: return "FSIM";
  }
  return "?";
}

MetricId ParseMetric(std::string_view name) {
  std::string s;
  for (char c : name) {
    if (c != '-' && c != '_') s.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  if (s == "rmse") return MetricId::kRmse;
  if (s == "psnr") return MetricId::kPsnr;
  if (s == "ssim") return MetricId::kSsim;
  if (s == "msssim" || s == "mssim") return MetricId::kMsssim;
  if (s == "fsim") return MetricId::kFsim;
  throw InvalidArgument("unknown metric '" + std::string(name) + "'");
}

MetricScore Rmse(const ImagePlane& a, const ImagePlane& b) {
  CheckSameSize(a, b);
  const auto sa = a.samples();
  const auto sb = b.samples();
  // Integer accumulation is exact.
  std::uint64_t sq = 0;
  for (std::size_t i = 0; i < sa.size(); ++i) {
    const int d = int{sa[i]} - int{sb[i]};
    sq += static_cast<std::uint64_t>(d * d);
  }
  const double mean = sa.empty() ? 0.0 : static_cast<double>(sq) / static_cast<double>(sa.size());
  return {std::sqrt(mean), MetricId::kRmse};
}

MetricScore Psnr(const ImagePlane& a, const ImagePlane& b) {
  const double rmse = Rmse(a, b).value;
  if (rmse == 0.0) return {std::numeric_limits<double>::infinity(), MetricId::kPsnr};
  return {20.0 * std::log10(255.0 / rmse), MetricId::kPsnr};
}

MetricScore Ssim(const ImagePlane& a, const ImagePlane& b) {
  CheckSameSize(a, b);
  if (a.width() < kSsimWindow || a.height() < kSsimWindow) {
    throw InvalidArgument("SSIM needs at least 11x11 pixels");
  }
  const double v = SsimStats(ToRaster(a), ToRaster(b)).ssim;
  return {v, MetricId::kSsim, v < 0.0};
}

MetricScore Msssim(const ImagePlane& a, const ImagePlane& b) {
  CheckSameSize(a, b);
  if (a.width() < kSsimWindow || a.height() < kSsimWindow) {
    throw InvalidArgument("MS-SSIM needs at least 11x11 pixels");
  }
  int levels = 1;
  for (int w = a.width(), h = a.height(); levels < 5;) {
    w = (w + 1) / 2;
    h = (h + 1) / 2;
    if (w < kSsimWindow || h < kSsimWindow) break;
    ++levels;
  }
  double total = 0.0;
  double used = 0.0;
  for (int i = 0; i < 5; ++i) total += kMsssimWeights[i];
  for (int i = 0; i < levels; ++i) used += kMsssimWeights[i];

  Raster ra = ToRaster(a);
  Raster rb = ToRaster(b);
  double value = 1.0;
  bool flagged = false;
  for (int level = 0; level < levels; ++level) {
    const SsimMeans m = SsimStats(ra, rb);
    const double weight = kMsssimWeights[level] * total / used;
    const double term = level + 1 == levels ? m.ssim : m.contrast_structure;
    if (term < 0.0) flagged = true;
    value *= std::pow(std::max(term, 0.0), weight);
    if (level + 1 < levels) {
      ra = Halve(ra);
      rb = Halve(rb);
    }
  }
  return {value, MetricId::kMsssim, flagged};
}

MetricScore Fsim(const ImagePlane& a, const ImagePlane& b) {
  CheckSameSize(a, b);
  return {FsimFromFeatures(ComputeFsimFeatures(a), ComputeFsimFeatures(b)), MetricId::kFsim};
}

MetricScore Score(MetricId metric, const ImagePlane& a, const ImagePlane& b) {
  switch (metric) {
    case MetricId::kRmse: return Rmse(a, b);
    case MetricId::kPsnr: return Psnr(a, b);
    case MetricId::kSsim: return Ssim(a, b);
    case MetricId::kMsssim: return Msssim(a, b);
    case MetricId::kFsim: return Fsim(a, b);
  }
  throw InvalidArgument("unknown metric");
}

struct RatioEvaluator::Entry {
  ImagePlane original;
  DctImage dct;
  std::unique_ptr<FsimFeatures> features;  // FSIM only
};

RatioEvaluator::RatioEvaluator(std::vector<ImagePlane> originals, const QuantTable& reference,
                               int quality, MetricId metric, int parallelism)
    : quality_(quality), metric_(metric), parallelism_(std::max(1, parallelism)) {
  if (originals.empty()) throw InvalidArgument("ratio evaluation needs at least one image");
  if (!UsableForRatio(metric)) {
    throw InvalidArgument("error ratio needs a similarity metric (SSIM, MSSSIM or FSIM), got " +
                          std::string(MetricName(metric)));
  }
  const QuantTable scaled_reference = ScaleTable(reference, quality);
  for (ImagePlane& image : originals) {
    auto entry = std::make_unique<Entry>(Entry{image, DctImage(image), nullptr});
    if (metric == MetricId::kFsim) {
      entry->features = std::make_unique<FsimFeatures>(ComputeFsimFeatures(image));
    }
    entries_.push_back(std::move(entry));
  }
  CompensatedSum error;
  CompensatedSum size;
  for (const ImageOutcome& outcome : EvaluateAll(scaled_reference)) {
    error.Add(outcome.error);
    size.Add(static_cast<double>(outcome.size));
  }
  reference_error_ = error.value();
  reference_size_ = size.value();
  if (reference_error_ == 0.0) {
    throw DegenerateInput("every reference compression is perfect under " +
                          std::string(MetricName(metric)) + "; error ratio undefined");
  }
}

RatioEvaluator::~RatioEvaluator() = default;
RatioEvaluator::RatioEvaluator(RatioEvaluator&&) noexcept = default;
RatioEvaluator& RatioEvaluator::operator=(RatioEvaluator&&) noexcept = default;

int RatioEvaluator::image_count() const { return static_cast<int>(entries_.size()); }

RatioEvaluator::ImageOutcome RatioEvaluator::EvaluateImage(const Entry& entry,
                                                           const QuantTable& scaled) const {
  const CompressionResult result = CompressWithTable(entry.dct, scaled);
  double score = 0.0;
  if (metric_ == MetricId::kFsim) {
    score = FsimFromFeatures(*entry.features, ComputeFsimFeatures(result.reconstructed));
  } else {
    score = Score(metric_, entry.original, result.reconstructed).value;
  }
  return {1.0 - score, result.size_bytes};
}

std::vector<RatioEvaluator::ImageOutcome> RatioEvaluator::EvaluateAll(
    const QuantTable& scaled) const {
  std::vector<ImageOutcome> outcomes(entries_.size());
  const int workers = std::min<int>(parallelism_, static_cast<int>(entries_.size()));
  if (workers <= 1) {
    for (std::size_t i = 0; i < entries_.size(); ++i) outcomes[i] = EvaluateImage(*entries_[i], scaled);
    return outcomes;
  }
  std::vector<std::exception_ptr> errors(workers);
  {
    std::vector<std::jthread> threads;
    for (int t = 0; t < workers; ++t) {
      threads.emplace_back([&, t] {
        try {
          for (std::size_t i = t; i < entries_.size(); i += workers) {
            outcomes[i] = EvaluateImage(*entries_[i], scaled);
          }
        } catch (...) {
          errors[t] = std::current_exception();
        }
      });
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return outcomes;
}

RatioReport RatioEvaluator::Evaluate(const QuantTable& candidate) const {
  CompensatedSum error;
  CompensatedSum size;
  for (const ImageOutcome& outcome : EvaluateAll(ScaleTable(candidate, quality_))) {
    error.Add(outcome.error);
    size.Add(static_cast<double>(outcome.size));
  }
  return {error.value() / reference_error_, size.value() / reference_size_, image_count()};
}

double ErrorRatio(std::span<const ImagePlane> originals, const QuantTable& candidate,
                  const QuantTable& reference, int quality, MetricId metric) {
  RatioEvaluator evaluator(std::vector<ImagePlane>(originals.begin(), originals.end()), reference,
                           quality, metric);
  return evaluator.Evaluate(candidate).error_ratio;
}

double CompressionRatio(std::span<const ImagePlane> originals, const QuantTable& candidate,
                        const QuantTable& reference, int quality) {
  if (originals.empty()) throw InvalidArgument("compression ratio needs at least one image");
  const QuantTable scaled_candidate = ScaleTable(candidate, quality);
  const QuantTable scaled_reference = ScaleTable(reference, quality);
  CompensatedSum candidate_size;
  CompensatedSum reference_size;
  for (const ImagePlane& image : originals) {
    const DctImage dct(image);
    candidate_size.Add(static_cast<double>(EntropySize(dct, scaled_candidate)));
    reference_size.Add(static_cast<double>(EntropySize(dct, scaled_reference)));
  }
  return candidate_size.value() / reference_size.value();
}

}  // namespace qtanneal
