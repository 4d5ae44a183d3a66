#ifndef QTANNEAL_IQA_H_
#define QTANNEAL_IQA_H_

#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qtanneal/codec.h"
#include "qtanneal/image.h"
#include "qtanneal/phase_congruency.h"
#include "qtanneal/qtable.h"

namespace qtanneal {

enum class MetricId { kRmse, kPsnr, kSsim, kMsssim, kFsim };

std::string_view MetricName(MetricId metric);
// Case-insensitive; accepts "ms-ssim" and "m-ssim" for kMsssim. Throws
// InvalidArgument for unknown names.
MetricId ParseMetric(std::string_view name);

struct MetricScore {
  double value = 0.0;
  MetricId metric = MetricId::kRmse;
  // Set when an SSIM-family score came out negative (contrast inversion).
  bool flagged = false;
};

// All metrics throw DimensionMismatch for differently sized inputs.

MetricScore Rmse(const ImagePlane& a, const ImagePlane& b);

// 20 log10(255 / RMSE); +infinity for identical inputs.
MetricScore Psnr(const ImagePlane& a, const ImagePlane& b);

// Mean SSIM over the valid region of an 11x11 Gaussian window (sigma 1.5),
// C1 = (0.01 * 255)^2, C2 = (0.03 * 255)^2. Needs at least 11x11.
MetricScore Ssim(const ImagePlane& a, const ImagePlane& b);

// Five-scale MS-SSIM with weights (0.0448, 0.2856, 0.3001, 0.2363,
// 0.1333): contrast-structure terms at the first four scales, full SSIM at
// the last, 2x2 mean downsampling with edge replication in between.
// Inputs too small for five 11x11 scales use as many scales as fit, with
// the leading weights rescaled to the same total. Negative per-scale
// terms are clamped to zero before exponentiation.
MetricScore Msssim(const ImagePlane& a, const ImagePlane& b);

// FSIM on luma: phase-congruency and gradient-magnitude similarity
// (T1 = 0.85, T2 = 160) weighted by max(PC_a, PC_b). Needs at least 32x32.
MetricScore Fsim(const ImagePlane& a, const ImagePlane& b);

MetricScore Score(MetricId metric, const ImagePlane& a, const ImagePlane& b);

struct RatioReport {
  double error_ratio = 1.0;
  double compression_ratio = 1.0;
  int image_count = 0;
};

// Compresses a fixed image set under candidate tables and reports error and
// compression ratios against a reference table at one quality. DCT
// coefficients, reference sizes, reference errors and (for FSIM) the
// originals' feature maps are computed once at construction.
//
// error ratio       = sum(1 - metric(orig, candidate)) / sum(1 - metric(orig, reference))
// compression ratio = sum(size under candidate) / sum(size under reference)
//
// Evaluate() is const and safe to call concurrently.
class RatioEvaluator {
 public:
  // metric must be SSIM, MS-SSIM or FSIM. Throws InvalidArgument for an
  // empty image list or another metric, DegenerateInput when every
  // reference compression is perfect under the metric.
  RatioEvaluator(std::vector<ImagePlane> originals, const QuantTable& reference,
                 int quality, MetricId metric, int parallelism = 1);
  ~RatioEvaluator();
  RatioEvaluator(RatioEvaluator&&) noexcept;
  RatioEvaluator& operator=(RatioEvaluator&&) noexcept;

  RatioReport Evaluate(const QuantTable& candidate) const;

  int quality() const { return quality_; }
  MetricId metric() const { return metric_; }
  int image_count() const;

 private:
  struct Entry;
  struct ImageOutcome {
    double error = 0.0;
    std::size_t size = 0;
  };

  ImageOutcome EvaluateImage(const Entry& entry, const QuantTable& scaled) const;
  std::vector<ImageOutcome> EvaluateAll(const QuantTable& scaled) const;

  std::vector<std::unique_ptr<Entry>> entries_;
  int quality_;
  MetricId metric_;
  int parallelism_;
  double reference_error_ = 0.0;
  double reference_size_ = 0.0;
};

// Throws InvalidArgument for an empty list or unsupported metric and
// DegenerateInput when the denominator is zero.
double ErrorRatio(std::span<const ImagePlane> originals, const QuantTable& candidate,
                  const QuantTable& reference, int quality, MetricId metric);

double CompressionRatio(std::span<const ImagePlane> originals, const QuantTable& candidate,
                        const QuantTable& reference, int quality);

}  // namespace qtanneal

#endif  // QTANNEAL_IQA_H_
