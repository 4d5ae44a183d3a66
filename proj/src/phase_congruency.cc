#include "qtanneal/phase_congruency.h"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <utility>

#include "qtanneal/errors.h"
#include "qtanneal/summation.h"

namespace qtanneal {

namespace {

constexpr int kScales = 4;
constexpr int kOrientations = 4;
constexpr double kMinWavelength = 6.0;
constexpr double kScaleMultiplier = 2.0;
constexpr double kSigmaOnf = 0.55;
constexpr double kThetaOnSigma = 1.2;
constexpr double kNoiseK = 2.0;
constexpr double kEpsilon = 1e-4;
constexpr double kLowpassCutoff = 0.45;
constexpr int kLowpassOrder = 15;
constexpr double kT1 = 0.85;
constexpr double kT2 = 160.0;

struct FftwComplexDeleter {
  void operator()(fftw_complex* p) const { fftw_free(p); }
};
using ComplexBuffer = std::unique_ptr<fftw_complex[], FftwComplexDeleter>;

ComplexBuffer AllocComplex(std::size_t n) {
  return ComplexBuffer(fftw_alloc_complex(n));
}

// Planner calls are not thread-safe in FFTW; executing an existing plan on
// new arrays is.
std::mutex& PlannerMutex() {
  static std::mutex mu;
  return mu;
}

// 2-D complex FFT plans for one raster size, always used out-of-place on
// fftw_malloc'd buffers.
class FftPlans {
 public:
  FftPlans(int rows, int cols) {
    const std::size_t n = static_cast<std::size_t>(rows) * cols;
    ComplexBuffer in = AllocComplex(n);
    ComplexBuffer out = AllocComplex(n);
    std::lock_guard<std::mutex> lock(PlannerMutex());
    forward_ = fftw_plan_dft_2d(rows, cols, in.get(), out.get(), FFTW_FORWARD, FFTW_ESTIMATE);
    inverse_ = fftw_plan_dft_2d(rows, cols, in.get(), out.get(), FFTW_BACKWARD, FFTW_ESTIMATE);
  }
  ~FftPlans() {
    std::lock_guard<std::mutex> lock(PlannerMutex());
    fftw_destroy_plan(forward_);
    fftw_destroy_plan(inverse_);
  }
  FftPlans(const FftPlans&) = delete;
  FftPlans& operator=(const FftPlans&) = delete;

  void Forward(fftw_complex* in, fftw_complex* out) const { fftw_execute_dft(forward_, in, out); }
  // Unnormalized.
  void Inverse(fftw_complex* in, fftw_complex* out) const { fftw_execute_dft(inverse_, in, out); }

 private:
  fftw_plan forward_;
  fftw_plan inverse_;
};

// Normalized coordinate of shifted index i along an axis of length n, as
// laid out after ifftshift (zero frequency at index 0).
double ShiftedCoordinate(int i, int n) {
  const int orig = (i + n / 2) % n;
  if (n % 2) return (orig - (n - 1) / 2.0) / (n - 1);
  return (orig - n / 2.0) / n;
}

// Filter bank and per-orientation noise-model constants for one size.
struct FilterBank {
  int rows = 0;
  int cols = 0;
  std::unique_ptr<FftPlans> plans;
  // filters[o * kScales + s], frequency domain, zero frequency at (0,0).
  std::vector<std::vector<double>> filters;
  std::array<double, kOrientations> em_n{};
  std::array<double, kOrientations> sum_an2{};
  std::array<double, kOrientations> sum_ai_aj{};
};

std::unique_ptr<FilterBank> BuildFilterBank(int rows, int cols) {
  auto bank = std::make_unique<FilterBank>();
  bank->rows = rows;
  bank->cols = cols;
  bank->plans = std::make_unique<FftPlans>(rows, cols);
  const std::size_t n = static_cast<std::size_t>(rows) * cols;

  std::vector<double> radius(n), sin_theta(n), cos_theta(n), lowpass(n);
  for (int r = 0; r < rows; ++r) {
    const double y = ShiftedCoordinate(r, rows);
    for (int c = 0; c < cols; ++c) {
      const double x = ShiftedCoordinate(c, cols);
      const std::size_t i = static_cast<std::size_t>(r) * cols + c;
      radius[i] = std::sqrt(x * x + y * y);
      lowpass[i] = 1.0 / (1.0 + std::pow(radius[i] / kLowpassCutoff, 2 * kLowpassOrder));
      const double theta = std::atan2(-y, x);
      sin_theta[i] = std::sin(theta);
      cos_theta[i] = std::cos(theta);
    }
  }
  radius[0] = 1.0;

  std::vector<std::vector<double>> log_gabor(kScales, std::vector<double>(n));
  const double log_sigma_sq = 2.0 * std::pow(std::log(kSigmaOnf), 2);
  for (int s = 0; s < kScales; ++s) {
    const double fo = 1.0 / (kMinWavelength * std::pow(kScaleMultiplier, s));
    for (std::size_t i = 0; i < n; ++i) {
      const double l = std::log(radius[i] / fo);
      log_gabor[s][i] = std::exp(-(l * l) / log_sigma_sq) * lowpass[i];
    }
    log_gabor[s][0] = 0.0;
  }

  const double theta_sigma = std::numbers::pi / kOrientations / kThetaOnSigma;
  const double spread_den = 2.0 * theta_sigma * theta_sigma;
  bank->filters.resize(kOrientations * kScales);
  ComplexBuffer freq = AllocComplex(n);
  ComplexBuffer spatial = AllocComplex(n);
  const double sqrt_n = std::sqrt(static_cast<double>(n));

  for (int o = 0; o < kOrientations; ++o) {
    const double angle = o * std::numbers::pi / kOrientations;
    const double ca = std::cos(angle);
    const double sa = std::sin(angle);
    std::vector<double> spread(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double ds = sin_theta[i] * ca - cos_theta[i] * sa;
      const double dc = cos_theta[i] * ca + sin_theta[i] * sa;
      const double dtheta = std::abs(std::atan2(ds, dc));
      spread[i] = std::exp(-(dtheta * dtheta) / spread_den);
    }

    // Spatial-domain filter profiles for the noise model.
    std::vector<std::vector<double>> spatial_filters(kScales, std::vector<double>(n));
    for (int s = 0; s < kScales; ++s) {
      auto& filter = bank->filters[o * kScales + s];
      filter.resize(n);
      for (std::size_t i = 0; i < n; ++i) filter[i] = log_gabor[s][i] * spread[i];
      if (s == 0) {
        CompensatedSum em;
        for (double f : filter) em.Add(f * f);
        bank->em_n[o] = em.value();
      }
      for (std::size_t i = 0; i < n; ++i) {
        freq[i][0] = filter[i];
        freq[i][1] = 0.0;
      }
      bank->plans->Inverse(freq.get(), spatial.get());
      // real(ifft2(filter)) * sqrt(n), with ifft2 normalized by 1/n.
      for (std::size_t i = 0; i < n; ++i) spatial_filters[s][i] = spatial[i][0] / sqrt_n;
    }

    CompensatedSum an2;
    CompensatedSum aiaj;
    for (std::size_t i = 0; i < n; ++i) {
      for (int s = 0; s < kScales; ++s) an2.Add(spatial_filters[s][i] * spatial_filters[s][i]);
    }
    for (int si = 0; si < kScales - 1; ++si) {
      for (int sj = si + 1; sj < kScales; ++sj) {
        for (std::size_t i = 0; i < n; ++i) {
          aiaj.Add(spatial_filters[si][i] * spatial_filters[sj][i]);
        }
      }
    }
    bank->sum_an2[o] = an2.value();
    bank->sum_ai_aj[o] = aiaj.value();
  }
  return bank;
}

const FilterBank& FilterBankFor(int rows, int cols) {
  static std::mutex mu;
  static std::map<std::pair<int, int>, std::unique_ptr<FilterBank>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[{rows, cols}];
  if (!slot) slot = BuildFilterBank(rows, cols);
  return *slot;
}

// MATLAB-style median: mean of the two middle values for even counts.
double Median(std::vector<double> v) {
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + mid, v.end());
  const double upper = v[mid];
  if (v.size() % 2) return upper;
  const double lower = *std::max_element(v.begin(), v.begin() + mid);
  return 0.5 * (lower + upper);
}

}  // namespace

FloatPlane PhaseCongruency(const FloatPlane& image) {
  const int rows = image.height;
  const int cols = image.width;
  const FilterBank& bank = FilterBankFor(rows, cols);
  const std::size_t n = static_cast<std::size_t>(rows) * cols;
  const double inv_n = 1.0 / static_cast<double>(n);

  ComplexBuffer buffer = AllocComplex(n);
  ComplexBuffer image_fft = AllocComplex(n);
  for (std::size_t i = 0; i < n; ++i) {
    buffer[i][0] = image.values[i];
    buffer[i][1] = 0.0;
  }
  bank.plans->Forward(buffer.get(), image_fft.get());

  std::vector<ComplexBuffer> eo;
  for (int s = 0; s < kScales; ++s) eo.push_back(AllocComplex(n));

  std::vector<double> energy_all(n, 0.0);
  std::vector<double> an_all(n, 0.0);
  std::vector<double> sum_e(n), sum_o(n), sum_an(n), energy(n), e2n(n);

  for (int o = 0; o < kOrientations; ++o) {
    std::fill(sum_e.begin(), sum_e.end(), 0.0);
    std::fill(sum_o.begin(), sum_o.end(), 0.0);
    std::fill(sum_an.begin(), sum_an.end(), 0.0);
    for (int s = 0; s < kScales; ++s) {
      const std::vector<double>& filter = bank.filters[o * kScales + s];
      for (std::size_t i = 0; i < n; ++i) {
        buffer[i][0] = image_fft[i][0] * filter[i];
        buffer[i][1] = image_fft[i][1] * filter[i];
      }
      fftw_complex* out = eo[s].get();
      bank.plans->Inverse(buffer.get(), out);
      for (std::size_t i = 0; i < n; ++i) {
        out[i][0] *= inv_n;
        out[i][1] *= inv_n;
        sum_an[i] += std::hypot(out[i][0], out[i][1]);
        sum_e[i] += out[i][0];
        sum_o[i] += out[i][1];
      }
    }

    std::fill(energy.begin(), energy.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      const double x_energy = std::sqrt(sum_e[i] * sum_e[i] + sum_o[i] * sum_o[i]) + kEpsilon;
      const double mean_e = sum_e[i] / x_energy;
      const double mean_o = sum_o[i] / x_energy;
      double acc = 0.0;
      for (int s = 0; s < kScales; ++s) {
        const double e = eo[s][i][0];
        const double od = eo[s][i][1];
        acc += e * mean_e + od * mean_o - std::abs(e * mean_o - od * mean_e);
      }
      energy[i] = acc;
    }

    // Noise threshold from the smallest-scale response: the median squared
    // amplitude of a Rayleigh-distributed response estimates its mean.
    for (std::size_t i = 0; i < n; ++i) {
      e2n[i] = eo[0][i][0] * eo[0][i][0] + eo[0][i][1] * eo[0][i][1];
    }
    const double mean_e2n = -Median(e2n) / std::log(0.5);
    const double noise_power = mean_e2n / bank.em_n[o];
    const double noise_energy2 =
        2.0 * noise_power * bank.sum_an2[o] + 4.0 * noise_power * bank.sum_ai_aj[o];
    const double tau = std::sqrt(noise_energy2 / 2.0);
    const double noise_mean = tau * std::sqrt(std::numbers::pi / 2.0);
    const double noise_sigma = std::sqrt((2.0 - std::numbers::pi / 2.0) * tau * tau);
    const double threshold = (noise_mean + kNoiseK * noise_sigma) / 1.7;

    for (std::size_t i = 0; i < n; ++i) {
      energy_all[i] += std::max(energy[i] - threshold, 0.0);
      an_all[i] += sum_an[i];
    }
  }

  FloatPlane pc{cols, rows, std::vector<double>(n)};
  for (std::size_t i = 0; i < n; ++i) {
    pc.values[i] = an_all[i] > 0.0 ? energy_all[i] / an_all[i] : 0.0;
  }
  return pc;
}

FloatPlane GradientMagnitude(const FloatPlane& image) {
  // Correlation kernels; sign is irrelevant for the magnitude.
  static constexpr double kDx[3][3] = {{3, 0, -3}, {10, 0, -10}, {3, 0, -3}};
  static constexpr double kDy[3][3] = {{3, 10, 3}, {0, 0, 0}, {-3, -10, -3}};
  const int w = image.width;
  const int h = image.height;
  FloatPlane out{w, h, std::vector<double>(static_cast<std::size_t>(w) * h)};
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double gx = 0.0;
      double gy = 0.0;
      for (int a = 0; a < 3; ++a) {
        const int yy = y + a - 1;
        if (yy < 0 || yy >= h) continue;
        for (int b = 0; b < 3; ++b) {
          const int xx = x + b - 1;
          if (xx < 0 || xx >= w) continue;
          const double v = image.at(xx, yy);
          gx += kDx[a][b] * v;
          gy += kDy[a][b] * v;
        }
      }
      gx /= 16.0;
      gy /= 16.0;
      out.values[static_cast<std::size_t>(y) * w + x] = std::sqrt(gx * gx + gy * gy);
    }
  }
  return out;
}

FloatPlane FsimDownsample(const ImagePlane& image) {
  const int w = image.width();
  const int h = image.height();
  const int f = std::max(1, static_cast<int>(std::lround(std::min(w, h) / 256.0)));
  if (f == 1) {
    FloatPlane out{w, h, std::vector<double>(image.samples().begin(), image.samples().end())};
    return out;
  }
  // conv2(img, ones(f)/f^2, 'same'): output(i) averages input rows
  // i + f/2 - (f-1) .. i + f/2, zero outside the image.
  const int off = f / 2;
  const int ow = (w + f - 1) / f;
  const int oh = (h + f - 1) / f;
  FloatPlane out{ow, oh, std::vector<double>(static_cast<std::size_t>(ow) * oh)};
  const double norm = 1.0 / (f * f);
  for (int oy = 0; oy < oh; ++oy) {
    for (int ox = 0; ox < ow; ++ox) {
      const int cy = oy * f + off;
      const int cx = ox * f + off;
      double acc = 0.0;
      for (int a = 0; a < f; ++a) {
        const int yy = cy - a;
        if (yy < 0 || yy >= h) continue;
        for (int b = 0; b < f; ++b) {
          const int xx = cx - b;
          if (xx < 0 || xx >= w) continue;
          acc += image.at(xx, yy);
        }
      }
      out.values[static_cast<std::size_t>(oy) * ow + ox] = acc * norm;
    }
  }
  return out;
}

FsimFeatures ComputeFsimFeatures(const ImagePlane& image) {
  if (image.width() < 32 || image.height() < 32) {
    throw InvalidArgument("FSIM needs at least 32x32 pixels");
  }
  const FloatPlane y = FsimDownsample(image);
  return FsimFeatures{PhaseCongruency(y), GradientMagnitude(y)};
}

double FsimFromFeatures(const FsimFeatures& a, const FsimFeatures& b) {
  if (a.pc.width != b.pc.width || a.pc.height != b.pc.height) {
    throw DimensionMismatch("FSIM feature maps differ in size");
  }
  CompensatedSum weighted;
  CompensatedSum weights;
  CompensatedSum gm_only;
  const std::size_t n = a.pc.values.size();
  for (std::size_t i = 0; i < n; ++i) {
    const double p1 = a.pc.values[i];
    const double p2 = b.pc.values[i];
    const double g1 = a.gm.values[i];
    const double g2 = b.gm.values[i];
    const double s_pc = (2.0 * p1 * p2 + kT1) / (p1 * p1 + p2 * p2 + kT1);
    const double s_gm = (2.0 * g1 * g2 + kT2) / (g1 * g1 + g2 * g2 + kT2);
    const double pcm = std::max(p1, p2);
    weighted.Add(s_pc * s_gm * pcm);
    weights.Add(pcm);
    gm_only.Add(s_pc * s_gm);
  }
  // Featureless rasters (all PC zero) carry no weighting; fall back to the
  // plain mean similarity.
  if (weights.value() <= 0.0) return gm_only.value() / static_cast<double>(n);
  return weighted.value() / weights.value();
}

}  // namespace qtanneal
