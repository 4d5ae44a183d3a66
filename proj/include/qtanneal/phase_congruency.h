#ifndef QTANNEAL_PHASE_CONGRUENCY_H_
#define QTANNEAL_PHASE_CONGRUENCY_H_

#include <vector>

#include "qtanneal/image.h"

namespace qtanneal {

// Real-valued raster used by the FSIM pipeline.
struct FloatPlane {
  int width = 0;
  int height = 0;
  std::vector<double> values;

  double at(int x, int y) const { return values[static_cast<std::size_t>(y) * width + x]; }
};

// Phase congruency by a log-Gabor filter bank evaluated in the frequency
// domain (periodic boundaries): 4 scales, 4 orientations, minimum
// wavelength 6, scale multiplier 2, sigma_onf 0.55, angular spread ratio
// 1.2, noise threshold k = 2 with the 1/1.7 correction for the PC_2 measure.
// Output values lie in [0, 1].
FloatPlane PhaseCongruency(const FloatPlane& image);

// Scharr gradient magnitude, zero-padded 'same' convolution.
FloatPlane GradientMagnitude(const FloatPlane& image);

// Mean-filters with an FxF box (zero-padded 'same' convolution) and keeps
// every F-th sample, F = max(1, round(min(w, h) / 256)).
FloatPlane FsimDownsample(const ImagePlane& image);

// Per-image FSIM features. Computing them once for a fixed original lets
// repeated comparisons skip half the work.
struct FsimFeatures {
  FloatPlane pc;
  FloatPlane gm;
};

FsimFeatures ComputeFsimFeatures(const ImagePlane& image);

// Throws DimensionMismatch when the feature maps differ in size.
double FsimFromFeatures(const FsimFeatures& a, const FsimFeatures& b);

}  // namespace qtanneal

#endif  // QTANNEAL_PHASE_CONGRUENCY_H_
