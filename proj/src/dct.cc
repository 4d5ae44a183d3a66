#include "qtanneal/dct.h"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace qtanneal {

namespace {

// basis[u][x] = c(u)/2 * cos((2x + 1) u pi / 16), c(0) = 1/sqrt(2).
struct CosineBasis {
  std::array<std::array<double, kBlockDim>, kBlockDim> m;

  CosineBasis() {
    for (int u = 0; u < kBlockDim; ++u) {
      const double cu = u == 0 ? std::numbers::sqrt2 / 2.0 : 1.0;
      for (int x = 0; x < kBlockDim; ++x) {
        m[u][x] = 0.5 * cu * std::cos((2 * x + 1) * u * std::numbers::pi / 16.0);
      }
    }
  }
};

const CosineBasis& Basis() {
  static const CosineBasis basis;
  return basis;
}

// Fixed-point constants of the islow transform: round(x * 2^13).
constexpr int kConstBits = 13;
constexpr int kPass1Bits = 2;
constexpr std::int64_t kFix0_298631336 = 2446;
constexpr std::int64_t kFix0_390180644 = 3196;
constexpr std::int64_t kFix0_541196100 = 4433;
constexpr std::int64_t kFix0_765366865 = 6270;
constexpr std::int64_t kFix0_899976223 = 7373;
constexpr std::int64_t kFix1_175875602 = 9633;
constexpr std::int64_t kFix1_501321110 = 12299;
constexpr std::int64_t kFix1_847759065 = 15137;
constexpr std::int64_t kFix1_961570560 = 16069;
constexpr std::int64_t kFix2_053119869 = 16819;
constexpr std::int64_t kFix2_562915447 = 20995;
constexpr std::int64_t kFix3_072711026 = 25172;

constexpr std::int64_t Descale(std::int64_t x, int n) {
  return (x + (std::int64_t{1} << (n - 1))) >> n;
}

// One 8-point islow butterfly over in[0..7] (stride-free). Writes the eight
// outputs descaled by `shift`.
void IslowPass(const std::array<std::int64_t, kBlockDim>& in, int shift,
               std::array<std::int64_t, kBlockDim>& out) {
  // Even part.
  std::int64_t z2 = in[2];
  std::int64_t z3 = in[6];
  std::int64_t z1 = (z2 + z3) * kFix0_541196100;
  std::int64_t tmp2 = z1 + z3 * -kFix1_847759065;
  std::int64_t tmp3 = z1 + z2 * kFix0_765366865;

  std::int64_t tmp0 = (in[0] + in[4]) << kConstBits;
  std::int64_t tmp1 = (in[0] - in[4]) << kConstBits;

  const std::int64_t tmp10 = tmp0 + tmp3;
  const std::int64_t tmp13 = tmp0 - tmp3;
  const std::int64_t tmp11 = tmp1 + tmp2;
  const std::int64_t tmp12 = tmp1 - tmp2;

  // Odd part.
  tmp0 = in[7];
  tmp1 = in[5];
  tmp2 = in[3];
  tmp3 = in[1];

  z1 = tmp0 + tmp3;
  z2 = tmp1 + tmp2;
  z3 = tmp0 + tmp2;
  std::int64_t z4 = tmp1 + tmp3;
  const std::int64_t z5 = (z3 + z4) * kFix1_175875602;

  tmp0 *= kFix0_298631336;
  tmp1 *= kFix2_053119869;
  tmp2 *= kFix3_072711026;
  tmp3 *= kFix1_501321110;
  z1 *= -kFix0_899976223;
  z2 *= -kFix2_562915447;
  z3 *= -kFix1_961570560;
  z4 *= -kFix0_390180644;

  z3 += z5;
  z4 += z5;

  tmp0 += z1 + z3;
  tmp1 += z2 + z4;
  tmp2 += z2 + z3;
  tmp3 += z1 + z4;

  out[0] = Descale(tmp10 + tmp3, shift);
  out[7] = Descale(tmp10 - tmp3, shift);
  out[1] = Descale(tmp11 + tmp2, shift);
  out[6] = Descale(tmp11 - tmp2, shift);
  out[2] = Descale(tmp12 + tmp1, shift);
  out[5] = Descale(tmp12 - tmp1, shift);
  out[3] = Descale(tmp13 + tmp0, shift);
  out[4] = Descale(tmp13 - tmp0, shift);
}

}  // namespace

DctBlock ForwardDct(const DctBlock& spatial) {
  const auto& c = Basis().m;
  DctBlock rows{};
  // rows[y][u] = sum_x c[u][x] f[y][x]
  for (int y = 0; y < kBlockDim; ++y) {
    for (int u = 0; u < kBlockDim; ++u) {
      double acc = 0.0;
      for (int x = 0; x < kBlockDim; ++x) acc += c[u][x] * spatial[y * kBlockDim + x];
      rows[y * kBlockDim + u] = acc;
    }
  }
  DctBlock out{};
  for (int v = 0; v < kBlockDim; ++v) {
    for (int u = 0; u < kBlockDim; ++u) {
      double acc = 0.0;
      for (int y = 0; y < kBlockDim; ++y) acc += c[v][y] * rows[y * kBlockDim + u];
      out[v * kBlockDim + u] = acc;
    }
  }
  return out;
}

DctBlock InverseDct(const DctBlock& coefficients) {
  const auto& c = Basis().m;
  DctBlock cols{};
  // cols[y][u] = sum_v c[v][y] F[v][u]
  for (int y = 0; y < kBlockDim; ++y) {
    for (int u = 0; u < kBlockDim; ++u) {
      double acc = 0.0;
      for (int v = 0; v < kBlockDim; ++v) acc += c[v][y] * coefficients[v * kBlockDim + u];
      cols[y * kBlockDim + u] = acc;
    }
  }
  DctBlock out{};
  for (int y = 0; y < kBlockDim; ++y) {
    for (int x = 0; x < kBlockDim; ++x) {
      double acc = 0.0;
      for (int u = 0; u < kBlockDim; ++u) acc += c[u][x] * cols[y * kBlockDim + u];
      out[y * kBlockDim + x] = acc;
    }
  }
  return out;
}

void DecoderInverseDct(const CoefficientBlock& quantized, const QuantTable& table,
                       std::span<std::uint8_t, kBlockSize> out) {
  std::array<std::int64_t, kBlockSize> workspace;
  std::array<std::int64_t, kBlockDim> in;
  std::array<std::int64_t, kBlockDim> res;

  // Pass 1: columns, results scaled up by 2^kPass1Bits.
  for (int col = 0; col < kBlockDim; ++col) {
    for (int k = 0; k < kBlockDim; ++k) {
      const int idx = k * kBlockDim + col;
      in[k] = std::int64_t{quantized[idx]} * table[idx];
    }
    IslowPass(in, kConstBits - kPass1Bits, res);
    for (int k = 0; k < kBlockDim; ++k) workspace[k * kBlockDim + col] = res[k];
  }

  // Pass 2: rows, removing the pass-1 scale and the factor of 8.
  for (int row = 0; row < kBlockDim; ++row) {
    for (int k = 0; k < kBlockDim; ++k) in[k] = workspace[row * kBlockDim + k];
    IslowPass(in, kConstBits + kPass1Bits + 3, res);
    for (int k = 0; k < kBlockDim; ++k) {
      out[row * kBlockDim + k] =
          static_cast<std::uint8_t>(std::clamp<std::int64_t>(res[k] + 128, 0, 255));
    }
  }
}

}  // namespace qtanneal
