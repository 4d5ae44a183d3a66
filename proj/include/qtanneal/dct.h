#ifndef QTANNEAL_DCT_H_
#define QTANNEAL_DCT_H_

#include <array>
#include <cstdint>
#include <span>

#include "qtanneal/qtable.h"

namespace qtanneal {

using DctBlock = std::array<double, kBlockSize>;
using CoefficientBlock = std::array<std::int16_t, kBlockSize>;

// Orthonormal 2-D type-II DCT of a level-shifted 8x8 block (natural order).
// The DC term is (1/8) of the block sum.
DctBlock ForwardDct(const DctBlock& spatial);

// Exact inverse of ForwardDct.
DctBlock InverseDct(const DctBlock& coefficients);

// Integer inverse DCT of the IJG "islow" decoder: dequantizes `quantized`
// with `table`, transforms in 13-bit fixed point, adds 128 and saturates to
// [0, 255]. Produces the same samples a stock libjpeg decoder does, so our
// reconstruction and a third-party decode of the emitted file agree exactly.
void DecoderInverseDct(const CoefficientBlock& quantized, const QuantTable& table,
                       std::span<std::uint8_t, kBlockSize> out);

}  // namespace qtanneal

#endif  // QTANNEAL_DCT_H_
