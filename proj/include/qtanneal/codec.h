#ifndef QTANNEAL_CODEC_H_
#define QTANNEAL_CODEC_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "qtanneal/dct.h"
#include "qtanneal/image.h"
#include "qtanneal/qtable.h"

namespace qtanneal {

// Baseline, single-component JFIF encoder with a pluggable luminance table.
//
// Per 8x8 block: level shift by -128, orthonormal DCT, divide by the table
// with round-half-away-from-zero, then Huffman-code with the Annex K
// luminance tables. Images whose dimensions are not multiples of 8 are
// padded by edge replication. Reconstruction runs the quantized
// coefficients through the same integer inverse DCT a libjpeg decoder
// uses, so Reconstruct() equals what any stock decoder shows for the file
// EncodeJfif() writes.

struct CompressionResult {
  ImagePlane reconstructed;
  std::size_t size_bytes = 0;
};

// Forward DCT coefficients of a padded image. Independent of the
// quantization table, so it can be computed once per image and reused for
// every table an optimizer tries.
class DctImage {
 public:
  // Throws InvalidArgument if the image is smaller than 8x8 or larger than
  // the 65535 pixel JFIF limit.
  explicit DctImage(const ImagePlane& image);

  int width() const { return width_; }
  int height() const { return height_; }
  int blocks_wide() const { return blocks_wide_; }
  int blocks_high() const { return blocks_high_; }
  const DctBlock& block(int bx, int by) const {
    return blocks_[static_cast<std::size_t>(by) * blocks_wide_ + bx];
  }

 private:
  int width_;
  int height_;
  int blocks_wide_;
  int blocks_high_;
  std::vector<DctBlock> blocks_;
};

// Quantizes one block: round(coef / divisor), half away from zero.
CoefficientBlock QuantizeBlock(const DctBlock& coefficients, const QuantTable& table);

ImagePlane Reconstruct(const ImagePlane& image, const QuantTable& table);
ImagePlane Reconstruct(const DctImage& image, const QuantTable& table);

// Byte length of the complete JFIF stream EncodeJfif() would produce,
// computed without materializing it.
std::size_t EntropySize(const ImagePlane& image, const QuantTable& table);
std::size_t EntropySize(const DctImage& image, const QuantTable& table);

std::vector<std::uint8_t> EncodeJfif(const ImagePlane& image, const QuantTable& table);
std::vector<std::uint8_t> EncodeJfif(const DctImage& image, const QuantTable& table);

// Writes EncodeJfif() to `path`; returns the number of bytes written.
std::size_t EmitJfif(const ImagePlane& image, const QuantTable& table,
                     const std::filesystem::path& path);

// Scales `table` to `quality` and returns reconstruction and size under the
// scaled table.
CompressionResult Compress(const ImagePlane& image, const QuantTable& table, int quality);

// Reconstruction and size under `table` as given (no scaling), from a
// single quantization pass.
CompressionResult CompressWithTable(const DctImage& image, const QuantTable& table);

// Re-reads the first DQT segment of a JFIF stream (table 0, 8-bit).
// Throws FormatError if none is present.
QuantTable ReadDqt(const std::vector<std::uint8_t>& jfif);

}  // namespace qtanneal

#endif  // QTANNEAL_CODEC_H_
