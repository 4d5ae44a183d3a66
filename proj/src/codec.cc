#include "qtanneal/codec.h"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "entropy_coder.h"
#include "qtanneal/errors.h"

namespace qtanneal {

namespace internal {

HuffmanTable::HuffmanTable(const HuffmanSpec& spec) {
  // Canonical code assignment (JPEG Annex C).
  std::uint16_t code = 0;
  std::size_t k = 0;
  for (int len = 1; len <= 16; ++len) {
    for (int i = 0; i < spec.counts[len - 1]; ++i) {
      codes[spec.symbols[k++]] = {code, static_cast<std::uint8_t>(len)};
      ++code;
    }
    code <<= 1;
  }
}

const HuffmanSpec& DcLuminanceSpec() {
  static const HuffmanSpec spec{{0, 1, 5, 1, 1, 1, 1, 1, 1, 0, 0, 0, 0, 0, 0, 0},
                                {0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11}};
  return spec;
}

const HuffmanSpec& AcLuminanceSpec() {
  static const HuffmanSpec spec{
      {0, 2, 1, 3, 3, 2, 4, 3, 5, 5, 4, 4, 0, 0, 1, 0x7d},
      {0x01, 0x02, 0x03, 0x00, 0x04, 0x11, 0x05, 0x12, 0x21, 0x31, 0x41, 0x06, 0x13, 0x51,
       0x61, 0x07, 0x22, 0x71, 0x14, 0x32, 0x81, 0x91, 0xa1, 0x08, 0x23, 0x42, 0xb1, 0xc1,
       0x15, 0x52, 0xd1, 0xf0, 0x24, 0x33, 0x62, 0x72, 0x82, 0x09, 0x0a, 0x16, 0x17, 0x18,
       0x19, 0x1a, 0x25, 0x26, 0x27, 0x28, 0x29, 0x2a, 0x34, 0x35, 0x36, 0x37, 0x38, 0x39,
       0x3a, 0x43, 0x44, 0x45, 0x46, 0x47, 0x48, 0x49, 0x4a, 0x53, 0x54, 0x55, 0x56, 0x57,
       0x58, 0x59, 0x5a, 0x63, 0x64, 0x65, 0x66, 0x67, 0x68, 0x69, 0x6a, 0x73, 0x74, 0x75,
       0x76, 0x77, 0x78, 0x79, 0x7a, 0x83, 0x84, 0x85, 0x86, 0x87, 0x88, 0x89, 0x8a, 0x92,
       0x93, 0x94, 0x95, 0x96, 0x97, 0x98, 0x99, 0x9a, 0xa2, 0xa3, 0xa4, 0xa5, 0xa6, 0xa7,
       0xa8, 0xa9, 0xaa, 0xb2, 0xb3, 0xb4, 0xb5, 0xb6, 0xb7, 0xb8, 0xb9, 0xba, 0xc2, 0xc3,
       0xc4, 0xc5, 0xc6, 0xc7, 0xc8, 0xc9, 0xca, 0xd2, 0xd3, 0xd4, 0xd5, 0xd6, 0xd7, 0xd8,
       0xd9, 0xda, 0xe1, 0xe2, 0xe3, 0xe4, 0xe5, 0xe6, 0xe7, 0xe8, 0xe9, 0xea, 0xf1, 0xf2,
       0xf3, 0xf4, 0xf5, 0xf6, 0xf7, 0xf8, 0xf9, 0xfa}};
  return spec;
}

const HuffmanTable& DcLuminanceTable() {
  static const HuffmanTable table(DcLuminanceSpec());
  return table;
}

const HuffmanTable& AcLuminanceTable() {
  static const HuffmanTable table(AcLuminanceSpec());
  return table;
}

}  // namespace internal

namespace {

using internal::BitWriter;

constexpr int kMaxJfifDimension = 65535;

// Walks every block once: quantizes, entropy-codes into `sink`, and when
// `reconstruction` is non-null writes the decoded samples into it.
template <typename Sink>
void EncodeImage(const DctImage& image, const QuantTable& table, Sink& sink,
                 ImagePlane* reconstruction) {
  internal::WriteHeaders(sink, image.width(), image.height(), table);
  BitWriter<Sink> writer(sink);
  const auto& dc = internal::DcLuminanceTable();
  const auto& ac = internal::AcLuminanceTable();
  int prev_dc = 0;
  std::array<std::uint8_t, kBlockSize> samples;
  for (int by = 0; by < image.blocks_high(); ++by) {
    for (int bx = 0; bx < image.blocks_wide(); ++bx) {
      const CoefficientBlock q = QuantizeBlock(image.block(bx, by), table);
      internal::EncodeBlock(writer, q, prev_dc, dc, ac);
      if (reconstruction == nullptr) continue;
      DecoderInverseDct(q, table, samples);
      const int x0 = bx * kBlockDim;
      const int y0 = by * kBlockDim;
      const int w = std::min(kBlockDim, image.width() - x0);
      const int h = std::min(kBlockDim, image.height() - y0);
      for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
          reconstruction->at(x0 + x, y0 + y) = samples[y * kBlockDim + x];
        }
      }
    }
  }
  writer.Flush();
  internal::PutMarker(sink, 0xD9);  // EOI
}

}  // namespace

DctImage::DctImage(const ImagePlane& image)
    : width_(image.width()),
      height_(image.height()),
      blocks_wide_((image.width() + kBlockDim - 1) / kBlockDim),
      blocks_high_((image.height() + kBlockDim - 1) / kBlockDim) {
  if (width_ < kBlockDim || height_ < kBlockDim) {
    throw InvalidArgument("codec needs at least 8x8 pixels, got " +
                          std::to_string(width_) + "x" + std::to_string(height_));
  }
  if (width_ > kMaxJfifDimension || height_ > kMaxJfifDimension) {
    throw InvalidArgument("image exceeds the 65535 pixel JFIF limit");
  }
  blocks_.resize(static_cast<std::size_t>(blocks_wide_) * blocks_high_);
  DctBlock spatial;
  for (int by = 0; by < blocks_high_; ++by) {
    for (int bx = 0; bx < blocks_wide_; ++bx) {
      for (int y = 0; y < kBlockDim; ++y) {
        const int sy = std::min(by * kBlockDim + y, height_ - 1);
        for (int x = 0; x < kBlockDim; ++x) {
          const int sx = std::min(bx * kBlockDim + x, width_ - 1);
          spatial[y * kBlockDim + x] = static_cast<double>(image.at(sx, sy)) - 128.0;
        }
      }
      blocks_[static_cast<std::size_t>(by) * blocks_wide_ + bx] = ForwardDct(spatial);
    }
  }
}

CoefficientBlock QuantizeBlock(const DctBlock& coefficients, const QuantTable& table) {
  CoefficientBlock q;
  for (int i = 0; i < kBlockSize; ++i) {
    // Baseline limits: DC magnitude category <= 11, AC <= 10.
    const double limit = i == 0 ? 2047.0 : 1023.0;
    q[i] = static_cast<std::int16_t>(
        std::clamp(std::round(coefficients[i] / table[i]), -limit, limit));
  }
  return q;
}

ImagePlane Reconstruct(const ImagePlane& image, const QuantTable& table) {
  return Reconstruct(DctImage(image), table);
}

ImagePlane Reconstruct(const DctImage& image, const QuantTable& table) {
  return CompressWithTable(image, table).reconstructed;
}

std::size_t EntropySize(const ImagePlane& image, const QuantTable& table) {
  return EntropySize(DctImage(image), table);
}

std::size_t EntropySize(const DctImage& image, const QuantTable& table) {
  internal::CountingSink sink;
  EncodeImage(image, table, sink, nullptr);
  return sink.bytes;
}

std::vector<std::uint8_t> EncodeJfif(const ImagePlane& image, const QuantTable& table) {
  return EncodeJfif(DctImage(image), table);
}

std::vector<std::uint8_t> EncodeJfif(const DctImage& image, const QuantTable& table) {
  std::vector<std::uint8_t> out;
  out.reserve(static_cast<std::size_t>(image.width()) * image.height() / 4 + 1024);
  internal::VectorSink sink{&out};
  EncodeImage(image, table, sink, nullptr);
  return out;
}

std::size_t EmitJfif(const ImagePlane& image, const QuantTable& table,
                     const std::filesystem::path& path) {
  const std::vector<std::uint8_t> bytes = EncodeJfif(image, table);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed for " + path.string());
  return bytes.size();
}

CompressionResult Compress(const ImagePlane& image, const QuantTable& table, int quality) {
  const QuantTable scaled = ScaleTable(table, quality);
  return CompressWithTable(DctImage(image), scaled);
}

CompressionResult CompressWithTable(const DctImage& image, const QuantTable& table) {
  CompressionResult result;
  result.reconstructed = ImagePlane(image.width(), image.height());
  internal::CountingSink sink;
  EncodeImage(image, table, sink, &result.reconstructed);
  result.size_bytes = sink.bytes;
  return result;
}

QuantTable ReadDqt(const std::vector<std::uint8_t>& jfif) {
  std::size_t pos = 2;
  if (jfif.size() < 4 || jfif[0] != 0xFF || jfif[1] != 0xD8) {
    throw FormatError("not a JPEG stream (missing SOI)");
  }
  while (pos + 4 <= jfif.size()) {
    if (jfif[pos] != 0xFF) throw FormatError("expected marker");
    const std::uint8_t marker = jfif[pos + 1];
    const std::size_t length = (std::size_t{jfif[pos + 2]} << 8) | jfif[pos + 3];
    if (marker == 0xDA || marker == 0xD9) break;
    if (pos + 2 + length > jfif.size()) throw FormatError("truncated segment");
    if (marker == 0xDB) {
      if (length < 3 + kBlockSize || (jfif[pos + 4] >> 4) != 0) {
        throw FormatError("unsupported DQT segment");
      }
      QuantTable table;
      for (int k = 0; k < kBlockSize; ++k) {
        table.set(kZigzagToNatural[k], jfif[pos + 5 + k]);
      }
      return table;
    }
    pos += 2 + length;
  }
  throw FormatError("no DQT segment before scan");
}

}  // namespace qtanneal
