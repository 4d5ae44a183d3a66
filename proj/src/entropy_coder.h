#ifndef QTANNEAL_SRC_ENTROPY_CODER_H_
#define QTANNEAL_SRC_ENTROPY_CODER_H_

// Baseline JPEG Huffman coding shared by the file writer and the size
// counter. Both run the same templated code; only the byte sink differs.

#include <array>
#include <cstddef>
#include <cstdint>
#include <cstdlib>
#include <vector>

#include "qtanneal/dct.h"
#include "qtanneal/qtable.h"

namespace qtanneal::internal {

struct HuffmanCode {
  std::uint16_t code = 0;
  std::uint8_t length = 0;
};

struct HuffmanSpec {
  std::array<std::uint8_t, 16> counts;  // codes per bit length 1..16
  std::vector<std::uint8_t> symbols;
};

struct HuffmanTable {
  explicit HuffmanTable(const HuffmanSpec& spec);
  std::array<HuffmanCode, 256> codes{};
};

const HuffmanSpec& DcLuminanceSpec();
const HuffmanSpec& AcLuminanceSpec();
const HuffmanTable& DcLuminanceTable();
const HuffmanTable& AcLuminanceTable();

struct CountingSink {
  std::size_t bytes = 0;
  void Put(std::uint8_t) { ++bytes; }
};

struct VectorSink {
  std::vector<std::uint8_t>* out;
  void Put(std::uint8_t b) { out->push_back(b); }
};

template <typename Sink>
class BitWriter {
 public:
  explicit BitWriter(Sink& sink) : sink_(sink) {}

  void Write(std::uint32_t bits, int count) {
    buffer_ = (buffer_ << count) | (bits & ((1u << count) - 1));
    filled_ += count;
    while (filled_ >= 8) {
      filled_ -= 8;
      Emit(static_cast<std::uint8_t>(buffer_ >> filled_));
    }
  }

  // Pads the last partial byte with one-bits.
  void Flush() {
    if (filled_ > 0) Write(0x7F, 8 - filled_);
  }

 private:
  void Emit(std::uint8_t byte) {
    sink_.Put(byte);
    if (byte == 0xFF) sink_.Put(0x00);
  }

  Sink& sink_;
  std::uint64_t buffer_ = 0;
  int filled_ = 0;
};

// Number of magnitude bits of v (JPEG "SSSS" category).
inline int Category(int v) {
  unsigned a = static_cast<unsigned>(std::abs(v));
  int n = 0;
  while (a) {
    ++n;
    a >>= 1;
  }
  return n;
}

template <typename Sink>
void WriteValueBits(BitWriter<Sink>& w, int v, int category) {
  if (category == 0) return;
  const int bits = v < 0 ? v - 1 : v;
  w.Write(static_cast<std::uint32_t>(bits), category);
}

template <typename Sink>
void EncodeBlock(BitWriter<Sink>& w, const CoefficientBlock& block, int& prev_dc,
                 const HuffmanTable& dc, const HuffmanTable& ac) {
  const int diff = block[0] - prev_dc;
  prev_dc = block[0];
  const int dc_cat = Category(diff);
  w.Write(dc.codes[dc_cat].code, dc.codes[dc_cat].length);
  WriteValueBits(w, diff, dc_cat);

  int run = 0;
  for (int k = 1; k < kBlockSize; ++k) {
    const int v = block[kZigzagToNatural[k]];
    if (v == 0) {
      ++run;
      continue;
    }
    while (run > 15) {
      w.Write(ac.codes[0xF0].code, ac.codes[0xF0].length);  // ZRL
      run -= 16;
    }
    const int cat = Category(v);
    const int symbol = (run << 4) | cat;
    w.Write(ac.codes[symbol].code, ac.codes[symbol].length);
    WriteValueBits(w, v, cat);
    run = 0;
  }
  if (run > 0) w.Write(ac.codes[0x00].code, ac.codes[0x00].length);  // EOB
}

template <typename Sink>
void PutMarker(Sink& s, std::uint8_t marker) {
  s.Put(0xFF);
  s.Put(marker);
}

template <typename Sink>
void PutU16(Sink& s, int v) {
  s.Put(static_cast<std::uint8_t>(v >> 8));
  s.Put(static_cast<std::uint8_t>(v & 0xFF));
}

// SOI through SOS for a single 8-bit component.
template <typename Sink>
void WriteHeaders(Sink& s, int width, int height, const QuantTable& table) {
  PutMarker(s, 0xD8);  // SOI

  PutMarker(s, 0xE0);  // APP0 / JFIF 1.01, no density units, no thumbnail
  PutU16(s, 16);
  for (std::uint8_t c : {'J', 'F', 'I', 'F', '\0'}) s.Put(c);
  s.Put(1);
  s.Put(1);
  s.Put(0);
  PutU16(s, 1);
  PutU16(s, 1);
  s.Put(0);
  s.Put(0);

  PutMarker(s, 0xDB);  // DQT, 8-bit precision, table 0, zig-zag order
  PutU16(s, 2 + 1 + kBlockSize);
  s.Put(0x00);
  for (int k = 0; k < kBlockSize; ++k) {
    s.Put(static_cast<std::uint8_t>(table[kZigzagToNatural[k]]));
  }

  PutMarker(s, 0xC0);  // SOF0
  PutU16(s, 8 + 3);
  s.Put(8);
  PutU16(s, height);
  PutU16(s, width);
  s.Put(1);
  s.Put(1);     // component id
  s.Put(0x11);  // 1x1 sampling
  s.Put(0);     // quant table 0

  const HuffmanSpec& dc = DcLuminanceSpec();
  const HuffmanSpec& ac = AcLuminanceSpec();
  PutMarker(s, 0xC4);  // DHT
  PutU16(s, 2 + 17 + static_cast<int>(dc.symbols.size()) + 17 +
                static_cast<int>(ac.symbols.size()));
  s.Put(0x00);
  for (auto c : dc.counts) s.Put(c);
  for (auto v : dc.symbols) s.Put(v);
  s.Put(0x10);
  for (auto c : ac.counts) s.Put(c);
  for (auto v : ac.symbols) s.Put(v);

  PutMarker(s, 0xDA);  // SOS
  PutU16(s, 6 + 2);
  s.Put(1);
  s.Put(1);
  s.Put(0x00);
  s.Put(0);
  s.Put(63);
  s.Put(0);
}

}  // namespace qtanneal::internal

#endif  // QTANNEAL_SRC_ENTROPY_CODER_H_
