#ifndef QTANNEAL_IMAGE_H_
#define QTANNEAL_IMAGE_H_

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace qtanneal {

// 8-bit single-channel raster, row-major.
class ImagePlane {
 public:
  ImagePlane() = default;
  ImagePlane(int width, int height, std::uint8_t fill = 0);
  // Throws InvalidArgument when samples.size() != width * height.
  ImagePlane(int width, int height, std::vector<std::uint8_t> samples);

  int width() const { return width_; }
  int height() const { return height_; }
  bool empty() const { return samples_.empty(); }

  std::uint8_t at(int x, int y) const { return samples_[static_cast<std::size_t>(y) * width_ + x]; }
  std::uint8_t& at(int x, int y) { return samples_[static_cast<std::size_t>(y) * width_ + x]; }

  std::span<const std::uint8_t> samples() const { return samples_; }
  std::span<std::uint8_t> samples() { return samples_; }

  std::span<const std::uint8_t> row(int y) const {
    return std::span<const std::uint8_t>(samples_).subspan(static_cast<std::size_t>(y) * width_, width_);
  }

  bool operator==(const ImagePlane& other) const = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> samples_;
};

// Reads binary PGM (P5) directly or PPM (P6) converted to BT.601 luma,
// Y = round(0.299 R + 0.587 G + 0.114 B). Only maxval 255 is accepted.
// Throws IoError or FormatError.
ImagePlane LoadImage(const std::filesystem::path& path);

// Writes binary PGM; each comment becomes a '# ' header line.
void SavePgm(const ImagePlane& image, const std::filesystem::path& path,
             std::span<const std::string> comments = {});

// Luma of one RGB triple with the loader's rounding rule.
std::uint8_t RgbToLuma(std::uint8_t r, std::uint8_t g, std::uint8_t b);

}  // namespace qtanneal

#endif  // QTANNEAL_IMAGE_H_
