#include "qtanneal/image.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <iterator>
#include <string>

#include "qtanneal/errors.h"

namespace qtanneal {

namespace {

// Cursor over a netpbm header: whitespace-separated decimal fields with
// '#' comments running to end of line.
class HeaderReader {
 public:
  HeaderReader(const std::vector<char>& data, const std::string& name)
      : data_(data), name_(name) {}

  int NextInt() {
    SkipSpaceAndComments();
    if (pos_ >= data_.size() || !std::isdigit(static_cast<unsigned char>(data_[pos_]))) {
      throw FormatError(name_ + ": malformed netpbm header");
    }
    long value = 0;
    while (pos_ < data_.size() && std::isdigit(static_cast<unsigned char>(data_[pos_]))) {
      value = value * 10 + (data_[pos_++] - '0');
      if (value > 1'000'000) throw FormatError(name_ + ": header value too large");
    }
    return static_cast<int>(value);
  }

  // Exactly one whitespace byte separates maxval from the raster.
  std::size_t RasterOffset() {
    if (pos_ >= data_.size() || !std::isspace(static_cast<unsigned char>(data_[pos_]))) {
      throw FormatError(name_ + ": missing separator before raster");
    }
    return pos_ + 1;
  }

 private:
  void SkipSpaceAndComments() {
    while (pos_ < data_.size()) {
      if (data_[pos_] == '#') {
        while (pos_ < data_.size() && data_[pos_] != '\n') ++pos_;
      } else if (std::isspace(static_cast<unsigned char>(data_[pos_]))) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  const std::vector<char>& data_;
  const std::string& name_;
  std::size_t pos_ = 2;
};

}  // namespace

ImagePlane::ImagePlane(int width, int height, std::uint8_t fill)
    : width_(width),
      height_(height),
      samples_(static_cast<std::size_t>(width) * height, fill) {
  if (width < 0 || height < 0) throw InvalidArgument("negative image dimensions");
}

ImagePlane::ImagePlane(int width, int height, std::vector<std::uint8_t> samples)
    : width_(width), height_(height), samples_(std::move(samples)) {
  if (width < 0 || height < 0 ||
      samples_.size() != static_cast<std::size_t>(width) * height) {
    throw InvalidArgument("sample count does not match " + std::to_string(width) +
                          "x" + std::to_string(height));
  }
}

std::uint8_t RgbToLuma(std::uint8_t r, std::uint8_t g, std::uint8_t b) {
  const double y = std::round(0.299 * r + 0.587 * g + 0.114 * b);
  return static_cast<std::uint8_t>(std::clamp(y, 0.0, 255.0));
}

ImagePlane LoadImage(const std::filesystem::path& path) {
  const std::string name = path.string();
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + name);
  const std::vector<char> data((std::istreambuf_iterator<char>(in)),
                               std::istreambuf_iterator<char>());
  if (data.size() < 2 || data[0] != 'P' || (data[1] != '5' && data[1] != '6')) {
    throw FormatError(name + ": unsupported format (expected P5 or P6)");
  }
  const bool color = data[1] == '6';
  HeaderReader header(data, name);
  const int width = header.NextInt();
  const int height = header.NextInt();
  const int maxval = header.NextInt();
  if (maxval != 255) {
    throw FormatError(name + ": maxval " + std::to_string(maxval) +
                      " unsupported (only 255)");
  }
  if (width <= 0 || height <= 0) throw FormatError(name + ": empty image");
  const std::size_t offset = header.RasterOffset();
  const std::size_t pixels = static_cast<std::size_t>(width) * height;
  const std::size_t channels = color ? 3 : 1;
  if (data.size() - offset < pixels * channels) {
    throw FormatError(name + ": truncated raster");
  }

  std::vector<std::uint8_t> samples(pixels);
  const auto* raster = reinterpret_cast<const std::uint8_t*>(data.data() + offset);
  if (color) {
    for (std::size_t i = 0; i < pixels; ++i) {
      samples[i] = RgbToLuma(raster[3 * i], raster[3 * i + 1], raster[3 * i + 2]);
    }
  } else {
    std::copy(raster, raster + pixels, samples.begin());
  }
  return ImagePlane(width, height, std::move(samples));
}

void SavePgm(const ImagePlane& image, const std::filesystem::path& path,
             std::span<const std::string> comments) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << "P5\n";
  for (const std::string& c : comments) out << "# " << c << '\n';
  out << image.width() << ' ' << image.height() << "\n255\n";
  const auto samples = image.samples();
  out.write(reinterpret_cast<const char*>(samples.data()),
            static_cast<std::streamsize>(samples.size()));
  if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace qtanneal
