#include "qtanneal/image.h"

#include <gtest/gtest.h>

#include <fstream>
#include <string>
#include <vector>

#include "qtanneal/errors.h"
#include "test_util.h"

namespace qtanneal {
namespace {

using testing::TempDir;

void WriteBytes(const std::filesystem::path& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary);
  out << bytes;
}

TEST(ImagePlaneTest, RejectsMismatchedSampleCount) {
  EXPECT_THROW(ImagePlane(4, 4, std::vector<std::uint8_t>(15)), InvalidArgument);
}

TEST(ImageIoTest, PgmRoundTripWithComments) {
  TempDir dir("image");
  const ImagePlane img = testing::SyntheticImage(13, 9, 3);
  const std::vector<std::string> comments = {"qtanneal 0.1.0", "quality = 75"};
  SavePgm(img, dir / "a.pgm", comments);
  EXPECT_EQ(LoadImage(dir / "a.pgm"), img);
}

TEST(ImageIoTest, ReadsHeaderCommentsAndIrregularWhitespace) {
  TempDir dir("image");
  WriteBytes(dir / "b.pgm", std::string("P5 # magic\n# full line\n2\t2\n255\n") +
                                std::string("\x01\x02\x03\x04", 4));
  const ImagePlane img = LoadImage(dir / "b.pgm");
  ASSERT_EQ(img.width(), 2);
  EXPECT_EQ(img.at(1, 1), 4);
  EXPECT_EQ(img.at(1, 0), 2);
}

TEST(ImageIoTest, PpmConvertsToBt601Luma) {
  TempDir dir("image");
  // Pure red, green, blue and a grey.
  WriteBytes(dir / "c.ppm", std::string("P6\n4 1\n255\n") +
                                std::string("\xff\x00\x00\x00\xff\x00\x00\x00\xff\x80\x80\x80", 12));
  const ImagePlane img = LoadImage(dir / "c.ppm");
  EXPECT_EQ(img.at(0, 0), 76);   // 0.299 * 255 = 76.245
  EXPECT_EQ(img.at(1, 0), 150);  // 0.587 * 255 = 149.685
  EXPECT_EQ(img.at(2, 0), 29);   // 0.114 * 255 = 29.07
  EXPECT_EQ(img.at(3, 0), 128);
}

TEST(ImageIoTest, RgbToLumaRoundsToNearest) {
  EXPECT_EQ(RgbToLuma(255, 255, 255), 255);
  EXPECT_EQ(RgbToLuma(0, 0, 0), 0);
  EXPECT_EQ(RgbToLuma(10, 20, 30), 18);  // 2.99 + 11.74 + 3.42 = 18.15
}

TEST(ImageIoTest, MissingFileIsIoError) {
  EXPECT_THROW(LoadImage("/nonexistent/x.pgm"), IoError);
}

TEST(ImageIoTest, TruncatedPixelDataIsFormatError) {
  TempDir dir("image");
  WriteBytes(dir / "t.pgm", std::string("P5\n4 4\n255\n") + std::string(10, '\x10'));
  EXPECT_THROW(LoadImage(dir / "t.pgm"), FormatError);
}

TEST(ImageIoTest, RejectsOtherFormatsAndMaxvals) {
  TempDir dir("image");
  WriteBytes(dir / "p2.pgm", "P2\n1 1\n255\n7\n");
  EXPECT_THROW(LoadImage(dir / "p2.pgm"), FormatError);
  WriteBytes(dir / "16.pgm", std::string("P5\n1 1\n65535\n") + std::string(2, '\0'));
  EXPECT_THROW(LoadImage(dir / "16.pgm"), FormatError);
}

TEST(ImageIoTest, CorpusImagesLoad) {
  const ImagePlane img = LoadImage(testing::CorpusImage(0));
  EXPECT_EQ(img.width(), 256);
  EXPECT_EQ(img.height(), 256);
}

}  // namespace
}  // namespace qtanneal
