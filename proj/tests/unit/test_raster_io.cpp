#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include <png.h>

#include "netgrab/png_io.hpp"
#include "netgrab/preprocess.hpp"
#include "synthetic.hpp"

using namespace netgrab;

namespace {

std::vector<std::uint8_t> encode_rgba(int w, int h, const std::vector<std::uint8_t>& rgba) {
  png_image img{};
  img.version = PNG_IMAGE_VERSION;
  img.width = static_cast<png_uint_32>(w);
  img.height = static_cast<png_uint_32>(h);
  img.format = PNG_FORMAT_RGBA;
  png_alloc_size_t size = 0;
  REQUIRE(png_image_write_to_memory(&img, nullptr, &size, 0, rgba.data(), 0, nullptr));
  std::vector<std::uint8_t> out(size);
  REQUIRE(png_image_write_to_memory(&img, out.data(), &size, 0, rgba.data(), 0, nullptr));
  out.resize(size);
  return out;
}

std::filesystem::path temp_path(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("netgrab_unit_" + name);
}

}  // namespace

TEST_CASE("raster dimensions must be positive") {
  CHECK_THROWS_AS(GrayImage(0, 3), Error);
  CHECK_THROWS_AS(RgbImage(3, 0), Error);
  try {
    BinaryImage(-1, 1);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::InvalidParameter);
  }
}

TEST_CASE("plane accessors") {
  GrayImage g(4, 3, 7);
  CHECK(g.width() == 4);
  CHECK(g.height() == 3);
  CHECK(g(3, 2) == 7);
  CHECK(g.contains(3, 2));
  CHECK_FALSE(g.contains(4, 0));
  CHECK(g.at_or(-1, 0, 99) == 99);
  g(1, 1) = 200;
  CHECK(g.data()[g.index(1, 1)] == 200);
}

TEST_CASE("png: single red pixel round trip") {
  RgbImage img(1, 1, Rgb{255, 0, 0});
  const auto bytes = encode_png(img);
  CHECK(has_png_signature(bytes));
  const RgbImage back = decode_png(bytes);
  CHECK(back == img);
}

TEST_CASE("png: gray pixel expands to equal channels") {
  GrayImage g(1, 1, 128);
  const RgbImage back = decode_png(encode_png(g));
  CHECK(back.get(0, 0) == Rgb{128, 128, 128});
}

TEST_CASE("png: transparent pixel composites over white") {
  const auto bytes = encode_rgba(2, 1, {0, 0, 0, 0, 0, 0, 0, 255});
  const RgbImage img = decode_png(bytes);
  CHECK(img.get(0, 0) == Rgb{255, 255, 255});
  CHECK(img.get(1, 0) == Rgb{0, 0, 0});
}

TEST_CASE("png: half transparent black is mid gray") {
  const RgbImage img = decode_png(encode_rgba(1, 1, {0, 0, 0, 128}));
  // 255 * (255 - 128) / 255 = 127
  CHECK(img.get(0, 0) == Rgb{127, 127, 127});
}

TEST_CASE("png: binary image encodes foreground as 255") {
  BinaryImage b(5, 4);
  b(2, 3) = 1;
  const auto path = temp_path("binary.png");
  save_png(b, path);
  const GrayImage g = load_gray_png(path);
  int nonzero = 0;
  for (int y = 0; y < 4; ++y) {
    for (int x = 0; x < 5; ++x) {
      if (g(x, y)) {
        ++nonzero;
        CHECK(g(x, y) == 255);
        CHECK(x == 2);
        CHECK(y == 3);
      }
    }
  }
  CHECK(nonzero == 1);
  CHECK(load_binary_png(path) == b);
  std::filesystem::remove(path);
}

TEST_CASE("png: random gray round trip is lossless") {
  const GrayImage g = testsupport::random_gray(64, 64, 11);
  const auto path = temp_path("gray.png");
  save_png(g, path);
  CHECK(load_gray_png(path) == g);
  std::filesystem::remove(path);
}

TEST_CASE("png: rgb save then load is lossless") {
  RgbImage img(13, 7);
  std::mt19937 rng(5);
  for (auto& v : img.data()) v = static_cast<std::uint8_t>(rng());
  const auto path = temp_path("rgb.png");
  save_png(img, path);
  CHECK(load_png(path) == img);
  std::filesystem::remove(path);
}

TEST_CASE("png: error kinds") {
  try {
    load_png("/nonexistent/dir/x.png");
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::FileNotFound);
  }
  const std::vector<std::uint8_t> junk{'n', 'o', 't', ' ', 'a', ' ', 'p', 'n', 'g'};
  CHECK_FALSE(has_png_signature(junk));
  try {
    decode_png(junk);
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::DecodeError);
  }
  auto truncated = encode_png(RgbImage(30, 30, Rgb{1, 2, 3}));
  truncated.resize(truncated.size() / 2);
  try {
    decode_png(truncated);
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::DecodeError);
  }
}

TEST_CASE("grayscale conversion") {
  RgbImage img(4, 1);
  img.set(0, 0, {255, 255, 255});
  img.set(1, 0, {255, 0, 0});
  img.set(2, 0, {0, 0, 255});
  img.set(3, 0, {0, 255, 0});
  const GrayImage g = to_grayscale(img);
  CHECK(g(0, 0) == 255);
  CHECK(g(1, 0) == 76);
  CHECK(g(2, 0) == 29);
  CHECK(g(3, 0) == 150);  // 149.685
}

TEST_CASE("grayscale conversion matches floating point rounding on every gray triple") {
  std::mt19937 rng(3);
  RgbImage img(64, 64);
  for (auto& v : img.data()) v = static_cast<std::uint8_t>(rng());
  const GrayImage g = to_grayscale(img);
  for (int y = 0; y < 64; ++y) {
    for (int x = 0; x < 64; ++x) {
      const Rgb c = img.get(x, y);
      const double l = 0.299 * c.r + 0.587 * c.g + 0.114 * c.b;
      CHECK(std::abs(g(x, y) - l) <= 0.5 + 1e-9);
    }
  }
}

TEST_CASE("downscale_to_fit") {
  RgbImage img(8, 4, Rgb{10, 20, 30});
  CHECK(downscale_to_fit(img, 8) == img);
  const RgbImage small = downscale_to_fit(img, 4);
  CHECK(small.width() == 4);
  CHECK(small.height() == 2);
  CHECK(small.get(3, 1) == Rgb{10, 20, 30});

  RgbImage checker(4, 4);
  for (int y = 0; y < 4; ++y) {
    for (int x = 0; x < 4; ++x) checker.set(x, y, (x + y) % 2 ? Rgb{255, 255, 255} : Rgb{0, 0, 0});
  }
  const RgbImage avg = downscale_to_fit(checker, 2);
  CHECK(avg.get(0, 0) == Rgb{128, 128, 128});
  CHECK_THROWS_AS(downscale_to_fit(img, 0), Error);
}
