#include "netgrab/png_io.hpp"

#include <png.h>

#include <cstring>
#include <fstream>
#include <iterator>

#include "netgrab/preprocess.hpp"

namespace netgrab {
namespace {

// png_image owns libpng state until png_image_free; this keeps it paired.
class PngImage {
 public:
  PngImage() {
    std::memset(&image_, 0, sizeof(image_));
    image_.version = PNG_IMAGE_VERSION;
  }
  ~PngImage() { png_image_free(&image_); }
  PngImage(const PngImage&) = delete;
  PngImage& operator=(const PngImage&) = delete;

  png_image* get() noexcept { return &image_; }
  png_image* operator->() noexcept { return &image_; }

 private:
  png_image image_;
};

RgbImage finish_decode(PngImage& png) {
  if (png->width == 0 || png->height == 0) {
    throw Error(ErrorKind::DecodeError, "PNG has zero size");
  }
  png->format = PNG_FORMAT_RGBA;
  std::vector<std::uint8_t> rgba(PNG_IMAGE_SIZE(*png.get()));
  if (!png_image_finish_read(png.get(), nullptr, rgba.data(), 0, nullptr)) {
    throw Error(ErrorKind::DecodeError, std::string("PNG decode failed: ") + png->message);
  }
  const int w = static_cast<int>(png->width);
  const int h = static_cast<int>(png->height);
  std::vector<std::uint8_t> rgb(static_cast<std::size_t>(w) * static_cast<std::size_t>(h) * 3);
  for (std::size_t p = 0, n = rgb.size() / 3; p < n; ++p) {
    const unsigned a = rgba[4 * p + 3];
    for (int c = 0; c < 3; ++c) {
      const unsigned v = rgba[4 * p + static_cast<std::size_t>(c)];
      // v*a/255 + 255*(255-a)/255, rounded half up (all terms non-negative)
      const unsigned num = v * a + 255u * (255u - a);
      rgb[3 * p + static_cast<std::size_t>(c)] = static_cast<std::uint8_t>((2 * num + 255) / 510);
    }
  }
  return RgbImage(w, h, std::move(rgb));
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::error_code ec;
  if (!std::filesystem::is_regular_file(path, ec)) {
    throw Error(ErrorKind::FileNotFound, "no such file: " + path.string());
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::IoError, "cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::vector<std::uint8_t> encode(const std::uint8_t* pixels, int width, int height,
                                 png_uint_32 format) {
  PngImage png;
  png->width = static_cast<png_uint_32>(width);
  png->height = static_cast<png_uint_32>(height);
  png->format = format;
  png_alloc_size_t size = 0;
  if (!png_image_write_to_memory(png.get(), nullptr, &size, 0, pixels, 0, nullptr)) {
    throw Error(ErrorKind::IoError, std::string("PNG encode failed: ") + png->message);
  }
  std::vector<std::uint8_t> out(size);
  if (!png_image_write_to_memory(png.get(), out.data(), &size, 0, pixels, 0, nullptr)) {
    throw Error(ErrorKind::IoError, std::string("PNG encode failed: ") + png->message);
  }
  out.resize(size);
  return out;
}

void write_file(const std::vector<std::uint8_t>& bytes, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::IoError, "cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorKind::IoError, "write failed: " + path.string());
}

}  // namespace

bool has_png_signature(std::span<const std::uint8_t> bytes) noexcept {
  static constexpr std::uint8_t kSig[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
  return bytes.size() >= 8 && std::memcmp(bytes.data(), kSig, 8) == 0;
}

RgbImage decode_png(std::span<const std::uint8_t> bytes) {
  if (!has_png_signature(bytes)) throw Error(ErrorKind::DecodeError, "not a PNG stream");
  PngImage png;
  if (!png_image_begin_read_from_memory(png.get(), bytes.data(), bytes.size())) {
    throw Error(ErrorKind::DecodeError, std::string("PNG header invalid: ") + png->message);
  }
  return finish_decode(png);
}

RgbImage load_png(const std::filesystem::path& path) {
  const auto bytes = read_file(path);
  try {
    return decode_png(bytes);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::DecodeError) {
      throw Error(ErrorKind::DecodeError, path.string() + ": " + e.what());
    }
    throw;
  }
}

GrayImage load_gray_png(const std::filesystem::path& path) { return to_grayscale(load_png(path)); }

BinaryImage load_binary_png(const std::filesystem::path& path) {
  const GrayImage gray = load_gray_png(path);
  BinaryImage out(gray.width(), gray.height());
  auto dst = out.data();
  const auto src = gray.data();
  for (std::size_t i = 0; i < src.size(); ++i) dst[i] = src[i] > 127 ? 1 : 0;
  return out;
}

std::vector<std::uint8_t> encode_png(const RgbImage& image) {
  return encode(image.data().data(), image.width(), image.height(), PNG_FORMAT_RGB);
}

std::vector<std::uint8_t> encode_png(const GrayImage& image) {
  return encode(image.data().data(), image.width(), image.height(), PNG_FORMAT_GRAY);
}

std::vector<std::uint8_t> encode_png(const BinaryImage& image) { return encode_png(to_gray(image)); }

void save_png(const RgbImage& image, const std::filesystem::path& path) {
  write_file(encode_png(image), path);
}

void save_png(const GrayImage& image, const std::filesystem::path& path) {
  write_file(encode_png(image), path);
}

void save_png(const BinaryImage& image, const std::filesystem::path& path) {
  write_file(encode_png(image), path);
}

}  // namespace netgrab
