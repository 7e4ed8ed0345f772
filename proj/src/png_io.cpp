#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <csetjmp>
#include <cstdio>
#include <memory>
#include <vector>

#include "ddff/data_io.hpp"
#include "ddff/errors.hpp"

namespace ddff::io {

namespace {

struct File {
  std::FILE* f = nullptr;
  ~File() {
    if (f) std::fclose(f);
  }
};

[[noreturn]] void png_fail(png_structp png, png_const_charp msg) {
  auto* err = static_cast<std::string*>(png_get_error_ptr(png));
  if (err) *err = msg;
  std::longjmp(png_jmpbuf(png), 1);
}

void png_warn(png_structp, png_const_charp) {}

struct Decoded {
  int width = 0, height = 0, channels = 0, depth = 8;
  std::vector<std::uint8_t> bytes;  // host-order samples
};

Decoded decode(const fs::path& path) {
  File file;
  file.f = std::fopen(path.c_str(), "rb");
  if (!file.f) throw LoadError(path.string() + ": cannot open");
  std::uint8_t sig[8];
  if (std::fread(sig, 1, 8, file.f) != 8 || png_sig_cmp(sig, 0, 8) != 0) throw LoadError(path.string() + ": not a PNG");

  std::string err;
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, &err, png_fail, png_warn);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    throw LoadError(path.string() + ": libpng initialization failed");
  }
  Decoded d;
  std::vector<png_bytep> rows;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw LoadError(path.string() + ": corrupt PNG (" + err + ")");
  }
  png_init_io(png, file.f);
  png_set_sig_bytes(png, 8);
  png_read_info(png, info);
  const int color = png_get_color_type(png, info);
  const int bits = png_get_bit_depth(png, info);
  if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color == PNG_COLOR_TYPE_GRAY && bits < 8) png_set_expand_gray_1_2_4_to_8(png);
  if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
  if (color & PNG_COLOR_MASK_ALPHA || png_get_valid(png, info, PNG_INFO_tRNS)) png_set_strip_alpha(png);
  if (bits == 16) png_set_swap(png);
  png_read_update_info(png, info);

  d.width = static_cast<int>(png_get_image_width(png, info));
  d.height = static_cast<int>(png_get_image_height(png, info));
  d.channels = png_get_channels(png, info);
  d.depth = png_get_bit_depth(png, info);
  const std::size_t stride = png_get_rowbytes(png, info);
  d.bytes.resize(stride * d.height);
  rows.resize(static_cast<std::size_t>(d.height));
  for (int y = 0; y < d.height; ++y) rows[y] = d.bytes.data() + stride * y;
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  return d;
}

void encode(const fs::path& path, int width, int height, int channels, int depth, const std::uint8_t* data) {
  File file;
  file.f = std::fopen(path.c_str(), "wb");
  if (!file.f) throw LoadError(path.string() + ": cannot open for writing");
  std::string err;
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, &err, png_fail, png_warn);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    throw LoadError(path.string() + ": libpng initialization failed");
  }
  std::vector<png_const_bytep> rows(static_cast<std::size_t>(height));
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw LoadError(path.string() + ": PNG write failed (" + err + ")");
  }
  png_init_io(png, file.f);
  png_set_IHDR(png, info, static_cast<png_uint_32>(width), static_cast<png_uint_32>(height), depth,
               channels == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  if (depth == 16) png_set_swap(png);
  const std::size_t stride = static_cast<std::size_t>(width) * channels * (depth / 8);
  for (int y = 0; y < height; ++y) rows[y] = data + stride * y;
  png_write_image(png, const_cast<png_bytepp>(rows.data()));
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

}  // namespace

Image read_png(const fs::path& path) {
  const Decoded d = decode(path);
  Image img(d.height, d.width, static_cast<std::size_t>(d.channels));
  const double full = d.depth == 16 ? 65535.0 : 255.0;
  for (int y = 0; y < d.height; ++y)
    for (int x = 0; x < d.width; ++x)
      for (int c = 0; c < d.channels; ++c) {
        const std::size_t k = (static_cast<std::size_t>(y) * d.width + x) * d.channels + c;
        double v;
        if (d.depth == 16) {
          std::uint16_t s;
          std::memcpy(&s, d.bytes.data() + 2 * k, 2);
          v = s;
        } else {
          v = d.bytes[k];
        }
        img[c](y, x) = v / full;
      }
  return img;
}

void write_png(const fs::path& path, const Image& image) {
  const int c = static_cast<int>(image.channel_count());
  if (c != 1 && c != 3) throw ShapeError(path.string() + ": PNG output needs 1 or 3 channels");
  const int h = static_cast<int>(image.height()), w = static_cast<int>(image.width());
  std::vector<std::uint8_t> buf(static_cast<std::size_t>(h) * w * c);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      for (int ch = 0; ch < c; ++ch) {
        const double v = std::clamp(image[ch](y, x), 0.0, 1.0);
        buf[(static_cast<std::size_t>(y) * w + x) * c + ch] = static_cast<std::uint8_t>(std::lround(v * 255.0));
      }
  encode(path, w, h, c, 8, buf.data());
}

Plane16 read_png16(const fs::path& path) {
  const Decoded d = decode(path);
  if (d.channels != 1 || d.depth != 16) throw LoadError(path.string() + ": expected a 16-bit grayscale PNG");
  Plane16 p(d.height, d.width);
  std::memcpy(p.data(), d.bytes.data(), d.bytes.size());
  return p;
}

void write_png16(const fs::path& path, const Plane16& plane) {
  encode(path, static_cast<int>(plane.cols()), static_cast<int>(plane.rows()), 1, 16,
         reinterpret_cast<const std::uint8_t*>(plane.data()));
}

}  // namespace ddff::io
