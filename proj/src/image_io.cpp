#include "spatialforge/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <memory>

#include "spatialforge/errors.hpp"

namespace spatialforge {

namespace {

struct FileCloser {
  void operator()(FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<FILE, FileCloser>;

}  // namespace

DepthMap read_depth_png(const std::string& path, double divisor) {
  FilePtr fp(std::fopen(path.c_str(), "rb"));
  if (!fp) throw DataError("cannot open depth png: " + path);

  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr,
                                           nullptr);
  png_infop info = png_create_info_struct(png);
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw DataError("png decode failed: " + path);
  }
  png_init_io(png, fp.get());
  png_read_info(png, info);

  png_uint_32 w = png_get_image_width(png, info);
  png_uint_32 h = png_get_image_height(png, info);
  int bit_depth = png_get_bit_depth(png, info);
  int color = png_get_color_type(png, info);
  if (color != PNG_COLOR_TYPE_GRAY || bit_depth != 16) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw DataError("depth png must be 16-bit grayscale: " + path);
  }

  std::vector<uint8_t> row(static_cast<size_t>(w) * 2);
  DepthMap d;
  d.width = static_cast<int>(w);
  d.height = static_cast<int>(h);
  d.values.resize(static_cast<size_t>(w) * h);
  for (png_uint_32 y = 0; y < h; ++y) {
    png_read_row(png, row.data(), nullptr);
    for (png_uint_32 x = 0; x < w; ++x) {
      uint16_t raw = static_cast<uint16_t>((row[2 * x] << 8) | row[2 * x + 1]);
      d.values[static_cast<size_t>(y) * w + x] =
          raw == 0 ? 0.0f : static_cast<float>(raw / divisor);
    }
  }
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  return d;
}

void write_depth_png(const DepthMap& depth, const std::string& path, double divisor) {
  FilePtr fp(std::fopen(path.c_str(), "wb"));
  if (!fp) throw DataError("cannot write depth png: " + path);

  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr,
                                            nullptr);
  png_infop info = png_create_info_struct(png);
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw DataError("png encode failed: " + path);
  }
  png_init_io(png, fp.get());
  png_set_IHDR(png, info, depth.width, depth.height, 16, PNG_COLOR_TYPE_GRAY,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);

  std::vector<uint8_t> row(static_cast<size_t>(depth.width) * 2);
  for (int y = 0; y < depth.height; ++y) {
    for (int x = 0; x < depth.width; ++x) {
      double mm = depth.at(x, y) <= 0.0f ? 0.0 : depth.at(x, y) * divisor;
      uint16_t raw = static_cast<uint16_t>(
          std::clamp(std::llround(mm), 0LL, 65535LL));
      row[2 * x] = static_cast<uint8_t>(raw >> 8);
      row[2 * x + 1] = static_cast<uint8_t>(raw & 0xff);
    }
    png_write_row(png, row.data());
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

void write_rgb_png(int width, int height, const std::vector<uint8_t>& rgb,
                   const std::string& path) {
  if (rgb.size() != static_cast<size_t>(width) * height * 3)
    throw ValidationError("write_rgb_png: buffer size mismatch");
  FilePtr fp(std::fopen(path.c_str(), "wb"));
  if (!fp) throw DataError("cannot write png: " + path);

  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr,
                                            nullptr);
  png_infop info = png_create_info_struct(png);
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw DataError("png encode failed: " + path);
  }
  png_init_io(png, fp.get());
  png_set_IHDR(png, info, width, height, 8, PNG_COLOR_TYPE_RGB,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  for (int y = 0; y < height; ++y)
    png_write_row(png, const_cast<uint8_t*>(&rgb[static_cast<size_t>(y) * width * 3]));
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

DepthMap resample_depth_nearest(const DepthMap& src, int new_width, int new_height) {
  DepthMap out;
  out.width = new_width;
  out.height = new_height;
  out.values.resize(static_cast<size_t>(new_width) * new_height);
  double sx = static_cast<double>(src.width) / new_width;
  double sy = static_cast<double>(src.height) / new_height;
  for (int y = 0; y < new_height; ++y) {
    int src_y = std::clamp(static_cast<int>((y + 0.5) * sy), 0, src.height - 1);
    for (int x = 0; x < new_width; ++x) {
      int src_x = std::clamp(static_cast<int>((x + 0.5) * sx), 0, src.width - 1);
      out.at(x, y) = src.at(src_x, src_y);
    }
  }
  return out;
}

}  // namespace spatialforge
