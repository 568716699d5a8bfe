#include "augdist/image.hpp"

#include <png.h>

#include <cmath>
#include <csetjmp>
#include <cstdio>
#include <memory>
#include <string>

#include "augdist/errors.hpp"

namespace augdist {

ImageBuffer::ImageBuffer(int height, int width, float fill)
    : height_(height), width_(width) {
  if (height < 0 || width < 0) throw SizeError("ImageBuffer: negative dimensions");
  data_.assign(static_cast<std::size_t>(height) * static_cast<std::size_t>(width) * channels, fill);
}

ImageBuffer::ImageBuffer(int height, int width, std::vector<float> data)
    : height_(height), width_(width), data_(std::move(data)) {
  if (height < 0 || width < 0) throw SizeError("ImageBuffer: negative dimensions");
  if (data_.size() != static_cast<std::size_t>(height) * static_cast<std::size_t>(width) * channels) {
    throw SizeError("ImageBuffer: data length must equal height * width * 3");
  }
}

void ImageBuffer::clamp() {
  for (auto& v : data_) {
    if (!(v > 0.0f)) {
      v = 0.0f;
    } else if (v > 1.0f) {
      v = 1.0f;
    }
  }
}

bool ImageBuffer::valid() const noexcept {
  for (float v : data_) {
    if (!std::isfinite(v) || v < 0.0f || v > 1.0f) return false;
  }
  return true;
}

std::uint8_t quantize(float v) noexcept {
  if (!(v > 0.0f)) return 0;
  if (v >= 1.0f) return 255;
  return static_cast<std::uint8_t>(std::floor(static_cast<double>(v) * 255.0 + 0.5));
}

namespace {

struct FileCloser {
  void operator()(std::FILE* f) const noexcept {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

}  // namespace

ImageBuffer load_image(const std::filesystem::path& path) {
  FilePtr file(std::fopen(path.c_str(), "rb"));
  if (!file) throw IoError("cannot open image: " + path.string());

  png_byte header[8];
  if (std::fread(header, 1, 8, file.get()) != 8 || png_sig_cmp(header, 0, 8) != 0) {
    throw FormatError("not a PNG file: " + path.string());
  }

  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) throw IoError("png_create_read_struct failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    throw IoError("png_create_info_struct failed");
  }

  std::vector<png_byte> pixels;
  png_uint_32 width = 0, height = 0;
  int bit_depth = 0, color_type = 0;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw FormatError("corrupt PNG data: " + path.string());
  }
  png_init_io(png, file.get());
  png_set_sig_bytes(png, 8);
  png_read_info(png, info);
  png_get_IHDR(png, info, &width, &height, &bit_depth, &color_type, nullptr, nullptr, nullptr);
  if (color_type != PNG_COLOR_TYPE_RGB || bit_depth != 8) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw FormatError("unsupported PNG (need 8-bit RGB): " + path.string());
  }
  const std::size_t stride = png_get_rowbytes(png, info);
  pixels.resize(stride * height);
  std::vector<png_bytep> rows(height);
  for (png_uint_32 y = 0; y < height; ++y) rows[y] = pixels.data() + y * stride;
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);

  ImageBuffer img(static_cast<int>(height), static_cast<int>(width));
  auto out = img.data();
  for (png_uint_32 y = 0; y < height; ++y) {
    for (png_uint_32 i = 0; i < width * 3; ++i) {
      out[y * width * 3 + i] = dequantize(rows[y][i]);
    }
  }
  return img;
}

void save_image(const ImageBuffer& img, const std::filesystem::path& path) {
  if (img.height() <= 0 || img.width() <= 0) throw SizeError("save_image: empty image");
  FilePtr file(std::fopen(path.c_str(), "wb"));
  if (!file) throw IoError("cannot write image: " + path.string());

  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) throw IoError("png_create_write_struct failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    throw IoError("png_create_info_struct failed");
  }

  const auto w = static_cast<std::size_t>(img.width());
  std::vector<png_byte> pixels(img.size());
  auto in = img.data();
  for (std::size_t i = 0; i < pixels.size(); ++i) pixels[i] = quantize(in[i]);
  std::vector<png_bytep> rows(static_cast<std::size_t>(img.height()));
  for (std::size_t y = 0; y < rows.size(); ++y) rows[y] = pixels.data() + y * w * 3;

  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw IoError("PNG write failed: " + path.string());
  }
  png_init_io(png, file.get());
  png_set_IHDR(png, info, static_cast<png_uint_32>(img.width()), static_cast<png_uint_32>(img.height()), 8,
               PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  png_write_image(png, rows.data());
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  if (std::fflush(file.get()) != 0) throw IoError("PNG write failed: " + path.string());
}

ImageBuffer weighted_sum(std::span<const ImageBuffer> images, std::span<const double> weights) {
  if (images.empty() || images.size() != weights.size()) {
    throw DomainError("weighted_sum: need one weight per image");
  }
  ImageBuffer out(images[0].height(), images[0].width());
  auto acc = out.data();
  for (std::size_t k = 0; k < images.size(); ++k) {
    if (!images[k].same_shape(images[0])) throw SizeError("weighted_sum: shape mismatch");
    const auto w = static_cast<float>(weights[k]);
    auto src = images[k].data();
    for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += w * src[i];
  }
  return out;
}

double mean_abs_diff(const ImageBuffer& a, const ImageBuffer& b) {
  if (!a.same_shape(b)) throw SizeError("mean_abs_diff: shape mismatch");
  if (a.empty()) return 0.0;
  auto x = a.data();
  auto y = b.data();
  double total = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) total += std::fabs(static_cast<double>(x[i]) - y[i]);
  return total / static_cast<double>(x.size());
}

}  // namespace augdist
