#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace augdist {

/// H x W x 3 image, row-major interleaved RGB, values in [0, 1].
class ImageBuffer {
public:
  static constexpr int channels = 3;

  ImageBuffer() = default;
  ImageBuffer(int height, int width, float fill = 0.0f);
  ImageBuffer(int height, int width, std::vector<float> data);

  int height() const noexcept { return height_; }
  int width() const noexcept { return width_; }
  std::size_t pixel_count() const noexcept {
    return static_cast<std::size_t>(height_) * static_cast<std::size_t>(width_);
  }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  float& at(int y, int x, int c) noexcept { return data_[index(y, x, c)]; }
  float at(int y, int x, int c) const noexcept { return data_[index(y, x, c)]; }

  std::span<float> data() noexcept { return data_; }
  std::span<const float> data() const noexcept { return data_; }

  bool same_shape(const ImageBuffer& other) const noexcept {
    return height_ == other.height_ && width_ == other.width_;
  }

  /// Clamps every value to [0, 1]; NaN becomes 0.
  void clamp();
  /// True when every value is finite and inside [0, 1].
  bool valid() const noexcept;

  friend bool operator==(const ImageBuffer&, const ImageBuffer&) = default;

private:
  std::size_t index(int y, int x, int c) const noexcept {
    return (static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
            static_cast<std::size_t>(x)) * channels + static_cast<std::size_t>(c);
  }

  int height_ = 0;
  int width_ = 0;
  std::vector<float> data_;
};

/// 8-bit code for a real value: floor(v * 255 + 0.5) after clamping to [0, 1]
/// (round half up).
std::uint8_t quantize(float v) noexcept;
inline float dequantize(std::uint8_t q) noexcept { return static_cast<float>(q) / 255.0f; }

/// Reads an 8-bit RGB PNG. Throws IoError for unreadable files and
/// FormatError for anything that is not 8-bit RGB.
ImageBuffer load_image(const std::filesystem::path& path);

/// Writes an 8-bit RGB PNG, quantizing with `quantize`.
void save_image(const ImageBuffer& img, const std::filesystem::path& path);

/// Weighted sum of same-shaped images, accumulated in order:
///   out = w[0]*imgs[0] + w[1]*imgs[1] + ...
/// No clamping is applied.
ImageBuffer weighted_sum(std::span<const ImageBuffer> images, std::span<const double> weights);

/// Mean absolute per-value difference.
double mean_abs_diff(const ImageBuffer& a, const ImageBuffer& b);

}  // namespace augdist
