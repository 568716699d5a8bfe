#pragma once

#include <cmath>
#include <functional>
#include <span>
#include <vector>

#include "augdist/image.hpp"
#include "augdist/rng.hpp"

// Low-level image and noise-field primitives shared by the transforms.
// Boundary handling everywhere is reflection without edge repeat
// (index -1 maps to 1), and resampling is bilinear.

namespace augdist::imgproc {

/// Reflect an out-of-range index into [0, n).
inline int reflect(int i, int n) noexcept {
  if (n <= 1) return 0;
  const int period = 2 * (n - 1);
  i %= period;
  if (i < 0) i += period;
  return i < n ? i : period - i;
}

/// Single-channel real field (h x w).
struct Field {
  int height = 0;
  int width = 0;
  std::vector<float> values;

  Field() = default;
  Field(int h, int w, float fill = 0.0f)
      : height(h), width(w), values(static_cast<std::size_t>(h) * static_cast<std::size_t>(w), fill) {}
  float& at(int y, int x) noexcept { return values[static_cast<std::size_t>(y) * width + x]; }
  float at(int y, int x) const noexcept { return values[static_cast<std::size_t>(y) * width + x]; }
  float min() const;
  float max() const;
  /// Affine rescale to [0, 1]; constant fields become 0.
  void normalize();
};

/// Bilinear sample at pixel-centre coordinates (y, x) with reflective borders.
float sample_bilinear(const ImageBuffer& img, double y, double x, int c) noexcept;
float sample_bilinear(const Field& f, double y, double x) noexcept;

/// out(y, x) = img(source(y, x)) with bilinear interpolation.
using CoordMap = std::function<void(double y, double x, double& sy, double& sx)>;
ImageBuffer warp(const ImageBuffer& img, const CoordMap& source);

/// Per-channel warp (e.g. chromatic aberration).
ImageBuffer warp_channels(const ImageBuffer& img, std::span<const CoordMap, 3> source);

/// Normalized Gaussian taps with radius ceil(3 sigma).
std::vector<float> gaussian_kernel(double sigma);

ImageBuffer convolve_separable(const ImageBuffer& img, std::span<const float> kx, std::span<const float> ky);
Field convolve_separable(const Field& f, std::span<const float> kx, std::span<const float> ky);
ImageBuffer gaussian_blur(const ImageBuffer& img, double sigma);
Field gaussian_blur(const Field& f, double sigma);

/// 2-D convolution with an odd-sized square kernel (row-major, side*side).
ImageBuffer convolve2d(const ImageBuffer& img, std::span<const float> kernel, int side);

/// Kernel for a disc of given radius, pixel weights by area coverage
/// (8x8 supersampling), normalized.
std::vector<float> disk_kernel(double radius, int& side);

/// Line kernel of given length (pixels) at angle (radians), Gaussian taper
/// along the line, normalized. One-sided like a camera shake trail.
std::vector<float> motion_kernel(double length, double angle, int& side);

ImageBuffer resize_bilinear(const ImageBuffer& img, int height, int width);
Field resize_bilinear(const Field& f, int height, int width);
/// Box-filter downscale by area averaging.
ImageBuffer resize_area(const ImageBuffer& img, int height, int width);
ImageBuffer resize_nearest(const ImageBuffer& img, int height, int width);

/// Rec.601 luma.
Field luminance(const ImageBuffer& img);

void rgb_to_hsv(float r, float g, float b, float& h, float& s, float& v) noexcept;
void hsv_to_rgb(float h, float s, float v, float& r, float& g, float& b) noexcept;

/// i.i.d. N(0, 1) field.
Field white_noise(int height, int width, Rng& rng);

/// Toroidal diamond-square plasma fractal on a (2^k)x(2^k) grid covering
/// h x w, cropped, values in [0, 1]. The displacement amplitude is divided by
/// `decay` at every halving, so larger decay gives smoother fields.
Field plasma_fractal(int height, int width, double decay, Rng& rng);

/// Multi-octave gradient noise, approximately zero-mean, unit-ish range.
/// `cell` is the lattice period of the first octave in pixels.
Field perlin_noise(int height, int width, double cell, int octaves, double persistence, Rng& rng);

/// Zero-mean octave sum of blurred white noise: octave k is white noise
/// blurred with sigma 2^k, rescaled to unit std and weighted by 2^(k*exponent).
/// exponent 1 approximates brown (1/f^2) noise.
Field octave_noise(int height, int width, double exponent, Rng& rng);

/// Adds `scale * field` to every channel and clamps.
void add_field(ImageBuffer& img, const Field& field, float scale);

}  // namespace augdist::imgproc
