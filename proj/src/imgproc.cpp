#include "augdist/imgproc.hpp"

#include <algorithm>
#include <numbers>
#include <numeric>

#include "augdist/errors.hpp"

namespace augdist::imgproc {

float Field::min() const { return values.empty() ? 0.0f : *std::min_element(values.begin(), values.end()); }
float Field::max() const { return values.empty() ? 0.0f : *std::max_element(values.begin(), values.end()); }

void Field::normalize() {
  const float lo = min();
  const float hi = max();
  const float range = hi - lo;
  for (auto& v : values) v = range > 0.0f ? (v - lo) / range : 0.0f;
}

namespace {

template <typename Get>
float bilinear(double y, double x, int h, int w, Get get) noexcept {
  const double fy = std::floor(y), fx = std::floor(x);
  const auto ty = static_cast<float>(y - fy), tx = static_cast<float>(x - fx);
  const int y0 = static_cast<int>(fy), x0 = static_cast<int>(fx);
  const int ya = reflect(y0, h), yb = reflect(y0 + 1, h);
  const int xa = reflect(x0, w), xb = reflect(x0 + 1, w);
  const float top = get(ya, xa) * (1.0f - tx) + get(ya, xb) * tx;
  const float bottom = get(yb, xa) * (1.0f - tx) + get(yb, xb) * tx;
  return top * (1.0f - ty) + bottom * ty;
}

bool finite_coord(double y, double x) { return std::isfinite(y) && std::isfinite(x); }

}  // namespace

float sample_bilinear(const ImageBuffer& img, double y, double x, int c) noexcept {
  if (!finite_coord(y, x)) return 0.0f;
  return bilinear(y, x, img.height(), img.width(), [&](int yy, int xx) { return img.at(yy, xx, c); });
}

float sample_bilinear(const Field& f, double y, double x) noexcept {
  if (!finite_coord(y, x)) return 0.0f;
  return bilinear(y, x, f.height, f.width, [&](int yy, int xx) { return f.at(yy, xx); });
}

ImageBuffer warp(const ImageBuffer& img, const CoordMap& source) {
  ImageBuffer out(img.height(), img.width());
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      double sy, sx;
      source(y, x, sy, sx);
      for (int c = 0; c < 3; ++c) out.at(y, x, c) = sample_bilinear(img, sy, sx, c);
    }
  }
  return out;
}

ImageBuffer warp_channels(const ImageBuffer& img, std::span<const CoordMap, 3> source) {
  ImageBuffer out(img.height(), img.width());
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      for (int c = 0; c < 3; ++c) {
        double sy, sx;
        source[c](y, x, sy, sx);
        out.at(y, x, c) = sample_bilinear(img, sy, sx, c);
      }
    }
  }
  return out;
}

std::vector<float> gaussian_kernel(double sigma) {
  if (!(sigma > 0.0)) return {1.0f};
  const int radius = std::max(1, static_cast<int>(std::ceil(3.0 * sigma)));
  std::vector<double> taps(2 * radius + 1);
  for (int i = -radius; i <= radius; ++i) taps[i + radius] = std::exp(-0.5 * i * i / (sigma * sigma));
  const double total = std::accumulate(taps.begin(), taps.end(), 0.0);
  std::vector<float> k(taps.size());
  for (std::size_t i = 0; i < taps.size(); ++i) k[i] = static_cast<float>(taps[i] / total);
  return k;
}

namespace {

// Generic separable convolution over an accessor of `planes` interleaved planes.
void separable(const float* in, float* out, int h, int w, int planes, std::span<const float> kx,
               std::span<const float> ky) {
  const int rx = static_cast<int>(kx.size()) / 2;
  const int ry = static_cast<int>(ky.size()) / 2;
  std::vector<float> tmp(static_cast<std::size_t>(h) * w * planes);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      for (int p = 0; p < planes; ++p) {
        float acc = 0.0f;
        for (int i = -rx; i <= rx; ++i) {
          acc += kx[i + rx] * in[(static_cast<std::size_t>(y) * w + reflect(x + i, w)) * planes + p];
        }
        tmp[(static_cast<std::size_t>(y) * w + x) * planes + p] = acc;
      }
    }
  }
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      for (int p = 0; p < planes; ++p) {
        float acc = 0.0f;
        for (int i = -ry; i <= ry; ++i) {
          acc += ky[i + ry] * tmp[(static_cast<std::size_t>(reflect(y + i, h)) * w + x) * planes + p];
        }
        out[(static_cast<std::size_t>(y) * w + x) * planes + p] = acc;
      }
    }
  }
}

}  // namespace

ImageBuffer convolve_separable(const ImageBuffer& img, std::span<const float> kx, std::span<const float> ky) {
  ImageBuffer out(img.height(), img.width());
  separable(img.data().data(), out.data().data(), img.height(), img.width(), 3, kx, ky);
  return out;
}

Field convolve_separable(const Field& f, std::span<const float> kx, std::span<const float> ky) {
  Field out(f.height, f.width);
  separable(f.values.data(), out.values.data(), f.height, f.width, 1, kx, ky);
  return out;
}

ImageBuffer gaussian_blur(const ImageBuffer& img, double sigma) {
  if (!(sigma > 0.0)) return img;
  const auto k = gaussian_kernel(sigma);
  return convolve_separable(img, k, k);
}

Field gaussian_blur(const Field& f, double sigma) {
  if (!(sigma > 0.0)) return f;
  const auto k = gaussian_kernel(sigma);
  return convolve_separable(f, k, k);
}

ImageBuffer convolve2d(const ImageBuffer& img, std::span<const float> kernel, int side) {
  if (side % 2 == 0 || kernel.size() != static_cast<std::size_t>(side) * side) {
    throw DomainError("convolve2d: kernel must be odd-sized and square");
  }
  const int r = side / 2;
  const int h = img.height(), w = img.width();
  ImageBuffer out(h, w);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      float acc[3] = {0, 0, 0};
      for (int dy = -r; dy <= r; ++dy) {
        const int yy = reflect(y + dy, h);
        for (int dx = -r; dx <= r; ++dx) {
          const float k = kernel[static_cast<std::size_t>(dy + r) * side + (dx + r)];
          if (k == 0.0f) continue;
          const int xx = reflect(x + dx, w);
          for (int c = 0; c < 3; ++c) acc[c] += k * img.at(yy, xx, c);
        }
      }
      for (int c = 0; c < 3; ++c) out.at(y, x, c) = acc[c];
    }
  }
  return out;
}

std::vector<float> disk_kernel(double radius, int& side) {
  const int r = std::max(1, static_cast<int>(std::ceil(radius)));
  side = 2 * r + 1;
  std::vector<double> k(static_cast<std::size_t>(side) * side, 0.0);
  constexpr int ss = 8;
  for (int y = -r; y <= r; ++y) {
    for (int x = -r; x <= r; ++x) {
      int hits = 0;
      for (int sy = 0; sy < ss; ++sy) {
        for (int sx = 0; sx < ss; ++sx) {
          const double py = y - 0.5 + (sy + 0.5) / ss;
          const double px = x - 0.5 + (sx + 0.5) / ss;
          if (py * py + px * px <= radius * radius) ++hits;
        }
      }
      k[static_cast<std::size_t>(y + r) * side + (x + r)] = hits;
    }
  }
  const double total = std::accumulate(k.begin(), k.end(), 0.0);
  std::vector<float> out(k.size());
  if (total <= 0.0) {
    out[out.size() / 2] = 1.0f;
    return out;
  }
  for (std::size_t i = 0; i < k.size(); ++i) out[i] = static_cast<float>(k[i] / total);
  return out;
}

std::vector<float> motion_kernel(double length, double angle, int& side) {
  const int r = std::max(1, static_cast<int>(std::ceil(length)));
  side = 2 * r + 1;
  std::vector<double> k(static_cast<std::size_t>(side) * side, 0.0);
  const double sigma = std::max(length / 3.0, 0.5);
  const double dy = std::sin(angle), dx = std::cos(angle);
  const int steps = std::max(2, static_cast<int>(std::ceil(length * 4)));
  for (int s = 0; s <= steps; ++s) {
    const double t = length * s / steps;
    const double weight = std::exp(-0.5 * t * t / (sigma * sigma));
    const double py = t * dy + r, px = t * dx + r;
    // Splat bilinearly so sub-pixel positions keep their mass.
    const int y0 = static_cast<int>(std::floor(py)), x0 = static_cast<int>(std::floor(px));
    const double fy = py - y0, fx = px - x0;
    const auto put = [&](int yy, int xx, double wgt) {
      if (yy >= 0 && yy < side && xx >= 0 && xx < side) k[static_cast<std::size_t>(yy) * side + xx] += wgt;
    };
    put(y0, x0, weight * (1 - fy) * (1 - fx));
    put(y0, x0 + 1, weight * (1 - fy) * fx);
    put(y0 + 1, x0, weight * fy * (1 - fx));
    put(y0 + 1, x0 + 1, weight * fy * fx);
  }
  const double total = std::accumulate(k.begin(), k.end(), 0.0);
  std::vector<float> out(k.size());
  for (std::size_t i = 0; i < k.size(); ++i) out[i] = static_cast<float>(k[i] / total);
  return out;
}

ImageBuffer resize_bilinear(const ImageBuffer& img, int height, int width) {
  ImageBuffer out(height, width);
  const double sy = static_cast<double>(img.height()) / height;
  const double sx = static_cast<double>(img.width()) / width;
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const double yy = (y + 0.5) * sy - 0.5, xx = (x + 0.5) * sx - 0.5;
      for (int c = 0; c < 3; ++c) out.at(y, x, c) = sample_bilinear(img, yy, xx, c);
    }
  }
  return out;
}

Field resize_bilinear(const Field& f, int height, int width) {
  Field out(height, width);
  const double sy = static_cast<double>(f.height) / height;
  const double sx = static_cast<double>(f.width) / width;
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      out.at(y, x) = sample_bilinear(f, (y + 0.5) * sy - 0.5, (x + 0.5) * sx - 0.5);
    }
  }
  return out;
}

ImageBuffer resize_area(const ImageBuffer& img, int height, int width) {
  ImageBuffer out(height, width);
  const double sy = static_cast<double>(img.height()) / height;
  const double sx = static_cast<double>(img.width()) / width;
  for (int y = 0; y < height; ++y) {
    const double y0 = y * sy, y1 = (y + 1) * sy;
    for (int x = 0; x < width; ++x) {
      const double x0 = x * sx, x1 = (x + 1) * sx;
      double acc[3] = {0, 0, 0};
      double area = 0.0;
      for (int iy = static_cast<int>(std::floor(y0)); iy < static_cast<int>(std::ceil(y1)); ++iy) {
        const double wy = std::min<double>(iy + 1, y1) - std::max<double>(iy, y0);
        if (wy <= 0) continue;
        for (int ix = static_cast<int>(std::floor(x0)); ix < static_cast<int>(std::ceil(x1)); ++ix) {
          const double wx = std::min<double>(ix + 1, x1) - std::max<double>(ix, x0);
          if (wx <= 0) continue;
          const int cy = std::min(iy, img.height() - 1), cx = std::min(ix, img.width() - 1);
          for (int c = 0; c < 3; ++c) acc[c] += wy * wx * img.at(cy, cx, c);
          area += wy * wx;
        }
      }
      for (int c = 0; c < 3; ++c) out.at(y, x, c) = static_cast<float>(acc[c] / area);
    }
  }
  return out;
}

ImageBuffer resize_nearest(const ImageBuffer& img, int height, int width) {
  ImageBuffer out(height, width);
  for (int y = 0; y < height; ++y) {
    const int iy = std::min(img.height() - 1, static_cast<int>((y + 0.5) * img.height() / height));
    for (int x = 0; x < width; ++x) {
      const int ix = std::min(img.width() - 1, static_cast<int>((x + 0.5) * img.width() / width));
      for (int c = 0; c < 3; ++c) out.at(y, x, c) = img.at(iy, ix, c);
    }
  }
  return out;
}

Field luminance(const ImageBuffer& img) {
  Field f(img.height(), img.width());
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      f.at(y, x) = 0.299f * img.at(y, x, 0) + 0.587f * img.at(y, x, 1) + 0.114f * img.at(y, x, 2);
    }
  }
  return f;
}

void rgb_to_hsv(float r, float g, float b, float& h, float& s, float& v) noexcept {
  const float mx = std::max({r, g, b});
  const float mn = std::min({r, g, b});
  const float d = mx - mn;
  v = mx;
  s = mx > 0.0f ? d / mx : 0.0f;
  if (d <= 0.0f) {
    h = 0.0f;
    return;
  }
  float hh;
  if (mx == r) {
    hh = (g - b) / d;
  } else if (mx == g) {
    hh = 2.0f + (b - r) / d;
  } else {
    hh = 4.0f + (r - g) / d;
  }
  hh /= 6.0f;
  if (hh < 0.0f) hh += 1.0f;
  h = hh;
}

void hsv_to_rgb(float h, float s, float v, float& r, float& g, float& b) noexcept {
  if (s <= 0.0f) {
    r = g = b = v;
    return;
  }
  const float hh = (h - std::floor(h)) * 6.0f;
  const int sector = std::min(5, static_cast<int>(hh));
  const float f = hh - static_cast<float>(sector);
  const float p = v * (1.0f - s);
  const float q = v * (1.0f - s * f);
  const float t = v * (1.0f - s * (1.0f - f));
  switch (sector) {
    case 0: r = v; g = t; b = p; break;
    case 1: r = q; g = v; b = p; break;
    case 2: r = p; g = v; b = t; break;
    case 3: r = p; g = q; b = v; break;
    case 4: r = t; g = p; b = v; break;
    default: r = v; g = p; b = q; break;
  }
}

Field white_noise(int height, int width, Rng& rng) {
  Field f(height, width);
  for (auto& v : f.values) v = static_cast<float>(rng.normal());
  return f;
}

Field plasma_fractal(int height, int width, double decay, Rng& rng) {
  int size = 2;
  while (size < std::max(height, width)) size *= 2;
  std::vector<double> map(static_cast<std::size_t>(size) * size, 0.0);
  const auto at = [&](int y, int x) -> double& {
    return map[static_cast<std::size_t>((y % size + size) % size) * size + ((x % size + size) % size)];
  };
  double wibble = 1.0;
  for (int step = size; step >= 2; step /= 2) {
    const int half = step / 2;
    // Squares: centre of each cell from its four corners.
    for (int y = 0; y < size; y += step) {
      for (int x = 0; x < size; x += step) {
        const double mean = (at(y, x) + at(y + step, x) + at(y, x + step) + at(y + step, x + step)) / 4.0;
        at(y + half, x + half) = mean + rng.uniform(-wibble, wibble);
      }
    }
    // Diamonds: edge midpoints from the two corners and two centres.
    for (int y = 0; y < size; y += step) {
      for (int x = 0; x < size; x += step) {
        const double top = (at(y, x) + at(y, x + step) + at(y - half, x + half) + at(y + half, x + half)) / 4.0;
        const double left = (at(y, x) + at(y + step, x) + at(y + half, x - half) + at(y + half, x + half)) / 4.0;
        at(y, x + half) = top + rng.uniform(-wibble, wibble);
        at(y + half, x) = left + rng.uniform(-wibble, wibble);
      }
    }
    wibble /= decay;
  }
  Field f(height, width);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) f.at(y, x) = static_cast<float>(at(y, x));
  }
  f.normalize();
  return f;
}

Field perlin_noise(int height, int width, double cell, int octaves, double persistence, Rng& rng) {
  Field out(height, width);
  double amplitude = 1.0;
  double period = std::max(cell, 1.0);
  for (int o = 0; o < octaves; ++o) {
    const int gh = static_cast<int>(std::ceil(height / period)) + 2;
    const int gw = static_cast<int>(std::ceil(width / period)) + 2;
    std::vector<double> gy(static_cast<std::size_t>(gh) * gw), gx(gy.size());
    for (std::size_t i = 0; i < gy.size(); ++i) {
      const double a = rng.uniform(0.0, 2.0 * std::numbers::pi);
      gy[i] = std::sin(a);
      gx[i] = std::cos(a);
    }
    const double oy = rng.uniform(0.0, 1.0), ox = rng.uniform(0.0, 1.0);
    for (int y = 0; y < height; ++y) {
      for (int x = 0; x < width; ++x) {
        const double py = y / period + oy, px = x / period + ox;
        const int iy = static_cast<int>(py), ix = static_cast<int>(px);
        const double fy = py - iy, fx = px - ix;
        const auto dot = [&](int cy, int cx) {
          const std::size_t k = static_cast<std::size_t>(iy + cy) * gw + (ix + cx);
          return gy[k] * (fy - cy) + gx[k] * (fx - cx);
        };
        const auto fade = [](double t) { return t * t * t * (t * (t * 6 - 15) + 10); };
        const double uy = fade(fy), ux = fade(fx);
        const double top = dot(0, 0) + ux * (dot(0, 1) - dot(0, 0));
        const double bottom = dot(1, 0) + ux * (dot(1, 1) - dot(1, 0));
        out.at(y, x) += static_cast<float>(amplitude * (top + uy * (bottom - top)));
      }
    }
    amplitude *= persistence;
    period = std::max(period / 2.0, 1.0);
  }
  return out;
}

Field octave_noise(int height, int width, double exponent, Rng& rng) {
  Field out(height, width);
  const int max_dim = std::max(height, width);
  for (int k = 0; (1 << k) <= max_dim; ++k) {
    Field layer = gaussian_blur(white_noise(height, width, rng), k == 0 ? 0.0 : static_cast<double>(1 << k));
    double mean = 0.0, sq = 0.0;
    for (float v : layer.values) mean += v;
    mean /= static_cast<double>(layer.values.size());
    for (float v : layer.values) sq += (v - mean) * (v - mean);
    const double sd = std::sqrt(sq / static_cast<double>(layer.values.size()));
    const double weight = std::pow(2.0, k * exponent) / (sd > 0 ? sd : 1.0);
    for (std::size_t i = 0; i < out.values.size(); ++i) {
      out.values[i] += static_cast<float>(weight * (layer.values[i] - mean));
    }
  }
  double mean = 0.0, sq = 0.0;
  for (float v : out.values) mean += v;
  mean /= static_cast<double>(out.values.size());
  for (float v : out.values) sq += (v - mean) * (v - mean);
  const double sd = std::sqrt(sq / static_cast<double>(out.values.size()));
  for (auto& v : out.values) v = static_cast<float>((v - mean) / (sd > 0 ? sd : 1.0));
  return out;
}

void add_field(ImageBuffer& img, const Field& field, float scale) {
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      const float d = scale * field.at(y, x);
      for (int c = 0; c < 3; ++c) img.at(y, x, c) += d;
    }
  }
  img.clamp();
}

}  // namespace augdist::imgproc
