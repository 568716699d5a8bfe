// Lossy stages of a baseline sequential JPEG codec. Huffman coding is
// lossless and does not change decoded pixels, so it is not performed.

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "augdist/errors.hpp"
#include "augdist/transforms.hpp"

namespace augdist {

namespace {

// ITU-T T.81 Annex K tables, natural (row-major) order.
constexpr std::array<int, 64> kLumaTable = {
    16, 11, 10, 16, 24,  40,  51,  61,  12, 12, 14, 19, 26,  58,  60,  55,
    14, 13, 16, 24, 40,  57,  69,  56,  14, 17, 22, 29, 51,  87,  80,  62,
    18, 22, 37, 56, 68,  109, 103, 77,  24, 35, 55, 64, 81,  104, 113, 92,
    49, 64, 78, 87, 103, 121, 120, 101, 72, 92, 95, 98, 112, 100, 103, 99};
constexpr std::array<int, 64> kChromaTable = {
    17, 18, 24, 47, 99, 99, 99, 99, 18, 21, 26, 66, 99, 99, 99, 99, 24, 26, 56, 99, 99, 99,
    99, 99, 47, 66, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99,
    99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99};

std::array<double, 64> scaled_table(const std::array<int, 64>& base, int quality) {
  const int scale = quality < 50 ? 5000 / quality : 200 - 2 * quality;
  std::array<double, 64> out{};
  for (int i = 0; i < 64; ++i) out[i] = std::clamp((base[i] * scale + 50) / 100, 1, 255);
  return out;
}

struct Plane {
  int h = 0, w = 0;
  std::vector<double> v;
  double& at(int y, int x) { return v[static_cast<std::size_t>(y) * w + x]; }
  double at(int y, int x) const { return v[static_cast<std::size_t>(y) * w + x]; }
};

const std::array<double, 64>& dct_basis() {
  static const std::array<double, 64> basis = [] {
    std::array<double, 64> b{};
    for (int u = 0; u < 8; ++u) {
      const double cu = u == 0 ? std::sqrt(0.125) : 0.5;
      for (int x = 0; x < 8; ++x) b[u * 8 + x] = cu * std::cos((2 * x + 1) * u * std::numbers::pi / 16.0);
    }
    return b;
  }();
  return basis;
}

// Quantize-dequantize every 8x8 block of a plane whose sides are multiples of 8.
void code_plane(Plane& p, const std::array<double, 64>& q) {
  const auto& b = dct_basis();
  for (int by = 0; by < p.h; by += 8) {
    for (int bx = 0; bx < p.w; bx += 8) {
      double block[64], tmp[64], coef[64];
      for (int y = 0; y < 8; ++y)
        for (int x = 0; x < 8; ++x) block[y * 8 + x] = p.at(by + y, bx + x) - 128.0;
      for (int y = 0; y < 8; ++y)
        for (int u = 0; u < 8; ++u) {
          double s = 0;
          for (int x = 0; x < 8; ++x) s += b[u * 8 + x] * block[y * 8 + x];
          tmp[y * 8 + u] = s;
        }
      for (int v = 0; v < 8; ++v)
        for (int u = 0; u < 8; ++u) {
          double s = 0;
          for (int y = 0; y < 8; ++y) s += b[v * 8 + y] * tmp[y * 8 + u];
          coef[v * 8 + u] = std::round(s / q[v * 8 + u]) * q[v * 8 + u];
        }
      for (int v = 0; v < 8; ++v)
        for (int x = 0; x < 8; ++x) {
          double s = 0;
          for (int u = 0; u < 8; ++u) s += b[u * 8 + x] * coef[v * 8 + u];
          tmp[v * 8 + x] = s;
        }
      for (int y = 0; y < 8; ++y)
        for (int x = 0; x < 8; ++x) {
          double s = 0;
          for (int v = 0; v < 8; ++v) s += b[v * 8 + y] * tmp[v * 8 + x];
          p.at(by + y, bx + x) = std::clamp(std::round(s + 128.0), 0.0, 255.0);
        }
    }
  }
}

}  // namespace

ImageBuffer jpeg_roundtrip(const ImageBuffer& img, int quality) {
  if (quality < 1 || quality > 100) throw DomainError("jpeg quality must be in [1, 100]");
  const int h = img.height(), w = img.width();
  const int ph = (h + 15) / 16 * 16, pw = (w + 15) / 16 * 16;
  Plane y{ph, pw, std::vector<double>(static_cast<std::size_t>(ph) * pw)};
  Plane cb_full = y, cr_full = y;
  for (int r = 0; r < ph; ++r) {
    for (int c = 0; c < pw; ++c) {
      const int sr = std::min(r, h - 1), sc = std::min(c, w - 1);
      const double R = quantize(img.at(sr, sc, 0)), G = quantize(img.at(sr, sc, 1)), B = quantize(img.at(sr, sc, 2));
      y.at(r, c) = 0.299 * R + 0.587 * G + 0.114 * B;
      cb_full.at(r, c) = -0.168736 * R - 0.331264 * G + 0.5 * B + 128.0;
      cr_full.at(r, c) = 0.5 * R - 0.418688 * G - 0.081312 * B + 128.0;
    }
  }
  Plane cb{ph / 2, pw / 2, std::vector<double>(static_cast<std::size_t>(ph / 2) * (pw / 2))};
  Plane cr = cb;
  for (int r = 0; r < ph / 2; ++r) {
    for (int c = 0; c < pw / 2; ++c) {
      cb.at(r, c) = (cb_full.at(2 * r, 2 * c) + cb_full.at(2 * r + 1, 2 * c) + cb_full.at(2 * r, 2 * c + 1) +
                     cb_full.at(2 * r + 1, 2 * c + 1)) / 4.0;
      cr.at(r, c) = (cr_full.at(2 * r, 2 * c) + cr_full.at(2 * r + 1, 2 * c) + cr_full.at(2 * r, 2 * c + 1) +
                     cr_full.at(2 * r + 1, 2 * c + 1)) / 4.0;
    }
  }
  for (auto& v : y.v) v = std::clamp(std::round(v), 0.0, 255.0);
  for (auto& v : cb.v) v = std::clamp(std::round(v), 0.0, 255.0);
  for (auto& v : cr.v) v = std::clamp(std::round(v), 0.0, 255.0);

  code_plane(y, scaled_table(kLumaTable, quality));
  const auto qc = scaled_table(kChromaTable, quality);
  code_plane(cb, qc);
  code_plane(cr, qc);

  ImageBuffer out(h, w);
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      const double Y = y.at(r, c), Cb = cb.at(r / 2, c / 2) - 128.0, Cr = cr.at(r / 2, c / 2) - 128.0;
      const double rgb[3] = {Y + 1.402 * Cr, Y - 0.344136 * Cb - 0.714136 * Cr, Y + 1.772 * Cb};
      for (int k = 0; k < 3; ++k) {
        out.at(r, c, k) = dequantize(static_cast<std::uint8_t>(std::clamp(std::round(rgb[k]), 0.0, 255.0)));
      }
    }
  }
  return out;
}

}  // namespace augdist
