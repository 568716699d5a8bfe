// The fifteen reference corruptions (noise, blur, weather, digital), each
// parameterized per severity by the severity table. Spatial parameters are in
// units of 1/32 of the shorter image side so one table serves any resolution.

#include <algorithm>
#include <cmath>
#include <numbers>

#include "augdist/imgproc.hpp"
#include "augdist/transforms.hpp"

namespace augdist {

namespace {

using namespace imgproc;

ImageBuffer gaussian_noise(const ImageBuffer& img, const ParamSet& p, Rng& rng) {
  const double sigma = p.get("sigma");
  ImageBuffer out = img;
  for (auto& v : out.data()) v += static_cast<float>(sigma * rng.normal());
  return out;
}

ImageBuffer shot_noise(const ImageBuffer& img, const ParamSet& p, Rng& rng) {
  const double photons = p.get("photons");
  ImageBuffer out = img;
  for (auto& v : out.data()) v = static_cast<float>(static_cast<double>(rng.poisson(v * photons)) / photons);
  return out;
}

ImageBuffer impulse_noise(const ImageBuffer& img, const ParamSet& p, Rng& rng) {
  const double amount = p.get("amount");
  ImageBuffer out = img;
  for (auto& v : out.data()) {
    if (rng.bernoulli(amount)) v = rng.bernoulli(0.5) ? 1.0f : 0.0f;
  }
  return out;
}

ImageBuffer motion_blur(const ImageBuffer& img, const ParamSet& p, Rng& rng) {
  const double length = p.length("length", img);
  const double angle = rng.uniform(-45.0, 45.0) * std::numbers::pi / 180.0;
  int side = 0;
  const auto k = motion_kernel(length, angle, side);
  return convolve2d(img, k, side);
}

ImageBuffer defocus_blur(const ImageBuffer& img, const ParamSet& p, Rng&) {
  int side = 0;
  const auto k = disk_kernel(p.length("radius", img), side);
  return gaussian_blur(convolve2d(img, k, side), p.length("alias_sigma", img));
}

ImageBuffer zoom_center(const ImageBuffer& img, double zoom) {
  const double cy = (img.height() - 1) / 2.0, cx = (img.width() - 1) / 2.0;
  return warp(img, [&](double y, double x, double& sy, double& sx) {
    sy = cy + (y - cy) / zoom;
    sx = cx + (x - cx) / zoom;
  });
}

ImageBuffer zoom_blur(const ImageBuffer& img, const ParamSet& p, Rng&) {
  const double max_zoom = p.get("max_zoom");
  const int steps = p.get_int("steps");
  std::vector<ImageBuffer> parts{img};
  for (int i = 1; i <= steps; ++i) parts.push_back(zoom_center(img, 1.0 + (max_zoom - 1.0) * i / steps));
  std::vector<double> w(parts.size(), 1.0 / static_cast<double>(parts.size()));
  return weighted_sum(parts, w);
}

ImageBuffer glass_blur(const ImageBuffer& img, const ParamSet& p, Rng& rng) {
  const double sigma = p.length("sigma", img);
  const int delta = std::max(1, static_cast<int>(std::lround(p.length("delta", img))));
  const int iterations = p.get_int("iterations");
  ImageBuffer x = gaussian_blur(img, sigma);
  const int h = x.height(), w = x.width();
  // Each pass reads every pixel from a random neighbour within delta, so the
  // source offsets perform a random walk that widens with the iteration count.
  for (int it = 0; it < iterations; ++it) {
    ImageBuffer next(h, w);
    for (int y = 0; y < h; ++y) {
      for (int xx = 0; xx < w; ++xx) {
        const int ny = reflect(y + static_cast<int>(rng.uniform_int(-delta, delta)), h);
        const int nx = reflect(xx + static_cast<int>(rng.uniform_int(-delta, delta)), w);
        for (int c = 0; c < 3; ++c) next.at(y, xx, c) = x.at(ny, nx, c);
      }
    }
    x = std::move(next);
  }
  return gaussian_blur(x, sigma);
}

ImageBuffer brightness(const ImageBuffer& img, const ParamSet& p, Rng&) {
  const auto shift = static_cast<float>(p.get("shift"));
  ImageBuffer out = img;
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      float h, s, v;
      rgb_to_hsv(img.at(y, x, 0), img.at(y, x, 1), img.at(y, x, 2), h, s, v);
      v = std::clamp(v + shift, 0.0f, 1.0f);
      hsv_to_rgb(h, s, v, out.at(y, x, 0), out.at(y, x, 1), out.at(y, x, 2));
    }
  }
  return out;
}

ImageBuffer fog(const ImageBuffer& img, const ParamSet& p, Rng& rng) {
  const auto strength = static_cast<float>(p.get("strength"));
  const Field plasma = plasma_fractal(img.height(), img.width(), p.get("decay"), rng);
  float max_val = 0.0f;
  for (float v : img.data()) max_val = std::max(max_val, v);
  ImageBuffer out = img;
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      for (int c = 0; c < 3; ++c) {
        out.at(y, x, c) = (img.at(y, x, c) + strength * plasma.at(y, x)) * max_val / (max_val + strength);
      }
    }
  }
  return out;
}

// Procedural frost: ridged fractal noise sharpened into crystal-like streaks,
// tinted pale blue, blended over the image.
ImageBuffer frost(const ImageBuffer& img, const ParamSet& p, Rng& rng) {
  const auto a = static_cast<float>(p.get("image_weight"));
  const auto b = static_cast<float>(p.get("frost_weight"));
  Field base = plasma_fractal(img.height(), img.width(), 1.6, rng);
  Field detail = plasma_fractal(img.height(), img.width(), 1.2, rng);
  Field layer(img.height(), img.width());
  for (std::size_t i = 0; i < layer.values.size(); ++i) {
    const float ridge = 1.0f - std::fabs(2.0f * detail.values[i] - 1.0f);
    layer.values[i] = 0.55f * base.values[i] + 0.45f * std::pow(ridge, 3.0f);
  }
  layer.normalize();
  constexpr float tint[3] = {0.86f, 0.92f, 1.0f};
  ImageBuffer out(img.height(), img.width());
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      for (int c = 0; c < 3; ++c) out.at(y, x, c) = a * img.at(y, x, c) + b * tint[c] * layer.at(y, x);
    }
  }
  return out;
}

ImageBuffer snow(const ImageBuffer& img, const ParamSet& p, Rng& rng) {
  const int h = img.height(), w = img.width();
  const double mean = p.get("mean"), sd = p.get("std"), zoom = p.get("zoom");
  const double threshold = p.get("threshold");
  const auto blend = static_cast<float>(p.get("blend"));
  Field flakes(h, w);
  for (auto& v : flakes.values) v = static_cast<float>(rng.normal(mean, sd));
  // Zoom the flake field about its centre so flakes grow with `zoom`.
  Field zoomed(h, w);
  const double cy = (h - 1) / 2.0, cx = (w - 1) / 2.0;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) zoomed.at(y, x) = sample_bilinear(flakes, cy + (y - cy) / zoom, cx + (x - cx) / zoom);
  }
  for (auto& v : zoomed.values) {
    if (v < threshold) v = 0.0f;
  }
  ImageBuffer layer(h, w);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      for (int c = 0; c < 3; ++c) layer.at(y, x, c) = zoomed.at(y, x);
    }
  }
  int side = 0;
  const double angle = rng.uniform(-135.0, -45.0) * std::numbers::pi / 180.0;
  const auto k = motion_kernel(p.length("blur_length", img), angle, side);
  layer = convolve2d(layer, k, side);

  ImageBuffer out(h, w);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const float gray = 0.299f * img.at(y, x, 0) + 0.587f * img.at(y, x, 1) + 0.114f * img.at(y, x, 2);
      const float lifted = gray * 1.5f + 0.5f;
      for (int c = 0; c < 3; ++c) {
        const float v = img.at(y, x, c);
        const float base = blend * v + (1.0f - blend) * std::max(v, lifted);
        out.at(y, x, c) = base + layer.at(y, x, c) + layer.at(h - 1 - y, w - 1 - x, c);
      }
    }
  }
  return out;
}

ImageBuffer contrast(const ImageBuffer& img, const ParamSet& p, Rng&) {
  const auto factor = static_cast<float>(p.get("factor"));
  double mean[3] = {0, 0, 0};
  auto data = img.data();
  for (std::size_t i = 0; i < data.size(); ++i) mean[i % 3] += data[i];
  for (auto& m : mean) m /= static_cast<double>(img.pixel_count());
  ImageBuffer out = img;
  auto o = out.data();
  for (std::size_t i = 0; i < o.size(); ++i) {
    const auto m = static_cast<float>(mean[i % 3]);
    o[i] = (o[i] - m) * factor + m;
  }
  return out;
}

ImageBuffer pixelate(const ImageBuffer& img, const ParamSet& p, Rng&) {
  const double f = p.get("factor");
  const int dh = std::max(1, static_cast<int>(std::lround(img.height() * f)));
  const int dw = std::max(1, static_cast<int>(std::lround(img.width() * f)));
  return resize_nearest(resize_area(img, dh, dw), img.height(), img.width());
}

ImageBuffer jpeg_compression(const ImageBuffer& img, const ParamSet& p, Rng&) {
  return jpeg_roundtrip(img, p.get_int("quality"));
}

ImageBuffer elastic_transform(const ImageBuffer& img, const ParamSet& p, Rng& rng) {
  const int h = img.height(), w = img.width();
  const double alpha = p.length("alpha", img);
  const double sigma = p.length("sigma", img);
  const double jitter = p.get("affine");
  const auto displacement = [&] {
    Field f(h, w);
    for (auto& v : f.values) v = static_cast<float>(rng.uniform(-1.0, 1.0));
    f = gaussian_blur(f, sigma);
    float peak = 0.0f;
    for (float v : f.values) peak = std::max(peak, std::fabs(v));
    if (peak > 0.0f) {
      for (auto& v : f.values) v /= peak;
    }
    return f;
  };
  const Field dy = displacement();
  const Field dx = displacement();
  double a[4];
  for (auto& v : a) v = rng.uniform(-jitter, jitter);
  const double cy = (h - 1) / 2.0, cx = (w - 1) / 2.0;
  return warp(img, [&](double y, double x, double& sy, double& sx) {
    const double ry = y - cy, rx = x - cx;
    const int iy = static_cast<int>(y), ix = static_cast<int>(x);
    sy = cy + ry + a[0] * ry + a[1] * rx + alpha * dy.at(iy, ix);
    sx = cx + rx + a[2] * ry + a[3] * rx + alpha * dx.at(iy, ix);
  });
}

}  // namespace

namespace detail {

std::vector<RegistryEntry> reference_corruption_entries() {
  const auto ref = TransformKind::corruption_reference;
  return {
      {"gaussian_noise", ref, 1, 5, {{"sigma", 0, 1}}, "additive N(0, sigma^2) per value", gaussian_noise},
      {"shot_noise", ref, 1, 5, {{"photons", 1, 1e5}}, "Poisson(v * photons) / photons", shot_noise},
      {"impulse_noise", ref, 1, 5, {{"amount", 0, 1}}, "salt-and-pepper replacement per value", impulse_noise},
      {"motion_blur", ref, 1, 5, {{"length", 0, 32}}, "Gaussian-tapered line kernel, angle U(-45, 45) deg",
       motion_blur},
      {"defocus_blur", ref, 1, 5, {{"radius", 0, 32}, {"alias_sigma", 0, 32}},
       "area-weighted disc kernel then Gaussian anti-alias", defocus_blur},
      {"zoom_blur", ref, 1, 5, {{"max_zoom", 1, 3}, {"steps", 1, 64, true}},
       "mean of centre zooms 1..max_zoom", zoom_blur},
      {"glass_blur", ref, 1, 5, {{"sigma", 0, 8}, {"delta", 0, 8}, {"iterations", 0, 10, true}},
       "blur, iterated random local resampling, blur", glass_blur},
      {"brightness", ref, 1, 5, {{"shift", -1, 1}}, "HSV value shift", brightness},
      {"fog", ref, 1, 5, {{"strength", 0, 10}, {"decay", 1, 10}}, "additive plasma fractal, renormalized", fog},
      {"frost", ref, 1, 5, {{"image_weight", 0, 1}, {"frost_weight", 0, 1}},
       "blend with procedural ridged-fractal ice layer", frost},
      {"snow", ref, 1, 5,
       {{"mean", 0, 1}, {"std", 0, 1}, {"zoom", 1, 8}, {"threshold", 0, 1}, {"blur_length", 0, 32}, {"blend", 0, 1}},
       "thresholded zoomed noise flakes, motion blurred, over a whitened image", snow},
      {"contrast", ref, 1, 5, {{"factor", 0, 1}}, "scale deviation from per-channel mean", contrast},
      {"pixelate", ref, 1, 5, {{"factor", 0.01, 1}}, "area downscale then nearest upscale", pixelate},
      {"jpeg_compression", ref, 1, 5, {{"quality", 1, 100, true}}, "in-process JPEG round trip", jpeg_compression},
      {"elastic_transform", ref, 1, 5, {{"alpha", 0, 32}, {"sigma", 0.1, 32}, {"affine", 0, 0.5}},
       "smoothed random displacement field plus random affine jitter", elastic_transform},
  };
}

}  // namespace detail

}  // namespace augdist
