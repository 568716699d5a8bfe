// Dissimilar-benchmark corruption family: warps, blurs, colour distortions,
// noise additions and occlusions in ten severities. Each kernel is built
// from the corruption's name and visual description; spatial parameters are
// in units of 1/32 of the shorter image side.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "augdist/imgproc.hpp"
#include "augdist/transforms.hpp"

namespace augdist {

namespace {

using namespace imgproc;
constexpr double kPi = std::numbers::pi;

double side_scale(const ImageBuffer& img) { return std::min(img.height(), img.width()) / 32.0; }

// Indices of the `count` largest entries of `score`, ties broken by index.
std::vector<std::size_t> top_k(const std::vector<float>& score, std::size_t count) {
  std::vector<std::size_t> order(score.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  count = std::min(count, order.size());
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(count), order.end(),
                    [&](std::size_t a, std::size_t b) { return score[a] > score[b] || (score[a] == score[b] && a < b); });
  order.resize(count);
  return order;
}

// Darkens a well-spaced point set drawn from high-pass filtered noise.
ImageBuffer blue_noise_sample(const ImageBuffer& img, const ParamSet& p, Rng& rng) {
  const Field white = white_noise(img.height(), img.width(), rng);
  const Field low = gaussian_blur(white, 1.5);
  std::vector<float> blue(white.values.size());
  for (std::size_t i = 0; i < blue.size(); ++i) blue[i] = white.values[i] - low.values[i];
  const auto count = static_cast<std::size_t>(std::lround(p.get("fraction") * static_cast<double>(blue.size())));
  ImageBuffer out = img;
  auto data = out.data();
  for (std::size_t i : top_k(blue, count)) {
    for (int c = 0; c < 3; ++c) data[i * 3 + c] = 0.0f;
  }
  return out;
}

ImageBuffer plasma_noise(const ImageBuffer& img, const ParamSet& p, Rng& rng) {
  Field plasma = plasma_fractal(img.height(), img.width(), p.get("decay"), rng);
  const double mean = std::accumulate(plasma.values.begin(), plasma.values.end(), 0.0) /
                      static_cast<double>(plasma.values.size());
  for (auto& v : plasma.values) v = static_cast<float>(v - mean);
  ImageBuffer out = img;
  add_field(out, plasma, static_cast<float>(p.get("strength")));
  return out;
}

// Occludes exactly round(fraction * H * W) pixels (set to black). The pixels
// chosen are those with the largest value of a randomly rotated and offset
// checker field sin(pi u / cell) * sin(pi v / cell), so small fractions
// occupy the centres of alternate squares and grow outwards.
ImageBuffer checkerboard(const ImageBuffer& img, const ParamSet& p, Rng& rng) {
  const double cell = std::max(1.0, p.length("cell", img));
  const double angle = rng.uniform(0.0, kPi / 2.0);
  const double ou = rng.uniform(0.0, 2.0 * cell), ov = rng.uniform(0.0, 2.0 * cell);
  const double c = std::cos(angle), s = std::sin(angle);
  const int h = img.height(), w = img.width();
  std::vector<float> score(img.pixel_count());
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double u = c * x + s * y + ou, v = -s * x + c * y + ov;
      score[static_cast<std::size_t>(y) * w + x] =
          static_cast<float>(std::sin(kPi * u / cell) * std::sin(kPi * v / cell));
    }
  }
  const auto count = static_cast<std::size_t>(std::lround(p.get("fraction") * static_cast<double>(score.size())));
  ImageBuffer out = img;
  auto data = out.data();
  for (std::size_t i : top_k(score, count)) {
    for (int k = 0; k < 3; ++k) data[i * 3 + k] = 0.0f;
  }
  return out;
}

ImageBuffer cocentric_sine_waves(const ImageBuffer& img, const ParamSet& p, Rng& rng) {
  const double freq = p.get("frequency") / (32.0 * side_scale(img));
  const double cy = rng.uniform(0, img.height()), cx = rng.uniform(0, img.width());
  const double phase = rng.uniform(0, 2 * kPi);
  Field wave(img.height(), img.width());
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      const double r = std::hypot(y - cy, x - cx);
      wave.at(y, x) = static_cast<float>(std::sin(2 * kPi * freq * r + phase));
    }
  }
  ImageBuffer out = img;
  add_field(out, wave, static_cast<float>(p.get("amplitude")));
  return out;
}

ImageBuffer single_frequency(const ImageBuffer& img, const ParamSet& p, Rng& rng) {
  const double freq = p.get("frequency") / (32.0 * side_scale(img));
  const double angle = rng.uniform(0, kPi);
  const double phase = rng.uniform(0, 2 * kPi);
  const double fy = freq * std::sin(angle), fx = freq * std::cos(angle);
  Field wave(img.height(), img.width());
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) wave.at(y, x) = static_cast<float>(std::sin(2 * kPi * (fy * y + fx * x) + phase));
  }
  ImageBuffer out = img;
  add_field(out, wave, static_cast<float>(p.get("amplitude")));
  return out;
}

ImageBuffer brown_noise(const ImageBuffer& img, const ParamSet& p, Rng& rng) {
  const Field noise = octave_noise(img.height(), img.width(), 1.0, rng);
  ImageBuffer out = img;
  add_field(out, noise, static_cast<float>(p.get("amplitude")));
  return out;
}

ImageBuffer perlin(const ImageBuffer& img, const ParamSet& p, Rng& rng) {
  Field noise = perlin_noise(img.height(), img.width(), p.length("cell", img), 4, 0.5, rng);
  double mean = 0, sq = 0;
  for (float v : noise.values) mean += v;
  mean /= static_cast<double>(noise.values.size());
  for (float v : noise.values) sq += (v - mean) * (v - mean);
  const double sd = std::sqrt(sq / static_cast<double>(noise.values.size()));
  for (auto& v : noise.values) v = static_cast<float>((v - mean) / (sd > 0 ? sd : 1.0));
  ImageBuffer out = img;
  add_field(out, noise, static_cast<float>(p.get("amplitude")));
  return out;
}

// Four-pointed stars: a bright core with horizontal/vertical rays.
Field sparkle_layer(int h, int w, const ParamSet& p, double scale, Rng& rng) {
  const double area = static_cast<double>(h) * w / 1024.0;
  const auto count = static_cast<int>(std::lround(p.get("count") * area));
  const double size = std::max(0.5, p.get("size") * scale);
  Field layer(h, w);
  for (int i = 0; i < count; ++i) {
    const double sy = rng.uniform(0, h), sx = rng.uniform(0, w);
    const double strength = rng.uniform(0.5, 1.0);
    const int r = static_cast<int>(std::ceil(size));
    for (int y = std::max(0, static_cast<int>(sy) - r); y <= std::min(h - 1, static_cast<int>(sy) + r); ++y) {
      for (int x = std::max(0, static_cast<int>(sx) - r); x <= std::min(w - 1, static_cast<int>(sx) + r); ++x) {
        const double dy = std::fabs(y + 0.5 - sy), dx = std::fabs(x + 0.5 - sx);
        const double core = std::exp(-(dy * dy + dx * dx) / (0.08 * size * size + 0.25));
        const double ray_h = std::exp(-dy * dy / 0.3) * std::max(0.0, 1.0 - dx / size);
        const double ray_v = std::exp(-dx * dx / 0.3) * std::max(0.0, 1.0 - dy / size);
        layer.at(y, x) += static_cast<float>(strength * std::max(core, std::max(ray_h, ray_v)));
      }
    }
  }
  return layer;
}

ImageBuffer sparkles(const ImageBuffer& img, const ParamSet& p, Rng& rng) {
  const Field layer = sparkle_layer(img.height(), img.width(), p, side_scale(img), rng);
  ImageBuffer out = img;
  add_field(out, layer, static_cast<float>(p.get("brightness")));
  return out;
}

ImageBuffer inverse_sparkles(const ImageBuffer& img, const ParamSet& p, Rng& rng) {
  const Field layer = sparkle_layer(img.height(), img.width(), p, side_scale(img), rng);
  ImageBuffer out = img;
  add_field(out, layer, -static_cast<float>(p.get("brightness")));
  return out;
}

// Refraction through a wavy surface: displacement along the gradient of a
// smooth height field, plus bright caustic lines where the field crosses zero.
ImageBuffer caustic_refraction(const ImageBuffer& img, const ParamSet& p, Rng& rng) {
  const int h = img.height(), w = img.width();
  Field height_field = perlin_noise(h, w, 8.0 * side_scale(img), 3, 0.5, rng);
  float peak = 0.0f;
  for (float v : height_field.values) peak = std::max(peak, std::fabs(v));
  if (peak > 0) {
    for (auto& v : height_field.values) v /= peak;
  }
  Field gy(h, w), gx(h, w);
  float gmax = 0.0f;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      gy.at(y, x) = 0.5f * (height_field.at(reflect(y + 1, h), x) - height_field.at(reflect(y - 1, h), x));
      gx.at(y, x) = 0.5f * (height_field.at(y, reflect(x + 1, w)) - height_field.at(y, reflect(x - 1, w)));
      gmax = std::max({gmax, std::fabs(gy.at(y, x)), std::fabs(gx.at(y, x))});
    }
  }
  const double strength = p.length("strength", img) / (gmax > 0 ? gmax : 1.0f);
  ImageBuffer out = warp(img, [&](double y, double x, double& sy, double& sx) {
    sy = y + strength * gy.at(static_cast<int>(y), static_cast<int>(x));
    sx = x + strength * gx.at(static_cast<int>(y), static_cast<int>(x));
  });
  Field lines(h, w);
  for (std::size_t i = 0; i < lines.values.size(); ++i) {
    const float v = height_field.values[i] / 0.12f;
    lines.values[i] = std::exp(-v * v);
  }
  add_field(out, lines, static_cast<float>(p.get("brightness")));
  return out;
}

ImageBuffer rotate_about_centre(const ImageBuffer& img, double radians) {
  const double c = std::cos(radians), s = std::sin(radians);
  const double cy = (img.height() - 1) / 2.0, cx = (img.width() - 1) / 2.0;
  return warp(img, [&](double y, double x, double& sy, double& sx) {
    const double dy = y - cy, dx = x - cx;
    sx = cx + c * dx + s * dy;
    sy = cy - s * dx + c * dy;
  });
}

ImageBuffer circular_motion_blur(const ImageBuffer& img, const ParamSet& p, Rng& rng) {
  const double span = p.get("degrees") * kPi / 180.0;
  const int steps = 16;
  const double direction = rng.bernoulli(0.5) ? 1.0 : -1.0;
  std::vector<ImageBuffer> parts;
  for (int i = 0; i <= steps; ++i) parts.push_back(rotate_about_centre(img, direction * span * i / steps));
  std::vector<double> w(parts.size(), 1.0 / static_cast<double>(parts.size()));
  return weighted_sum(parts, w);
}

// Random dark straight lines across the image with antialiased edges.
ImageBuffer lines(const ImageBuffer& img, const ParamSet& p, Rng& rng) {
  const int h = img.height(), w = img.width();
  const auto count = static_cast<int>(std::lround(p.get("count") * side_scale(img)));
  const double half_width = 0.5 * std::max(0.3, p.length("width", img));
  const auto opacity = static_cast<float>(p.get("opacity"));
  Field coverage(h, w);
  for (int i = 0; i < count; ++i) {
    const double y0 = rng.uniform(0, h), x0 = rng.uniform(0, w);
    const double angle = rng.uniform(0, kPi);
    const double ny = std::cos(angle), nx = -std::sin(angle);
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        const double d = std::fabs((y + 0.5 - y0) * ny + (x + 0.5 - x0) * nx);
        const double cov = std::clamp(half_width + 0.5 - d, 0.0, 1.0);
        coverage.at(y, x) = std::max(coverage.at(y, x), static_cast<float>(cov));
      }
    }
  }
  ImageBuffer out = img;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const float keep = 1.0f - opacity * coverage.at(y, x);
      for (int c = 0; c < 3; ++c) out.at(y, x, c) *= keep;
    }
  }
  return out;
}

// jhlabs-style pinch + twirl inside a disc of radius min(H, W) / 2.
ImageBuffer pinch_and_twirl(const ImageBuffer& img, const ParamSet& p, Rng& rng) {
  const double twirl = p.get("twirl") * kPi / 180.0 * (rng.bernoulli(0.5) ? 1.0 : -1.0);
  const double amount = p.get("pinch");
  const double cy = (img.height() - 1) / 2.0, cx = (img.width() - 1) / 2.0;
  const double radius = std::min(img.height(), img.width()) / 2.0;
  return warp(img, [&](double y, double x, double& sy, double& sx) {
    double dy = y - cy, dx = x - cx;
    const double dist2 = dy * dy + dx * dx;
    if (dist2 >= radius * radius || dist2 == 0.0) {
      sy = y;
      sx = x;
      return;
    }
    const double d = std::sqrt(dist2) / radius;
    const double t = std::pow(std::sin(kPi * 0.5 * d), -amount);
    dy *= t;
    dx *= t;
    const double e = 1.0 - d;
    const double a = twirl * e * e;
    const double s = std::sin(a), c = std::cos(a);
    sx = cx + c * dx - s * dy;
    sy = cy + s * dx + c * dy;
  });
}

ImageBuffer ripple(const ImageBuffer& img, const ParamSet& p, Rng& rng) {
  const double amp = p.length("amplitude", img);
  const double wavelength = std::max(0.5, p.length("wavelength", img));
  const double py = rng.uniform(0, 2 * kPi), px = rng.uniform(0, 2 * kPi);
  return warp(img, [&](double y, double x, double& sy, double& sx) {
    sx = x + amp * std::sin(2 * kPi * y / wavelength + px);
    sy = y + amp * std::sin(2 * kPi * x / wavelength + py);
  });
}

// Lateral colour: red and blue planes magnified by (1 + s) and (1 - s) about
// a centre jittered near the middle of the frame.
ImageBuffer transverse_chromatic_aberration(const ImageBuffer& img, const ParamSet& p, Rng& rng) {
  const double s = p.get("scale");
  const double cy = (img.height() - 1) / 2.0 + rng.uniform(-0.1, 0.1) * img.height();
  const double cx = (img.width() - 1) / 2.0 + rng.uniform(-0.1, 0.1) * img.width();
  const auto scaled = [cy, cx](double zoom) {
    return CoordMap([=](double y, double x, double& sy, double& sx) {
      sy = cy + (y - cy) / zoom;
      sx = cx + (x - cx) / zoom;
    });
  };
  const std::array<CoordMap, 3> maps = {scaled(1.0 + s), scaled(1.0), scaled(1.0 / (1.0 + s))};
  return warp_channels(img, maps);
}

}  // namespace

namespace detail {

std::vector<RegistryEntry> cbar_corruption_entries() {
  const auto cb = TransformKind::corruption_cbar;
  return {
      {"blue_noise_sample", cb, 1, 10, {{"fraction", 0, 1}},
       "blacken the top fraction of a high-pass (blue) noise field", blue_noise_sample},
      {"plasma_noise", cb, 1, 10, {{"strength", 0, 4}, {"decay", 1, 10}},
       "additive zero-mean diamond-square plasma", plasma_noise},
      {"checkerboard", cb, 1, 10, {{"fraction", 0, 1}, {"cell", 0.5, 32}},
       "blacken exactly fraction*H*W pixels of a rotated checker field", checkerboard},
      {"cocentric_sine_waves", cb, 1, 10, {{"amplitude", 0, 1}, {"frequency", 0, 16}},
       "additive radial sinusoid about a random centre", cocentric_sine_waves},
      {"single_frequency", cb, 1, 10, {{"amplitude", 0, 1}, {"frequency", 0, 16}},
       "additive plane sinusoid with random orientation", single_frequency},
      {"brown_noise", cb, 1, 10, {{"amplitude", 0, 1}}, "additive 1/f^2-like octave noise", brown_noise},
      {"perlin_noise", cb, 1, 10, {{"amplitude", 0, 1}, {"cell", 0.5, 32}}, "additive 4-octave gradient noise",
       perlin},
      {"sparkles", cb, 1, 10, {{"count", 0, 200}, {"size", 0, 32}, {"brightness", 0, 4}},
       "additive four-pointed bright stars", sparkles},
      {"inverse_sparkles", cb, 1, 10, {{"count", 0, 200}, {"size", 0, 32}, {"brightness", 0, 4}},
       "subtractive four-pointed dark stars", inverse_sparkles},
      {"caustic_refraction", cb, 1, 10, {{"strength", 0, 16}, {"brightness", 0, 2}},
       "gradient-displacement warp plus bright zero-crossing lines", caustic_refraction},
      {"circular_motion_blur", cb, 1, 10, {{"degrees", 0, 180}}, "mean of rotations over an arc",
       circular_motion_blur},
      {"lines", cb, 1, 10, {{"count", 0, 64}, {"width", 0, 8}, {"opacity", 0, 1}},
       "random dark straight lines", lines},
      {"pinch_and_twirl", cb, 1, 10, {{"twirl", 0, 720}, {"pinch", -1, 1}},
       "radial pinch and swirl inside the inscribed disc", pinch_and_twirl},
      {"ripple", cb, 1, 10, {{"amplitude", 0, 16}, {"wavelength", 0.5, 64}}, "sinusoidal displacement in x and y",
       ripple},
      {"transverse_chromatic_aberration", cb, 1, 10, {{"scale", 0, 0.5}},
       "red/blue planes magnified in opposite directions", transverse_chromatic_aberration},
  };
}

}  // namespace detail

}  // namespace augdist
