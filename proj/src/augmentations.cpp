// The nine base augmentations (five geometric, four colour), following the
// operation set and magnitude conventions of AugMix.

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "augdist/augmix.hpp"
#include "augdist/errors.hpp"
#include "augdist/imgproc.hpp"
#include "augdist/transforms.hpp"

namespace augdist {

namespace {

using imgproc::warp;

ImageBuffer shear_x(const ImageBuffer& img, const ParamSet& p, Rng&) {
  const double s = p.get("shear");
  const double cy = (img.height() - 1) / 2.0;
  return warp(img, [&](double y, double x, double& sy, double& sx) {
    sy = y;
    sx = x + s * (y - cy);
  });
}

ImageBuffer shear_y(const ImageBuffer& img, const ParamSet& p, Rng&) {
  const double s = p.get("shear");
  const double cx = (img.width() - 1) / 2.0;
  return warp(img, [&](double y, double x, double& sy, double& sx) {
    sy = y + s * (x - cx);
    sx = x;
  });
}

ImageBuffer translate_x(const ImageBuffer& img, const ParamSet& p, Rng&) {
  const double d = p.get("fraction") * img.width();
  return warp(img, [&](double y, double x, double& sy, double& sx) {
    sy = y;
    sx = x + d;
  });
}

ImageBuffer translate_y(const ImageBuffer& img, const ParamSet& p, Rng&) {
  const double d = p.get("fraction") * img.height();
  return warp(img, [&](double y, double x, double& sy, double& sx) {
    sy = y + d;
    sx = x;
  });
}

ImageBuffer rotate(const ImageBuffer& img, const ParamSet& p, Rng&) {
  const double a = p.get("degrees") * std::numbers::pi / 180.0;
  const double c = std::cos(a), s = std::sin(a);
  const double cy = (img.height() - 1) / 2.0, cx = (img.width() - 1) / 2.0;
  return warp(img, [&](double y, double x, double& sy, double& sx) {
    const double dy = y - cy, dx = x - cx;
    sx = cx + c * dx + s * dy;
    sy = cy - s * dx + c * dy;
  });
}

ImageBuffer solarize(const ImageBuffer& img, const ParamSet& p, Rng&) {
  const auto threshold = static_cast<float>(p.get("threshold"));
  ImageBuffer out = img;
  for (auto& v : out.data()) {
    if (v >= threshold) v = 1.0f - v;
  }
  return out;
}

ImageBuffer posterize(const ImageBuffer& img, const ParamSet& p, Rng&) {
  const int bits = p.get_int("bits");
  const auto mask = static_cast<std::uint8_t>(0xFF << (8 - bits));
  ImageBuffer out = img;
  for (auto& v : out.data()) v = dequantize(static_cast<std::uint8_t>(quantize(v) & mask));
  return out;
}

// Histogram equalization on 8-bit codes, per channel (PIL ImageOps.equalize).
ImageBuffer equalize(const ImageBuffer& img, const ParamSet&, Rng&) {
  ImageBuffer out = img;
  auto data = out.data();
  for (int c = 0; c < 3; ++c) {
    std::array<std::size_t, 256> hist{};
    for (std::size_t i = c; i < data.size(); i += 3) ++hist[quantize(data[i])];
    std::size_t total = 0, last = 0, nonzero = 0;
    for (std::size_t h : hist) {
      if (h) {
        total += h;
        last = h;
        ++nonzero;
      }
    }
    if (nonzero <= 1) continue;
    const std::size_t step = (total - last) / 255;
    if (step == 0) continue;
    std::array<std::uint8_t, 256> lut{};
    std::size_t n = step / 2;
    for (int i = 0; i < 256; ++i) {
      lut[i] = static_cast<std::uint8_t>(std::min<std::size_t>(255, n / step));
      n += hist[i];
    }
    for (std::size_t i = c; i < data.size(); i += 3) data[i] = dequantize(lut[quantize(data[i])]);
  }
  return out;
}

// Per-channel stretch of [min, max] to [0, 1].
ImageBuffer autocontrast(const ImageBuffer& img, const ParamSet&, Rng&) {
  ImageBuffer out = img;
  auto data = out.data();
  for (int c = 0; c < 3; ++c) {
    float lo = 1.0f, hi = 0.0f;
    for (std::size_t i = c; i < data.size(); i += 3) {
      lo = std::min(lo, data[i]);
      hi = std::max(hi, data[i]);
    }
    if (hi <= lo) continue;
    for (std::size_t i = c; i < data.size(); i += 3) data[i] = (data[i] - lo) / (hi - lo);
  }
  return out;
}

double signed_level(double value, Rng& rng) { return rng.bernoulli(0.5) ? -value : value; }

}  // namespace

namespace detail {

std::vector<RegistryEntry> augmentation_entries() {
  const auto aug = TransformKind::augmentation;
  return {
      {"shear_x", aug, 0, 0, {{"shear", -1.0, 1.0}}, "horizontal shear about the centre row", shear_x},
      {"shear_y", aug, 0, 0, {{"shear", -1.0, 1.0}}, "vertical shear about the centre column", shear_y},
      {"translate_x", aug, 0, 0, {{"fraction", -1.0, 1.0}}, "horizontal shift by fraction of width", translate_x},
      {"translate_y", aug, 0, 0, {{"fraction", -1.0, 1.0}}, "vertical shift by fraction of height", translate_y},
      {"rotate", aug, 0, 0, {{"degrees", -180.0, 180.0}}, "rotation about the image centre", rotate},
      {"solarize", aug, 0, 0, {{"threshold", 0.0, 1.0}}, "invert values at or above threshold", solarize},
      {"equalize", aug, 0, 0, {}, "per-channel histogram equalization", equalize},
      {"autocontrast", aug, 0, 0, {}, "per-channel min/max stretch", autocontrast},
      {"posterize", aug, 0, 0, {{"bits", 1.0, 8.0, true}}, "keep the top bits of each 8-bit code", posterize},
  };
}

}  // namespace detail

const std::array<std::string_view, 9>& base_augmentation_names() {
  static const std::array<std::string_view, 9> names = {"shear_x",  "shear_y",  "translate_x",
                                                        "translate_y", "rotate", "solarize",
                                                        "equalize", "autocontrast", "posterize"};
  return names;
}

TransformSpec sample_base_op(std::string_view name, double magnitude, Rng& rng) {
  TransformSpec spec;
  spec.name = std::string(name);
  spec.seed = Seed{rng.next_u64()};
  const double level = rng.uniform(0.1, magnitude);
  if (name == "shear_x" || name == "shear_y") {
    spec.params["shear"] = signed_level(level * 0.3 / 10.0, rng);
  } else if (name == "translate_x" || name == "translate_y") {
    spec.params["fraction"] = signed_level(level / 3.0 / 10.0, rng);
  } else if (name == "rotate") {
    spec.params["degrees"] = signed_level(std::floor(level * 30.0 / 10.0), rng);
  } else if (name == "solarize") {
    spec.params["threshold"] = (256.0 - std::floor(level * 256.0 / 10.0)) / 256.0;
  } else if (name == "posterize") {
    spec.params["bits"] = 4.0 - std::floor(level * 4.0 / 10.0);
  } else if (name != "equalize" && name != "autocontrast") {
    throw RegistryError("not a base augmentation: " + std::string(name));
  }
  return spec;
}

}  // namespace augdist
