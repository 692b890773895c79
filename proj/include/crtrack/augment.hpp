#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "crtrack/parallel.hpp"

namespace crtrack {

// 8-bit RGB image, row-major, interleaved channels.
struct Image {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;

  static Image create(int w, int h, std::uint8_t fill = 0);
  std::size_t index(int x, int y, int c) const {
    return (static_cast<std::size_t>(y) * width + x) * 3 + c;
  }
  std::uint8_t at(int x, int y, int c) const { return pixels[index(x, y, c)]; }
  void set(int x, int y, int c, std::uint8_t v) { pixels[index(x, y, c)] = v; }
};

// Sampling ranges for the degradation chain; contrast and gamma are fixed
// values, the rest are drawn uniformly.
struct AugmentRanges {
  double contrast = 0.7;
  double gamma = 2.2;
  double brightness_min = 0.2;
  double brightness_max = 0.5;
  double blur_sigma_min = 0.5;
  double blur_sigma_max = 2.0;
  double noise_sigma_min = 2.0;
  double noise_sigma_max = 15.0;
};

// Default-constructed params are the identity; every stage at its neutral
// value is skipped outright, which keeps the identity bit-exact.
struct AugmentParams {
  double contrast = 1.0;
  double brightness_scale = 1.0;
  double blur_sigma = 0.0;
  double gamma = 1.0;
  double noise_sigma = 0.0;
  std::uint64_t seed = 0;
};

AugmentParams sample_params(std::uint64_t seed, const AugmentRanges& ranges = {});

// Degradation order: contrast about the image mean, brightness scaling,
// Gaussian blur (radius ceil(3*sigma), clamp-to-edge), gamma, then additive
// Gaussian noise from a counter-based generator keyed by (seed, sample
// index). Values are clamped to [0, 255] after every stage and quantised
// once at the end.
Image enhance(const Image& img, const AugmentParams& params, Exec exec = Exec::parallel);

// Gamma curve on the [0, 255] domain.
double gamma_correct(double value, double gamma);

Image read_ppm(const std::string& path);
void write_ppm(const Image& img, const std::string& path);

}  // namespace crtrack
