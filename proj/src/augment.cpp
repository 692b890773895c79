#include "crtrack/augment.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "crtrack/rng.hpp"

namespace crtrack {

namespace {

void require_valid(const Image& img, const char* who) {
  if (img.width < 1 || img.height < 1 ||
      img.pixels.size() != static_cast<std::size_t>(img.width) * img.height * 3)
    throw std::invalid_argument(std::string(who) + ": malformed image");
}

void clamp_all(std::vector<double>& buf, bool par) {
  const long long n = static_cast<long long>(buf.size());
#pragma omp parallel for schedule(static) if (par)
  for (long long i = 0; i < n; ++i) buf[i] = std::clamp(buf[i], 0.0, 255.0);
}

// Mean is accumulated serially so the pivot is identical under any thread
// count.
double mean_of(const std::vector<double>& buf) {
  double sum = 0.0;
  for (double v : buf) sum += v;
  return sum / static_cast<double>(buf.size());
}

std::vector<double> gaussian_kernel(double sigma) {
  const int radius = static_cast<int>(std::ceil(3.0 * sigma));
  std::vector<double> k(2 * radius + 1);
  double sum = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    k[i + radius] = std::exp(-0.5 * (i / sigma) * (i / sigma));
    sum += k[i + radius];
  }
  for (double& v : k) v /= sum;
  return k;
}

void blur_pass(const std::vector<double>& src, std::vector<double>& dst, int width,
               int height, const std::vector<double>& kernel, bool horizontal,
               bool par) {
  const int radius = static_cast<int>(kernel.size() / 2);
#pragma omp parallel for schedule(static) if (par)
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x)
      for (int c = 0; c < 3; ++c) {
        double acc = 0.0;
        for (int t = -radius; t <= radius; ++t) {
          const int sx = horizontal ? std::clamp(x + t, 0, width - 1) : x;
          const int sy = horizontal ? y : std::clamp(y + t, 0, height - 1);
          acc += kernel[t + radius] *
                 src[(static_cast<std::size_t>(sy) * width + sx) * 3 + c];
        }
        dst[(static_cast<std::size_t>(y) * width + x) * 3 + c] = acc;
      }
}

}  // namespace

Image Image::create(int w, int h, std::uint8_t fill) {
  if (w < 1 || h < 1) throw std::invalid_argument("Image::create: bad dimensions");
  Image img;
  img.width = w;
  img.height = h;
  img.pixels.assign(static_cast<std::size_t>(w) * h * 3, fill);
  return img;
}

AugmentParams sample_params(std::uint64_t seed, const AugmentRanges& ranges) {
  if (ranges.brightness_min > ranges.brightness_max ||
      ranges.blur_sigma_min > ranges.blur_sigma_max ||
      ranges.noise_sigma_min > ranges.noise_sigma_max)
    throw std::invalid_argument("sample_params: inverted range");
  rng::Stream s(rng::mix(seed, 0xA46DULL));
  AugmentParams p;
  p.contrast = ranges.contrast;
  p.gamma = ranges.gamma;
  p.brightness_scale = s.uniform(ranges.brightness_min, ranges.brightness_max);
  p.blur_sigma = s.uniform(ranges.blur_sigma_min, ranges.blur_sigma_max);
  p.noise_sigma = s.uniform(ranges.noise_sigma_min, ranges.noise_sigma_max);
  p.seed = seed;
  return p;
}

double gamma_correct(double value, double gamma) {
  if (!(gamma > 0.0)) throw std::invalid_argument("gamma_correct: gamma must be positive");
  return 255.0 * std::pow(std::clamp(value, 0.0, 255.0) / 255.0, gamma);
}

Image enhance(const Image& img, const AugmentParams& params, Exec exec) {
  require_valid(img, "enhance");
  if (!(params.contrast >= 0.0) || !(params.brightness_scale >= 0.0) ||
      !(params.blur_sigma >= 0.0) || !(params.gamma > 0.0) ||
      !(params.noise_sigma >= 0.0))
    throw std::invalid_argument("enhance: invalid parameters");

  const bool par = exec == Exec::parallel;
  const long long n = static_cast<long long>(img.pixels.size());
  std::vector<double> buf(img.pixels.begin(), img.pixels.end());

  if (params.contrast != 1.0) {
    const double mu = mean_of(buf);
    const double c = params.contrast;
#pragma omp parallel for schedule(static) if (par)
    for (long long i = 0; i < n; ++i) buf[i] = (buf[i] - mu) * c + mu;
    clamp_all(buf, par);
  }

  if (params.brightness_scale != 1.0) {
    const double s = params.brightness_scale;
#pragma omp parallel for schedule(static) if (par)
    for (long long i = 0; i < n; ++i) buf[i] *= s;
    clamp_all(buf, par);
  }

  if (params.blur_sigma > 1e-9) {
    const std::vector<double> kernel = gaussian_kernel(params.blur_sigma);
    std::vector<double> tmp(buf.size());
    blur_pass(buf, tmp, img.width, img.height, kernel, true, par);
    blur_pass(tmp, buf, img.width, img.height, kernel, false, par);
    clamp_all(buf, par);
  }

  if (params.gamma != 1.0) {
    const double g = params.gamma;
#pragma omp parallel for schedule(static) if (par)
    for (long long i = 0; i < n; ++i) buf[i] = 255.0 * std::pow(buf[i] / 255.0, g);
    clamp_all(buf, par);
  }

  if (params.noise_sigma > 0.0) {
    const double sigma = params.noise_sigma;
    const std::uint64_t seed = params.seed;
#pragma omp parallel for schedule(static) if (par)
    for (long long i = 0; i < n; ++i)
      buf[i] += sigma * rng::normal_at(seed, static_cast<std::uint64_t>(i));
    clamp_all(buf, par);
  }

  Image out = img;
  for (long long i = 0; i < n; ++i)
    out.pixels[i] = static_cast<std::uint8_t>(std::lround(buf[i]));
  return out;
}

Image read_ppm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("read_ppm: cannot open " + path);
  std::string magic;
  in >> magic;
  if (magic != "P6") throw std::runtime_error("read_ppm: not a P6 file: " + path);

  auto next_int = [&in, &path]() {
    // Skip whitespace and '#' comment lines between header fields.
    for (;;) {
      const int c = in.peek();
      if (c == '#') {
        std::string line;
        std::getline(in, line);
      } else if (std::isspace(c)) {
        in.get();
      } else {
        break;
      }
    }
    long long v = -1;
    in >> v;
    if (!in || v < 0) throw std::runtime_error("read_ppm: malformed header in " + path);
    return v;
  };

  const long long w = next_int();
  const long long h = next_int();
  const long long maxval = next_int();
  if (w < 1 || h < 1 || maxval != 255)
    throw std::runtime_error("read_ppm: unsupported dimensions or depth in " + path);
  in.get();  // single whitespace after maxval

  Image img = Image::create(static_cast<int>(w), static_cast<int>(h));
  in.read(reinterpret_cast<char*>(img.pixels.data()),
          static_cast<std::streamsize>(img.pixels.size()));
  if (in.gcount() != static_cast<std::streamsize>(img.pixels.size()))
    throw std::runtime_error("read_ppm: truncated pixel data in " + path);
  return img;
}

void write_ppm(const Image& img, const std::string& path) {
  require_valid(img, "write_ppm");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("write_ppm: cannot open " + path);
  out << "P6\n" << img.width << " " << img.height << "\n255\n";
  out.write(reinterpret_cast<const char*>(img.pixels.data()),
            static_cast<std::streamsize>(img.pixels.size()));
  if (!out) throw std::runtime_error("write_ppm: write failed for " + path);
}

}  // namespace crtrack
