#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "crtrack/asa.hpp"
#include "crtrack/augment.hpp"
#include "crtrack/core.hpp"
#include "crtrack/kernels.hpp"
#include "crtrack/matrix.hpp"
#include "crtrack/parallel.hpp"
#include "crtrack/rng.hpp"

using namespace crtrack;

namespace {

double time_best_ms(int iters, const std::function<void()>& fn) {
  double best = 1e300;
  for (int i = 0; i < iters; ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    fn();
    const auto t1 = std::chrono::steady_clock::now();
    best = std::min(best, std::chrono::duration<double, std::milli>(t1 - t0).count());
  }
  return best;
}

double max_abs_diff(const Matrix& a, const Matrix& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.data.size(); ++i)
    m = std::max(m, std::abs(a.data[i] - b.data[i]));
  return m;
}

void report(const std::string& name, double serial_ms, double parallel_ms, double diff) {
  std::printf("%-22s %10.3f %10.3f %8.2fx   %.3g\n", name.c_str(), serial_ms,
              parallel_ms, serial_ms / parallel_ms, diff);
}

std::vector<BoundingBox> random_boxes(rng::Stream& st, int n, double w, double h) {
  std::vector<BoundingBox> out;
  out.reserve(n);
  for (int i = 0; i < n; ++i) {
    const double bw = st.uniform(10.0, 120.0);
    const double bh = st.uniform(10.0, 120.0);
    out.push_back({st.uniform(0.0, w - bw), st.uniform(0.0, h - bh), bw, bh});
  }
  return out;
}

EmbeddingVec random_unit(rng::Stream& st, int dim) {
  EmbeddingVec e(std::vector<double>(dim, 0.0));
  double n2 = 0.0;
  for (double& v : e.values) {
    v = st.normal();
    n2 += v * v;
  }
  const double inv = 1.0 / std::sqrt(n2);
  for (double& v : e.values) v *= inv;
  return e;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"kernel timings: serial reference vs parallel implementation"};
  int iters = 3;
  std::uint64_t seed = 1;
  app.add_option("--iters", iters, "best-of iteration count")->check(CLI::PositiveNumber);
  app.add_option("--seed", seed, "input generation seed");
  CLI11_PARSE(app, argc, argv);

  std::printf("threads: %d\n", max_threads());
  std::printf("%-22s %10s %10s %9s   %s\n", "kernel", "serial ms", "parallel ms",
              "speedup", "max|diff|");

  rng::Stream st(seed);

  {
    const auto a = random_boxes(st, 400, 1920.0, 1080.0);
    const auto b = random_boxes(st, 400, 1920.0, 1080.0);
    Matrix ms, mp;
    const double ts = time_best_ms(iters, [&] { ms = kernels::iou_matrix_serial(a, b); });
    const double tp =
        time_best_ms(iters, [&] { mp = kernels::iou_matrix(a, b, Exec::parallel); });
    report("iou_matrix 400x400", ts, tp, max_abs_diff(ms, mp));
  }

  {
    std::vector<EmbeddingVec> queries;
    for (int i = 0; i < 200; ++i) queries.push_back(random_unit(st, 16));
    std::vector<std::vector<EmbeddingVec>> galleries(150);
    for (auto& g : galleries)
      for (int k = 0; k < 10; ++k) g.push_back(random_unit(st, 16));
    Matrix ms, mp;
    const double ts =
        time_best_ms(iters, [&] { ms = kernels::bank_max_cosine_serial(queries, galleries); });
    const double tp = time_best_ms(
        iters, [&] { mp = kernels::bank_max_cosine(queries, galleries, Exec::parallel); });
    report("bank_cosine 200x1500", ts, tp, max_abs_diff(ms, mp));
  }

  {
    std::vector<Prediction> preds;
    for (int i = 0; i < 2000; ++i) {
      const double bw = st.uniform(10.0, 80.0);
      const double bh = st.uniform(20.0, 120.0);
      preds.push_back({{st.uniform(0.0, 1920.0 - bw), st.uniform(0.0, 1080.0 - bh), bw, bh},
                       st.uniform(0.1, 1.0), st.uniform(0.5, 1.0)});
    }
    std::vector<PseudoBox> pseudos;
    for (int i = 0; i < 30; ++i) {
      const double bw = st.uniform(10.0, 80.0);
      const double bh = st.uniform(20.0, 120.0);
      pseudos.push_back({{st.uniform(0.0, 1920.0 - bw), st.uniform(0.0, 1080.0 - bh), bw, bh},
                         st.uniform(0.7, 1.0)});
    }
    const AsaWeights w;
    const AsaConfig cfg;
    const double diag = std::hypot(1920.0, 1080.0);
    CostMatrix cs, cp;
    const double ts = time_best_ms(
        iters, [&] { cs = build_cost_matrix(preds, pseudos, w, cfg, diag, Exec::serial); });
    const double tp = time_best_ms(
        iters, [&] { cp = build_cost_matrix(preds, pseudos, w, cfg, diag, Exec::parallel); });
    report("asa_cost 2000x30", ts, tp, max_abs_diff(cs.values, cp.values));
  }

  {
    Image img = Image::create(1280, 720);
    rng::Stream is(rng::mix(seed, 0x16E));
    for (auto& p : img.pixels) p = static_cast<std::uint8_t>(is.uniform(0.0, 255.999));
    AugmentParams params;
    params.contrast = 0.7;
    params.gamma = 2.2;
    params.brightness_scale = 0.4;
    params.blur_sigma = 2.0;
    params.noise_sigma = 10.0;
    params.seed = rng::mix(seed, 0xA0);
    Image rs, rp;
    const double ts = time_best_ms(iters, [&] { rs = enhance(img, params, Exec::serial); });
    const double tp = time_best_ms(iters, [&] { rp = enhance(img, params, Exec::parallel); });
    double diff = 0.0;
    for (std::size_t i = 0; i < rs.pixels.size(); ++i)
      diff = std::max(diff, std::abs(static_cast<double>(rs.pixels[i]) - rp.pixels[i]));
    report("enhance 1280x720", ts, tp, diff);
  }

  return 0;
}
