#include "crtrack/synth.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "crtrack/rng.hpp"

namespace crtrack {

namespace {

struct Walker {
  double cx, cy, vx, vy, w, h;
};

// Advance with border reflection so boxes stay inside the scene.
void step(Walker& o, int width, int height) {
  o.cx += o.vx;
  o.cy += o.vy;
  const double hw = o.w / 2.0, hh = o.h / 2.0;
  if (o.cx < hw) {
    o.cx = 2.0 * hw - o.cx;
    o.vx = -o.vx;
  }
  if (o.cx > width - hw) {
    o.cx = 2.0 * (width - hw) - o.cx;
    o.vx = -o.vx;
  }
  if (o.cy < hh) {
    o.cy = 2.0 * hh - o.cy;
    o.vy = -o.vy;
  }
  if (o.cy > height - hh) {
    o.cy = 2.0 * (height - hh) - o.cy;
    o.vy = -o.vy;
  }
}

BoundingBox to_box(const Walker& o) {
  return {o.cx - o.w / 2.0, o.cy - o.h / 2.0, o.w, o.h};
}

// Draw a unit vector orthogonal to `basis` (assumed orthonormal). Identities
// get mutually orthogonal prototypes so appearance carries real signal; with
// correlated random directions the similarity threshold would be meaningless.
EmbeddingVec draw_orthonormal(rng::Stream& st, int dim,
                              const std::vector<EmbeddingVec>& basis) {
  for (;;) {
    EmbeddingVec e(std::vector<double>(dim, 0.0));
    for (double& v : e.values) v = st.normal();
    for (const auto& b : basis) {
      if (static_cast<int>(b.dim()) != dim) continue;
      double dot = 0.0;
      for (int d = 0; d < dim; ++d) dot += e.values[d] * b.values[d];
      for (int d = 0; d < dim; ++d) e.values[d] -= dot * b.values[d];
    }
    double norm2 = 0.0;
    for (double v : e.values) norm2 += v * v;
    if (norm2 < 1e-12) continue;  // basis spans the draw; try again
    const double inv = 1.0 / std::sqrt(norm2);
    for (double& v : e.values) v *= inv;
    return e;
  }
}

Walker sample_walker(rng::Stream& st, const ScenarioConfig& cfg) {
  Walker o;
  o.h = st.uniform(45.0, 75.0);
  o.w = o.h * st.uniform(0.36, 0.44);
  o.cx = st.uniform(o.w / 2.0 + 1.0, cfg.width - o.w / 2.0 - 1.0);
  o.cy = st.uniform(o.h / 2.0 + 1.0, cfg.height - o.h / 2.0 - 1.0);
  const double speed = st.uniform(cfg.speed_min, cfg.speed_max);
  const double angle = st.uniform(0.0, 2.0 * 3.14159265358979323846);
  o.vx = speed * std::cos(angle);
  o.vy = speed * std::sin(angle);
  return o;
}

}  // namespace

SyntheticTruth generate_truth(const ScenarioConfig& cfg) {
  if (cfg.num_frames < 1 || cfg.num_objects < 1)
    throw std::invalid_argument("generate_truth: need at least one frame and object");
  if (cfg.width < 200 || cfg.height < 200)
    throw std::invalid_argument("generate_truth: scene too small");
  if (cfg.crossings > cfg.num_objects / 2)
    throw std::invalid_argument("generate_truth: too many crossings for object count");

  rng::Stream st(rng::mix(cfg.seed, 0x5CE11E));
  std::vector<Walker> walkers;
  walkers.reserve(cfg.num_objects);

  // Non-crossing walkers get well separated starts so a clean scenario has no
  // ambiguous frames; resample until far from everyone already placed.
  const int reserved = 2 * cfg.crossings;
  for (int i = reserved; i < cfg.num_objects; ++i) {
    Walker o{};
    for (int attempt = 0; attempt < 200; ++attempt) {
      o = sample_walker(st, cfg);
      bool clear = true;
      for (int j = reserved; j < static_cast<int>(walkers.size()) + reserved; ++j) {
        const Walker& p = walkers[j - reserved];
        // Separation over the whole clip, assuming straight-line motion.
        double min_d2 = 1e30;
        for (int t = 0; t < cfg.num_frames; t += 5) {
          const double dx = (o.cx + o.vx * t) - (p.cx + p.vx * t);
          const double dy = (o.cy + o.vy * t) - (p.cy + p.vy * t);
          min_d2 = std::min(min_d2, dx * dx + dy * dy);
        }
        if (min_d2 < 160.0 * 160.0) {
          clear = false;
          break;
        }
      }
      if (clear) break;
    }
    walkers.push_back(o);
  }

  // Crossing pairs are built backwards from a staged meeting point: both
  // members arrive at nearly the same spot mid-clip.
  std::vector<Walker> crossers;
  std::vector<int> bounce_at(2 * cfg.crossings, -1);
  for (int c = 0; c < cfg.crossings; ++c) {
    const int meet = cfg.num_frames / 2 + static_cast<int>(st.uniform(-8.0, 8.0));
    const double mx = st.uniform(cfg.width * 0.25, cfg.width * 0.75);
    const double my = st.uniform(cfg.height * 0.25, cfg.height * 0.75);
    double first_h = 0.0;
    for (int m = 0; m < 2; ++m) {
      Walker o;
      // Near-equal sizes keep the encounter overlap deep; a large and a small
      // pedestrian could pass with IoU well under the association gate.
      o.h = m == 0 ? st.uniform(50.0, 70.0) : first_h * st.uniform(0.92, 1.08);
      first_h = o.h;
      o.w = o.h * st.uniform(0.36, 0.44);
      const double speed = st.uniform(2.5, 4.0);
      const double angle = m == 0 ? st.uniform(0.0, 3.14159265358979323846)
                                  : st.uniform(3.14159265358979323846,
                                               2.0 * 3.14159265358979323846);
      o.vx = speed * std::cos(angle);
      o.vy = speed * std::sin(angle);
      // Offset the meeting point slightly so the two never fully coincide.
      const double ox = (m == 0 ? -3.0 : 3.0);
      o.cx = mx + ox - o.vx * meet;
      o.cy = my - o.vy * meet;
      o.cx = std::clamp(o.cx, o.w / 2.0 + 1.0, cfg.width - o.w / 2.0 - 1.0);
      o.cy = std::clamp(o.cy, o.h / 2.0 + 1.0, cfg.height - o.h / 2.0 - 1.0);
      crossers.push_back(o);
      if (cfg.bounce_crossings) bounce_at[2 * c + m] = meet;
    }
  }

  std::vector<Walker> all;
  all.insert(all.end(), crossers.begin(), crossers.end());
  all.insert(all.end(), walkers.begin(), walkers.end());

  SyntheticTruth out;
  out.width = cfg.width;
  out.height = cfg.height;
  for (int t = 0; t < cfg.num_frames; ++t) {
    std::vector<GtBox>& frame = out.gt[t];
    for (int i = 0; i < cfg.num_objects; ++i) {
      frame.push_back({i + 1, to_box(all[i]), 1, 1.0});
      if (i < static_cast<int>(bounce_at.size()) && bounce_at[i] == t) {
        all[i].vx = -all[i].vx;
        all[i].vy = -all[i].vy;
      }
      step(all[i], cfg.width, cfg.height);
    }
  }

  // One unit prototype per identity, mutually orthogonal while the embedding
  // width allows it (beyond that, plain random units).
  rng::Stream pst(rng::mix(cfg.seed, 0x9107));
  const std::vector<EmbeddingVec> none;
  for (int i = 0; i < cfg.num_objects; ++i)
    out.prototypes.push_back(
        draw_orthonormal(pst, 16, i < 16 ? out.prototypes : none));
  return out;
}

DetectionMap corrupt(const SyntheticTruth& truth, const CorruptionConfig& cfg) {
  if (cfg.severity < 0.0 || cfg.severity > 1.0)
    throw std::invalid_argument("corrupt: severity outside [0, 1]");
  if (cfg.embedding_dim < 1)
    throw std::invalid_argument("corrupt: embedding_dim must be positive");
  const double s = cfg.severity;

  // Prototypes may need resizing to the requested embedding width.
  std::vector<EmbeddingVec> protos;
  {
    rng::Stream pst(rng::mix(cfg.seed, 0xBEE5));
    for (const auto& p : truth.prototypes) {
      EmbeddingVec e(std::vector<double>(cfg.embedding_dim, 0.0));
      double norm2 = 0.0;
      for (int d = 0; d < cfg.embedding_dim; ++d) {
        e.values[d] = d < static_cast<int>(p.dim()) ? p.values[d] : pst.normal();
        norm2 += e.values[d] * e.values[d];
      }
      const double inv = 1.0 / std::sqrt(norm2);
      for (double& v : e.values) v *= inv;
      protos.push_back(std::move(e));
    }
  }

  DetectionMap out;
  for (const auto& [frame, boxes] : truth.gt) {
    std::vector<Detection>& dets = out[frame];
    const std::uint64_t fseed = rng::mix(cfg.seed, static_cast<std::uint64_t>(frame));

    const int n = static_cast<int>(boxes.size());
    std::vector<char> dropped(n, false);

    if (s > 0.0) {
      // Occlusion: of two heavily overlapping boxes the farther one (smaller
      // bottom edge) disappears with probability equal to the severity.
      for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
          if (iou(boxes[i].box, boxes[j].box) <= cfg.occlusion_iou) continue;
          const bool i_far = boxes[i].box.bottom() < boxes[j].box.bottom();
          const int far = i_far ? i : j;
          if (dropped[far]) continue;
          const std::uint64_t key =
              rng::mix(fseed, 0x0CC1, static_cast<std::uint64_t>(far));
          if (rng::to_unit(rng::splitmix64(key)) < s) dropped[far] = true;
        }
      // Independent misses.
      for (int i = 0; i < n; ++i) {
        if (dropped[i]) continue;
        const std::uint64_t key =
            rng::mix(fseed, 0x3155, static_cast<std::uint64_t>(i));
        if (rng::to_unit(rng::splitmix64(key)) < cfg.miss_rate * s) dropped[i] = true;
      }
    }

    for (int i = 0; i < n; ++i) {
      if (dropped[i]) continue;
      const GtBox& g = boxes[i];
      Detection d;
      d.frame = frame;
      d.box = g.box;
      d.score = 1.0;
      if (s > 0.0) {
        rng::Stream bst(rng::mix(fseed, 0x7177, static_cast<std::uint64_t>(i)));
        const double jw = cfg.jitter * s * g.box.width;
        const double jh = cfg.jitter * s * g.box.height;
        d.box.x_left += bst.normal(0.0, jw);
        d.box.y_top += bst.normal(0.0, jh);
        d.box.width = std::max(4.0, g.box.width + bst.normal(0.0, jw));
        d.box.height = std::max(4.0, g.box.height + bst.normal(0.0, jh));
        d.score = std::clamp(1.0 - std::abs(bst.normal(0.0, cfg.score_noise * s)),
                             0.05, 1.0);
      }
      EmbeddingVec e = protos[(g.id - 1) % protos.size()];
      if (s > 0.0) {
        rng::Stream est(rng::mix(fseed, 0xE3B0, static_cast<std::uint64_t>(i)));
        double norm2 = 0.0;
        for (double& v : e.values) {
          v += est.normal(0.0, cfg.embedding_noise * s);
          norm2 += v * v;
        }
        if (norm2 > 1e-24) {
          const double inv = 1.0 / std::sqrt(norm2);
          for (double& v : e.values) v *= inv;
        }
      }
      d.embedding = std::move(e);
      dets.push_back(std::move(d));
    }

    if (s > 0.0) {
      rng::Stream fst(rng::mix(fseed, 0xFA15E));
      const int extras = fst.poisson(cfg.fp_rate * s);
      for (int k = 0; k < extras; ++k) {
        Detection d;
        d.frame = frame;
        const double h = fst.uniform(45.0, 75.0);
        const double w = h * fst.uniform(0.36, 0.44);
        d.box = {fst.uniform(0.0, truth.width - w), fst.uniform(0.0, truth.height - h),
                 w, h};
        d.score = fst.uniform(0.05, 0.6);
        // Clutter looks like nothing the detector has seen: keep its embedding
        // out of the identity span where the width permits.
        const std::vector<EmbeddingVec> none;
        d.embedding = draw_orthonormal(
            fst, cfg.embedding_dim,
            static_cast<int>(protos.size()) < cfg.embedding_dim ? protos : none);
        dets.push_back(std::move(d));
      }
    }
  }
  return out;
}

}  // namespace crtrack
