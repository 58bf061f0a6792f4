#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <string>

#include "glare/dataset.hpp"
#include "glare/error.hpp"
#include "glare/imgrep.hpp"
#include "glare/rng.hpp"

namespace glare {

namespace {

struct Rgb {
  double r, g, b;
};

Rgb from_hsv(double h, double s, double v) {
  HsvImage px(1, 1);
  px.at(0, 0, 0) = h;
  px.at(1, 0, 0) = s;
  px.at(2, 0, 0) = v;
  const RgbImage rgb = hsv_to_rgb(px);
  return {rgb.at(0, 0, 0), rgb.at(1, 0, 0), rgb.at(2, 0, 0)};
}

double smoothstep(double t) { return t * t * (3.0 - 2.0 * t); }

// Lattice value noise in [-1, 1] with `cells` cells across the image.
class ValueNoise {
public:
  ValueNoise(int cells, Rng& rng) : cells_(cells), lattice_((cells + 1) * (cells + 1)) {
    for (double& v : lattice_) v = rng.uniform(-1.0, 1.0);
  }
  double at(double u, double v) const {  // u, v in [0, 1]
    const double x = u * cells_, y = v * cells_;
    const int x0 = std::min(static_cast<int>(x), cells_ - 1), y0 = std::min(static_cast<int>(y), cells_ - 1);
    const double tx = smoothstep(x - x0), ty = smoothstep(y - y0);
    const auto L = [&](int i, int j) { return lattice_[j * (cells_ + 1) + i]; };
    const double top = L(x0, y0) + tx * (L(x0 + 1, y0) - L(x0, y0));
    const double bottom = L(x0, y0 + 1) + tx * (L(x0 + 1, y0 + 1) - L(x0, y0 + 1));
    return top + ty * (bottom - top);
  }

private:
  int cells_;
  std::vector<double> lattice_;
};

void background(RgbImage& img, Rng& rng) {
  const int n = img.height();
  const Rgb c0 = from_hsv(rng.uniform(), rng.uniform(0.4, 0.9), rng.uniform(0.25, 0.7));
  const Rgb c1 = from_hsv(rng.uniform(), rng.uniform(0.4, 0.9), rng.uniform(0.25, 0.7));
  const double angle = rng.uniform(0.0, 2.0 * std::numbers::pi);
  const double dx = std::cos(angle), dy = std::sin(angle);
  const ValueNoise coarse(4, rng), mid(8, rng), fine(16, rng);
  const ValueNoise tint_r(6, rng), tint_b(6, rng);
  const double amplitude = rng.uniform(0.08, 0.18);
  for (int y = 0; y < n; ++y) {
    for (int x = 0; x < n; ++x) {
      const double u = (x + 0.5) / n, v = (y + 0.5) / n;
      const double t = std::clamp(0.5 + 0.5 * ((u - 0.5) * dx + (v - 0.5) * dy) * 1.4, 0.0, 1.0);
      const double tex = amplitude * (0.5 * coarse.at(u, v) + 0.3 * mid.at(u, v) + 0.2 * fine.at(u, v));
      const double tr = 0.05 * tint_r.at(u, v), tb = 0.05 * tint_b.at(u, v);
      img.at(0, y, x) = c0.r + t * (c1.r - c0.r) + tex + tr;
      img.at(1, y, x) = c0.g + t * (c1.g - c0.g) + tex;
      img.at(2, y, x) = c0.b + t * (c1.b - c0.b) + tex + tb;
    }
  }
}

// Smooth, bright, saturated patches: high V like glare but high S.
void distractors(RgbImage& img, Rng& rng) {
  const int n = img.height();
  const int count = 1 + static_cast<int>(rng.below(2));
  for (int k = 0; k < count; ++k) {
    const Rgb c = from_hsv(rng.uniform(), rng.uniform(0.6, 1.0), rng.uniform(0.75, 1.0));
    const double cx = rng.uniform(0.1, 0.9) * n, cy = rng.uniform(0.1, 0.9) * n;
    const double rx = rng.uniform(0.06, 0.14) * n, ry = rng.uniform(0.06, 0.14) * n;
    const double edge = rng.uniform(1.0, 3.0);
    for (int y = 0; y < n; ++y) {
      for (int x = 0; x < n; ++x) {
        const double d = std::hypot((x + 0.5 - cx) / rx, (y + 0.5 - cy) / ry);
        const double a = std::clamp((1.0 - d) * std::min(rx, ry) / edge + 0.5, 0.0, 1.0);
        if (a <= 0.0) continue;
        img.at(0, y, x) = (1 - a) * img.at(0, y, x) + a * c.r;
        img.at(1, y, x) = (1 - a) * img.at(1, y, x) + a * c.g;
        img.at(2, y, x) = (1 - a) * img.at(2, y, x) + a * c.b;
      }
    }
  }
}

// Combined glare alpha: 1 - prod(1 - a_i) over blobs and streaks.
ScalarMap glare_alpha(int n, Rng& rng) {
  ScalarMap keep(n, n, 1.0);
  const int blobs = 1 + static_cast<int>(rng.below(3));
  for (int k = 0; k < blobs; ++k) {
    const double cx = rng.uniform(0.1, 0.9) * n, cy = rng.uniform(0.1, 0.9) * n;
    const double core = rng.uniform(0.02, 0.08) * n;
    const double sigma = rng.uniform(0.015, 0.05) * n;
    const double peak = rng.uniform(0.92, 1.0);
    const bool streak = rng.uniform() < 0.5;
    const double angle = rng.uniform(0.0, std::numbers::pi);
    const double sx = std::cos(angle), sy = std::sin(angle);
    const double width = rng.uniform(1.0, 2.5) * n / 128.0;
    const double length = rng.uniform(0.15, 0.35) * n;
    for (int y = 0; y < n; ++y) {
      for (int x = 0; x < n; ++x) {
        const double px = x + 0.5 - cx, py = y + 0.5 - cy;
        const double d = std::hypot(px, py);
        const double falloff = d <= core ? 1.0 : std::exp(-(d - core) * (d - core) / (2.0 * sigma * sigma));
        double a = peak * falloff;
        if (streak) {
          const double along = px * sx + py * sy, across = -px * sy + py * sx;
          const double s = 0.9 * std::exp(-across * across / (2.0 * width * width)) *
                           std::exp(-along * along / (2.0 * length * length));
          a = 1.0 - (1.0 - a) * (1.0 - s);
        }
        keep.at(0, y, x) *= 1.0 - a;
      }
    }
  }
  for (double& v : keep.values()) v = 1.0 - v;
  return keep;
}

}  // namespace

std::vector<SamplePair> synthesize_glare(std::uint64_t seed, int count, int resolution) {
  if (count < 1) throw ConfigError("synthesize_glare: count must be >= 1");
  if (resolution < 16) throw ConfigError("synthesize_glare: resolution must be >= 16");
  const int n = resolution;
  const double min_fraction = 0.005, max_fraction = 0.30;
  std::vector<SamplePair> out;
  out.reserve(count);
  for (int i = 0; i < count; ++i) {
    Rng rng(seed, static_cast<std::uint64_t>(i));
    SamplePair s;
    char id[32];
    std::snprintf(id, sizeof id, "synth_%04d", i);
    s.id = id;
    s.image = RgbImage(n, n);
    background(s.image, rng);
    distractors(s.image, rng);

    ScalarMap alpha;
    for (;;) {
      alpha = glare_alpha(n, rng);
      const auto glare = std::ranges::count_if(alpha.values(), [](double a) { return a > 0.5; });
      const double fraction = static_cast<double>(glare) / (static_cast<double>(n) * n);
      if (fraction >= min_fraction && fraction <= max_fraction) break;
    }
    const Rgb tint = from_hsv(rng.uniform(0.05, 0.2), rng.uniform(0.0, 0.08), 1.0);
    const double noise = 0.01;
    s.mask = BinaryMask(n, n);
    for (int y = 0; y < n; ++y) {
      for (int x = 0; x < n; ++x) {
        const double a = alpha.at(0, y, x);
        s.mask.at(y, x) = a > 0.5 ? 1 : 0;
        const double target[3] = {tint.r, tint.g, tint.b};
        for (int c = 0; c < 3; ++c) {
          const double v = (1.0 - a) * s.image.at(c, y, x) + a * target[c] + noise * rng.normal();
          // 8-bit quantization so a PNG round trip is lossless.
          s.image.at(c, y, x) = std::floor(std::clamp(v, 0.0, 1.0) * 255.0 + 0.5) / 255.0;
        }
      }
    }
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace glare
