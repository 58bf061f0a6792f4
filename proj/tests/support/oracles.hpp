#pragma once

// Independent reference implementations used only by tests.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "glare/imgrep.hpp"
#include "glare/rng.hpp"
#include "glare/unet.hpp"

namespace glare::oracle {

/// Direct two-pass windowed std / floored mean, clipped windows, divisor count - 1.
inline ScalarMap brute_contrast(const ScalarMap& l, int window_n, int window_m, double floor = 10.0) {
  ScalarMap out(l.height(), l.width());
  for (int y = 0; y < l.height(); ++y) {
    for (int x = 0; x < l.width(); ++x) {
      double sum = 0.0;
      int count = 0;
      for (int dy = -window_m / 2; dy <= window_m / 2; ++dy)
        for (int dx = -window_n / 2; dx <= window_n / 2; ++dx) {
          const int yy = y + dy, xx = x + dx;
          if (yy < 0 || yy >= l.height() || xx < 0 || xx >= l.width()) continue;
          sum += l.at(0, yy, xx);
          ++count;
        }
      const double mean = sum / count;
      double sq = 0.0;
      for (int dy = -window_m / 2; dy <= window_m / 2; ++dy)
        for (int dx = -window_n / 2; dx <= window_n / 2; ++dx) {
          const int yy = y + dy, xx = x + dx;
          if (yy < 0 || yy >= l.height() || xx < 0 || xx >= l.width()) continue;
          const double d = l.at(0, yy, xx) - mean;
          sq += d * d;
        }
      out.at(0, y, x) = std::sqrt(sq / (count - 1)) / std::max(floor, mean);
    }
  }
  return out;
}

/// Tries every boundary b/256 by re-binarizing the pixels directly.
inline double exhaustive_otsu(const ScalarMap& map) {
  double best_score = 0.0;
  int best_b = -1;
  for (int b = 1; b < 256; ++b) {
    const double t = b / 256.0;
    std::uint64_t n0 = 0, n1 = 0, s0 = 0, s1 = 0;
    for (double v : map.values()) {
      const int level = v >= 1.0 ? 255 : v <= 0.0 ? 0 : static_cast<int>(std::floor(v * 256.0));
      if (v >= t) {
        ++n1;
        s1 += static_cast<std::uint64_t>(level);
      } else {
        ++n0;
        s0 += static_cast<std::uint64_t>(level);
      }
    }
    if (n0 == 0 || n1 == 0) continue;
    // n0 * n1 * (mu0 - mu1)^2, evaluated the same way as the library for bitwise comparability
    __extension__ const __int128 diff = static_cast<__int128>(s0) * n1 - static_cast<__int128>(s1) * n0;
    const double d = static_cast<double>(diff);
    const double score = d * d / (static_cast<double>(n0) * static_cast<double>(n1));
    if (score > best_score) {
      best_score = score;
      best_b = b;
    }
  }
  return best_b < 0 ? 1.0 : best_b / 256.0;
}

/// Between-class variance computed from pixel levels in floating point, for
/// the "returned threshold is optimal" property.
inline double between_class_variance(const ScalarMap& map, double t) {
  double n0 = 0, n1 = 0, s0 = 0, s1 = 0;
  for (double v : map.values()) {
    const double level = v >= 1.0 ? 255 : v <= 0.0 ? 0 : std::floor(v * 256.0);
    if (v >= t) {
      ++n1;
      s1 += level;
    } else {
      ++n0;
      s0 += level;
    }
  }
  if (n0 == 0 || n1 == 0) return 0.0;
  const double total = n0 + n1;
  const double mu0 = s0 / n0, mu1 = s1 / n1;
  return (n0 / total) * (n1 / total) * (mu0 - mu1) * (mu0 - mu1);
}

template <typename T>
std::vector<double> flatten(const std::vector<nn::Parameter<T>*>& params, bool grads) {
  std::vector<double> out;
  for (const auto* p : params)
    for (T v : (grads ? p->grad : p->value).values()) out.push_back(static_cast<double>(v));
  return out;
}

template <typename T>
void unflatten(const std::vector<nn::Parameter<T>*>& params, std::span<const double> flat) {
  std::size_t k = 0;
  for (auto* p : params)
    for (T& v : p->value.values()) v = static_cast<T>(flat[k++]);
}

inline ScalarMap random_map(Rng& rng, int h, int w, double lo, double hi) {
  ScalarMap m(h, w);
  for (double& v : m.values()) v = rng.uniform(lo, hi);
  return m;
}

/// Random map with a random number of clusters so that ties and skewed
/// histograms both show up.
inline ScalarMap clustered_map(Rng& rng, int h, int w) {
  const int clusters = 1 + static_cast<int>(rng.below(4));
  std::vector<double> centers(clusters), spreads(clusters);
  for (int i = 0; i < clusters; ++i) {
    centers[i] = rng.uniform();
    spreads[i] = rng.uniform(0.0, 0.2);
  }
  ScalarMap m(h, w);
  for (double& v : m.values()) {
    const auto k = rng.below(clusters);
    v = std::clamp(centers[k] + spreads[k] * rng.uniform(-1, 1), 0.0, 1.0);
  }
  return m;
}

template <typename T>
nn::Tensor<T> random_tensor(Rng& rng, nn::Shape s, double lo = -1.0, double hi = 1.0) {
  nn::Tensor<T> t(s);
  for (T& v : t.values()) v = static_cast<T>(rng.uniform(lo, hi));
  return t;
}

}  // namespace glare::oracle
