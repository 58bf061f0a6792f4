#include "glare/threshold.hpp"

#include <cmath>

#include "glare/error.hpp"

namespace glare {

namespace {
__extension__ using wide_int = __int128;
}  // namespace

int Histogram256::bin_of(double v) noexcept {
  if (!(v > 0.0)) return 0;
  if (v >= 1.0) return 255;
  return static_cast<int>(v * 256.0);
}

Histogram256 Histogram256::of(const ScalarMap& map) {
  Histogram256 h;
  for (double v : map.values()) ++h.counts[bin_of(v)];
  h.total = map.size();
  return h;
}

double between_class_score(std::uint64_t n0, std::uint64_t sum0, std::uint64_t n1, std::uint64_t sum1) noexcept {
  if (n0 == 0 || n1 == 0) return 0.0;
  // (sum0 * n1 - sum1 * n0)^2 / (n0 * n1) = n0 * n1 * (mu0 - mu1)^2
  const wide_int diff = static_cast<wide_int>(sum0) * n1 - static_cast<wide_int>(sum1) * n0;
  const double d = static_cast<double>(diff);
  return d * d / (static_cast<double>(n0) * static_cast<double>(n1));
}

double otsu_threshold(const ScalarMap& prob_map) {
  if (prob_map.empty()) throw ConfigError("otsu_threshold: empty map");
  const Histogram256 h = Histogram256::of(prob_map);
  std::uint64_t total_sum = 0;
  for (int b = 0; b < 256; ++b) total_sum += h.counts[b] * static_cast<std::uint64_t>(b);

  std::uint64_t n0 = 0, sum0 = 0;
  double best = 0.0;
  int best_bin = -1;
  for (int b = 1; b < 256; ++b) {
    n0 += h.counts[b - 1];
    sum0 += h.counts[b - 1] * static_cast<std::uint64_t>(b - 1);
    const double score = between_class_score(n0, sum0, h.total - n0, total_sum - sum0);
    if (score > best) {
      best = score;
      best_bin = b;
    }
  }
  return best_bin < 0 ? 1.0 : best_bin / 256.0;
}

BinaryMask binarize(const ScalarMap& prob_map, double t) {
  BinaryMask mask(prob_map.height(), prob_map.width());
  const auto v = prob_map.values();
  for (std::size_t i = 0; i < v.size(); ++i) mask.data[i] = v[i] >= t ? 1 : 0;
  return mask;
}

BinaryMask segment_glare(const ScalarMap& prob_map) {
  const double t = otsu_threshold(prob_map);
  const Histogram256 h = Histogram256::of(prob_map);
  for (std::uint64_t c : h.counts) {
    if (c == h.total) return BinaryMask(prob_map.height(), prob_map.width());
  }
  return binarize(prob_map, t);
}

}  // namespace glare
