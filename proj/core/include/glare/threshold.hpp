#pragma once

#include <array>
#include <cstdint>

#include "glare/raster.hpp"

namespace glare {

/// 256 uniform bins over [0,1]; bin b covers [b/256, (b+1)/256), the last bin is closed.
struct Histogram256 {
  std::array<std::uint64_t, 256> counts{};
  std::uint64_t total = 0;

  static int bin_of(double v) noexcept;
  static Histogram256 of(const ScalarMap& map);
};

/// Between-class variance score for splitting at bin boundary b (classes
/// [0, b) and [b, 256)), from the class pixel counts and bin-index sums.
/// Proportional to w0 * w1 * (mu0 - mu1)^2; returns 0 if either class is empty.
double between_class_score(std::uint64_t n0, std::uint64_t sum0, std::uint64_t n1, std::uint64_t sum1) noexcept;

/// Otsu threshold of a probability map: the bin boundary b/256 (b in 1..255)
/// with the largest between-class variance, smallest b on ties. Returns 1.0
/// when every pixel falls into one bin. Throws ConfigError on an empty map.
double otsu_threshold(const ScalarMap& prob_map);

/// Pixel is glare iff prob >= t.
BinaryMask binarize(const ScalarMap& prob_map, double t);

/// otsu_threshold + binarize; a map that falls into a single bin gives an empty mask.
BinaryMask segment_glare(const ScalarMap& prob_map);

}  // namespace glare
