#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "glare/raster.hpp"

namespace glare {

/// Pixel counts with glare as the positive class.
struct PixelConfusion {
  std::uint64_t tp = 0, fp = 0, fn = 0, tn = 0;

  std::uint64_t total() const noexcept { return tp + fp + fn + tn; }
  static PixelConfusion of(const BinaryMask& predicted, const BinaryMask& truth);
  bool operator==(const PixelConfusion&) const = default;
};

struct ImageMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double accuracy = 0.0;
};

/// precision tp/(tp+fp), recall tp/(tp+fn), f1 their harmonic mean, accuracy (tp+tn)/total.
/// An empty prediction has precision 0. With empty truth, recall is 1 if the
/// prediction is empty too, else 0. F1 is 0 whenever precision + recall is 0.
ImageMetrics image_metrics(const PixelConfusion& c);

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;  // population standard deviation
};

/// Per-image metrics and their mean / population std.
struct MetricSummary {
  std::vector<ImageMetrics> per_image;
  MeanStd precision, recall, f1, accuracy;

  static MetricSummary from(std::vector<ImageMetrics> per_image);
  /// Pools per-image values of several summaries (e.g. folds) before averaging.
  static MetricSummary pool(std::span<const MetricSummary> parts);
};

}  // namespace glare
