#include "glare/metrics.hpp"

#include <cmath>

#include "glare/error.hpp"

namespace glare {

PixelConfusion PixelConfusion::of(const BinaryMask& predicted, const BinaryMask& truth) {
  if (predicted.height != truth.height || predicted.width != truth.width) {
    throw ConfigError("prediction and ground truth differ in size");
  }
  PixelConfusion c;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const bool p = predicted.data[i] != 0, t = truth.data[i] != 0;
    if (p && t) ++c.tp;
    else if (p) ++c.fp;
    else if (t) ++c.fn;
    else ++c.tn;
  }
  return c;
}

ImageMetrics image_metrics(const PixelConfusion& c) {
  ImageMetrics m;
  const double total = static_cast<double>(c.total());
  m.accuracy = total > 0 ? static_cast<double>(c.tp + c.tn) / total : 0.0;
  const bool empty_prediction = c.tp + c.fp == 0;
  m.precision = empty_prediction ? 0.0 : static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp);
  if (c.tp + c.fn == 0) {
    m.recall = empty_prediction ? 1.0 : 0.0;
  } else {
    m.recall = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
  }
  m.f1 = m.precision + m.recall > 0 ? 2.0 * m.precision * m.recall / (m.precision + m.recall) : 0.0;
  return m;
}

namespace {

MeanStd mean_std(const std::vector<ImageMetrics>& v, double ImageMetrics::*field) {
  MeanStd r;
  if (v.empty()) return r;
  double sum = 0.0;
  for (const auto& m : v) sum += m.*field;
  r.mean = sum / static_cast<double>(v.size());
  double sq = 0.0;
  for (const auto& m : v) sq += (m.*field - r.mean) * (m.*field - r.mean);
  r.std = std::sqrt(sq / static_cast<double>(v.size()));
  return r;
}

}  // namespace

MetricSummary MetricSummary::from(std::vector<ImageMetrics> per_image) {
  MetricSummary s;
  s.precision = mean_std(per_image, &ImageMetrics::precision);
  s.recall = mean_std(per_image, &ImageMetrics::recall);
  s.f1 = mean_std(per_image, &ImageMetrics::f1);
  s.accuracy = mean_std(per_image, &ImageMetrics::accuracy);
  s.per_image = std::move(per_image);
  return s;
}

MetricSummary MetricSummary::pool(std::span<const MetricSummary> parts) {
  std::vector<ImageMetrics> all;
  for (const auto& p : parts) all.insert(all.end(), p.per_image.begin(), p.per_image.end());
  return from(std::move(all));
}

}  // namespace glare
