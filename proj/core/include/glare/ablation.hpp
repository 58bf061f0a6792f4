#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "glare/evalkit.hpp"

namespace glare {

enum class Metric { Precision, Recall, F1, Accuracy };

struct AblationColumn {
  std::string combo;
  MeanStd precision, recall, f1, accuracy;

  const MeanStd& get(Metric m) const noexcept;
  MeanStd& get(Metric m) noexcept;
  static AblationColumn from(std::string combo, const MetricSummary& s);
};

/// One column per representation combo, in report column order.
struct AblationReport {
  std::vector<AblationColumn> columns;
  std::uint64_t seed = 0;
  std::string config_digest;
  double wall_seconds = 0.0;
};

/// Runs cross_validate for each combo (all 14 when `combos` is empty). Columns
/// follow the fixed report order regardless of the order given.
AblationReport run_ablation(const TrainConfig& base, std::span<const SamplePair> samples,
                            std::span<const std::string> combos = {});

/// Index of the column with the largest mean for `m`; first one on ties.
std::size_t best_column(const AblationReport& report, Metric m);

/// CSV with a header row ("Metric", then combos) and 8 metric rows:
/// Precision, Std Precision, Recall, Std Recall, F1, Std F1, Accuracy, Std Accuracy.
/// Values use 4 decimals; the best mean in each of the four mean rows gets a trailing '*'.
std::string report_csv(const AblationReport& report);
AblationReport parse_report_csv(std::string_view csv);

/// JSON twin of the CSV with seed and config digest. Wall time is only
/// included on request since it breaks byte-for-byte reproducibility.
std::string report_json(const AblationReport& report, bool include_timing = false);

}  // namespace glare
