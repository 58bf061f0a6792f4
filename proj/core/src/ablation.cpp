#include "glare/ablation.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <nlohmann/json.hpp>
#include <utility>

#include "glare/error.hpp"

namespace glare {

const MeanStd& AblationColumn::get(Metric m) const noexcept {
  switch (m) {
    case Metric::Precision: return precision;
    case Metric::Recall: return recall;
    case Metric::F1: return f1;
    case Metric::Accuracy: return accuracy;
  }
  return f1;
}

MeanStd& AblationColumn::get(Metric m) noexcept {
  return const_cast<MeanStd&>(std::as_const(*this).get(m));
}

AblationColumn AblationColumn::from(std::string combo, const MetricSummary& s) {
  return {std::move(combo), s.precision, s.recall, s.f1, s.accuracy};
}

AblationReport run_ablation(const TrainConfig& base, std::span<const SamplePair> samples,
                            std::span<const std::string> combos) {
  std::vector<std::string> wanted;
  for (const auto& c : combos) wanted.push_back(canonical_combo(c));
  AblationReport report;
  report.seed = base.seed;
  const auto start = std::chrono::steady_clock::now();
  for (std::string_view combo : table_combos()) {
    if (!wanted.empty() && std::ranges::find(wanted, combo) == wanted.end()) continue;
    TrainConfig config = base;
    config.combo_id = std::string(combo);
    const CrossValidationResult cv = cross_validate(config, samples);
    report.columns.push_back(AblationColumn::from(config.combo_id, cv.pooled));
  }
  report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

std::size_t best_column(const AblationReport& report, Metric m) {
  if (report.columns.empty()) throw ConfigError("best_column: empty report");
  std::size_t best = 0;
  for (std::size_t i = 1; i < report.columns.size(); ++i) {
    if (report.columns[i].get(m).mean > report.columns[best].get(m).mean) best = i;
  }
  return best;
}

namespace {

struct RowSpec {
  const char* label;
  Metric metric;
  bool is_std;
};

constexpr RowSpec kRows[] = {
    {"Precision", Metric::Precision, false}, {"Std Precision", Metric::Precision, true},
    {"Recall", Metric::Recall, false},       {"Std Recall", Metric::Recall, true},
    {"F1", Metric::F1, false},               {"Std F1", Metric::F1, true},
    {"Accuracy", Metric::Accuracy, false},   {"Std Accuracy", Metric::Accuracy, true},
};

std::string fixed4(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t end = s.find(sep, start);
    out.push_back(s.substr(start, end == std::string_view::npos ? std::string_view::npos : end - start));
    if (end == std::string_view::npos) break;
    start = end + 1;
  }
  return out;
}

}  // namespace

std::string report_csv(const AblationReport& report) {
  std::string out = "Metric";
  for (const auto& c : report.columns) out += "," + c.combo;
  out += "\n";
  for (const RowSpec& row : kRows) {
    out += row.label;
    const std::size_t best = report.columns.empty() || row.is_std ? SIZE_MAX : best_column(report, row.metric);
    for (std::size_t i = 0; i < report.columns.size(); ++i) {
      const MeanStd& ms = report.columns[i].get(row.metric);
      out += "," + fixed4(row.is_std ? ms.std : ms.mean);
      if (i == best) out += "*";
    }
    out += "\n";
  }
  return out;
}

AblationReport parse_report_csv(std::string_view csv) {
  std::vector<std::string_view> lines = split(csv, '\n');
  while (!lines.empty() && lines.back().empty()) lines.pop_back();
  if (lines.size() != 1 + std::size(kRows)) {
    throw DecodeError("report CSV needs a header and " + std::to_string(std::size(kRows)) + " metric rows");
  }
  const auto header = split(lines[0], ',');
  if (header.empty() || header[0] != "Metric") throw DecodeError("report CSV header must start with 'Metric'");
  AblationReport report;
  for (std::size_t i = 1; i < header.size(); ++i) report.columns.push_back({std::string(header[i]), {}, {}, {}, {}});
  for (std::size_t r = 0; r < std::size(kRows); ++r) {
    const auto cells = split(lines[r + 1], ',');
    if (cells.size() != header.size() || cells[0] != kRows[r].label) {
      throw DecodeError("report CSV row " + std::to_string(r + 1) + " malformed");
    }
    for (std::size_t i = 1; i < cells.size(); ++i) {
      std::string cell(cells[i]);
      if (!cell.empty() && cell.back() == '*') cell.pop_back();
      double v = 0.0;
      try {
        std::size_t used = 0;
        v = std::stod(cell, &used);
        if (used != cell.size()) throw std::invalid_argument(cell);
      } catch (const std::exception&) {
        throw DecodeError("bad number '" + std::string(cells[i]) + "' in report CSV");
      }
      MeanStd& ms = report.columns[i - 1].get(kRows[r].metric);
      (kRows[r].is_std ? ms.std : ms.mean) = v;
    }
  }
  return report;
}

std::string report_json(const AblationReport& report, bool include_timing) {
  nlohmann::ordered_json j;
  j["seed"] = report.seed;
  j["config_digest"] = report.config_digest;
  if (include_timing) j["wall_seconds"] = report.wall_seconds;
  nlohmann::ordered_json cols = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < report.columns.size(); ++i) {
    const auto& c = report.columns[i];
    nlohmann::ordered_json col;
    col["combo"] = c.combo;
    for (const RowSpec& row : kRows) {
      if (row.is_std) continue;
      const MeanStd& ms = c.get(row.metric);
      col[row.label] = {{"mean", ms.mean}, {"std", ms.std}};
    }
    cols.push_back(std::move(col));
  }
  j["columns"] = std::move(cols);
  if (!report.columns.empty()) {
    nlohmann::ordered_json best;
    for (const RowSpec& row : kRows) {
      if (!row.is_std) best[row.label] = report.columns[best_column(report, row.metric)].combo;
    }
    j["best"] = std::move(best);
  }
  return j.dump(2) + "\n";
}

}  // namespace glare
