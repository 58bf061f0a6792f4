#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "glare/evalkit.hpp"

namespace glare {

/// The run config file. Every key is optional:
///
///   {
///     "dataset":  {"root": "data/glare", "resolution": 256,
///                  "synthetic": {"count": 64, "seed": 7}},
///     "model":    {"depth": 2, "base_width": 8, "convs_per_block": 2},
///     "train":    {"combo": "RGB+G", "optimizer": "adam", "learning_rate": 0.001,
///                  "epochs": 40, "steps": 0, "batch_size": 4, "seed": 1, "folds": 8,
///                  "jobs": 1, "contrast": {"window": 17, "stride": 4}},
///     "ablation": {"combos": ["C", "RGB+G"]}
///   }
///
/// With "synthetic" present and no "root", samples come from synthesize_glare.
struct RunConfig {
  struct Synthetic {
    int count = 64;
    std::uint64_t seed = 7;
  };
  std::filesystem::path dataset_root;
  int resolution = 256;
  bool use_synthetic = false;
  Synthetic synthetic;
  TrainConfig train;
  std::vector<std::string> ablation_combos;

  /// Canonical JSON with every field spelled out.
  std::string to_json() const;
  /// FNV-1a 64 of to_json(), as 16 hex digits.
  std::string digest() const;
};

RunConfig parse_run_config(std::string_view json_text);
RunConfig load_run_config(const std::filesystem::path& path);

/// Loads the dataset the config points at (real root or synthetic corpus).
std::vector<SamplePair> load_samples(const RunConfig& config);

}  // namespace glare
