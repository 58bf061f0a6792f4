#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "glare/dataset.hpp"
#include "glare/imgrep.hpp"
#include "glare/metrics.hpp"
#include "glare/unet.hpp"

namespace glare {

enum class OptimizerKind { Sgd, Adam };

struct TrainConfig {
  std::string combo_id = "RGB+G";
  int depth = 2;
  int base_width = 8;
  int convs_per_block = 2;
  OptimizerKind optimizer = OptimizerKind::Adam;
  double learning_rate = 1e-3;
  int epochs = 40;
  int steps = 0;  // > 0 overrides epochs with a fixed number of optimizer steps
  int batch_size = 4;
  std::uint64_t seed = 1;
  int folds = 8;
  int jobs = 1;  // worker threads for folds
  ContrastParams contrast;

  UNetConfig unet() const;
  void validate() const;
};

/// Per-pixel loss weights.
struct LossWeights {
  int height = 0;
  int width = 0;
  std::vector<float> values;
};

/// Glare pixels get n/(2 n_glare), background n/(2 n_bg). A mask with only one
/// class gets weight 1 everywhere.
LossWeights class_weights(const BinaryMask& mask);

/// A sample with its network inputs computed once.
struct PreparedSample {
  std::string id;
  std::vector<nn::Tensor<float>> inputs;  // one per branch, batch size 1
  BinaryMask mask;
  LossWeights weights;
};

std::vector<PreparedSample> prepare_samples(std::span<const SamplePair> samples, const TrainConfig& config);

struct Fold {
  std::vector<std::size_t> train;
  std::vector<std::size_t> validation;
};

/// Seeded shuffle, then k contiguous validation blocks whose sizes differ by at most 1.
std::vector<Fold> make_folds(std::size_t sample_count, int k, std::uint64_t seed);

struct TrainResult {
  nn::Model<float> model;
  std::vector<double> loss_curve;  // one entry per optimizer step
};

/// Called after every optimizer step with (step index, loss).
using StepCallback = std::function<void(int, double)>;

/// Trains a fresh model seeded with config.seed. Throws DivergenceError on a non-finite loss.
TrainResult train_fold(const TrainConfig& config, std::span<const PreparedSample* const> train,
                       const StepCallback& on_step = {});

/// Glare probability map for one prepared sample.
ScalarMap predict_probability(const nn::Model<float>& model, const PreparedSample& sample);

/// forward -> Otsu -> binarize -> per-image metrics. Throws ConfigError on an empty split.
MetricSummary evaluate(const nn::Model<float>& model, std::span<const PreparedSample* const> split);

/// Per-image metrics for (prediction, truth) pairs, no model involved.
MetricSummary evaluate_masks(std::span<const BinaryMask> predicted, std::span<const BinaryMask> truth);

struct CrossValidationResult {
  MetricSummary pooled;               // per-image values pooled across folds
  std::vector<MetricSummary> folds;
  std::vector<std::vector<double>> loss_curves;
};

/// Fold f trains with seed config.seed + f. Folds run on up to config.jobs threads.
CrossValidationResult cross_validate(const TrainConfig& config, std::span<const SamplePair> samples);
CrossValidationResult cross_validate(const TrainConfig& config, const DatasetManifest& manifest);

/// Loads every manifest entry at the manifest's resolution.
std::vector<SamplePair> load_all(const DatasetManifest& manifest);

}  // namespace glare
