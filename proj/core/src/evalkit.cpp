#include "glare/evalkit.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <numeric>
#include <thread>

#include "glare/error.hpp"
#include "glare/optim.hpp"
#include "glare/rng.hpp"
#include "glare/threshold.hpp"

namespace glare {

UNetConfig TrainConfig::unet() const {
  UNetConfig cfg = UNetConfig::for_combo(combo_id, depth, base_width);
  cfg.convs_per_block = convs_per_block;
  cfg.validate();
  return cfg;
}

void TrainConfig::validate() const {
  (void)unet();
  contrast.validate();
  if (learning_rate < 0.0 || !std::isfinite(learning_rate)) throw ConfigError("learning rate must be finite and >= 0");
  if (epochs < 0 || steps < 0) throw ConfigError("epochs and steps must be >= 0");
  if (batch_size < 1) throw ConfigError("batch size must be >= 1");
  if (folds < 2) throw ConfigError("folds must be >= 2");
  if (jobs < 1) throw ConfigError("jobs must be >= 1");
}

LossWeights class_weights(const BinaryMask& mask) {
  LossWeights w{mask.height, mask.width, std::vector<float>(mask.size(), 1.0f)};
  const std::size_t glare = mask.count();
  const std::size_t background = mask.size() - glare;
  if (glare == 0 || background == 0) return w;
  const double n = static_cast<double>(mask.size());
  const auto glare_w = static_cast<float>(n / (2.0 * static_cast<double>(glare)));
  const auto bg_w = static_cast<float>(n / (2.0 * static_cast<double>(background)));
  for (std::size_t i = 0; i < mask.size(); ++i) w.values[i] = mask.data[i] ? glare_w : bg_w;
  return w;
}

std::vector<PreparedSample> prepare_samples(std::span<const SamplePair> samples, const TrainConfig& config) {
  const UNetConfig unet = config.unet();
  std::vector<PreparedSample> out;
  out.reserve(samples.size());
  for (const SamplePair& s : samples) {
    unet.check_input(s.image.height(), s.image.width());
    const PixelPlaneSet planes = build_plane_set(s.image, config.combo_id, config.contrast);
    out.push_back({s.id, nn::branch_tensors<float>(unet, planes), s.mask, class_weights(s.mask)});
  }
  return out;
}

std::vector<Fold> make_folds(std::size_t sample_count, int k, std::uint64_t seed) {
  if (k < 2) throw ConfigError("need at least 2 folds");
  if (static_cast<std::size_t>(k) > sample_count) {
    throw ConfigError(std::to_string(k) + " folds requested for " + std::to_string(sample_count) + " samples");
  }
  std::vector<std::size_t> order(sample_count);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(seed, 0x666f6c64ULL);
  rng.shuffle(std::span(order));

  std::vector<Fold> folds(k);
  const std::size_t base = sample_count / k, extra = sample_count % k;
  std::size_t start = 0;
  for (int f = 0; f < k; ++f) {
    const std::size_t len = base + (static_cast<std::size_t>(f) < extra ? 1 : 0);
    for (std::size_t i = 0; i < sample_count; ++i) {
      const bool in_block = i >= start && i < start + len;
      (in_block ? folds[f].validation : folds[f].train).push_back(order[i]);
    }
    start += len;
  }
  return folds;
}

TrainResult train_fold(const TrainConfig& config, std::span<const PreparedSample* const> train,
                       const StepCallback& on_step) {
  config.validate();
  if (train.empty()) throw ConfigError("train_fold: empty training split");
  TrainResult result{nn::build_model<float>(config.unet(), config.seed), {}};
  nn::Model<float>& model = result.model;
  auto params = model.parameters();
  nn::AdamState<float> adam;
  const nn::AdamOptions adam_options{config.learning_rate, 0.9, 0.999, 1e-8};

  const std::size_t n = train.size();
  const std::size_t batch = std::min<std::size_t>(static_cast<std::size_t>(config.batch_size), n);
  const std::size_t batches_per_epoch = (n + batch - 1) / batch;
  const std::size_t total_steps =
      config.steps > 0 ? static_cast<std::size_t>(config.steps) : batches_per_epoch * config.epochs;

  Rng rng(config.seed, 0x6261746368ULL);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::size_t cursor = n;  // forces a shuffle on the first step

  std::vector<const std::vector<nn::Tensor<float>>*> batch_inputs;
  std::vector<std::uint8_t> labels;
  std::vector<float> weights;
  for (std::size_t step = 0; step < total_steps; ++step) {
    if (cursor >= n) {
      rng.shuffle(std::span(order));
      cursor = 0;
    }
    const std::size_t count = std::min(batch, n - cursor);
    batch_inputs.clear();
    labels.clear();
    weights.clear();
    for (std::size_t i = 0; i < count; ++i) {
      const PreparedSample& s = *train[order[cursor + i]];
      batch_inputs.push_back(&s.inputs);
      labels.insert(labels.end(), s.mask.data.begin(), s.mask.data.end());
      weights.insert(weights.end(), s.weights.values.begin(), s.weights.values.end());
    }
    cursor += count;

    const std::vector<nn::Tensor<float>> inputs = nn::stack_batch<float>(batch_inputs);
    const float loss = nn::compute_gradients<float>(model, inputs, labels, weights);
    if (!std::isfinite(loss)) {
      throw DivergenceError("training diverged at step " + std::to_string(step) + " (loss " + std::to_string(loss) +
                            "); lower the learning rate");
    }
    if (config.optimizer == OptimizerKind::Adam) {
      nn::adam_step<float>(params, adam, adam_options);
    } else {
      nn::sgd_step<float>(params, static_cast<float>(config.learning_rate));
    }
    result.loss_curve.push_back(loss);
    if (on_step) on_step(static_cast<int>(step), loss);
  }
  return result;
}

ScalarMap predict_probability(const nn::Model<float>& model, const PreparedSample& sample) {
  const nn::Tensor<float> prob = nn::softmax_foreground(nn::forward_logits<float>(model, sample.inputs));
  ScalarMap out(prob.shape().h, prob.shape().w);
  std::ranges::transform(prob.values(), out.values().begin(), [](float v) { return static_cast<double>(v); });
  return out;
}

MetricSummary evaluate(const nn::Model<float>& model, std::span<const PreparedSample* const> split) {
  if (split.empty()) throw ConfigError("evaluate: empty split");
  std::vector<ImageMetrics> per_image;
  per_image.reserve(split.size());
  for (const PreparedSample* s : split) {
    const BinaryMask predicted = segment_glare(predict_probability(model, *s));
    per_image.push_back(image_metrics(PixelConfusion::of(predicted, s->mask)));
  }
  return MetricSummary::from(std::move(per_image));
}

MetricSummary evaluate_masks(std::span<const BinaryMask> predicted, std::span<const BinaryMask> truth) {
  if (predicted.size() != truth.size()) throw ConfigError("prediction and truth counts differ");
  if (truth.empty()) throw ConfigError("evaluate: empty split");
  std::vector<ImageMetrics> per_image;
  for (std::size_t i = 0; i < truth.size(); ++i) per_image.push_back(image_metrics(PixelConfusion::of(predicted[i], truth[i])));
  return MetricSummary::from(std::move(per_image));
}

namespace {

// Runs fn(0..count-1) on up to `jobs` threads; rethrows the first failure.
void run_jobs(std::size_t count, int jobs, const std::function<void(std::size_t)>& fn) {
  if (jobs <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::jthread> workers;
  for (int w = 0; w < std::min<int>(jobs, static_cast<int>(count)); ++w) {
    workers.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  workers.clear();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace

CrossValidationResult cross_validate(const TrainConfig& config, std::span<const SamplePair> samples) {
  config.validate();
  const std::vector<PreparedSample> prepared = prepare_samples(samples, config);
  const std::vector<Fold> folds = make_folds(prepared.size(), config.folds, config.seed);

  CrossValidationResult result;
  result.folds.resize(folds.size());
  result.loss_curves.resize(folds.size());
  run_jobs(folds.size(), config.jobs, [&](std::size_t f) {
    TrainConfig fold_config = config;
    fold_config.seed = config.seed + f;
    std::vector<const PreparedSample*> train, validation;
    for (std::size_t i : folds[f].train) train.push_back(&prepared[i]);
    for (std::size_t i : folds[f].validation) validation.push_back(&prepared[i]);
    TrainResult trained = train_fold(fold_config, train);
    result.folds[f] = evaluate(trained.model, validation);
    result.loss_curves[f] = std::move(trained.loss_curve);
  });
  result.pooled = MetricSummary::pool(result.folds);
  return result;
}

std::vector<SamplePair> load_all(const DatasetManifest& manifest) {
  std::vector<SamplePair> samples;
  samples.reserve(manifest.entries.size());
  for (const auto& e : manifest.entries) samples.push_back(load_pair(e, manifest.height, manifest.width));
  return samples;
}

CrossValidationResult cross_validate(const TrainConfig& config, const DatasetManifest& manifest) {
  const std::vector<SamplePair> samples = load_all(manifest);
  return cross_validate(config, samples);
}

}  // namespace glare
