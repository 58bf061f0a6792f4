#include <benchmark/benchmark.h>

#include "glare/dataset.hpp"
#include "glare/evalkit.hpp"
#include "glare/imgrep.hpp"
#include "glare/nncore.hpp"
#include "glare/optim.hpp"
#include "glare/rng.hpp"
#include "glare/threshold.hpp"
#include "glare/unet.hpp"

namespace {

using namespace glare;

ScalarMap luminance_of(int side) {
  return luminance_from_hsv(rgb_to_hsv(synthesize_glare(1, 1, side).front().image));
}

void BM_ContrastFull(benchmark::State& state) {
  const ScalarMap l = luminance_of(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(contrast_map(l, ContrastParams{}));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(l.size()));
}
BENCHMARK(BM_ContrastFull)->Arg(128)->Arg(256)->Arg(512);

void BM_ContrastStrided(benchmark::State& state) {
  const ScalarMap l = luminance_of(256);
  ContrastParams p;
  p.stride_k = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(contrast_map_strided(l, p));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(l.size()));
}
BENCHMARK(BM_ContrastStrided)->Arg(1)->Arg(2)->Arg(4)->Arg(8);

void BM_PlaneSet(benchmark::State& state) {
  const RgbImage img = synthesize_glare(1, 1, 256).front().image;
  for (auto _ : state) benchmark::DoNotOptimize(build_plane_set(img, "RGB+HSV+G+C", ContrastParams{}));
}
BENCHMARK(BM_PlaneSet);

void BM_Otsu(benchmark::State& state) {
  Rng rng(2);
  ScalarMap m(256, 256);
  for (double& v : m.values()) v = rng.uniform();
  for (auto _ : state) benchmark::DoNotOptimize(segment_glare(m));
}
BENCHMARK(BM_Otsu);

// args: in channels, out channels, side
nn::Tensor<float> random_input(Rng& rng, int c, int side) {
  nn::Tensor<float> t(4, c, side, side);
  for (float& v : t.values()) v = static_cast<float>(rng.uniform(-1, 1));
  return t;
}

void BM_Conv3x3Forward(benchmark::State& state) {
  Rng rng(3);
  const int in = static_cast<int>(state.range(0)), out = static_cast<int>(state.range(1));
  nn::ConvLayer<float> layer(in, out, 3);
  const nn::Tensor<float> x = random_input(rng, in, static_cast<int>(state.range(2)));
  for (auto _ : state) benchmark::DoNotOptimize(nn::conv2d(x, layer));
}
BENCHMARK(BM_Conv3x3Forward)->Args({3, 8, 128})->Args({8, 8, 128})->Args({16, 16, 64})->Args({64, 32, 32});

void BM_Conv3x3Backward(benchmark::State& state) {
  Rng rng(4);
  const int in = static_cast<int>(state.range(0)), out = static_cast<int>(state.range(1));
  const int side = static_cast<int>(state.range(2));
  nn::ConvLayer<float> layer(in, out, 3);
  const nn::Tensor<float> x = random_input(rng, in, side);
  const nn::Tensor<float> g = random_input(rng, out, side);
  for (auto _ : state) benchmark::DoNotOptimize(nn::conv2d_backward(x, layer, g));
}
BENCHMARK(BM_Conv3x3Backward)->Args({3, 8, 128})->Args({8, 8, 128})->Args({16, 16, 64})->Args({64, 32, 32});

struct Batch {
  nn::Model<float> model;
  std::vector<nn::Tensor<float>> inputs;
  std::vector<std::uint8_t> labels;
  std::vector<float> weights;
};

Batch make_batch(std::string_view combo, int side) {
  TrainConfig cfg;
  cfg.combo_id = std::string(combo);
  const auto samples = synthesize_glare(5, 4, side);
  const auto prepared = prepare_samples(samples, cfg);
  std::vector<const std::vector<nn::Tensor<float>>*> per_sample;
  Batch b{nn::build_model<float>(cfg.unet(), 1), {}, {}, {}};
  for (const auto& p : prepared) {
    per_sample.push_back(&p.inputs);
    b.labels.insert(b.labels.end(), p.mask.data.begin(), p.mask.data.end());
    b.weights.insert(b.weights.end(), p.weights.values.begin(), p.weights.values.end());
  }
  b.inputs = nn::stack_batch<float>(per_sample);
  return b;
}

void BM_UNetForward(benchmark::State& state) {
  const Batch b = make_batch(state.range(0) ? "RGB+G" : "RGB", static_cast<int>(state.range(1)));
  for (auto _ : state) benchmark::DoNotOptimize(nn::forward_logits<float>(b.model, b.inputs));
}
BENCHMARK(BM_UNetForward)->Args({0, 64})->Args({1, 128})->Unit(benchmark::kMillisecond);

void BM_UNetTrainStep(benchmark::State& state) {
  Batch b = make_batch(state.range(0) ? "RGB+G" : "RGB", static_cast<int>(state.range(1)));
  nn::AdamState<float> adam;
  const nn::AdamOptions opts;
  for (auto _ : state) {
    benchmark::DoNotOptimize(nn::compute_gradients<float>(b.model, b.inputs, b.labels, b.weights));
    const auto params = b.model.parameters();
    nn::adam_step<float>(params, adam, opts);
  }
}
BENCHMARK(BM_UNetTrainStep)->Args({0, 64})->Args({1, 128})->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
