#include <gtest/gtest.h>

#include <cmath>

#include "glare/dataset.hpp"
#include "glare/error.hpp"
#include "glare/evalkit.hpp"
#include "glare/gradcheck.hpp"
#include "glare/optim.hpp"
#include "glare/unet.hpp"
#include "oracles.hpp"
#include "tolerances.hpp"

namespace glare {
namespace {

using nn::Model;
using nn::Shape;
using nn::Tensor;

/// Parameter count from layer shapes: conv k*k*in*out + out, upconv 4*in*out + out.
std::size_t counted_parameters(const UNetConfig& cfg) {
  const auto conv = [](std::size_t in, std::size_t out, std::size_t k) { return k * k * in * out + out; };
  const auto block = [&](std::size_t in, std::size_t out) {
    std::size_t n = conv(in, out, 3);
    for (int i = 1; i < cfg.convs_per_block; ++i) n += conv(out, out, 3);
    return n;
  };
  std::size_t total = 0;
  const std::size_t nb = cfg.branches.size();
  for (const BranchSpec& b : cfg.branches) {
    std::size_t in = b.in_channels;
    for (int s = 0; s < cfg.depth; ++s) {
      total += block(in, cfg.width_at(s));
      in = cfg.width_at(s);
    }
    total += block(in, cfg.width_at(cfg.depth));
  }
  std::size_t ch = nb * cfg.width_at(cfg.depth);
  for (int s = cfg.depth - 1; s >= 0; --s) {
    const std::size_t w = cfg.width_at(s);
    total += 4 * ch * w + w;
    total += block(w + nb * w, w);
    ch = w;
  }
  return total + conv(ch, 2, 1);
}

UNetConfig tiny(std::string_view combo, int depth = 1, int width = 2) { return UNetConfig::for_combo(combo, depth, width); }

std::vector<Tensor<double>> random_inputs(const UNetConfig& cfg, Rng& rng, int n, int h, int w) {
  std::vector<Tensor<double>> out;
  for (const BranchSpec& b : cfg.branches) out.push_back(oracle::random_tensor<double>(rng, {n, b.in_channels, h, w}, 0, 1));
  return out;
}

TEST(UNetConfig, ParameterCountHandComputed) {
  // depth 1, base 1, RGB: enc 28+10, bottleneck 20+38, upconv 9, dec 19+10, head 4.
  UNetConfig cfg = tiny("RGB", 1, 1);
  EXPECT_EQ(nn::build_model<double>(cfg, 1).parameter_count(), 138u);
  for (std::string_view combo : {"RGB", "C", "RGB+G", "RGB+HSV+G+C"})
    for (int depth : {1, 2, 3})
      for (int width : {1, 3, 8}) {
        cfg = tiny(combo, depth, width);
        cfg.convs_per_block = 1 + depth % 2;
        EXPECT_EQ(nn::build_model<float>(cfg, 1).parameter_count(), counted_parameters(cfg)) << cfg.describe();
      }
}

TEST(UNetConfig, DuplicateBranchDoublesBottleneck) {
  UNetConfig one = tiny("RGB", 2, 4);
  UNetConfig two = one;
  two.branches.push_back(two.branches.front());
  const Model<float> a = nn::build_model<float>(one, 3), b = nn::build_model<float>(two, 3);
  EXPECT_EQ(b.decoder.front().up.in_channels, 2 * a.decoder.front().up.in_channels);
  EXPECT_EQ(b.decoder.front().block.convs.front().in_channels, a.decoder.front().block.convs.front().in_channels + 8);
}

TEST(UNetConfig, ValidationAndDescribeRoundTrip) {
  EXPECT_THROW(tiny("RGB", 0, 4), ConfigError);
  EXPECT_THROW(tiny("RGB", 2, 0), ConfigError);
  UNetConfig bad = tiny("RGB");
  bad.branches.front().in_channels = 1;
  EXPECT_THROW(bad.validate(), ConfigError);
  UNetConfig five = tiny("RGB+HSV+G+C");
  five.branches.push_back(five.branches.front());
  EXPECT_THROW(five.validate(), ConfigError);

  const UNetConfig cfg = tiny("RGB+HSV+G+C", 3, 16);
  EXPECT_EQ(cfg.describe(), "branches=RGB:3,HSV:3,G:3,C:1;depth=3;base_width=16;convs_per_block=2");
  EXPECT_EQ(UNetConfig::parse(cfg.describe()), cfg);
  EXPECT_NE(cfg.digest(), tiny("RGB+HSV+G", 3, 16).digest());
  EXPECT_THROW(cfg.check_input(12, 16), ConfigError);
  EXPECT_NO_THROW(cfg.check_input(16, 24));
}

TEST(BuildModel, SameSeedIsBitwiseIdentical) {
  const UNetConfig cfg = tiny("RGB+G", 2, 4);
  const Model<float> a = nn::build_model<float>(cfg, 9), b = nn::build_model<float>(cfg, 9), c = nn::build_model<float>(cfg, 10);
  const auto pa = a.parameters(), pb = b.parameters(), pc = c.parameters();
  ASSERT_EQ(pa.size(), pb.size());
  bool any_diff = false;
  for (std::size_t i = 0; i < pa.size(); ++i) {
    EXPECT_EQ(pa[i]->value, pb[i]->value);
    any_diff |= !(pa[i]->value == pc[i]->value);
  }
  EXPECT_TRUE(any_diff);
}

TEST(Forward, ProbabilityRangeShapeAndDeterminism) {
  const SamplePair s = synthesize_glare(4, 1, 32).front();
  const PixelPlaneSet planes = build_plane_set(s.image, "RGB+HSV+G+C", ContrastParams{});
  const Model<float> m = nn::build_model<float>(tiny("RGB+HSV+G+C", 2, 4), 5);
  const ScalarMap p = forward(m, planes);
  EXPECT_EQ(p.height(), 32);
  EXPECT_EQ(p.width(), 32);
  for (double v : p.values()) {
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, 1.0);
  }
  EXPECT_EQ(forward(m, planes), p);
}

TEST(Forward, ZeroParametersGiveOneHalf) {
  Model<float> m = nn::build_model<float>(tiny("RGB+G", 2, 4), 5);
  for (auto* p : m.parameters()) p->value.fill(0.0f);
  const SamplePair s = synthesize_glare(4, 1, 16).front();
  for (const auto held = forward(m, build_plane_set(s.image, "RGB+G", ContrastParams{})); double v : held.values()) EXPECT_EQ(v, 0.5);
}

TEST(Forward, MismatchedInputsAreConfigErrors) {
  const Model<float> m = nn::build_model<float>(tiny("RGB+G", 2, 4), 5);
  const SamplePair s = synthesize_glare(4, 1, 16).front();
  EXPECT_THROW(forward(m, build_plane_set(s.image, "RGB+HSV", ContrastParams{})), ConfigError);
  EXPECT_THROW(forward(m, build_plane_set(s.image, "RGB", ContrastParams{})), ConfigError);
  RgbImage odd(18, 16, 0.5);
  EXPECT_THROW(forward(m, build_plane_set(odd, "RGB+G", ContrastParams{})), ConfigError);
}

// Finite differences over every parameter of a tiny double-precision model.
double end_to_end_error(std::string_view combo, int depth, std::uint64_t seed) {
  const UNetConfig cfg = tiny(combo, depth, 2);
  Model<double> m = nn::build_model<double>(cfg, seed);
  Rng rng(seed + 100);
  for (auto* p : m.parameters())
    for (double& v : p->value.values()) v += 0.05 * rng.uniform(-1, 1);  // nonzero biases
  const std::vector<Tensor<double>> inputs = random_inputs(cfg, rng, 2, 8, 8);
  std::vector<std::uint8_t> labels(2 * 64);
  std::vector<double> weights(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    labels[i] = rng.below(2);
    weights[i] = rng.uniform(0.5, 2.0);
  }
  nn::compute_gradients<double>(m, inputs, labels, weights);
  const auto params = m.parameters();
  const std::vector<double> analytic = oracle::flatten(params, true);
  const std::vector<double> x0 = oracle::flatten(params, false);
  Model<double> probe = m;
  const auto probe_params = probe.parameters();
  const auto f = [&](std::span<const double> x) {
    oracle::unflatten(probe_params, x);
    const Tensor<double> logits = nn::forward_logits<double>(probe, inputs);
    return nn::weighted_cross_entropy<double>(logits, labels, weights).loss;
  };
  return nn::finite_diff_check(f, x0, analytic, 1e-6, tol::kEndToEndGradFloor).max_rel_error;
}

TEST(Backward, EndToEndFiniteDifferencesForEveryBranchCount) {
  int seed = 1;
  for (std::string_view combo : {"RGB", "RGB+G", "RGB+HSV+G", "RGB+HSV+G+C"}) {
    for (int depth : {1, 2}) EXPECT_LT(end_to_end_error(combo, depth, seed++), tol::kEndToEndGradRel) << combo << " depth " << depth;
  }
}

TEST(Backward, DoublingLossWeightsDoublesGradients) {
  const SamplePair s = synthesize_glare(6, 1, 16).front();
  const PixelPlaneSet planes = build_plane_set(s.image, "RGB+G", ContrastParams{});
  Model<float> m = nn::build_model<float>(tiny("RGB+G", 2, 4), 2);
  const LossWeights w = class_weights(s.mask);
  std::vector<float> w2(w.values);
  for (float& v : w2) v *= 2.0f;

  const float l1 = backward<float>(m, planes, s.mask, w.values);
  const std::vector<double> g1 = oracle::flatten(m.parameters(), true);
  const float l2 = backward<float>(m, planes, s.mask, w2);
  const std::vector<double> g2 = oracle::flatten(m.parameters(), true);
  EXPECT_EQ(l2, 2 * l1);
  for (std::size_t i = 0; i < g1.size(); ++i) ASSERT_EQ(g2[i], 2 * g1[i]) << i;
}

/// Swaps index blocks [a, a+n) and [b, b+n) along axis 0 (n) or 1 (c).
void swap_blocks(Tensor<double>& t, int axis, int a, int b, int n) {
  const Shape s = t.shape();
  Tensor<double> out(s);
  for (int i = 0; i < s.n; ++i)
    for (int c = 0; c < s.c; ++c)
      for (int y = 0; y < s.h; ++y)
        for (int x = 0; x < s.w; ++x) {
          int si = i, sc = c;
          int& idx = axis == 0 ? si : sc;
          if (idx >= a && idx < a + n) idx = idx - a + b;
          else if (idx >= b && idx < b + n) idx = idx - b + a;
          out.at(i, c, y, x) = t.at(si, sc, y, x);
        }
  t = std::move(out);
}

TEST(Backward, BranchPermutationGivesSameLossTrajectory) {
  const UNetConfig ab = tiny("RGB+G", 2, 3);
  UNetConfig ba = ab;
  std::swap(ba.branches[0], ba.branches[1]);
  Model<double> m1 = nn::build_model<double>(ab, 8);
  Model<double> m2 = nn::build_model<double>(ba, 123);
  m2.encoders = {m1.encoders[1], m1.encoders[0]};
  m2.head = m1.head;
  for (std::size_t i = 0; i < m1.decoder.size(); ++i) {
    const int s = ab.depth - 1 - static_cast<int>(i);
    m2.decoder[i] = m1.decoder[i];
    const int bottleneck = ab.width_at(ab.depth);
    if (i == 0) swap_blocks(m2.decoder[i].up.weight.value, 0, 0, bottleneck, bottleneck);
    const int w = ab.width_at(s);
    swap_blocks(m2.decoder[i].block.convs.front().weight.value, 1, w, 2 * w, w);
  }

  Rng rng(77);
  const std::vector<Tensor<double>> in1 = random_inputs(ab, rng, 2, 8, 8);
  const std::vector<Tensor<double>> in2{in1[1], in1[0]};
  std::vector<std::uint8_t> labels(128);
  for (auto& l : labels) l = rng.below(2);
  const std::vector<double> weights(128, 1.0);

  for (int step = 0; step < 5; ++step) {
    const double l1 = nn::compute_gradients<double>(m1, in1, labels, weights);
    const double l2 = nn::compute_gradients<double>(m2, in2, labels, weights);
    EXPECT_NEAR(l1, l2, 1e-12 * std::abs(l1)) << "step " << step;
    const auto p1 = m1.parameters(), p2 = m2.parameters();
    nn::sgd_step<double>(p1, 0.05);
    nn::sgd_step<double>(p2, 0.05);
  }
}

TEST(Training, LossDecreasesOnSyntheticBatch) {
  TrainConfig cfg;
  cfg.combo_id = "RGB";
  cfg.steps = 60;
  cfg.batch_size = 4;
  cfg.learning_rate = 3e-3;
  const auto samples = synthesize_glare(5, 4, 32);
  const auto prepared = prepare_samples(samples, cfg);
  std::vector<const PreparedSample*> train;
  for (const auto& p : prepared) train.push_back(&p);
  const TrainResult res = train_fold(cfg, train);
  ASSERT_EQ(res.loss_curve.size(), 60u);
  double head = 0, tail = 0;
  for (int i = 0; i < 10; ++i) {
    head += res.loss_curve[i];
    tail += res.loss_curve[50 + i];
  }
  EXPECT_LT(tail, 0.8 * head);
}

}  // namespace
}  // namespace glare
