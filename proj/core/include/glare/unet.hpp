#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "glare/imgrep.hpp"
#include "glare/nncore.hpp"
#include "glare/raster.hpp"

namespace glare {

struct BranchSpec {
  Representation rep = Representation::RGB;
  int in_channels = 3;

  bool operator==(const BranchSpec&) const = default;
};

/// Shape of the multi-branch encoder-decoder.
struct UNetConfig {
  std::vector<BranchSpec> branches;
  int depth = 4;
  int base_width = 64;
  int convs_per_block = 2;

  /// One branch per representation of `combo_id`, in branch order.
  static UNetConfig for_combo(std::string_view combo_id, int depth, int base_width);

  int width_at(int scale) const noexcept { return base_width << scale; }
  void validate() const;
  /// Throws ConfigError unless height and width are divisible by 2^depth.
  void check_input(int height, int width) const;
  /// Canonical single-line description, e.g. "branches=RGB:3,G:3;depth=2;base_width=8;convs_per_block=2".
  std::string describe() const;
  /// Inverse of describe().
  static UNetConfig parse(std::string_view description);
  std::uint64_t digest() const;

  bool operator==(const UNetConfig&) const = default;
};

namespace nn {

template <typename T>
struct ConvBlock {
  std::vector<ConvLayer<T>> convs;
  int out_channels() const noexcept { return convs.back().out_channels; }
};

template <typename T>
struct EncoderBranch {
  std::vector<ConvBlock<T>> scales;  // scale s output feeds the skip connection
  ConvBlock<T> bottleneck;
};

template <typename T>
struct DecoderStage {
  UpconvLayer<T> up;
  ConvBlock<T> block;
};

/// Parameters of the multi-branch U-Net. decoder[0] is the deepest stage.
template <typename T>
class Model {
public:
  UNetConfig config;
  std::vector<EncoderBranch<T>> encoders;
  std::vector<DecoderStage<T>> decoder;
  ConvLayer<T> head;

  /// Every trainable tensor, in checkpoint order.
  std::vector<Parameter<T>*> parameters();
  std::vector<const Parameter<T>*> parameters() const;
  std::size_t parameter_count() const;
  void zero_grad();
};

/// Activations kept by forward for the backward pass.
template <typename T>
struct BlockCache {
  std::vector<Tensor<T>> inputs;  // input of each conv
  std::vector<Tensor<T>> pre;     // pre-activation output of each conv
  Tensor<T> output;
};

template <typename T>
struct ForwardCache {
  struct Branch {
    std::vector<BlockCache<T>> scales;
    std::vector<Shape> pool_shapes;
    std::vector<std::vector<std::uint32_t>> pool_argmax;
    BlockCache<T> bottleneck;
  };
  std::vector<Branch> branches;
  std::vector<Tensor<T>> up_inputs;  // per decoder stage
  std::vector<BlockCache<T>> decoder;
  Tensor<T> head_input;
};

/// He-normal conv weights, zero biases. Same config and seed give identical parameters.
template <typename T>
Model<T> build_model(const UNetConfig& config, std::uint64_t seed);

/// Element-wise conversion between precisions (same config).
template <typename To, typename From>
Model<To> model_cast(const Model<From>& m);

/// Logits (N x 2 x H x W) for one input tensor per branch.
template <typename T>
Tensor<T> forward_logits(const Model<T>& model, std::span<const Tensor<T>> branch_inputs,
                         ForwardCache<T>* cache = nullptr);

/// Accumulates parameter gradients for d(loss)/d(logits) = grad_logits.
template <typename T>
void backward_logits(Model<T>& model, const ForwardCache<T>& cache, const Tensor<T>& grad_logits);

/// Zeroes gradients, runs forward + weighted cross-entropy + backward. Returns the loss.
template <typename T>
T compute_gradients(Model<T>& model, std::span<const Tensor<T>> branch_inputs, std::span<const std::uint8_t> labels,
                    std::span<const T> weights);

/// One tensor per plane-set entry, batch size 1. Throws ConfigError if the entries
/// do not match the model's branches.
template <typename T>
std::vector<Tensor<T>> branch_tensors(const UNetConfig& config, const PixelPlaneSet& planes);

/// Stacks single-sample branch tensors into one batch per branch.
template <typename T>
std::vector<Tensor<T>> stack_batch(std::span<const std::vector<Tensor<T>>* const> samples);

}  // namespace nn

/// Glare probability per pixel (softmax channel 1).
template <typename T>
ScalarMap forward(const nn::Model<T>& model, const PixelPlaneSet& planes);

/// Gradients accumulate into the model; returns the loss.
template <typename T>
T backward(nn::Model<T>& model, const PixelPlaneSet& planes, const BinaryMask& labels, std::span<const T> weights);

}  // namespace glare
