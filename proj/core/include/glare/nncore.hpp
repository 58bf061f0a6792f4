#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "glare/tensor.hpp"

namespace glare::nn {

/// Square convolution, stride 1, zero padding kernel/2 (same-size output).
/// Weight layout [out, in, k, k]; bias [out].
template <typename T>
struct ConvLayer {
  int in_channels = 0;
  int out_channels = 0;
  int kernel = 3;
  Parameter<T> weight;
  Parameter<T> bias;

  ConvLayer() = default;
  ConvLayer(int in, int out, int k);
};

/// 2x2 transposed convolution with stride 2. Weight layout [in, out, 2, 2]; bias [out].
template <typename T>
struct UpconvLayer {
  int in_channels = 0;
  int out_channels = 0;
  Parameter<T> weight;
  Parameter<T> bias;

  UpconvLayer() = default;
  UpconvLayer(int in, int out);
};

template <typename T>
Tensor<T> conv2d(const Tensor<T>& input, const ConvLayer<T>& layer);

/// Accumulates into layer.weight.grad / layer.bias.grad and returns d(loss)/d(input).
template <typename T>
Tensor<T> conv2d_backward(const Tensor<T>& input, ConvLayer<T>& layer, const Tensor<T>& grad_out);

template <typename T>
Tensor<T> relu(const Tensor<T>& input);

/// Passes grad_out where input > 0.
template <typename T>
Tensor<T> relu_backward(const Tensor<T>& input, const Tensor<T>& grad_out);

template <typename T>
struct PoolResult {
  Tensor<T> output;
  std::vector<std::uint32_t> argmax;  // flat input index per output element
};

/// 2x2 max pooling, stride 2. Ties go to the first element in row-major order.
template <typename T>
PoolResult<T> maxpool2(const Tensor<T>& input);

template <typename T>
Tensor<T> maxpool2_backward(const Shape& input_shape, const std::vector<std::uint32_t>& argmax,
                            const Tensor<T>& grad_out);

template <typename T>
Tensor<T> upconv2(const Tensor<T>& input, const UpconvLayer<T>& layer);

template <typename T>
Tensor<T> upconv2_backward(const Tensor<T>& input, UpconvLayer<T>& layer, const Tensor<T>& grad_out);

/// Channel-axis concatenation in argument order.
template <typename T>
Tensor<T> concat_channels(std::span<const Tensor<T>* const> inputs);

/// Inverse of concat_channels: slices `t` into pieces of the given channel counts.
template <typename T>
std::vector<Tensor<T>> split_channels(const Tensor<T>& t, std::span<const int> channels);

template <typename T>
struct LossResult {
  T loss = T(0);
  Tensor<T> grad_logits;
};

/// Two-class pixelwise softmax followed by the mean over pixels of
/// weight * -log p(label). `labels` and `weights` are laid out N x H x W.
template <typename T>
LossResult<T> weighted_cross_entropy(const Tensor<T>& logits, std::span<const std::uint8_t> labels,
                                     std::span<const T> weights);

/// Softmax probability of channel 1 for a 2-channel logit tensor; shape N x 1 x H x W.
template <typename T>
Tensor<T> softmax_foreground(const Tensor<T>& logits);

}  // namespace glare::nn
