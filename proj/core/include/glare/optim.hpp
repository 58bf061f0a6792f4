#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "glare/tensor.hpp"

namespace glare::nn {

/// w <- w - lr * g
template <typename T>
void sgd_step(std::span<Parameter<T>* const> params, T learning_rate);

template <typename T>
struct AdamState {
  std::vector<Tensor<T>> m;
  std::vector<Tensor<T>> v;
  std::int64_t step = 0;
};

struct AdamOptions {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

/// Bias-corrected Adam. `state` is sized lazily on the first call.
template <typename T>
void adam_step(std::span<Parameter<T>* const> params, AdamState<T>& state, const AdamOptions& options);

}  // namespace glare::nn
