#include "glare/optim.hpp"

#include <cmath>

#include "glare/error.hpp"

namespace glare::nn {

template <typename T>
void sgd_step(std::span<Parameter<T>* const> params, T learning_rate) {
  for (Parameter<T>* p : params) {
    if (p->value.shape() != p->grad.shape()) throw ConfigError("sgd_step: value/grad shape mismatch");
    for (std::size_t i = 0; i < p->value.size(); ++i) p->value[i] -= learning_rate * p->grad[i];
  }
}

template <typename T>
void adam_step(std::span<Parameter<T>* const> params, AdamState<T>& state, const AdamOptions& options) {
  if (state.m.empty()) {
    for (Parameter<T>* p : params) {
      state.m.emplace_back(p->value.shape());
      state.v.emplace_back(p->value.shape());
    }
  }
  if (state.m.size() != params.size()) throw ConfigError("adam_step: state does not match parameter list");
  ++state.step;
  const double t = static_cast<double>(state.step);
  const double correction1 = 1.0 - std::pow(options.beta1, t);
  const double correction2 = 1.0 - std::pow(options.beta2, t);
  const T b1 = static_cast<T>(options.beta1), b2 = static_cast<T>(options.beta2);
  const T step_size = static_cast<T>(options.learning_rate / correction1);
  const T inv_sqrt_c2 = static_cast<T>(1.0 / std::sqrt(correction2));
  const T eps = static_cast<T>(options.epsilon);
  for (std::size_t k = 0; k < params.size(); ++k) {
    Parameter<T>& p = *params[k];
    Tensor<T>& m = state.m[k];
    Tensor<T>& v = state.v[k];
    if (m.shape() != p.value.shape() || p.grad.shape() != p.value.shape()) {
      throw ConfigError("adam_step: shape mismatch for parameter " + std::to_string(k));
    }
    for (std::size_t i = 0; i < p.value.size(); ++i) {
      const T g = p.grad[i];
      m[i] = b1 * m[i] + (T(1) - b1) * g;
      v[i] = b2 * v[i] + (T(1) - b2) * g * g;
      p.value[i] -= step_size * m[i] / (std::sqrt(v[i]) * inv_sqrt_c2 + eps);
    }
  }
}

template void sgd_step(std::span<Parameter<float>* const>, float);
template void sgd_step(std::span<Parameter<double>* const>, double);
template void adam_step(std::span<Parameter<float>* const>, AdamState<float>&, const AdamOptions&);
template void adam_step(std::span<Parameter<double>* const>, AdamState<double>&, const AdamOptions&);

}  // namespace glare::nn
