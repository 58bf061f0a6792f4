#include "glare/nncore.hpp"

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <cstring>
#include <string>

#include "glare/error.hpp"

namespace glare::nn {

std::string Shape::str() const {
  return "(" + std::to_string(n) + "," + std::to_string(c) + "," + std::to_string(h) + "," + std::to_string(w) + ")";
}

namespace {

template <typename T>
using Mat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename T>
using MatMap = Eigen::Map<Mat<T>>;
template <typename T>
using ConstMatMap = Eigen::Map<const Mat<T>>;

[[noreturn]] void shape_error(const std::string& op, const std::string& detail) {
  throw ConfigError(op + ": " + detail);
}

template <typename T>
using StridedMap = Eigen::Map<Mat<T>, 0, Eigen::OuterStride<>>;
template <typename T>
using ConstStridedMap = Eigen::Map<const Mat<T>, 0, Eigen::OuterStride<>>;

// im2col works on bands of output rows so the column buffer stays cache-sized.
constexpr std::size_t kBandElements = std::size_t{1} << 16;

int band_rows(int kk, int h, int w) {
  const std::size_t per_row = static_cast<std::size_t>(kk) * static_cast<std::size_t>(w);
  return static_cast<int>(std::clamp<std::size_t>(kBandElements / std::max<std::size_t>(per_row, 1), 1, h));
}

// Rows are (channel, ky, kx); columns are output pixels of rows [y0, y1).
// Out-of-image taps are zero.
template <typename T>
void im2col(const T* src, int channels, int h, int w, int k, int y0, int y1, T* col) {
  const int pad = k / 2;
  const std::size_t hw = static_cast<std::size_t>(h) * w;
  const std::size_t band = static_cast<std::size_t>(y1 - y0) * w;
  for (int c = 0; c < channels; ++c) {
    const T* plane = src + c * hw;
    for (int ky = 0; ky < k; ++ky) {
      for (int kx = 0; kx < k; ++kx) {
        T* row = col + ((static_cast<std::size_t>(c) * k + ky) * k + kx) * band;
        const int dx = kx - pad;
        const int x_begin = std::max(0, -dx), x_end = std::min(w, w - dx);
        for (int y = y0; y < y1; ++y) {
          T* out = row + static_cast<std::size_t>(y - y0) * w;
          const int sy = y + ky - pad;
          if (sy < 0 || sy >= h || x_begin >= x_end) {
            std::fill(out, out + w, T(0));
            continue;
          }
          std::fill(out, out + x_begin, T(0));
          std::memcpy(out + x_begin, plane + static_cast<std::size_t>(sy) * w + x_begin + dx,
                      sizeof(T) * static_cast<std::size_t>(x_end - x_begin));
          std::fill(out + x_end, out + w, T(0));
        }
      }
    }
  }
}

template <typename T>
void col2im(const T* col, int channels, int h, int w, int k, int y0, int y1, T* dst) {
  const int pad = k / 2;
  const std::size_t hw = static_cast<std::size_t>(h) * w;
  const std::size_t band = static_cast<std::size_t>(y1 - y0) * w;
  for (int c = 0; c < channels; ++c) {
    T* plane = dst + c * hw;
    for (int ky = 0; ky < k; ++ky) {
      for (int kx = 0; kx < k; ++kx) {
        const T* row = col + ((static_cast<std::size_t>(c) * k + ky) * k + kx) * band;
        const int dx = kx - pad;
        const int x_begin = std::max(0, -dx), x_end = std::min(w, w - dx);
        for (int y = y0; y < y1; ++y) {
          const int sy = y + ky - pad;
          if (sy < 0 || sy >= h) continue;
          const T* in = row + static_cast<std::size_t>(y - y0) * w;
          T* out = plane + static_cast<std::size_t>(sy) * w + dx;
          for (int x = x_begin; x < x_end; ++x) out[x] += in[x];
        }
      }
    }
  }
}

}  // namespace

template <typename T>
ConvLayer<T>::ConvLayer(int in, int out, int k)
    : in_channels(in), out_channels(out), kernel(k), weight(Shape{out, in, k, k}), bias(Shape{1, out, 1, 1}) {
  if (in < 1 || out < 1 || k < 1 || k % 2 == 0) {
    shape_error("ConvLayer", "invalid descriptor in=" + std::to_string(in) + " out=" + std::to_string(out) +
                                 " k=" + std::to_string(k));
  }
}

template <typename T>
UpconvLayer<T>::UpconvLayer(int in, int out)
    : in_channels(in), out_channels(out), weight(Shape{in, out, 2, 2}), bias(Shape{1, out, 1, 1}) {
  if (in < 1 || out < 1) shape_error("UpconvLayer", "channel counts must be positive");
}

template <typename T>
Tensor<T> conv2d(const Tensor<T>& input, const ConvLayer<T>& layer) {
  const Shape& s = input.shape();
  if (s.c != layer.in_channels) {
    shape_error("conv2d", "input has " + std::to_string(s.c) + " channels, layer expects " +
                              std::to_string(layer.in_channels));
  }
  const int k = layer.kernel;
  const int kk = layer.in_channels * k * k;
  const Eigen::Index hw = static_cast<Eigen::Index>(s.plane());
  Tensor<T> out(s.n, layer.out_channels, s.h, s.w);
  const ConstMatMap<T> weights(layer.weight.value.data(), layer.out_channels, kk);
  const Eigen::Map<const Eigen::Matrix<T, Eigen::Dynamic, 1>> bias(layer.bias.value.data(), layer.out_channels);
  if (k == 1) {
    for (int n = 0; n < s.n; ++n) {
      MatMap<T> y(out.channel_ptr(n, 0), layer.out_channels, hw);
      y.noalias() = weights * ConstMatMap<T>(input.channel_ptr(n, 0), kk, hw);
      y.colwise() += bias;
    }
    return out;
  }
  const int rows = band_rows(kk, s.h, s.w);
  std::vector<T> col(static_cast<std::size_t>(kk) * rows * s.w);
  for (int n = 0; n < s.n; ++n) {
    for (int y0 = 0; y0 < s.h; y0 += rows) {
      const int y1 = std::min(s.h, y0 + rows);
      const Eigen::Index band = static_cast<Eigen::Index>(y1 - y0) * s.w;
      im2col(input.channel_ptr(n, 0), s.c, s.h, s.w, k, y0, y1, col.data());
      StridedMap<T> y(out.channel_ptr(n, 0) + static_cast<std::size_t>(y0) * s.w, layer.out_channels, band,
                      Eigen::OuterStride<>(hw));
      y.noalias() = weights * ConstMatMap<T>(col.data(), kk, band);
      y.colwise() += bias;
    }
  }
  return out;
}

template <typename T>
Tensor<T> conv2d_backward(const Tensor<T>& input, ConvLayer<T>& layer, const Tensor<T>& grad_out) {
  const Shape& s = input.shape();
  if (s.c != layer.in_channels || grad_out.shape() != Shape{s.n, layer.out_channels, s.h, s.w}) {
    shape_error("conv2d_backward", "input " + s.str() + " / grad " + grad_out.shape().str() + " mismatch");
  }
  const int k = layer.kernel;
  const int kk = layer.in_channels * k * k;
  const Eigen::Index hw = static_cast<Eigen::Index>(s.plane());
  Tensor<T> grad_in(s);
  const ConstMatMap<T> weights(layer.weight.value.data(), layer.out_channels, kk);
  MatMap<T> dweights(layer.weight.grad.data(), layer.out_channels, kk);
  const int rows = k == 1 ? s.h : band_rows(kk, s.h, s.w);
  std::vector<T> col(k == 1 ? 0 : static_cast<std::size_t>(kk) * rows * s.w);
  std::vector<T> dcol(col.size());
  for (int n = 0; n < s.n; ++n) {
    // Plain loop: Eigen's vectorized reductions peel by address, so their
    // summation order would change with heap alignment.
    for (int o = 0; o < layer.out_channels; ++o) {
      const T* row = grad_out.channel_ptr(n, o);
      T acc = T(0);
      for (Eigen::Index i = 0; i < hw; ++i) acc += row[i];
      layer.bias.grad[static_cast<std::size_t>(o)] += acc;
    }
    if (k == 1) {
      const ConstMatMap<T> dy(grad_out.channel_ptr(n, 0), layer.out_channels, hw);
      const ConstMatMap<T> x(input.channel_ptr(n, 0), kk, hw);
      dweights.noalias() += dy * x.transpose();
      MatMap<T>(grad_in.channel_ptr(n, 0), kk, hw).noalias() = weights.transpose() * dy;
      continue;
    }
    for (int y0 = 0; y0 < s.h; y0 += rows) {
      const int y1 = std::min(s.h, y0 + rows);
      const Eigen::Index band = static_cast<Eigen::Index>(y1 - y0) * s.w;
      const ConstStridedMap<T> dy(grad_out.channel_ptr(n, 0) + static_cast<std::size_t>(y0) * s.w, layer.out_channels,
                                  band, Eigen::OuterStride<>(hw));
      im2col(input.channel_ptr(n, 0), s.c, s.h, s.w, k, y0, y1, col.data());
      dweights.noalias() += dy * ConstMatMap<T>(col.data(), kk, band).transpose();
      MatMap<T>(dcol.data(), kk, band).noalias() = weights.transpose() * dy;
      col2im(dcol.data(), s.c, s.h, s.w, k, y0, y1, grad_in.channel_ptr(n, 0));
    }
  }
  return grad_in;
}

template <typename T>
Tensor<T> relu(const Tensor<T>& input) {
  Tensor<T> out(input.shape());
  std::ranges::transform(input.values(), out.values().begin(), [](T v) { return v > T(0) ? v : T(0); });
  return out;
}

template <typename T>
Tensor<T> relu_backward(const Tensor<T>& input, const Tensor<T>& grad_out) {
  if (input.shape() != grad_out.shape()) shape_error("relu_backward", "shape mismatch");
  Tensor<T> out(input.shape());
  for (std::size_t i = 0; i < input.size(); ++i) out[i] = input[i] > T(0) ? grad_out[i] : T(0);
  return out;
}

template <typename T>
PoolResult<T> maxpool2(const Tensor<T>& input) {
  const Shape& s = input.shape();
  if (s.h % 2 != 0 || s.w % 2 != 0) {
    shape_error("maxpool2", "spatial dims must be even, got " + s.str());
  }
  PoolResult<T> r{Tensor<T>(s.n, s.c, s.h / 2, s.w / 2), {}};
  r.argmax.resize(r.output.size());
  std::size_t o = 0;
  for (int n = 0; n < s.n; ++n) {
    for (int c = 0; c < s.c; ++c) {
      const std::size_t base = (static_cast<std::size_t>(n) * s.c + c) * s.plane();
      for (int y = 0; y < s.h; y += 2) {
        for (int x = 0; x < s.w; x += 2, ++o) {
          std::size_t best = base + static_cast<std::size_t>(y) * s.w + x;
          for (std::size_t cand : {best + 1, best + s.w, best + s.w + 1}) {
            if (input[cand] > input[best]) best = cand;
          }
          r.output[o] = input[best];
          r.argmax[o] = static_cast<std::uint32_t>(best);
        }
      }
    }
  }
  return r;
}

template <typename T>
Tensor<T> maxpool2_backward(const Shape& input_shape, const std::vector<std::uint32_t>& argmax,
                            const Tensor<T>& grad_out) {
  if (argmax.size() != grad_out.size()) shape_error("maxpool2_backward", "argmax/grad size mismatch");
  Tensor<T> grad_in(input_shape);
  for (std::size_t i = 0; i < argmax.size(); ++i) grad_in[argmax[i]] += grad_out[i];
  return grad_in;
}

template <typename T>
Tensor<T> upconv2(const Tensor<T>& input, const UpconvLayer<T>& layer) {
  const Shape& s = input.shape();
  if (s.c != layer.in_channels) {
    shape_error("upconv2", "input has " + std::to_string(s.c) + " channels, layer expects " +
                               std::to_string(layer.in_channels));
  }
  const int out_c = layer.out_channels;
  const Eigen::Index hw = static_cast<Eigen::Index>(s.plane());
  Tensor<T> out(s.n, out_c, s.h * 2, s.w * 2);
  const ConstMatMap<T> weights(layer.weight.value.data(), layer.in_channels, out_c * 4);
  Mat<T> taps(out_c * 4, hw);
  for (int n = 0; n < s.n; ++n) {
    taps.noalias() = weights.transpose() * ConstMatMap<T>(input.channel_ptr(n, 0), s.c, hw);
    for (int o = 0; o < out_c; ++o) {
      T* dst = out.channel_ptr(n, o);
      const T b = layer.bias.value[o];
      for (int a = 0; a < 2; ++a) {
        for (int bb = 0; bb < 2; ++bb) {
          const T* row = taps.data() + static_cast<std::size_t>(o * 4 + a * 2 + bb) * hw;
          for (int y = 0; y < s.h; ++y) {
            T* line = dst + static_cast<std::size_t>(2 * y + a) * (2 * s.w) + bb;
            const T* src = row + static_cast<std::size_t>(y) * s.w;
            for (int x = 0; x < s.w; ++x) line[2 * x] = src[x] + b;
          }
        }
      }
    }
  }
  return out;
}

template <typename T>
Tensor<T> upconv2_backward(const Tensor<T>& input, UpconvLayer<T>& layer, const Tensor<T>& grad_out) {
  const Shape& s = input.shape();
  const int out_c = layer.out_channels;
  if (s.c != layer.in_channels || grad_out.shape() != Shape{s.n, out_c, s.h * 2, s.w * 2}) {
    shape_error("upconv2_backward", "input " + s.str() + " / grad " + grad_out.shape().str() + " mismatch");
  }
  const Eigen::Index hw = static_cast<Eigen::Index>(s.plane());
  Tensor<T> grad_in(s);
  const ConstMatMap<T> weights(layer.weight.value.data(), layer.in_channels, out_c * 4);
  MatMap<T> dweights(layer.weight.grad.data(), layer.in_channels, out_c * 4);
  Mat<T> taps(out_c * 4, hw);
  for (int n = 0; n < s.n; ++n) {
    for (int o = 0; o < out_c; ++o) {
      const T* src = grad_out.channel_ptr(n, o);
      T bias_sum = T(0);
      for (int a = 0; a < 2; ++a) {
        for (int bb = 0; bb < 2; ++bb) {
          T* row = taps.data() + static_cast<std::size_t>(o * 4 + a * 2 + bb) * hw;
          for (int y = 0; y < s.h; ++y) {
            const T* line = src + static_cast<std::size_t>(2 * y + a) * (2 * s.w) + bb;
            T* dst = row + static_cast<std::size_t>(y) * s.w;
            for (int x = 0; x < s.w; ++x) {
              dst[x] = line[2 * x];
              bias_sum += line[2 * x];
            }
          }
        }
      }
      layer.bias.grad[o] += bias_sum;
    }
    const ConstMatMap<T> x(input.channel_ptr(n, 0), s.c, hw);
    dweights.noalias() += x * taps.transpose();
    MatMap<T>(grad_in.channel_ptr(n, 0), s.c, hw).noalias() = weights * taps;
  }
  return grad_in;
}

template <typename T>
Tensor<T> concat_channels(std::span<const Tensor<T>* const> inputs) {
  if (inputs.empty()) shape_error("concat_channels", "no inputs");
  const Shape& first = inputs.front()->shape();
  int channels = 0;
  for (const Tensor<T>* t : inputs) {
    const Shape& s = t->shape();
    if (s.n != first.n || s.h != first.h || s.w != first.w) {
      shape_error("concat_channels", "shape " + s.str() + " does not match " + first.str());
    }
    channels += s.c;
  }
  Tensor<T> out(first.n, channels, first.h, first.w);
  const std::size_t plane = first.plane();
  for (int n = 0; n < first.n; ++n) {
    T* dst = out.channel_ptr(n, 0);
    for (const Tensor<T>* t : inputs) {
      const std::size_t count = plane * t->shape().c;
      std::copy_n(t->channel_ptr(n, 0), count, dst);
      dst += count;
    }
  }
  return out;
}

template <typename T>
std::vector<Tensor<T>> split_channels(const Tensor<T>& t, std::span<const int> channels) {
  const Shape& s = t.shape();
  int total = 0;
  for (int c : channels) total += c;
  if (total != s.c) {
    shape_error("split_channels", "pieces sum to " + std::to_string(total) + " but tensor has " + std::to_string(s.c));
  }
  std::vector<Tensor<T>> pieces;
  pieces.reserve(channels.size());
  for (int c : channels) pieces.emplace_back(s.n, c, s.h, s.w);
  const std::size_t plane = s.plane();
  for (int n = 0; n < s.n; ++n) {
    const T* src = t.channel_ptr(n, 0);
    for (auto& p : pieces) {
      const std::size_t count = plane * p.shape().c;
      std::copy_n(src, count, p.channel_ptr(n, 0));
      src += count;
    }
  }
  return pieces;
}

template <typename T>
LossResult<T> weighted_cross_entropy(const Tensor<T>& logits, std::span<const std::uint8_t> labels,
                                     std::span<const T> weights) {
  const Shape& s = logits.shape();
  const std::size_t pixels = static_cast<std::size_t>(s.n) * s.plane();
  if (s.c != 2) shape_error("weighted_cross_entropy", "logits need 2 channels, got " + std::to_string(s.c));
  if (labels.size() != pixels || weights.size() != pixels) {
    shape_error("weighted_cross_entropy", "labels/weights size does not match " + s.str());
  }
  LossResult<T> r{T(0), Tensor<T>(s)};
  const std::size_t plane = s.plane();
  const double inv = 1.0 / static_cast<double>(pixels);
  double total = 0.0;
  for (int n = 0; n < s.n; ++n) {
    const T* l0 = logits.channel_ptr(n, 0);
    const T* l1 = logits.channel_ptr(n, 1);
    T* g0 = r.grad_logits.channel_ptr(n, 0);
    T* g1 = r.grad_logits.channel_ptr(n, 1);
    for (std::size_t i = 0; i < plane; ++i) {
      const std::size_t p = n * plane + i;
      const T diff = l1[i] - l0[i];
      // p1 = sigmoid(l1 - l0); -log p_label = softplus(+-diff)
      const T z = labels[p] ? -diff : diff;
      const T nll = z > T(0) ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
      total += static_cast<double>(weights[p]) * static_cast<double>(nll);
      const T p1 = diff >= T(0) ? T(1) / (T(1) + std::exp(-diff)) : std::exp(diff) / (T(1) + std::exp(diff));
      const T scale = static_cast<T>(static_cast<double>(weights[p]) * inv);
      const T target = labels[p] ? T(1) : T(0);
      g1[i] = scale * (p1 - target);
      g0[i] = -g1[i];
    }
  }
  r.loss = static_cast<T>(total * inv);
  return r;
}

template <typename T>
Tensor<T> softmax_foreground(const Tensor<T>& logits) {
  const Shape& s = logits.shape();
  if (s.c != 2) shape_error("softmax_foreground", "logits need 2 channels, got " + std::to_string(s.c));
  Tensor<T> out(s.n, 1, s.h, s.w);
  for (int n = 0; n < s.n; ++n) {
    const T* l0 = logits.channel_ptr(n, 0);
    const T* l1 = logits.channel_ptr(n, 1);
    T* dst = out.channel_ptr(n, 0);
    for (std::size_t i = 0; i < s.plane(); ++i) {
      const T diff = l1[i] - l0[i];
      dst[i] = diff >= T(0) ? T(1) / (T(1) + std::exp(-diff)) : std::exp(diff) / (T(1) + std::exp(diff));
    }
  }
  return out;
}

#define GLARE_INSTANTIATE_NN(T)                                                                              \
  template struct ConvLayer<T>;                                                                              \
  template struct UpconvLayer<T>;                                                                            \
  template Tensor<T> conv2d(const Tensor<T>&, const ConvLayer<T>&);                                          \
  template Tensor<T> conv2d_backward(const Tensor<T>&, ConvLayer<T>&, const Tensor<T>&);                     \
  template Tensor<T> relu(const Tensor<T>&);                                                                 \
  template Tensor<T> relu_backward(const Tensor<T>&, const Tensor<T>&);                                      \
  template PoolResult<T> maxpool2(const Tensor<T>&);                                                         \
  template Tensor<T> maxpool2_backward(const Shape&, const std::vector<std::uint32_t>&, const Tensor<T>&);    \
  template Tensor<T> upconv2(const Tensor<T>&, const UpconvLayer<T>&);                                       \
  template Tensor<T> upconv2_backward(const Tensor<T>&, UpconvLayer<T>&, const Tensor<T>&);                  \
  template Tensor<T> concat_channels(std::span<const Tensor<T>* const>);                                     \
  template std::vector<Tensor<T>> split_channels(const Tensor<T>&, std::span<const int>);                    \
  template LossResult<T> weighted_cross_entropy(const Tensor<T>&, std::span<const std::uint8_t>,            \
                                                std::span<const T>);                                         \
  template Tensor<T> softmax_foreground(const Tensor<T>&);

GLARE_INSTANTIATE_NN(float)
GLARE_INSTANTIATE_NN(double)

#undef GLARE_INSTANTIATE_NN

}  // namespace glare::nn
