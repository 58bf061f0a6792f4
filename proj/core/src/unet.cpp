#include "glare/unet.hpp"

#include <charconv>
#include <cmath>
#include <stdexcept>

#include "glare/error.hpp"
#include "glare/rng.hpp"

namespace glare {

UNetConfig UNetConfig::for_combo(std::string_view combo_id, int depth, int base_width) {
  UNetConfig cfg;
  for (Representation r : parse_combo(combo_id)) cfg.branches.push_back({r, channel_count(r)});
  cfg.depth = depth;
  cfg.base_width = base_width;
  cfg.validate();
  return cfg;
}

void UNetConfig::validate() const {
  if (branches.empty() || branches.size() > 4) {
    throw ConfigError("UNetConfig needs 1 to 4 branches, got " + std::to_string(branches.size()));
  }
  for (const BranchSpec& b : branches) {
    if (b.in_channels != channel_count(b.rep)) {
      throw ConfigError("branch " + std::string(to_string(b.rep)) + " must have " +
                        std::to_string(channel_count(b.rep)) + " input channels");
    }
  }
  if (depth < 1) throw ConfigError("UNetConfig depth must be >= 1");
  if (base_width < 1) throw ConfigError("UNetConfig base_width must be >= 1");
  if (convs_per_block < 1) throw ConfigError("UNetConfig convs_per_block must be >= 1");
}

void UNetConfig::check_input(int height, int width) const {
  const int unit = 1 << depth;
  if (height % unit != 0 || width % unit != 0) {
    throw ConfigError("input " + std::to_string(height) + "x" + std::to_string(width) +
                      " is not divisible by 2^depth = " + std::to_string(unit));
  }
}

std::string UNetConfig::describe() const {
  std::string s = "branches=";
  for (std::size_t i = 0; i < branches.size(); ++i) {
    if (i) s += ',';
    s += std::string(to_string(branches[i].rep)) + ":" + std::to_string(branches[i].in_channels);
  }
  s += ";depth=" + std::to_string(depth) + ";base_width=" + std::to_string(base_width) +
       ";convs_per_block=" + std::to_string(convs_per_block);
  return s;
}

UNetConfig UNetConfig::parse(std::string_view description) {
  UNetConfig cfg;
  cfg.branches.clear();
  bool have_branches = false;
  auto to_int = [&](std::string_view v) {
    int out = 0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || ptr != v.data() + v.size()) {
      throw ConfigError("bad number '" + std::string(v) + "' in model description");
    }
    return out;
  };
  std::size_t start = 0;
  while (start < description.size()) {
    std::size_t end = description.find(';', start);
    if (end == std::string_view::npos) end = description.size();
    const std::string_view field = description.substr(start, end - start);
    const std::size_t eq = field.find('=');
    if (eq == std::string_view::npos) throw ConfigError("malformed model description '" + std::string(description) + "'");
    const std::string_view key = field.substr(0, eq), value = field.substr(eq + 1);
    if (key == "branches") {
      have_branches = true;
      std::size_t b = 0;
      while (b < value.size()) {
        std::size_t e = value.find(',', b);
        if (e == std::string_view::npos) e = value.size();
        const std::string_view item = value.substr(b, e - b);
        const std::size_t colon = item.find(':');
        if (colon == std::string_view::npos) throw ConfigError("malformed branch '" + std::string(item) + "'");
        const std::vector<Representation> rep = parse_combo(item.substr(0, colon));
        cfg.branches.push_back({rep.front(), to_int(item.substr(colon + 1))});
        b = e + 1;
      }
    } else if (key == "depth") {
      cfg.depth = to_int(value);
    } else if (key == "base_width") {
      cfg.base_width = to_int(value);
    } else if (key == "convs_per_block") {
      cfg.convs_per_block = to_int(value);
    } else {
      throw ConfigError("unknown model description key '" + std::string(key) + "'");
    }
    start = end + 1;
  }
  if (!have_branches) throw ConfigError("model description has no branches");
  cfg.validate();
  return cfg;
}

std::uint64_t UNetConfig::digest() const {
  const std::string s = describe();
  return fnv1a64(s);
}

namespace nn {

template <typename T>
std::vector<Parameter<T>*> Model<T>::parameters() {
  std::vector<Parameter<T>*> out;
  auto add_block = [&](ConvBlock<T>& block) {
    for (auto& c : block.convs) {
      out.push_back(&c.weight);
      out.push_back(&c.bias);
    }
  };
  for (auto& enc : encoders) {
    for (auto& block : enc.scales) add_block(block);
    add_block(enc.bottleneck);
  }
  for (auto& stage : decoder) {
    out.push_back(&stage.up.weight);
    out.push_back(&stage.up.bias);
    add_block(stage.block);
  }
  out.push_back(&head.weight);
  out.push_back(&head.bias);
  return out;
}

template <typename T>
std::vector<const Parameter<T>*> Model<T>::parameters() const {
  auto mutable_params = const_cast<Model<T>*>(this)->parameters();
  return {mutable_params.begin(), mutable_params.end()};
}

template <typename T>
std::size_t Model<T>::parameter_count() const {
  std::size_t n = 0;
  for (const Parameter<T>* p : parameters()) n += p->value.size();
  return n;
}

template <typename T>
void Model<T>::zero_grad() {
  for (Parameter<T>* p : parameters()) p->zero_grad();
}

namespace {

template <typename T>
void he_init(Parameter<T>& weight, int fan_in, Rng& rng) {
  const double stddev = std::sqrt(2.0 / fan_in);
  for (T& v : weight.value.values()) v = static_cast<T>(rng.normal() * stddev);
}

template <typename T>
ConvBlock<T> make_block(int in, int out, int convs, Rng& rng) {
  ConvBlock<T> block;
  for (int i = 0; i < convs; ++i) {
    block.convs.emplace_back(i == 0 ? in : out, out, 3);
    he_init(block.convs.back().weight, block.convs.back().in_channels * 9, rng);
  }
  return block;
}

}  // namespace

template <typename T>
Model<T> build_model(const UNetConfig& config, std::uint64_t seed) {
  config.validate();
  Model<T> m;
  m.config = config;
  const int branches = static_cast<int>(config.branches.size());
  const int depth = config.depth;

  for (int b = 0; b < branches; ++b) {
    Rng rng(seed, static_cast<std::uint64_t>(b));
    EncoderBranch<T> enc;
    int in = config.branches[b].in_channels;
    for (int s = 0; s < depth; ++s) {
      enc.scales.push_back(make_block<T>(in, config.width_at(s), config.convs_per_block, rng));
      in = config.width_at(s);
    }
    enc.bottleneck = make_block<T>(in, config.width_at(depth), config.convs_per_block, rng);
    m.encoders.push_back(std::move(enc));
  }

  Rng rng(seed, 0x64656300ULL);  // decoder stream
  int channels = branches * config.width_at(depth);
  for (int s = depth - 1; s >= 0; --s) {
    DecoderStage<T> stage;
    stage.up = UpconvLayer<T>(channels, config.width_at(s));
    he_init(stage.up.weight, channels, rng);
    int skip_channels = 0;
    for (const auto& enc : m.encoders) skip_channels += enc.scales[s].out_channels();
    const int consumed = stage.up.out_channels + skip_channels;
    stage.block = make_block<T>(consumed, config.width_at(s), config.convs_per_block, rng);
    if (stage.block.convs.front().in_channels != stage.up.out_channels + branches * config.width_at(s)) {
      throw std::logic_error("decoder channel bookkeeping mismatch at scale " + std::to_string(s));
    }
    channels = stage.block.out_channels();
    m.decoder.push_back(std::move(stage));
  }
  m.head = ConvLayer<T>(channels, 2, 1);
  he_init(m.head.weight, channels, rng);
  return m;
}

template <typename To, typename From>
Model<To> model_cast(const Model<From>& src) {
  Model<To> dst = build_model<To>(src.config, 0);
  auto out = dst.parameters();
  auto in = src.parameters();
  for (std::size_t i = 0; i < in.size(); ++i) {
    for (std::size_t j = 0; j < in[i]->value.size(); ++j) out[i]->value[j] = static_cast<To>(in[i]->value[j]);
  }
  return dst;
}

namespace {

template <typename T>
Tensor<T> block_forward(const ConvBlock<T>& block, Tensor<T> x, BlockCache<T>* cache) {
  for (const auto& conv : block.convs) {
    Tensor<T> pre = conv2d(x, conv);
    Tensor<T> act = relu(pre);
    if (cache) {
      cache->inputs.push_back(std::move(x));
      cache->pre.push_back(std::move(pre));
    }
    x = std::move(act);
  }
  if (cache) cache->output = x;
  return x;
}

template <typename T>
Tensor<T> block_backward(ConvBlock<T>& block, const BlockCache<T>& cache, Tensor<T> grad) {
  for (std::size_t i = block.convs.size(); i-- > 0;) {
    grad = conv2d_backward(cache.inputs[i], block.convs[i], relu_backward(cache.pre[i], grad));
  }
  return grad;
}

template <typename T>
void add_into(Tensor<T>& dst, const Tensor<T>& src) {
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += src[i];
}

}  // namespace

template <typename T>
Tensor<T> forward_logits(const Model<T>& model, std::span<const Tensor<T>> branch_inputs, ForwardCache<T>* cache) {
  const UNetConfig& cfg = model.config;
  const std::size_t branches = cfg.branches.size();
  if (branch_inputs.size() != branches) {
    throw ConfigError("model has " + std::to_string(branches) + " branches, got " +
                      std::to_string(branch_inputs.size()) + " inputs");
  }
  const Shape& first = branch_inputs.front().shape();
  for (std::size_t b = 0; b < branches; ++b) {
    const Shape& s = branch_inputs[b].shape();
    if (s.c != cfg.branches[b].in_channels || s.n != first.n || s.h != first.h || s.w != first.w) {
      throw ConfigError("input " + s.str() + " does not fit branch " + std::string(to_string(cfg.branches[b].rep)));
    }
  }
  cfg.check_input(first.h, first.w);
  if (cache) {
    *cache = ForwardCache<T>{};
    cache->branches.resize(branches);
  }

  std::vector<std::vector<Tensor<T>>> skips(branches);
  std::vector<Tensor<T>> bottlenecks;
  for (std::size_t b = 0; b < branches; ++b) {
    const auto& enc = model.encoders[b];
    auto* bc = cache ? &cache->branches[b] : nullptr;
    Tensor<T> x = branch_inputs[b];
    for (int s = 0; s < cfg.depth; ++s) {
      BlockCache<T>* blk = nullptr;
      if (bc) blk = &bc->scales.emplace_back();
      Tensor<T> feat = block_forward(enc.scales[s], std::move(x), blk);
      PoolResult<T> pooled = maxpool2(feat);
      if (bc) {
        bc->pool_shapes.push_back(feat.shape());
        bc->pool_argmax.push_back(std::move(pooled.argmax));
      }
      skips[b].push_back(std::move(feat));
      x = std::move(pooled.output);
    }
    bottlenecks.push_back(block_forward(enc.bottleneck, std::move(x), bc ? &bc->bottleneck : nullptr));
  }

  std::vector<const Tensor<T>*> parts;
  for (const auto& t : bottlenecks) parts.push_back(&t);
  Tensor<T> z = concat_channels<T>(parts);

  for (std::size_t i = 0; i < model.decoder.size(); ++i) {
    const int s = cfg.depth - 1 - static_cast<int>(i);
    const auto& stage = model.decoder[i];
    Tensor<T> up = upconv2(z, stage.up);
    if (cache) cache->up_inputs.push_back(std::move(z));
    parts.assign({&up});
    for (std::size_t b = 0; b < branches; ++b) parts.push_back(&skips[b][s]);
    Tensor<T> cat = concat_channels<T>(parts);
    z = block_forward(stage.block, std::move(cat), cache ? &cache->decoder.emplace_back() : nullptr);
  }
  Tensor<T> logits = conv2d(z, model.head);
  if (cache) cache->head_input = std::move(z);
  return logits;
}

template <typename T>
void backward_logits(Model<T>& model, const ForwardCache<T>& cache, const Tensor<T>& grad_logits) {
  const UNetConfig& cfg = model.config;
  const std::size_t branches = cfg.branches.size();
  if (cache.decoder.size() != model.decoder.size() || cache.branches.size() != branches) {
    throw ConfigError("backward_logits: cache does not belong to this model");
  }
  Tensor<T> grad = conv2d_backward(cache.head_input, model.head, grad_logits);

  // skip_grads[b][s]
  std::vector<std::vector<Tensor<T>>> skip_grads(branches, std::vector<Tensor<T>>(cfg.depth));
  for (std::size_t i = model.decoder.size(); i-- > 0;) {
    const int s = cfg.depth - 1 - static_cast<int>(i);
    auto& stage = model.decoder[i];
    Tensor<T> dcat = block_backward(stage.block, cache.decoder[i], std::move(grad));
    std::vector<int> widths{stage.up.out_channels};
    for (const auto& enc : model.encoders) widths.push_back(enc.scales[s].out_channels());
    std::vector<Tensor<T>> pieces = split_channels(dcat, widths);
    for (std::size_t b = 0; b < branches; ++b) skip_grads[b][s] = std::move(pieces[b + 1]);
    grad = upconv2_backward(cache.up_inputs[i], stage.up, pieces[0]);
  }

  std::vector<int> widths;
  for (const auto& enc : model.encoders) widths.push_back(enc.bottleneck.out_channels());
  std::vector<Tensor<T>> bottleneck_grads = split_channels(grad, widths);

  for (std::size_t b = 0; b < branches; ++b) {
    auto& enc = model.encoders[b];
    const auto& bc = cache.branches[b];
    Tensor<T> g = block_backward(enc.bottleneck, bc.bottleneck, std::move(bottleneck_grads[b]));
    for (int s = cfg.depth - 1; s >= 0; --s) {
      Tensor<T> d = maxpool2_backward(bc.pool_shapes[s], bc.pool_argmax[s], g);
      add_into(d, skip_grads[b][s]);
      g = block_backward(enc.scales[s], bc.scales[s], std::move(d));
    }
  }
}

template <typename T>
T compute_gradients(Model<T>& model, std::span<const Tensor<T>> branch_inputs, std::span<const std::uint8_t> labels,
                    std::span<const T> weights) {
  model.zero_grad();
  ForwardCache<T> cache;
  const Tensor<T> logits = forward_logits(model, branch_inputs, &cache);
  LossResult<T> loss = weighted_cross_entropy(logits, labels, weights);
  backward_logits(model, cache, loss.grad_logits);
  return loss.loss;
}

template <typename T>
std::vector<Tensor<T>> branch_tensors(const UNetConfig& config, const PixelPlaneSet& planes) {
  if (planes.entries.size() != config.branches.size()) {
    throw ConfigError("plane set '" + planes.combo_id + "' has " + std::to_string(planes.entries.size()) +
                      " entries, model expects " + std::to_string(config.branches.size()));
  }
  std::vector<Tensor<T>> out;
  for (std::size_t b = 0; b < config.branches.size(); ++b) {
    const PlaneEntry& e = planes.entries[b];
    if (e.rep != config.branches[b].rep || e.raster.channels() != config.branches[b].in_channels) {
      throw ConfigError("plane '" + std::string(e.name()) + "' does not match branch " + std::to_string(b) + " (" +
                        std::string(to_string(config.branches[b].rep)) + ")");
    }
    Tensor<T> t(1, e.raster.channels(), e.raster.height(), e.raster.width());
    std::ranges::transform(e.raster.values(), t.values().begin(), [](double v) { return static_cast<T>(v); });
    out.push_back(std::move(t));
  }
  return out;
}

template <typename T>
std::vector<Tensor<T>> stack_batch(std::span<const std::vector<Tensor<T>>* const> samples) {
  if (samples.empty()) throw ConfigError("stack_batch: empty batch");
  const std::size_t branches = samples.front()->size();
  std::vector<Tensor<T>> out;
  for (std::size_t b = 0; b < branches; ++b) {
    const Shape s = (*samples.front())[b].shape();
    Tensor<T> t(static_cast<int>(samples.size()), s.c, s.h, s.w);
    T* dst = t.data();
    for (const auto* sample : samples) {
      const Tensor<T>& src = (*sample)[b];
      if (src.shape() != s) throw ConfigError("stack_batch: samples differ in shape");
      dst = std::copy(src.values().begin(), src.values().end(), dst);
    }
    out.push_back(std::move(t));
  }
  return out;
}

template class Model<float>;
template class Model<double>;
template Model<float> build_model(const UNetConfig&, std::uint64_t);
template Model<double> build_model(const UNetConfig&, std::uint64_t);
template Model<double> model_cast(const Model<float>&);
template Model<float> model_cast(const Model<double>&);
template Tensor<float> forward_logits(const Model<float>&, std::span<const Tensor<float>>, ForwardCache<float>*);
template Tensor<double> forward_logits(const Model<double>&, std::span<const Tensor<double>>, ForwardCache<double>*);
template void backward_logits(Model<float>&, const ForwardCache<float>&, const Tensor<float>&);
template void backward_logits(Model<double>&, const ForwardCache<double>&, const Tensor<double>&);
template float compute_gradients(Model<float>&, std::span<const Tensor<float>>, std::span<const std::uint8_t>,
                                 std::span<const float>);
template double compute_gradients(Model<double>&, std::span<const Tensor<double>>, std::span<const std::uint8_t>,
                                  std::span<const double>);
template std::vector<Tensor<float>> branch_tensors(const UNetConfig&, const PixelPlaneSet&);
template std::vector<Tensor<double>> branch_tensors(const UNetConfig&, const PixelPlaneSet&);
template std::vector<Tensor<float>> stack_batch(std::span<const std::vector<Tensor<float>>* const>);
template std::vector<Tensor<double>> stack_batch(std::span<const std::vector<Tensor<double>>* const>);

}  // namespace nn

template <typename T>
ScalarMap forward(const nn::Model<T>& model, const PixelPlaneSet& planes) {
  const std::vector<nn::Tensor<T>> inputs = nn::branch_tensors<T>(model.config, planes);
  const nn::Tensor<T> prob = nn::softmax_foreground(nn::forward_logits<T>(model, inputs));
  ScalarMap out(planes.height(), planes.width());
  std::ranges::transform(prob.values(), out.values().begin(), [](T v) { return static_cast<double>(v); });
  return out;
}

template <typename T>
T backward(nn::Model<T>& model, const PixelPlaneSet& planes, const BinaryMask& labels, std::span<const T> weights) {
  if (labels.height != planes.height() || labels.width != planes.width()) {
    throw ConfigError("label mask geometry does not match the plane set");
  }
  const std::vector<nn::Tensor<T>> inputs = nn::branch_tensors<T>(model.config, planes);
  return nn::compute_gradients<T>(model, inputs, labels.data, weights);
}

template ScalarMap forward(const nn::Model<float>&, const PixelPlaneSet&);
template ScalarMap forward(const nn::Model<double>&, const PixelPlaneSet&);
template float backward(nn::Model<float>&, const PixelPlaneSet&, const BinaryMask&, std::span<const float>);
template double backward(nn::Model<double>&, const PixelPlaneSet&, const BinaryMask&, std::span<const double>);

}  // namespace glare
