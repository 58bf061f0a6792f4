#include "glare/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

#include "glare/error.hpp"

namespace glare {

namespace {

constexpr char kMagic[8] = {'G', 'L', 'A', 'R', 'E', 'C', 'K', 'P'};

class Writer {
public:
  void bytes(const char* p, std::size_t n) { out_.insert(out_.end(), p, p + n); }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out_.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
  }
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out_.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
  }
  void f32(float v) { u32(std::bit_cast<std::uint32_t>(v)); }
  std::vector<char> take() { return std::move(out_); }

private:
  std::vector<char> out_;
};

class Reader {
public:
  explicit Reader(std::span<const char> in) : in_(in) {}

  std::span<const char> bytes(std::size_t n) {
    if (pos_ + n > in_.size()) throw DecodeError("checkpoint truncated");
    auto s = in_.subspan(pos_, n);
    pos_ += n;
    return s;
  }
  std::uint32_t u32() {
    auto b = bytes(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(static_cast<unsigned char>(b[i])) << (8 * i);
    return v;
  }
  std::uint64_t u64() {
    auto b = bytes(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(b[i])) << (8 * i);
    return v;
  }
  float f32() { return std::bit_cast<float>(u32()); }
  bool done() const { return pos_ == in_.size(); }

private:
  std::span<const char> in_;
  std::size_t pos_ = 0;
};

}  // namespace

std::vector<char> serialize_checkpoint(const nn::Model<float>& model) {
  Writer w;
  w.bytes(kMagic, sizeof kMagic);
  w.u32(kCheckpointVersion);
  w.u64(model.config.digest());
  const std::string desc = model.config.describe();
  w.u32(static_cast<std::uint32_t>(desc.size()));
  w.bytes(desc.data(), desc.size());
  const auto params = model.parameters();
  w.u32(static_cast<std::uint32_t>(params.size()));
  for (const auto* p : params) {
    const nn::Shape& s = p->value.shape();
    w.u32(4);
    for (int d : {s.n, s.c, s.h, s.w}) w.u32(static_cast<std::uint32_t>(d));
    for (float v : p->value.values()) w.f32(v);
  }
  return w.take();
}

nn::Model<float> deserialize_checkpoint(std::span<const char> bytes) {
  Reader r(bytes);
  if (std::memcmp(r.bytes(sizeof kMagic).data(), kMagic, sizeof kMagic) != 0) {
    throw DecodeError("not a glare checkpoint (bad magic)");
  }
  const std::uint32_t version = r.u32();
  if (version != kCheckpointVersion) throw DecodeError("unsupported checkpoint version " + std::to_string(version));
  const std::uint64_t digest = r.u64();
  const auto desc = r.bytes(r.u32());
  const UNetConfig cfg = UNetConfig::parse(std::string_view(desc.data(), desc.size()));
  if (cfg.digest() != digest) throw DecodeError("checkpoint config digest mismatch");

  nn::Model<float> model = nn::build_model<float>(cfg, 0);
  auto params = model.parameters();
  if (r.u32() != params.size()) throw DecodeError("checkpoint tensor count does not match its config");
  for (auto* p : params) {
    if (r.u32() != 4) throw DecodeError("checkpoint tensor rank must be 4");
    nn::Shape s;
    s.n = static_cast<int>(r.u32());
    s.c = static_cast<int>(r.u32());
    s.h = static_cast<int>(r.u32());
    s.w = static_cast<int>(r.u32());
    if (s != p->value.shape()) {
      throw DecodeError("checkpoint tensor shape " + s.str() + " does not match " + p->value.shape().str());
    }
    for (float& v : p->value.values()) v = r.f32();
  }
  if (!r.done()) throw DecodeError("trailing bytes after checkpoint payload");
  return model;
}

void save_checkpoint(const nn::Model<float>& model, const std::filesystem::path& path) {
  const std::vector<char> bytes = serialize_checkpoint(model);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot open " + path.string() + " for writing", path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

nn::Model<float> load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open checkpoint " + path.string(), path.string());
  const std::vector<char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return deserialize_checkpoint(bytes);
}

}  // namespace glare
