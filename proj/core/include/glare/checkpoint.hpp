#pragma once

#include <filesystem>
#include <span>
#include <vector>

#include "glare/unet.hpp"

namespace glare {

/// Binary checkpoint layout (all integers and floats little-endian):
///
///   char[8]  magic "GLARECKP"
///   u32      format version (1)
///   u64      FNV-1a 64 digest of the config description
///   u32      description length L, then L bytes of UNetConfig::describe()
///   u32      tensor count T
///   T times: u32 rank (4), u32 dims[4] (n, c, h, w), f32 values[n*c*h*w]
///
/// Tensors appear in Model::parameters() order.
inline constexpr std::uint32_t kCheckpointVersion = 1;

std::vector<char> serialize_checkpoint(const nn::Model<float>& model);
nn::Model<float> deserialize_checkpoint(std::span<const char> bytes);

void save_checkpoint(const nn::Model<float>& model, const std::filesystem::path& path);
nn::Model<float> load_checkpoint(const std::filesystem::path& path);

}  // namespace glare
