#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "glare/image_io.hpp"
#include "glare/raster.hpp"

namespace glare {

struct SamplePair {
  std::string id;
  RgbImage image;
  BinaryMask mask;
};

struct ManifestEntry {
  std::string id;
  std::filesystem::path image;
  std::filesystem::path mask;
};

/// Image/mask pairing for one dataset root.
struct DatasetManifest {
  std::filesystem::path root;
  std::vector<ManifestEntry> entries;  // sorted by id, byte-wise
  int height = 256;
  int width = 256;
};

/// Pairs <root>/images/<id>.(png|jpg|jpeg) with <root>/masks/<id>.png, or reads
/// <root>/manifest.json when present:
///   {"resolution": 256, "pairs": [{"id": "...", "image": "rel/path", "mask": "rel/path"}]}
/// Throws InputError if the layout is missing and ValidationError listing
/// orphans, duplicate ids or an empty dataset.
DatasetManifest scan_dataset(const std::filesystem::path& root, int resolution = 256);

/// Mask pixels >= 128 become glare.
BinaryMask mask_from_gray(const Gray8& g);

/// Image bilinear-resized, mask binarized then nearest-resized, both to height x width.
SamplePair load_pair(const ManifestEntry& entry, int height, int width);

/// Writes samples in the scan_dataset layout (PNG image and 0/255 PNG mask).
void write_dataset(const std::filesystem::path& root, std::span<const SamplePair> samples);

/// Procedural glare corpus: value-noise textured colour backgrounds with smooth
/// saturated distractor patches, plus 1-3 desaturated bright blobs with Gaussian
/// falloff and optional streaks. Mask = glare alpha > 0.5. Every sample has
/// between 0.5% and 30% glare pixels. Sample i depends only on (seed, i).
std::vector<SamplePair> synthesize_glare(std::uint64_t seed, int count, int resolution);

}  // namespace glare
