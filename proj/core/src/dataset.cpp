#include "glare/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <nlohmann/json.hpp>

#include "glare/error.hpp"

namespace glare {

namespace fs = std::filesystem;

namespace {

std::string lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (const auto& s : items) out += (out.empty() ? "" : ", ") + s;
  return out;
}

// stem -> path for regular files whose extension is in `exts`.
std::map<std::string, std::vector<fs::path>> list_by_stem(const fs::path& dir, std::initializer_list<const char*> exts) {
  std::map<std::string, std::vector<fs::path>> out;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const std::string ext = lower(entry.path().extension().string());
    if (std::ranges::find_if(exts, [&](const char* e) { return ext == e; }) == exts.end()) continue;
    out[entry.path().stem().string()].push_back(entry.path());
  }
  return out;
}

DatasetManifest read_manifest_json(const fs::path& root, const fs::path& file, int resolution) {
  std::ifstream in(file);
  if (!in) throw InputError("cannot read " + file.string(), file.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(file.string() + ": " + e.what());
  }
  DatasetManifest m;
  m.root = root;
  m.height = m.width = j.value("resolution", resolution);
  if (!j.contains("pairs") || !j["pairs"].is_array()) throw ConfigError(file.string() + ": missing 'pairs' array");
  std::vector<std::string> problems;
  for (const auto& p : j["pairs"]) {
    ManifestEntry e{p.at("id").get<std::string>(), root / p.at("image").get<std::string>(),
                    root / p.at("mask").get<std::string>()};
    if (!fs::is_regular_file(e.image)) problems.push_back("missing image " + e.image.string());
    if (!fs::is_regular_file(e.mask)) problems.push_back("missing mask " + e.mask.string());
    m.entries.push_back(std::move(e));
  }
  std::ranges::sort(m.entries, {}, &ManifestEntry::id);
  for (std::size_t i = 1; i < m.entries.size(); ++i) {
    if (m.entries[i].id == m.entries[i - 1].id) problems.push_back("duplicate id " + m.entries[i].id);
  }
  if (!problems.empty()) throw ValidationError("invalid manifest " + file.string() + ": " + join(problems));
  if (m.entries.empty()) throw ValidationError("no samples found in " + file.string());
  return m;
}

}  // namespace

DatasetManifest scan_dataset(const fs::path& root, int resolution) {
  if (resolution < 1) throw ConfigError("resolution must be positive");
  if (!fs::is_directory(root)) throw InputError("dataset root not found: " + root.string(), root.string());
  if (fs::is_regular_file(root / "manifest.json")) return read_manifest_json(root, root / "manifest.json", resolution);

  const fs::path images_dir = root / "images", masks_dir = root / "masks";
  for (const auto& d : {images_dir, masks_dir}) {
    if (!fs::is_directory(d)) throw InputError("missing directory " + d.string(), d.string());
  }
  const auto images = list_by_stem(images_dir, {".png", ".jpg", ".jpeg"});
  const auto masks = list_by_stem(masks_dir, {".png"});

  std::vector<std::string> problems;
  for (const auto& [stem, paths] : images) {
    if (paths.size() > 1) problems.push_back("duplicate image id " + stem);
    if (!masks.contains(stem)) problems.push_back("image without mask: " + paths.front().string());
  }
  for (const auto& [stem, paths] : masks) {
    if (!images.contains(stem)) problems.push_back("orphan mask: " + paths.front().string());
  }
  if (!problems.empty()) throw ValidationError("dataset " + root.string() + " is inconsistent: " + join(problems));
  if (images.empty()) throw ValidationError("no samples found in " + root.string());

  DatasetManifest m;
  m.root = root;
  m.height = m.width = resolution;
  for (const auto& [stem, paths] : images) m.entries.push_back({stem, paths.front(), masks.at(stem).front()});
  return m;
}

BinaryMask mask_from_gray(const Gray8& g) {
  BinaryMask m(g.height, g.width);
  std::ranges::transform(g.data, m.data.begin(), [](std::uint8_t v) -> std::uint8_t { return v >= 128 ? 1 : 0; });
  return m;
}

SamplePair load_pair(const ManifestEntry& entry, int height, int width) {
  SamplePair s;
  s.id = entry.id;
  s.image = resize_bilinear(read_rgb(entry.image), height, width);
  s.mask = resize_nearest(mask_from_gray(read_gray8(entry.mask)), height, width);
  return s;
}

void write_dataset(const fs::path& root, std::span<const SamplePair> samples) {
  fs::create_directories(root / "images");
  fs::create_directories(root / "masks");
  for (const SamplePair& s : samples) {
    write_png(root / "images" / (s.id + ".png"), s.image);
    write_mask_png(root / "masks" / (s.id + ".png"), s.mask);
  }
}

}  // namespace glare
