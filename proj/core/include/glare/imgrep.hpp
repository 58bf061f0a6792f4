#pragma once

#include <array>
#include <string>
#include <string_view>
#include <vector>

#include "glare/raster.hpp"

namespace glare {

/// Window and stride for the local contrast map.
struct ContrastParams {
  int window_n = 17;  // width
  int window_m = 17;  // height
  int stride_k = 4;
  double luminance_floor = 10.0;

  /// Throws ConfigError unless both window sides are odd and >= 3 and stride >= 1.
  void validate() const;
};

/// Image representations that can feed a network branch.
enum class Representation { RGB, HSV, G, C };

std::string_view to_string(Representation r) noexcept;
int channel_count(Representation r) noexcept;

/// Hexcone RGB -> HSV. Hue is degrees / 360 in [0,1); hue is 0 when saturation is 0.
HsvImage rgb_to_hsv(const RgbImage& img);

/// Inverse of rgb_to_hsv.
RgbImage hsv_to_rgb(const HsvImage& img);

/// Per-pixel (0.02874 * v)^2.2, where `v_plane` holds V on a 0-255 scale.
ScalarMap luminance(const ScalarMap& v_plane);

/// Scales a [0,1] V plane to 0-255 and applies luminance().
ScalarMap luminance_from_hsv(const HsvImage& hsv);

/// Local contrast: sample std of L over the window around each pixel divided by
/// max(luminance_floor, window mean). Windows are clipped at the borders and use
/// the clipped pixel count. Output is >= 0 and not clamped.
ScalarMap contrast_map(const ScalarMap& l_plane, const ContrastParams& params);

/// contrast_map evaluated exactly on a stride-k lattice (last row and column
/// always included) and bilinearly interpolated in between. stride_k == 1
/// reproduces contrast_map bit for bit.
ScalarMap contrast_map_strided(const ScalarMap& l_plane, const ContrastParams& params);

/// Joint min-max normalization over every channel and pixel. Constant input maps to zeros.
Raster rescale(const Raster& map);

/// rescale(rgb * (1 - s) * (1 - clamp(c, 0, 1))), per channel.
PhotometricMap photometric_map(const RgbImage& rgb, const ScalarMap& s_plane, const ScalarMap& c_map);

/// The 14 representation combinations, in report column order.
const std::array<std::string_view, 14>& table_combos() noexcept;

/// Parses a combo id such as "RGB+G" or "G&RGB" into its representations in
/// branch order (RGB, HSV, G, C). Throws ConfigError on unknown or repeated names.
std::vector<Representation> parse_combo(std::string_view combo_id);

/// Canonical (report column) spelling for any accepted combo id.
std::string canonical_combo(std::string_view combo_id);

struct PlaneEntry {
  Representation rep;
  Raster raster;

  std::string_view name() const noexcept { return to_string(rep); }
};

/// The representations one combo feeds to the network, in branch order.
struct PixelPlaneSet {
  std::string combo_id;
  std::vector<PlaneEntry> entries;

  int total_channels() const noexcept;
  int height() const noexcept { return entries.empty() ? 0 : entries.front().raster.height(); }
  int width() const noexcept { return entries.empty() ? 0 : entries.front().raster.width(); }
  const PlaneEntry* find(Representation rep) const noexcept;
};

/// Computes only what `combo_id` needs. Contrast uses contrast_map_strided.
PixelPlaneSet build_plane_set(const RgbImage& rgb, std::string_view combo_id, const ContrastParams& params);

}  // namespace glare
