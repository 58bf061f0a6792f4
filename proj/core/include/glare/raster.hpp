#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace glare {

/// Planar multi-channel raster of doubles. Channel c, row y, column x lives at
/// data[(c * height + y) * width + x].
class Raster {
public:
  Raster() = default;
  Raster(int height, int width, int channels, double fill = 0.0);

  int height() const noexcept { return height_; }
  int width() const noexcept { return width_; }
  int channels() const noexcept { return channels_; }
  std::size_t plane_size() const noexcept {
    return static_cast<std::size_t>(height_) * static_cast<std::size_t>(width_);
  }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  double& at(int c, int y, int x) noexcept { return data_[index(c, y, x)]; }
  double at(int c, int y, int x) const noexcept { return data_[index(c, y, x)]; }

  std::span<double> plane(int c) noexcept { return {data_.data() + c * plane_size(), plane_size()}; }
  std::span<const double> plane(int c) const noexcept {
    return {data_.data() + c * plane_size(), plane_size()};
  }

  std::span<double> values() noexcept { return data_; }
  std::span<const double> values() const noexcept { return data_; }

  bool same_geometry(const Raster& other) const noexcept {
    return height_ == other.height_ && width_ == other.width_;
  }

  bool operator==(const Raster&) const = default;

private:
  std::size_t index(int c, int y, int x) const noexcept {
    return (static_cast<std::size_t>(c) * height_ + y) * width_ + x;
  }

  int height_ = 0;
  int width_ = 0;
  int channels_ = 0;
  std::vector<double> data_;
};

// Strong raster types. Each one checks its channel count on construction from a
// generic Raster; the value-range invariants are the producers' business.

/// RGB image, channels in [0,1].
struct RgbImage : Raster {
  RgbImage() = default;
  RgbImage(int height, int width, double fill = 0.0) : Raster(height, width, 3, fill) {}
  explicit RgbImage(Raster r);
};

/// HSV image, every channel normalized to [0,1] (hue is degrees / 360).
struct HsvImage : Raster {
  HsvImage() = default;
  HsvImage(int height, int width) : Raster(height, width, 3) {}
  explicit HsvImage(Raster r);
};

/// Single-channel map (luminance, contrast, probabilities, ...).
struct ScalarMap : Raster {
  ScalarMap() = default;
  ScalarMap(int height, int width, double fill = 0.0) : Raster(height, width, 1, fill) {}
  explicit ScalarMap(Raster r);
};

/// Three-channel photometric map, values in [0,1] after joint rescale.
struct PhotometricMap : Raster {
  PhotometricMap() = default;
  explicit PhotometricMap(Raster r);
};

/// Binary mask, one byte per pixel (1 = glare).
struct BinaryMask {
  int height = 0;
  int width = 0;
  std::vector<std::uint8_t> data;

  BinaryMask() = default;
  BinaryMask(int h, int w, std::uint8_t fill = 0)
      : height(h), width(w), data(static_cast<std::size_t>(h) * w, fill) {}

  std::size_t size() const noexcept { return data.size(); }
  std::uint8_t at(int y, int x) const noexcept { return data[static_cast<std::size_t>(y) * width + x]; }
  std::uint8_t& at(int y, int x) noexcept { return data[static_cast<std::size_t>(y) * width + x]; }
  std::size_t count() const noexcept;

  bool operator==(const BinaryMask&) const = default;
};

/// Extract one channel as a ScalarMap.
ScalarMap channel(const Raster& r, int c);

}  // namespace glare
