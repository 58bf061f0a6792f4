#include "glare/raster.hpp"

#include <algorithm>
#include <string>

#include "glare/error.hpp"

namespace glare {

Raster::Raster(int height, int width, int channels, double fill)
    : height_(height), width_(width), channels_(channels) {
  if (height < 1 || width < 1 || channels < 1) {
    throw ConfigError("raster dimensions must be positive, got " + std::to_string(height) + "x" +
                      std::to_string(width) + "x" + std::to_string(channels));
  }
  data_.assign(static_cast<std::size_t>(height) * width * channels, fill);
}

namespace {

Raster expect_channels(Raster r, int channels, const char* type) {
  if (r.channels() != channels) {
    throw ConfigError(std::string(type) + " needs " + std::to_string(channels) + " channel(s), got " +
                      std::to_string(r.channels()));
  }
  return r;
}

}  // namespace

RgbImage::RgbImage(Raster r) : Raster(expect_channels(std::move(r), 3, "RgbImage")) {}
HsvImage::HsvImage(Raster r) : Raster(expect_channels(std::move(r), 3, "HsvImage")) {}
ScalarMap::ScalarMap(Raster r) : Raster(expect_channels(std::move(r), 1, "ScalarMap")) {}
PhotometricMap::PhotometricMap(Raster r) : Raster(expect_channels(std::move(r), 3, "PhotometricMap")) {}

std::size_t BinaryMask::count() const noexcept {
  return static_cast<std::size_t>(std::count_if(data.begin(), data.end(), [](std::uint8_t v) { return v != 0; }));
}

ScalarMap channel(const Raster& r, int c) {
  if (c < 0 || c >= r.channels()) {
    throw ConfigError("channel index " + std::to_string(c) + " out of range");
  }
  ScalarMap out(r.height(), r.width());
  std::ranges::copy(r.plane(c), out.values().begin());
  return out;
}

}  // namespace glare
