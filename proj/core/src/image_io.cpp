#include "glare/image_io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <opencv2/imgcodecs.hpp>
#include <opencv2/imgproc.hpp>

#include "glare/error.hpp"

namespace glare {

namespace {

void require_file(const std::filesystem::path& path) {
  std::error_code ec;
  if (!std::filesystem::is_regular_file(path, ec)) {
    throw InputError("no such file: " + path.string(), path.string());
  }
}

void write_or_throw(const std::filesystem::path& path, const cv::Mat& m) {
  bool ok = false;
  try {
    ok = cv::imwrite(path.string(), m, {cv::IMWRITE_PNG_COMPRESSION, 6});
  } catch (const cv::Exception& e) {
    throw InputError("cannot write " + path.string() + ": " + e.what(), path.string());
  }
  if (!ok) throw InputError("cannot write " + path.string(), path.string());
}

}  // namespace

std::uint8_t to_u8(double v) noexcept {
  return static_cast<std::uint8_t>(std::floor(std::clamp(v, 0.0, 1.0) * 255.0 + 0.5));
}

RgbImage read_rgb(const std::filesystem::path& path) {
  require_file(path);
  const cv::Mat bgr = cv::imread(path.string(), cv::IMREAD_COLOR);
  if (bgr.empty()) throw DecodeError("cannot decode image " + path.string());
  RgbImage img(bgr.rows, bgr.cols);
  for (int y = 0; y < bgr.rows; ++y) {
    const auto* row = bgr.ptr<cv::Vec3b>(y);
    for (int x = 0; x < bgr.cols; ++x) {
      img.at(0, y, x) = row[x][2] / 255.0;
      img.at(1, y, x) = row[x][1] / 255.0;
      img.at(2, y, x) = row[x][0] / 255.0;
    }
  }
  return img;
}

Gray8 read_gray8(const std::filesystem::path& path) {
  require_file(path);
  const cv::Mat g = cv::imread(path.string(), cv::IMREAD_GRAYSCALE);
  if (g.empty()) throw DecodeError("cannot decode image " + path.string());
  Gray8 out{g.rows, g.cols, {}};
  out.data.reserve(static_cast<std::size_t>(g.rows) * g.cols);
  for (int y = 0; y < g.rows; ++y) {
    const auto* row = g.ptr<std::uint8_t>(y);
    out.data.insert(out.data.end(), row, row + g.cols);
  }
  return out;
}

void write_png(const std::filesystem::path& path, const Raster& raster) {
  if (raster.channels() != 1 && raster.channels() != 3) {
    throw ConfigError("write_png supports 1 or 3 channels, got " + std::to_string(raster.channels()));
  }
  if (raster.channels() == 1) {
    cv::Mat m(raster.height(), raster.width(), CV_8UC1);
    for (int y = 0; y < raster.height(); ++y)
      for (int x = 0; x < raster.width(); ++x) m.at<std::uint8_t>(y, x) = to_u8(raster.at(0, y, x));
    write_or_throw(path, m);
    return;
  }
  cv::Mat m(raster.height(), raster.width(), CV_8UC3);
  for (int y = 0; y < raster.height(); ++y)
    for (int x = 0; x < raster.width(); ++x)
      m.at<cv::Vec3b>(y, x) = {to_u8(raster.at(2, y, x)), to_u8(raster.at(1, y, x)), to_u8(raster.at(0, y, x))};
  write_or_throw(path, m);
}

void write_mask_png(const std::filesystem::path& path, const BinaryMask& mask) {
  cv::Mat m(mask.height, mask.width, CV_8UC1);
  for (int y = 0; y < mask.height; ++y)
    for (int x = 0; x < mask.width; ++x) m.at<std::uint8_t>(y, x) = mask.at(y, x) ? 255 : 0;
  write_or_throw(path, m);
}

void write_float_planar(const std::filesystem::path& path, const Raster& raster) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot open " + path.string() + " for writing", path.string());
  auto put_u32 = [&](std::uint32_t v) {
    const char b[4] = {static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff),
                       static_cast<char>((v >> 16) & 0xff), static_cast<char>((v >> 24) & 0xff)};
    out.write(b, 4);
  };
  out.write("GLRF", 4);
  put_u32(static_cast<std::uint32_t>(raster.channels()));
  put_u32(static_cast<std::uint32_t>(raster.height()));
  put_u32(static_cast<std::uint32_t>(raster.width()));
  for (double v : raster.values()) put_u32(std::bit_cast<std::uint32_t>(static_cast<float>(v)));
}

Raster read_float_planar(const std::filesystem::path& path) {
  require_file(path);
  std::ifstream in(path, std::ios::binary);
  char magic[4];
  in.read(magic, 4);
  if (!in || std::string_view(magic, 4) != "GLRF") throw DecodeError("not a float planar file: " + path.string());
  auto get_u32 = [&] {
    unsigned char b[4];
    in.read(reinterpret_cast<char*>(b), 4);
    if (!in) throw DecodeError("truncated float planar file: " + path.string());
    return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
           (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
  };
  const int c = static_cast<int>(get_u32()), h = static_cast<int>(get_u32()), w = static_cast<int>(get_u32());
  Raster r(h, w, c);
  for (double& v : r.values()) v = std::bit_cast<float>(get_u32());
  return r;
}

RgbImage resize_bilinear(const RgbImage& img, int height, int width) {
  if (img.height() == height && img.width() == width) return img;
  cv::Mat src(img.height(), img.width(), CV_64FC3);
  for (int y = 0; y < img.height(); ++y)
    for (int x = 0; x < img.width(); ++x)
      src.at<cv::Vec3d>(y, x) = {img.at(0, y, x), img.at(1, y, x), img.at(2, y, x)};
  cv::Mat dst;
  cv::resize(src, dst, cv::Size(width, height), 0, 0, cv::INTER_LINEAR);
  RgbImage out(height, width);
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x)
      for (int c = 0; c < 3; ++c) out.at(c, y, x) = std::clamp(dst.at<cv::Vec3d>(y, x)[c], 0.0, 1.0);
  return out;
}

BinaryMask resize_nearest(const BinaryMask& mask, int height, int width) {
  if (mask.height == height && mask.width == width) return mask;
  const cv::Mat src(mask.height, mask.width, CV_8UC1, const_cast<std::uint8_t*>(mask.data.data()));
  cv::Mat dst;
  cv::resize(src, dst, cv::Size(width, height), 0, 0, cv::INTER_NEAREST);
  BinaryMask out(height, width);
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x) out.at(y, x) = dst.at<std::uint8_t>(y, x) ? 1 : 0;
  return out;
}

}  // namespace glare
