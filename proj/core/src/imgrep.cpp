#include "glare/imgrep.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <string>

#include "glare/error.hpp"

namespace glare {

void ContrastParams::validate() const {
  auto odd_window = [](int v) { return v >= 3 && v % 2 == 1; };
  if (!odd_window(window_n) || !odd_window(window_m)) {
    throw ConfigError("contrast window must be odd and >= 3, got " + std::to_string(window_n) + "x" +
                      std::to_string(window_m));
  }
  if (stride_k < 1) {
    throw ConfigError("contrast stride must be >= 1, got " + std::to_string(stride_k));
  }
}

std::string_view to_string(Representation r) noexcept {
  switch (r) {
    case Representation::RGB: return "RGB";
    case Representation::HSV: return "HSV";
    case Representation::G: return "G";
    case Representation::C: return "C";
  }
  return "?";
}

int channel_count(Representation r) noexcept { return r == Representation::C ? 1 : 3; }

HsvImage rgb_to_hsv(const RgbImage& img) {
  HsvImage out(img.height(), img.width());
  const auto r = img.plane(0), g = img.plane(1), b = img.plane(2);
  auto h = out.plane(0), s = out.plane(1), v = out.plane(2);
  for (std::size_t i = 0; i < img.plane_size(); ++i) {
    const double hi = std::max({r[i], g[i], b[i]});
    const double lo = std::min({r[i], g[i], b[i]});
    const double delta = hi - lo;
    v[i] = hi;
    s[i] = hi > 0.0 ? delta / hi : 0.0;
    double hue = 0.0;
    if (delta > 0.0) {
      if (hi == r[i]) {
        hue = (g[i] - b[i]) / delta;
        if (hue < 0.0) hue += 6.0;
      } else if (hi == g[i]) {
        hue = (b[i] - r[i]) / delta + 2.0;
      } else {
        hue = (r[i] - g[i]) / delta + 4.0;
      }
    }
    h[i] = hue / 6.0;
  }
  return out;
}

RgbImage hsv_to_rgb(const HsvImage& img) {
  RgbImage out(img.height(), img.width());
  const auto h = img.plane(0), s = img.plane(1), v = img.plane(2);
  auto r = out.plane(0), g = out.plane(1), b = out.plane(2);
  for (std::size_t i = 0; i < img.plane_size(); ++i) {
    const double sector = std::fmod(h[i] * 6.0, 6.0);
    const double c = v[i] * s[i];
    const double x = c * (1.0 - std::abs(std::fmod(sector, 2.0) - 1.0));
    const double m = v[i] - c;
    double rr = 0, gg = 0, bb = 0;
    switch (static_cast<int>(sector)) {
      case 0: rr = c; gg = x; break;
      case 1: rr = x; gg = c; break;
      case 2: gg = c; bb = x; break;
      case 3: gg = x; bb = c; break;
      case 4: rr = x; bb = c; break;
      default: rr = c; bb = x; break;
    }
    r[i] = rr + m;
    g[i] = gg + m;
    b[i] = bb + m;
  }
  return out;
}

ScalarMap luminance(const ScalarMap& v_plane) {
  ScalarMap out(v_plane.height(), v_plane.width());
  std::ranges::transform(v_plane.values(), out.values().begin(),
                         [](double v) { return std::pow(0.02874 * v, 2.2); });
  return out;
}

ScalarMap luminance_from_hsv(const HsvImage& hsv) {
  ScalarMap v255 = channel(hsv, 2);
  for (double& v : v255.values()) v *= 255.0;
  return luminance(v255);
}

namespace {

// Summed-area tables of (L - shift) and (L - shift)^2. The shift is the
// midrange of L so that a constant map gives exactly zero sums.
class WindowStats {
public:
  WindowStats(const ScalarMap& l, const ContrastParams& params)
      : h_(l.height()), w_(l.width()), half_n_(params.window_n / 2), half_m_(params.window_m / 2),
        floor_(params.luminance_floor), sum_((h_ + 1) * static_cast<std::size_t>(w_ + 1), 0.0),
        sq_(sum_.size(), 0.0) {
    const auto [lo, hi] = std::ranges::minmax(l.values());
    shift_ = lo + 0.5 * (hi - lo);
    const std::size_t stride = w_ + 1;
    for (int y = 0; y < h_; ++y) {
      double row_sum = 0.0, row_sq = 0.0;
      for (int x = 0; x < w_; ++x) {
        const double d = l.at(0, y, x) - shift_;
        row_sum += d;
        row_sq += d * d;
        sum_[(y + 1) * stride + x + 1] = sum_[y * stride + x + 1] + row_sum;
        sq_[(y + 1) * stride + x + 1] = sq_[y * stride + x + 1] + row_sq;
      }
    }
  }

  double contrast_at(int y, int x) const {
    const int y0 = std::max(0, y - half_m_), y1 = std::min(h_, y + half_m_ + 1);
    const int x0 = std::max(0, x - half_n_), x1 = std::min(w_, x + half_n_ + 1);
    const double n = static_cast<double>((y1 - y0) * (x1 - x0));
    const double s = box(sum_, y0, y1, x0, x1);
    const double q = box(sq_, y0, y1, x0, x1);
    const double var = std::max(0.0, (q - s * s / n) / (n - 1.0));
    const double mean = s / n + shift_;
    return std::sqrt(var) / std::max(floor_, mean);
  }

private:
  double box(const std::vector<double>& t, int y0, int y1, int x0, int x1) const {
    const std::size_t stride = w_ + 1;
    return t[y1 * stride + x1] - t[y0 * stride + x1] - t[y1 * stride + x0] + t[y0 * stride + x0];
  }

  int h_, w_, half_n_, half_m_;
  double floor_;
  double shift_ = 0.0;
  std::vector<double> sum_, sq_;
};

void check_contrast_input(const ScalarMap& l, const ContrastParams& params) {
  params.validate();
  if (l.plane_size() < 2) {
    throw ConfigError("contrast map needs at least 2 pixels");
  }
}

// Lattice coordinates 0, k, 2k, ... plus the last index.
std::vector<int> lattice(int extent, int k) {
  std::vector<int> pts;
  for (int i = 0; i < extent; i += k) pts.push_back(i);
  if (pts.back() != extent - 1) pts.push_back(extent - 1);
  return pts;
}

}  // namespace

ScalarMap contrast_map(const ScalarMap& l_plane, const ContrastParams& params) {
  check_contrast_input(l_plane, params);
  const WindowStats stats(l_plane, params);
  ScalarMap out(l_plane.height(), l_plane.width());
  for (int y = 0; y < l_plane.height(); ++y)
    for (int x = 0; x < l_plane.width(); ++x) out.at(0, y, x) = stats.contrast_at(y, x);
  return out;
}

ScalarMap contrast_map_strided(const ScalarMap& l_plane, const ContrastParams& params) {
  check_contrast_input(l_plane, params);
  const WindowStats stats(l_plane, params);
  const int h = l_plane.height(), w = l_plane.width();
  const std::vector<int> rows = lattice(h, params.stride_k);
  const std::vector<int> cols = lattice(w, params.stride_k);

  std::vector<double> grid(rows.size() * cols.size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < cols.size(); ++j) grid[i * cols.size() + j] = stats.contrast_at(rows[i], cols[j]);

  // For each output coordinate: index of the lattice segment and fractional offset.
  auto segments = [](const std::vector<int>& pts, int extent) {
    std::vector<std::pair<std::size_t, double>> seg(extent);
    std::size_t s = 0;
    for (int p = 0; p < extent; ++p) {
      while (s + 1 < pts.size() && pts[s + 1] <= p) ++s;
      if (s + 1 == pts.size() || pts[s] == p) {
        seg[p] = {s, 0.0};
      } else {
        seg[p] = {s, static_cast<double>(p - pts[s]) / (pts[s + 1] - pts[s])};
      }
    }
    return seg;
  };
  const auto row_seg = segments(rows, h);
  const auto col_seg = segments(cols, w);

  ScalarMap out(h, w);
  const std::size_t gw = cols.size();
  for (int y = 0; y < h; ++y) {
    const auto [ri, ty] = row_seg[y];
    for (int x = 0; x < w; ++x) {
      const auto [ci, tx] = col_seg[x];
      const double c00 = grid[ri * gw + ci];
      if (ty == 0.0 && tx == 0.0) {
        out.at(0, y, x) = c00;
        continue;
      }
      const double c01 = tx > 0.0 ? grid[ri * gw + ci + 1] : c00;
      const double c10 = ty > 0.0 ? grid[(ri + 1) * gw + ci] : c00;
      const double c11 = (tx > 0.0 && ty > 0.0) ? grid[(ri + 1) * gw + ci + 1] : (tx > 0.0 ? c01 : c10);
      const double top = c00 + tx * (c01 - c00);
      const double bottom = c10 + tx * (c11 - c10);
      out.at(0, y, x) = top + ty * (bottom - top);
    }
  }
  return out;
}

Raster rescale(const Raster& map) {
  Raster out(map.height(), map.width(), map.channels());
  const auto [lo, hi] = std::ranges::minmax(map.values());
  if (hi == lo) return out;
  const double range = hi - lo;
  std::ranges::transform(map.values(), out.values().begin(), [&](double v) { return (v - lo) / range; });
  return out;
}

PhotometricMap photometric_map(const RgbImage& rgb, const ScalarMap& s_plane, const ScalarMap& c_map) {
  if (!rgb.same_geometry(s_plane) || !rgb.same_geometry(c_map)) {
    throw ConfigError("photometric_map inputs must share geometry");
  }
  Raster product(rgb.height(), rgb.width(), 3);
  const auto s = s_plane.plane(0);
  const auto c = c_map.plane(0);
  for (int ch = 0; ch < 3; ++ch) {
    const auto src = rgb.plane(ch);
    auto dst = product.plane(ch);
    for (std::size_t i = 0; i < src.size(); ++i) {
      dst[i] = src[i] * (1.0 - s[i]) * (1.0 - std::clamp(c[i], 0.0, 1.0));
    }
  }
  return PhotometricMap(rescale(product));
}

namespace {

constexpr std::array<std::string_view, 14> kTableCombos = {
    "C",       "RGB",       "HSV",       "G",         "RGB+HSV",     "RGB+G",   "G+HSV",
    "RGB+C",   "C+HSV",     "RGB+HSV+C", "RGB+HSV+G", "RGB+G+C",     "G+HSV+C", "RGB+HSV+G+C"};

unsigned combo_bits(std::string_view combo_id) {
  unsigned bits = 0;
  std::size_t start = 0;
  while (start <= combo_id.size()) {
    std::size_t end = combo_id.find_first_of("+&", start);
    if (end == std::string_view::npos) end = combo_id.size();
    std::string token;
    for (char ch : combo_id.substr(start, end - start)) {
      if (!std::isspace(static_cast<unsigned char>(ch))) token.push_back(static_cast<char>(std::toupper(ch)));
    }
    if (token.starts_with("I_")) token.erase(0, 2);
    unsigned bit = 0;
    if (token == "RGB") bit = 1u << static_cast<int>(Representation::RGB);
    else if (token == "HSV") bit = 1u << static_cast<int>(Representation::HSV);
    else if (token == "G") bit = 1u << static_cast<int>(Representation::G);
    else if (token == "C") bit = 1u << static_cast<int>(Representation::C);
    else throw ConfigError("unknown representation '" + token + "' in combo '" + std::string(combo_id) + "'");
    if (bits & bit) throw ConfigError("repeated representation in combo '" + std::string(combo_id) + "'");
    bits |= bit;
    start = end + 1;
  }
  return bits;
}

}  // namespace

const std::array<std::string_view, 14>& table_combos() noexcept { return kTableCombos; }

std::string canonical_combo(std::string_view combo_id) {
  const unsigned bits = combo_bits(combo_id);
  for (std::string_view c : kTableCombos) {
    if (combo_bits(c) == bits) return std::string(c);
  }
  throw ConfigError("combo '" + std::string(combo_id) + "' is not one of the 14 evaluated combinations");
}

std::vector<Representation> parse_combo(std::string_view combo_id) {
  const unsigned bits = combo_bits(canonical_combo(combo_id));
  std::vector<Representation> reps;
  for (Representation r : {Representation::RGB, Representation::HSV, Representation::G, Representation::C}) {
    if (bits & (1u << static_cast<int>(r))) reps.push_back(r);
  }
  return reps;
}

int PixelPlaneSet::total_channels() const noexcept {
  int n = 0;
  for (const auto& e : entries) n += e.raster.channels();
  return n;
}

const PlaneEntry* PixelPlaneSet::find(Representation rep) const noexcept {
  for (const auto& e : entries) {
    if (e.rep == rep) return &e;
  }
  return nullptr;
}

PixelPlaneSet build_plane_set(const RgbImage& rgb, std::string_view combo_id, const ContrastParams& params) {
  PixelPlaneSet set;
  set.combo_id = canonical_combo(combo_id);
  const std::vector<Representation> reps = parse_combo(set.combo_id);
  const bool want_g = std::ranges::find(reps, Representation::G) != reps.end();
  const bool want_c = std::ranges::find(reps, Representation::C) != reps.end();
  const bool want_hsv = std::ranges::find(reps, Representation::HSV) != reps.end();

  HsvImage hsv;
  ScalarMap contrast;
  if (want_hsv || want_g || want_c) hsv = rgb_to_hsv(rgb);
  if (want_g || want_c) contrast = contrast_map_strided(luminance_from_hsv(hsv), params);

  for (Representation r : reps) {
    switch (r) {
      case Representation::RGB: set.entries.push_back({r, rgb}); break;
      case Representation::HSV: set.entries.push_back({r, hsv}); break;
      case Representation::G: set.entries.push_back({r, photometric_map(rgb, channel(hsv, 1), contrast)}); break;
      case Representation::C: set.entries.push_back({r, contrast}); break;
    }
  }
  return set;
}

}  // namespace glare
