#include <gtest/gtest.h>

#include <cmath>

#include "glare/dataset.hpp"
#include "glare/error.hpp"
#include "glare/imgrep.hpp"
#include "oracles.hpp"
#include "tolerances.hpp"

namespace glare {
namespace {

RgbImage pixel(double r, double g, double b) {
  RgbImage img(1, 1);
  img.at(0, 0, 0) = r;
  img.at(1, 0, 0) = g;
  img.at(2, 0, 0) = b;
  return img;
}

TEST(RgbToHsv, PrimaryAndGrayPixels) {
  const HsvImage red = rgb_to_hsv(pixel(1, 0, 0));
  EXPECT_DOUBLE_EQ(red.at(0, 0, 0), 0.0);
  EXPECT_DOUBLE_EQ(red.at(1, 0, 0), 1.0);
  EXPECT_DOUBLE_EQ(red.at(2, 0, 0), 1.0);

  const HsvImage gray = rgb_to_hsv(pixel(0.5, 0.5, 0.5));
  EXPECT_DOUBLE_EQ(gray.at(0, 0, 0), 0.0);
  EXPECT_DOUBLE_EQ(gray.at(1, 0, 0), 0.0);
  EXPECT_DOUBLE_EQ(gray.at(2, 0, 0), 0.5);

  const HsvImage blue = rgb_to_hsv(pixel(0, 0, 1));
  EXPECT_DOUBLE_EQ(blue.at(0, 0, 0), 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(blue.at(1, 0, 0), 1.0);
  EXPECT_DOUBLE_EQ(blue.at(2, 0, 0), 1.0);
}

TEST(RgbToHsv, InverseRoundTripForChromaticPixels) {
  Rng rng(11);
  RgbImage img(64, 64);
  for (double& v : img.values()) v = rng.uniform();
  const HsvImage hsv = rgb_to_hsv(img);
  for (double v : hsv.values()) {
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, 1.0);
  }
  const RgbImage back = hsv_to_rgb(hsv);
  for (int y = 0; y < 64; ++y)
    for (int x = 0; x < 64; ++x) {
      if (hsv.at(1, y, x) <= 0.0) continue;
      for (int c = 0; c < 3; ++c) EXPECT_NEAR(back.at(c, y, x), img.at(c, y, x), 1e-6);
    }
}

TEST(Luminance, GoldenValues) {
  ScalarMap v(1, 4);
  v.at(0, 0, 0) = 0;
  v.at(0, 0, 1) = 255;
  v.at(0, 0, 2) = 128;
  v.at(0, 0, 3) = 129;
  const ScalarMap l = luminance(v);
  EXPECT_EQ(l.at(0, 0, 0), 0.0);
  // (0.02874 * 255)^2.2 evaluated with 40-digit arithmetic.
  constexpr double kL255 = 79.99434326767183927901250190590811820222;
  EXPECT_NEAR(l.at(0, 0, 1), kL255, 1e-12 * kL255);
  EXPECT_LT(l.at(0, 0, 2), l.at(0, 0, 3));
}

TEST(ContrastMap, ConstantInputIsZero) {
  for (double value : {0.0, 3.5, 80.0, 1234.5}) {
    const ScalarMap l(20, 23, value);
    for (int stride : {1, 3, 4}) {
      ContrastParams p;
      p.stride_k = stride;
      for (const auto held = contrast_map(l, p); double v : held.values()) EXPECT_EQ(v, 0.0);
      for (const auto held = contrast_map_strided(l, p); double v : held.values()) EXPECT_EQ(v, 0.0);
    }
  }
}

TEST(ContrastMap, SingleBrightPixelCenter) {
  ScalarMap l(17, 17, 0.0);
  l.at(0, 8, 8) = 80.0;
  const ContrastParams p;
  const double got = contrast_map(l, p).at(0, 8, 8);
  // mean 80/289 is under the floor of 10; std = 80/17, so the value is 8/17.
  EXPECT_NEAR(got, 8.0 / 17.0, 1e-12);
  EXPECT_NEAR(got, oracle::brute_contrast(l, 17, 17).at(0, 8, 8), 1e-12);
}

TEST(ContrastMap, MatchesTwoPassOracle) {
  Rng rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    const ScalarMap l = oracle::random_map(rng, 32, 32, 0.0, 90.0);
    ContrastParams p;
    const ScalarMap got = contrast_map(l, p);
    const ScalarMap want = oracle::brute_contrast(l, p.window_n, p.window_m);
    for (std::size_t i = 0; i < got.size(); ++i) {
      EXPECT_NEAR(got.values()[i], want.values()[i], tol::kContrastOracleRel * std::abs(want.values()[i]));
      EXPECT_GE(got.values()[i], 0.0);
    }
  }
}

TEST(ContrastMap, NonSquareWindowAndBorders) {
  Rng rng(6);
  const ScalarMap l = oracle::random_map(rng, 9, 40, 0.0, 50.0);
  ContrastParams p;
  p.window_n = 5;
  p.window_m = 11;
  const ScalarMap got = contrast_map(l, p);
  const ScalarMap want = oracle::brute_contrast(l, 5, 11);
  for (std::size_t i = 0; i < got.size(); ++i) {
    EXPECT_NEAR(got.values()[i], want.values()[i], tol::kContrastOracleRel * std::abs(want.values()[i]));
  }
}

TEST(ContrastMap, StdIsHomogeneousInScale) {
  // With a negligible floor, I_C = std / mean, and scaling L by c scales both.
  Rng rng(7);
  ContrastParams p;
  p.luminance_floor = 1e-300;
  for (int trial = 0; trial < 5; ++trial) {
    const ScalarMap l = oracle::random_map(rng, 32, 32, 1.0, 100.0);
    const double c = rng.uniform(0.1, 10.0);
    ScalarMap scaled = l;
    for (double& v : scaled.values()) v *= c;
    const ScalarMap a = contrast_map(l, p), b = contrast_map(scaled, p);
    for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(a.values()[i], b.values()[i], 1e-9 * a.values()[i]);
  }
}

TEST(ContrastMap, RejectsTinyImagesAndBadParams) {
  EXPECT_THROW(contrast_map(ScalarMap(1, 1), ContrastParams{}), ConfigError);
  EXPECT_NO_THROW(contrast_map(ScalarMap(1, 2), ContrastParams{}));
  ContrastParams even;
  even.window_n = 16;
  EXPECT_THROW(contrast_map(ScalarMap(8, 8), even), ConfigError);
  ContrastParams small;
  small.window_m = 1;
  EXPECT_THROW(contrast_map(ScalarMap(8, 8), small), ConfigError);
  ContrastParams zero_stride;
  zero_stride.stride_k = 0;
  EXPECT_THROW(contrast_map_strided(ScalarMap(8, 8), zero_stride), ConfigError);
}

TEST(ContrastMapStrided, StrideOneIsExact) {
  Rng rng(8);
  const ScalarMap l = oracle::random_map(rng, 37, 29, 0.0, 80.0);
  ContrastParams p;
  p.stride_k = 1;
  EXPECT_EQ(contrast_map_strided(l, p), contrast_map(l, p));
}

TEST(ContrastMapStrided, LatticePointsAreExact) {
  Rng rng(9);
  const ScalarMap l = oracle::random_map(rng, 30, 30, 0.0, 80.0);
  ContrastParams p;
  p.stride_k = 4;
  const ScalarMap full = contrast_map(l, p), strided = contrast_map_strided(l, p);
  for (int y : {0, 4, 8, 28, 29})
    for (int x : {0, 12, 28, 29}) EXPECT_EQ(strided.at(0, y, x), full.at(0, y, x)) << y << "," << x;
}

TEST(ContrastMapStrided, Stride4CloseToFullOnSyntheticImages) {
  ContrastParams p;
  p.stride_k = 4;
  double worst = 0.0, total = 0.0;
  std::size_t count = 0;
  for (const SamplePair& s : synthesize_glare(21, 16, 128)) {
    const ScalarMap l = luminance_from_hsv(rgb_to_hsv(s.image));
    const ScalarMap full = contrast_map(l, p), strided = contrast_map_strided(l, p);
    for (std::size_t i = 0; i < full.size(); ++i) {
      const double d = std::abs(full.values()[i] - strided.values()[i]);
      worst = std::max(worst, d);
      total += d;
      ++count;
    }
  }
  EXPECT_LT(worst, tol::kStride4MaxAbs);
  EXPECT_LT(total / static_cast<double>(count), tol::kStride4MeanAbs);
}

TEST(Rescale, AffineAndDegenerate) {
  Raster r(1, 3, 1);
  r.at(0, 0, 0) = 2;
  r.at(0, 0, 1) = 4;
  r.at(0, 0, 2) = 6;
  const Raster out = rescale(r);
  EXPECT_DOUBLE_EQ(out.at(0, 0, 0), 0.0);
  EXPECT_DOUBLE_EQ(out.at(0, 0, 1), 0.5);
  EXPECT_DOUBLE_EQ(out.at(0, 0, 2), 1.0);

  for (const auto held = rescale(Raster(4, 4, 3, 0.7)); double v : held.values()) EXPECT_EQ(v, 0.0);
}

TEST(Rescale, RangeAndIdempotence) {
  Rng rng(10);
  for (int trial = 0; trial < 20; ++trial) {
    Raster r(8, 9, 3);
    for (double& v : r.values()) v = rng.uniform(-50, 50);
    const Raster once = rescale(r);
    const auto [lo, hi] = std::ranges::minmax(once.values());
    EXPECT_EQ(lo, 0.0);
    EXPECT_EQ(hi, 1.0);
    const Raster twice = rescale(once);
    for (std::size_t i = 0; i < once.size(); ++i) EXPECT_NEAR(twice.values()[i], once.values()[i], 1e-15);
  }
}

TEST(PhotometricMap, SaturatedPixelsVanishAndWhiteLowContrastPeaks) {
  RgbImage rgb(4, 4, 0.2);
  ScalarMap s(4, 4, 1.0), c(4, 4, 0.5);
  // (0,0) fully saturated bright red, (3,3) white with no saturation or contrast.
  rgb.at(0, 0, 0) = 1.0;
  rgb.at(0, 3, 3) = rgb.at(1, 3, 3) = rgb.at(2, 3, 3) = 1.0;
  s.at(0, 3, 3) = 0.0;
  c.at(0, 3, 3) = 0.0;
  s.at(0, 1, 1) = 0.5;  // something in between keeps the image non-constant
  const PhotometricMap g = photometric_map(rgb, s, c);
  for (int ch = 0; ch < 3; ++ch) {
    EXPECT_EQ(g.at(ch, 0, 0), 0.0);
    EXPECT_EQ(g.at(ch, 3, 3), 1.0);
  }
  for (double v : g.values()) {
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, 1.0);
  }
}

TEST(PhotometricMap, ContrastAboveOneIsClamped) {
  RgbImage rgb(1, 2, 1.0);
  ScalarMap s(1, 2, 0.0), c(1, 2);
  c.at(0, 0, 0) = 3.0;  // would flip the sign without clamping
  c.at(0, 0, 1) = 0.0;
  const PhotometricMap g = photometric_map(rgb, s, c);
  EXPECT_EQ(g.at(0, 0, 0), 0.0);
  EXPECT_EQ(g.at(0, 0, 1), 1.0);
}

TEST(PhotometricMap, GlareRegionsAreBrighterOnSyntheticSamples) {
  int brighter = 0;
  const auto samples = synthesize_glare(3, 12, 96);
  for (const SamplePair& s : samples) {
    const PixelPlaneSet set = build_plane_set(s.image, "G", ContrastParams{});
    const Raster& g = set.entries.front().raster;
    double in = 0, out = 0;
    std::size_t n_in = 0, n_out = 0;
    for (int c = 0; c < 3; ++c)
      for (std::size_t i = 0; i < g.plane_size(); ++i) {
        (s.mask.data[i] ? in : out) += g.plane(c)[i];
        ++(s.mask.data[i] ? n_in : n_out);
      }
    brighter += in / n_in > out / n_out;
  }
  EXPECT_EQ(brighter, static_cast<int>(samples.size()));
}

TEST(Combos, TableOrderAndParsing) {
  EXPECT_EQ(table_combos().size(), 14u);
  EXPECT_EQ(table_combos().front(), "C");
  EXPECT_EQ(table_combos().back(), "RGB+HSV+G+C");
  EXPECT_EQ(canonical_combo("G&RGB"), "RGB+G");
  EXPECT_EQ(canonical_combo("hsv + g"), "G+HSV");
  EXPECT_EQ(canonical_combo("I_C&I_HSV"), "C+HSV");
  EXPECT_THROW(canonical_combo("G+C"), ConfigError);  // not one of the 14
  EXPECT_THROW(canonical_combo("RGB+XYZ"), ConfigError);
  EXPECT_THROW(canonical_combo("RGB+RGB"), ConfigError);
  EXPECT_THROW(canonical_combo(""), ConfigError);
  const auto reps = parse_combo("C+RGB+G+HSV");
  ASSERT_EQ(reps.size(), 4u);
  EXPECT_EQ(reps[0], Representation::RGB);
  EXPECT_EQ(reps[1], Representation::HSV);
  EXPECT_EQ(reps[2], Representation::G);
  EXPECT_EQ(reps[3], Representation::C);
}

TEST(BuildPlaneSet, ChannelCountsAndComposition) {
  const SamplePair s = synthesize_glare(1, 1, 48).front();
  const ContrastParams p;

  const PixelPlaneSet c = build_plane_set(s.image, "C", p);
  ASSERT_EQ(c.entries.size(), 1u);
  EXPECT_EQ(c.entries[0].raster.channels(), 1);

  const PixelPlaneSet all = build_plane_set(s.image, "RGB+HSV+G+C", p);
  ASSERT_EQ(all.entries.size(), 4u);
  EXPECT_EQ(all.total_channels(), 10);
  EXPECT_EQ(all.entries[0].name(), "RGB");
  EXPECT_EQ(all.entries[1].name(), "HSV");
  EXPECT_EQ(all.entries[2].name(), "G");
  EXPECT_EQ(all.entries[3].name(), "C");

  const PixelPlaneSet rg = build_plane_set(s.image, "RGB+G", p);
  ASSERT_EQ(rg.entries.size(), 2u);
  const HsvImage hsv = rgb_to_hsv(s.image);
  const ScalarMap contrast = contrast_map_strided(luminance_from_hsv(hsv), p);
  EXPECT_EQ(rg.entries[1].raster, static_cast<const Raster&>(photometric_map(s.image, channel(hsv, 1), contrast)));
  EXPECT_EQ(rg.entries[0].raster, static_cast<const Raster&>(s.image));

  EXPECT_THROW(build_plane_set(s.image, "RGB+Lab", p), ConfigError);
}

TEST(BuildPlaneSet, Deterministic) {
  const SamplePair s = synthesize_glare(2, 1, 32).front();
  const PixelPlaneSet a = build_plane_set(s.image, "RGB+HSV+G+C", ContrastParams{});
  const PixelPlaneSet b = build_plane_set(s.image, "RGB+HSV+G+C", ContrastParams{});
  ASSERT_EQ(a.entries.size(), b.entries.size());
  for (std::size_t i = 0; i < a.entries.size(); ++i) EXPECT_EQ(a.entries[i].raster, b.entries[i].raster);
}

}  // namespace
}  // namespace glare
