#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "glare/dataset.hpp"
#include "glare/error.hpp"
#include "glare/image_io.hpp"
#include "glare/imgrep.hpp"

namespace glare {
namespace {

namespace fs = std::filesystem;

class TempDir : public ::testing::Test {
protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    root_ = fs::temp_directory_path() / (std::string("glare_ds_") + info->test_suite_name() + "_" + info->name());
    fs::remove_all(root_);
    fs::create_directories(root_ / "images");
    fs::create_directories(root_ / "masks");
  }
  void TearDown() override { fs::remove_all(root_); }

  void add(const std::string& id, int h = 16, int w = 16, const std::string& ext = ".png") {
    write_png(root_ / "images" / (id + ext), RgbImage(h, w, 0.5));
    write_mask_png(root_ / "masks" / (id + ".png"), BinaryMask(h, w, 1));
  }

  fs::path root_;
};

using DatasetScan = TempDir;

TEST_F(DatasetScan, PairsAreSortedById) {
  add("b");
  add("a");
  add("C");
  const DatasetManifest m = scan_dataset(root_, 16);
  ASSERT_EQ(m.entries.size(), 3u);
  EXPECT_EQ(m.entries[0].id, "C");  // byte-wise: uppercase first
  EXPECT_EQ(m.entries[1].id, "a");
  EXPECT_EQ(m.entries[2].id, "b");
  EXPECT_EQ(m.height, 16);
}

TEST_F(DatasetScan, OrphanIsNamed) {
  add("a");
  write_mask_png(root_ / "masks" / "lonely.png", BinaryMask(4, 4));
  try {
    scan_dataset(root_);
    FAIL() << "expected ValidationError";
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("lonely"), std::string::npos);
  }
}

TEST_F(DatasetScan, DuplicateIdAcrossExtensions) {
  add("a");
  write_png(root_ / "images" / "a.jpg", RgbImage(16, 16, 0.5));
  EXPECT_THROW(scan_dataset(root_), ValidationError);
}

TEST_F(DatasetScan, EmptyAndMissing) {
  try {
    scan_dataset(root_);
    FAIL() << "expected ValidationError";
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("no samples found"), std::string::npos);
  }
  EXPECT_THROW(scan_dataset(root_ / "nowhere"), InputError);
  fs::remove_all(root_ / "masks");
  EXPECT_THROW(scan_dataset(root_), InputError);
}

TEST_F(DatasetScan, ManifestOverride) {
  fs::create_directories(root_ / "raw");
  write_png(root_ / "raw" / "x.png", RgbImage(8, 8, 0.2));
  write_mask_png(root_ / "raw" / "x_gt.png", BinaryMask(8, 8));
  std::ofstream(root_ / "manifest.json")
      << R"({"resolution": 32, "pairs": [{"id": "x", "image": "raw/x.png", "mask": "raw/x_gt.png"}]})";
  const DatasetManifest m = scan_dataset(root_);
  ASSERT_EQ(m.entries.size(), 1u);
  EXPECT_EQ(m.height, 32);
  EXPECT_EQ(load_pair(m.entries[0], m.height, m.width).image.height(), 32);

  std::ofstream(root_ / "manifest.json") << R"({"pairs": [{"id": "x", "image": "raw/missing.png", "mask": "raw/x_gt.png"}]})";
  EXPECT_THROW(scan_dataset(root_), ValidationError);
}

using DatasetLoad = TempDir;

TEST_F(DatasetLoad, ResizesToTrainingResolution) {
  add("big", 512, 512);
  const DatasetManifest m = scan_dataset(root_);
  const SamplePair s = load_pair(m.entries[0], m.height, m.width);
  EXPECT_EQ(s.image.height(), 256);
  EXPECT_EQ(s.image.width(), 256);
  EXPECT_EQ(s.mask.height, 256);
  EXPECT_EQ(s.mask.count(), 256u * 256u);
}

TEST_F(DatasetLoad, MissingAndCorruptFiles) {
  EXPECT_THROW(read_rgb(root_ / "nothing.png"), InputError);
  std::ofstream(root_ / "junk.png") << "not an image";
  EXPECT_THROW(read_rgb(root_ / "junk.png"), DecodeError);
}

TEST_F(DatasetLoad, WriteScanLoadRoundTrip) {
  const auto samples = synthesize_glare(12, 3, 32);
  write_dataset(root_, samples);
  const DatasetManifest m = scan_dataset(root_, 32);
  ASSERT_EQ(m.entries.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) {
    const SamplePair s = load_pair(m.entries[i], 32, 32);
    EXPECT_EQ(s.id, samples[i].id);
    EXPECT_EQ(static_cast<const Raster&>(s.image), static_cast<const Raster&>(samples[i].image));
    EXPECT_EQ(s.mask, samples[i].mask);
  }
}

TEST(MaskFromGray, CutAt128) {
  Gray8 g{1, 5, {0, 100, 127, 128, 200}};
  const BinaryMask m = mask_from_gray(g);
  EXPECT_EQ(m.data, (std::vector<std::uint8_t>{0, 0, 0, 1, 1}));
  Gray8 binary{1, 2, {0, 255}};
  EXPECT_EQ(mask_from_gray(binary).data, (std::vector<std::uint8_t>{0, 1}));
}

TEST(ResizeNearest, KeepsMaskBinary) {
  BinaryMask m(7, 9);
  for (std::size_t i = 0; i < m.size(); i += 3) m.data[i] = 1;
  for (auto [h, w] : {std::pair{14, 18}, std::pair{3, 4}, std::pair{256, 256}}) {
    const BinaryMask r = resize_nearest(m, h, w);
    EXPECT_EQ(r.height, h);
    for (auto v : r.data) EXPECT_TRUE(v == 0 || v == 1);
  }
}

TEST(FloatPlanar, RoundTrip) {
  const fs::path p = fs::temp_directory_path() / "glare_planar_test.glrf";
  Raster r(3, 4, 2);
  for (std::size_t i = 0; i < r.size(); ++i) r.values()[i] = 0.25 * static_cast<double>(i);
  write_float_planar(p, r);
  EXPECT_EQ(read_float_planar(p), r);
  fs::remove(p);
}

TEST(Synthesize, DeterministicAndIndependentOfCount) {
  const auto a = synthesize_glare(42, 4, 64), b = synthesize_glare(42, 4, 64), c = synthesize_glare(42, 2, 64);
  for (int i = 0; i < 4; ++i) {
    EXPECT_EQ(static_cast<const Raster&>(a[i].image), static_cast<const Raster&>(b[i].image));
    EXPECT_EQ(a[i].mask, b[i].mask);
  }
  EXPECT_EQ(static_cast<const Raster&>(a[1].image), static_cast<const Raster&>(c[1].image));
  EXPECT_EQ(a[3].id, "synth_0003");
  EXPECT_FALSE(static_cast<const Raster&>(synthesize_glare(43, 1, 64)[0].image) == static_cast<const Raster&>(a[0].image));
}

TEST(Synthesize, GlareFractionWithinBounds) {
  for (const SamplePair& s : synthesize_glare(7, 64, 64)) {
    const double f = static_cast<double>(s.mask.count()) / static_cast<double>(s.mask.size());
    EXPECT_GE(f, 0.005) << s.id;
    EXPECT_LE(f, 0.30) << s.id;
  }
}

TEST(Synthesize, GlareIsBrightAndDesaturated) {
  const auto samples = synthesize_glare(7, 64, 64);
  int ok = 0;
  for (const SamplePair& s : samples) {
    const HsvImage hsv = rgb_to_hsv(s.image);
    double v_in = 0, v_out = 0, s_in = 0, s_out = 0;
    double n_in = 0, n_out = 0;
    for (std::size_t i = 0; i < s.mask.size(); ++i) {
      if (s.mask.data[i]) {
        v_in += hsv.plane(2)[i];
        s_in += hsv.plane(1)[i];
        ++n_in;
      } else {
        v_out += hsv.plane(2)[i];
        s_out += hsv.plane(1)[i];
        ++n_out;
      }
    }
    ok += v_in / n_in > v_out / n_out && s_in / n_in < s_out / n_out;
  }
  EXPECT_GE(ok, static_cast<int>(0.95 * samples.size()));
}

}  // namespace
}  // namespace glare
