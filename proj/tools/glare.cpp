// glare: command-line front end for representations, training, prediction,
// evaluation and ablation runs.
//
// Exit codes: 0 success, 1 runtime failure, 2 usage/config error or missing input.

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <nlohmann/json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "glare/ablation.hpp"
#include "glare/checkpoint.hpp"
#include "glare/dataset.hpp"
#include "glare/error.hpp"
#include "glare/evalkit.hpp"
#include "glare/image_io.hpp"
#include "glare/imgrep.hpp"
#include "glare/run_config.hpp"
#include "glare/threshold.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace glare;

namespace {

constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<int> jobs;
  std::string data;
  std::optional<int> resolution;
  std::optional<int> window;
  std::optional<int> stride;
};

RunConfig run_config(const Common& c) {
  RunConfig cfg = c.config.empty() ? RunConfig{} : load_run_config(c.config);
  if (c.seed) cfg.train.seed = *c.seed;
  if (c.jobs) cfg.train.jobs = *c.jobs;
  if (!c.data.empty()) cfg.dataset_root = c.data;
  if (c.resolution) cfg.resolution = *c.resolution;
  if (c.window) cfg.train.contrast.window_n = cfg.train.contrast.window_m = *c.window;
  if (c.stride) cfg.train.contrast.stride_k = *c.stride;
  cfg.train.contrast.validate();
  cfg.train.validate();
  return cfg;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path.string(), path.string());
  out << text;
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw InputError("cannot create directory " + dir.string() + ": " + ec.message(), dir.string());
}

std::string combo_of(const UNetConfig& cfg) {
  std::string id;
  for (const BranchSpec& b : cfg.branches) {
    if (!id.empty()) id += '+';
    id += to_string(b.rep);
  }
  return id;
}

json summary_json(const MetricSummary& s, const std::vector<std::string>& ids) {
  const auto ms = [](const MeanStd& m) { return json{{"mean", m.mean}, {"std", m.std}}; };
  json j{{"images", s.per_image.size()},
         {"precision", ms(s.precision)},
         {"recall", ms(s.recall)},
         {"f1", ms(s.f1)},
         {"accuracy", ms(s.accuracy)}};
  json per = json::array();
  for (std::size_t i = 0; i < s.per_image.size(); ++i) {
    const ImageMetrics& m = s.per_image[i];
    per.push_back({{"id", i < ids.size() ? ids[i] : std::to_string(i)},
                   {"precision", m.precision},
                   {"recall", m.recall},
                   {"f1", m.f1},
                   {"accuracy", m.accuracy}});
  }
  j["per_image"] = std::move(per);
  return j;
}

void print_summary(const MetricSummary& s) {
  std::printf("%-10s %8s %8s\n", "metric", "mean", "std");
  const std::pair<const char*, const MeanStd*> rows[] = {
      {"precision", &s.precision}, {"recall", &s.recall}, {"f1", &s.f1}, {"accuracy", &s.accuracy}};
  for (const auto& [name, m] : rows) std::printf("%-10s %8.4f %8.4f\n", name, m->mean, m->std);
  std::printf("%zu images\n", s.per_image.size());
}

// ------------------------------------------------------------------ represent

struct RepresentArgs {
  std::string input, combo, out;
  bool keep = false;
};

int represent(const Common& common, const RepresentArgs& a) {
  const RunConfig cfg = run_config(common);
  const RgbImage rgb = read_rgb(a.input);
  const ContrastParams& params = cfg.train.contrast;
  const PixelPlaneSet planes = build_plane_set(rgb, a.combo, params);
  ensure_dir(a.out);
  std::vector<fs::path> written;
  const auto emit = [&](const std::string& stem, const Raster& r, bool png) {
    const fs::path base = fs::path(a.out) / stem;
    if (png) {
      write_png(fs::path(base) += ".png", r);
      written.push_back(fs::path(base) += ".png");
    }
    write_float_planar(fs::path(base) += ".f32", r);
    written.push_back(fs::path(base) += ".f32");
  };
  for (const PlaneEntry& e : planes.entries) emit(std::string(e.name()), e.raster, true);
  if (a.keep) {
    const HsvImage hsv = rgb_to_hsv(rgb);
    emit("hue", channel(hsv, 0), true);
    emit("saturation", channel(hsv, 1), true);
    emit("value", channel(hsv, 2), true);
    const ScalarMap l = luminance_from_hsv(hsv);
    emit("luminance", l, false);
    emit("contrast", contrast_map_strided(l, params), false);
  }
  for (const fs::path& p : written) std::cout << p.string() << '\n';
  return 0;
}

// ------------------------------------------------------------------ synth

struct SynthArgs {
  std::string out;
  int count = 64;
};

int synth(const Common& common, const SynthArgs& a) {
  const std::uint64_t seed = common.seed.value_or(7);
  const int resolution = common.resolution.value_or(256);
  const auto samples = synthesize_glare(seed, a.count, resolution);
  write_dataset(a.out, samples);
  std::cout << "wrote " << samples.size() << " samples (" << resolution << "x" << resolution << ", seed " << seed
            << ") to " << a.out << '\n';
  return 0;
}

// ------------------------------------------------------------------ validate-data

int validate_data(const Common& common) {
  const RunConfig cfg = run_config(common);
  if (cfg.dataset_root.empty()) throw ConfigError("validate-data needs --data or dataset.root in the config");
  const DatasetManifest manifest = scan_dataset(cfg.dataset_root, cfg.resolution);
  std::size_t glare_pixels = 0, pixels = 0;
  for (const ManifestEntry& e : manifest.entries) {
    const SamplePair s = load_pair(e, manifest.height, manifest.width);
    glare_pixels += s.mask.count();
    pixels += s.mask.size();
  }
  std::printf("%zu pairs OK at %dx%d, glare fraction %.4f\n", manifest.entries.size(), manifest.height,
              manifest.width, pixels ? static_cast<double>(glare_pixels) / static_cast<double>(pixels) : 0.0);
  return 0;
}

// ------------------------------------------------------------------ train

struct TrainArgs {
  std::string out, combo;
};

int train(const Common& common, const TrainArgs& a) {
  RunConfig cfg = run_config(common);
  if (!a.combo.empty()) cfg.train.combo_id = canonical_combo(a.combo);
  const auto samples = load_samples(cfg);
  const auto prepared = prepare_samples(samples, cfg.train);
  std::vector<const PreparedSample*> all;
  for (const auto& p : prepared) all.push_back(&p);

  ensure_dir(a.out);
  const TrainResult r = train_fold(cfg.train, all);
  save_checkpoint(r.model, fs::path(a.out) / "model.ckpt");
  std::string csv = "step,loss\n";
  char line[64];
  for (std::size_t i = 0; i < r.loss_curve.size(); ++i) {
    std::snprintf(line, sizeof line, "%zu,%.9g\n", i, r.loss_curve[i]);
    csv += line;
  }
  write_text(fs::path(a.out) / "loss.csv", csv);
  write_text(fs::path(a.out) / "config.json", cfg.to_json());
  std::printf("trained %s on %zu samples, %zu steps, final loss %.6g\n", cfg.train.combo_id.c_str(), samples.size(),
              r.loss_curve.size(), r.loss_curve.empty() ? 0.0 : r.loss_curve.back());
  return 0;
}

// ------------------------------------------------------------------ predict

struct PredictArgs {
  std::string model, input, out;
};

int predict(const Common& common, const PredictArgs& a) {
  const RunConfig cfg = run_config(common);
  const nn::Model<float> model = load_checkpoint(a.model);
  RgbImage rgb = read_rgb(a.input);
  if (common.resolution) rgb = resize_bilinear(rgb, *common.resolution, *common.resolution);

  TrainConfig tc = cfg.train;
  tc.combo_id = combo_of(model.config);
  const SamplePair sample{fs::path(a.input).stem().string(), rgb, BinaryMask(rgb.height(), rgb.width())};
  const auto prepared = prepare_samples(std::span(&sample, 1), tc);
  const ScalarMap prob = predict_probability(model, prepared.front());

  ensure_dir(a.out);
  const fs::path prob_path = fs::path(a.out) / (sample.id + "_prob.png");
  const fs::path mask_path = fs::path(a.out) / (sample.id + "_mask.png");
  write_png(prob_path, prob);
  write_mask_png(mask_path, segment_glare(prob));
  std::cout << prob_path.string() << '\n' << mask_path.string() << '\n';
  return 0;
}

// ------------------------------------------------------------------ eval

struct EvalArgs {
  std::string model, pred_dir, truth_dir, out = "eval.json";
};

// Oracle mode: <truth_dir>/<id>.png against <pred_dir>/<id>.png, no model involved.
MetricSummary eval_directories(const EvalArgs& a, std::vector<std::string>& ids) {
  if (!fs::is_directory(a.truth_dir)) throw InputError("not a directory: " + a.truth_dir, a.truth_dir);
  if (!fs::is_directory(a.pred_dir)) throw InputError("not a directory: " + a.pred_dir, a.pred_dir);
  std::vector<fs::path> truth_files;
  for (const auto& e : fs::directory_iterator(a.truth_dir))
    if (e.is_regular_file() && e.path().extension() == ".png") truth_files.push_back(e.path());
  std::ranges::sort(truth_files);
  if (truth_files.empty()) throw ValidationError("no .png masks in " + a.truth_dir);
  std::vector<BinaryMask> predicted, truth;
  for (const fs::path& t : truth_files) {
    const fs::path p = fs::path(a.pred_dir) / t.filename();
    if (!fs::exists(p)) throw InputError("missing prediction " + p.string(), p.string());
    truth.push_back(mask_from_gray(read_gray8(t)));
    predicted.push_back(mask_from_gray(read_gray8(p)));
    if (predicted.back().height != truth.back().height || predicted.back().width != truth.back().width)
      throw ValidationError("size mismatch between " + p.string() + " and " + t.string());
    ids.push_back(t.stem().string());
  }
  return evaluate_masks(predicted, truth);
}

int eval(const Common& common, const EvalArgs& a) {
  std::vector<std::string> ids;
  MetricSummary s;
  if (!a.pred_dir.empty() || !a.truth_dir.empty()) {
    if (a.pred_dir.empty() || a.truth_dir.empty())
      throw ConfigError("oracle mode needs both --pred-dir and --truth-dir");
    s = eval_directories(a, ids);
  } else {
    if (a.model.empty()) throw ConfigError("eval needs --model, or --pred-dir with --truth-dir");
    const RunConfig cfg = run_config(common);
    const nn::Model<float> model = load_checkpoint(a.model);
    TrainConfig tc = cfg.train;
    tc.combo_id = combo_of(model.config);
    const auto samples = load_samples(cfg);
    const auto prepared = prepare_samples(samples, tc);
    std::vector<const PreparedSample*> all;
    for (const auto& p : prepared) {
      all.push_back(&p);
      ids.push_back(p.id);
    }
    s = evaluate(model, all);
  }
  print_summary(s);
  write_text(a.out, summary_json(s, ids).dump(2) + "\n");
  return 0;
}

// ------------------------------------------------------------------ ablate

struct AblateArgs {
  std::string out;
  std::vector<std::string> combos;
  bool timing = false;
};

int ablate(const Common& common, const AblateArgs& a) {
  const RunConfig cfg = run_config(common);
  const std::vector<std::string>& combos = a.combos.empty() ? cfg.ablation_combos : a.combos;
  const auto samples = load_samples(cfg);
  AblationReport report = run_ablation(cfg.train, samples, combos);
  report.config_digest = cfg.digest();
  ensure_dir(a.out);
  const std::string csv = report_csv(report);
  write_text(fs::path(a.out) / "ablation.csv", csv);
  write_text(fs::path(a.out) / "ablation.json", report_json(report, a.timing));
  std::cout << csv;
  if (a.timing) std::printf("wall time %.1f s\n", report.wall_seconds);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Glare segmentation with multi-representation U-Nets."};
  app.require_subcommand(1, 1);
  app.fallthrough();

  Common common;
  app.add_option("--config", common.config, "Run config JSON")->check(CLI::ExistingFile);
  app.add_option("--seed", common.seed, "Training seed (synth: corpus seed)");
  app.add_option("--jobs", common.jobs, "Worker threads for folds")->check(CLI::PositiveNumber);
  app.add_option("--data", common.data, "Dataset root (overrides dataset.root)");
  app.add_option("--resolution", common.resolution, "Square working resolution")->check(CLI::PositiveNumber);
  app.add_option("--window", common.window, "Contrast window side (odd)");
  app.add_option("--stride", common.stride, "Contrast lattice stride");

  RepresentArgs rep;
  CLI::App* represent_cmd = app.add_subcommand("represent", "Write the representation planes of one image");
  represent_cmd->add_option("--input", rep.input, "Input PNG/JPEG")->required();
  represent_cmd->add_option("--combo", rep.combo, "Representation combo, e.g. RGB+G")->required();
  represent_cmd->add_option("--out", rep.out, "Output directory")->required();
  represent_cmd->add_flag("--keep-intermediates", rep.keep, "Also write hue/saturation/value, luminance and contrast");

  TrainArgs tr;
  CLI::App* train_cmd = app.add_subcommand("train", "Train one model on the whole dataset");
  train_cmd->add_option("--out", tr.out, "Output directory")->required();
  train_cmd->add_option("--combo", tr.combo, "Override train.combo");

  PredictArgs pr;
  CLI::App* predict_cmd = app.add_subcommand("predict", "Probability map and Otsu mask for one image");
  predict_cmd->add_option("--model", pr.model, "Checkpoint")->required();
  predict_cmd->add_option("--input", pr.input, "Input PNG/JPEG")->required();
  predict_cmd->add_option("--out", pr.out, "Output directory")->required();

  EvalArgs ev;
  CLI::App* eval_cmd = app.add_subcommand("eval", "Metric summary for a model, or for two mask directories");
  eval_cmd->add_option("--model", ev.model, "Checkpoint to evaluate on the configured dataset");
  eval_cmd->add_option("--pred-dir", ev.pred_dir, "Predicted masks (oracle mode)");
  eval_cmd->add_option("--truth-dir", ev.truth_dir, "Ground-truth masks (oracle mode)");
  eval_cmd->add_option("--out", ev.out, "JSON output path")->capture_default_str();

  AblateArgs ab;
  CLI::App* ablate_cmd = app.add_subcommand("ablate", "Cross-validated report over representation combos");
  ablate_cmd->add_option("--out", ab.out, "Output directory")->required();
  ablate_cmd->add_option("--combos", ab.combos, "Comma-separated subset (default: config or all 14)")->delimiter(',');
  ablate_cmd->add_flag("--timing", ab.timing, "Include wall time in the JSON report");

  SynthArgs sy;
  CLI::App* synth_cmd = app.add_subcommand("synth", "Write a synthetic glare dataset");
  synth_cmd->add_option("--out", sy.out, "Dataset root to create")->required();
  synth_cmd->add_option("--count", sy.count, "Number of samples")->capture_default_str()->check(CLI::PositiveNumber);

  CLI::App* validate_cmd = app.add_subcommand("validate-data", "Check a dataset root for pairing and decode errors");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : kExitUsage;
  }

  try {
    if (*represent_cmd) return represent(common, rep);
    if (*train_cmd) return train(common, tr);
    if (*predict_cmd) return predict(common, pr);
    if (*eval_cmd) return eval(common, ev);
    if (*ablate_cmd) return ablate(common, ab);
    if (*synth_cmd) return synth(common, sy);
    if (*validate_cmd) return validate_data(common);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const InputError& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitUsage;
}
