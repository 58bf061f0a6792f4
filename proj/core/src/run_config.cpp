#include "glare/run_config.hpp"

#include <cstdio>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "glare/error.hpp"
#include "glare/rng.hpp"

namespace glare {

namespace {

using nlohmann::json;

void reject_unknown(const json& section, std::initializer_list<const char*> known, const std::string& where) {
  for (const auto& [key, _] : section.items()) {
    if (std::ranges::find_if(known, [&](const char* k) { return key == k; }) == known.end()) {
      throw ConfigError("unknown key '" + key + "' in " + where);
    }
  }
}

template <typename T>
void read(const json& section, const char* key, T& out, const std::string& where) {
  if (!section.contains(key)) return;
  try {
    out = section.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(where + "." + key + ": " + e.what());
  }
}

const json& object_or_empty(const json& root, const char* key) {
  static const json empty = json::object();
  if (!root.contains(key)) return empty;
  if (!root.at(key).is_object()) throw ConfigError(std::string("section '") + key + "' must be an object");
  return root.at(key);
}

}  // namespace

std::string RunConfig::to_json() const {
  nlohmann::ordered_json j;
  j["dataset"]["root"] = dataset_root.generic_string();
  j["dataset"]["resolution"] = resolution;
  if (use_synthetic) j["dataset"]["synthetic"] = {{"count", synthetic.count}, {"seed", synthetic.seed}};
  j["model"] = {{"depth", train.depth}, {"base_width", train.base_width}, {"convs_per_block", train.convs_per_block}};
  j["train"] = {{"combo", train.combo_id},
                {"optimizer", train.optimizer == OptimizerKind::Adam ? "adam" : "sgd"},
                {"learning_rate", train.learning_rate},
                {"epochs", train.epochs},
                {"steps", train.steps},
                {"batch_size", train.batch_size},
                {"seed", train.seed},
                {"folds", train.folds},
                {"contrast", {{"window", train.contrast.window_n}, {"window_m", train.contrast.window_m},
                              {"stride", train.contrast.stride_k}}}};
  j["ablation"]["combos"] = ablation_combos;
  return j.dump(2) + "\n";
}

std::string RunConfig::digest() const {
  const std::string text = to_json();
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(text)));
  return buf;
}

RunConfig parse_run_config(std::string_view json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("run config is not valid JSON: ") + e.what());
  }
  if (!root.is_object()) throw ConfigError("run config must be a JSON object");
  reject_unknown(root, {"dataset", "model", "train", "ablation"}, "run config");

  RunConfig cfg;
  const json& dataset = object_or_empty(root, "dataset");
  reject_unknown(dataset, {"root", "resolution", "synthetic"}, "dataset");
  std::string root_path;
  read(dataset, "root", root_path, "dataset");
  cfg.dataset_root = root_path;
  read(dataset, "resolution", cfg.resolution, "dataset");
  if (dataset.contains("synthetic")) {
    const json& synth = dataset.at("synthetic");
    reject_unknown(synth, {"count", "seed"}, "dataset.synthetic");
    cfg.use_synthetic = true;
    read(synth, "count", cfg.synthetic.count, "dataset.synthetic");
    read(synth, "seed", cfg.synthetic.seed, "dataset.synthetic");
  }

  const json& model = object_or_empty(root, "model");
  reject_unknown(model, {"depth", "base_width", "convs_per_block"}, "model");
  read(model, "depth", cfg.train.depth, "model");
  read(model, "base_width", cfg.train.base_width, "model");
  read(model, "convs_per_block", cfg.train.convs_per_block, "model");

  const json& train = object_or_empty(root, "train");
  reject_unknown(train,
                 {"combo", "optimizer", "learning_rate", "epochs", "steps", "batch_size", "seed", "folds", "jobs",
                  "contrast"},
                 "train");
  read(train, "combo", cfg.train.combo_id, "train");
  cfg.train.combo_id = canonical_combo(cfg.train.combo_id);
  std::string optimizer = "adam";
  read(train, "optimizer", optimizer, "train");
  if (optimizer == "adam") cfg.train.optimizer = OptimizerKind::Adam;
  else if (optimizer == "sgd") cfg.train.optimizer = OptimizerKind::Sgd;
  else throw ConfigError("train.optimizer must be 'adam' or 'sgd', got '" + optimizer + "'");
  read(train, "learning_rate", cfg.train.learning_rate, "train");
  read(train, "epochs", cfg.train.epochs, "train");
  read(train, "steps", cfg.train.steps, "train");
  read(train, "batch_size", cfg.train.batch_size, "train");
  read(train, "seed", cfg.train.seed, "train");
  read(train, "folds", cfg.train.folds, "train");
  read(train, "jobs", cfg.train.jobs, "train");
  if (train.contains("contrast")) {
    const json& c = train.at("contrast");
    reject_unknown(c, {"window", "window_m", "stride"}, "train.contrast");
    read(c, "window", cfg.train.contrast.window_n, "train.contrast");
    cfg.train.contrast.window_m = cfg.train.contrast.window_n;
    read(c, "window_m", cfg.train.contrast.window_m, "train.contrast");
    read(c, "stride", cfg.train.contrast.stride_k, "train.contrast");
  }

  const json& ablation = object_or_empty(root, "ablation");
  reject_unknown(ablation, {"combos"}, "ablation");
  read(ablation, "combos", cfg.ablation_combos, "ablation");
  for (auto& c : cfg.ablation_combos) c = canonical_combo(c);

  if (cfg.resolution < 1) throw ConfigError("dataset.resolution must be positive");
  if (cfg.use_synthetic && cfg.synthetic.count < 1) throw ConfigError("dataset.synthetic.count must be >= 1");
  cfg.train.validate();
  return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot read config " + path.string(), path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_run_config(ss.str());
}

std::vector<SamplePair> load_samples(const RunConfig& config) {
  if (!config.dataset_root.empty()) return load_all(scan_dataset(config.dataset_root, config.resolution));
  if (config.use_synthetic) return synthesize_glare(config.synthetic.seed, config.synthetic.count, config.resolution);
  throw ConfigError("run config names neither dataset.root nor dataset.synthetic");
}

}  // namespace glare
