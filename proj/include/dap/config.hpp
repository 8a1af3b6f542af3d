#pragma once

// Declarative pipeline configuration. Every constant has a default, so a
// minimal config names only the input files and the grid; parse(render(c))
// reproduces c exactly.

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "dap/ablate.hpp"
#include "dap/dedup.hpp"
#include "dap/models.hpp"
#include "dap/split.hpp"
#include "dap/synth.hpp"
#include "dap/train.hpp"

namespace dap {

struct ModelConfig {
  std::string type = "dap";  // dap | dap-noembed | dnn | logreg
  int embedding_dim = 128;
  int lstm_layers = 2;
  int lstm_hidden = 128;
  int branch_dense = 128;
  std::vector<int> head_sizes = {512, 256, 64, 2};
  std::string penalty = "none";  // logreg only: none | l1 | l2
  double lambda = 0.0;

  friend bool operator==(const ModelConfig&, const ModelConfig&) = default;
};

struct PipelineConfig {
  std::string city = "city";
  GridSpec grid;
  int interval_minutes = 15;
  int window_intervals = 8;
  int utc_offset_minutes = 0;

  std::string events_path;
  std::string events_format = "csv";  // csv | jsonl
  std::string weather_path;
  std::string poi_path;
  std::string word_vectors_path;
  std::string events_history_path;  // optional Desc2Vec history source

  DedupParams dedup;
  std::string thresholds_mode = "default";  // default | calibrate | file
  std::string thresholds_file;
  SplitParams split;
  double negative_keep_prob = 0.02;
  std::uint64_t sampling_seed = 1;

  ModelConfig model;
  TrainConfig train;
  std::vector<std::string> ablation_scenarios;  // e.g. "only-one:traffic"

  std::optional<SynthScenario> synth;
  std::string out_dir = "out";

  friend bool operator==(const PipelineConfig&, const PipelineConfig&) = default;

  void validate() const {
    grid.validate();
    if (interval_minutes != 15)
      fail(Errc::config, "interval_minutes: only 15-minute intervals are supported");
    if (window_intervals < 1 || window_intervals > 96)
      fail(Errc::config, "window_intervals: must be in [1, 96]");
    if (!(negative_keep_prob > 0.0) || negative_keep_prob > 1.0)
      fail(Errc::config, "sampling.negative_keep_prob: must be in (0, 1]");
    if (model.type != "dap" && model.type != "dap-noembed" && model.type != "dnn" &&
        model.type != "logreg")
      fail(Errc::config, "model.type: unknown type '" + model.type + "'");
    if (model.penalty != "none" && model.penalty != "l1" && model.penalty != "l2")
      fail(Errc::config, "model.penalty: unknown penalty '" + model.penalty + "'");
    if (model.lambda < 0.0) fail(Errc::config, "model.lambda: must be >= 0");
    if (thresholds_mode != "default" && thresholds_mode != "calibrate" &&
        thresholds_mode != "file")
      fail(Errc::config, "thresholds.mode: unknown mode '" + thresholds_mode + "'");
    if (thresholds_mode == "file" && thresholds_file.empty())
      fail(Errc::config, "thresholds.file: required when thresholds.mode is 'file'");
    if (!(dedup.dist_threshold_m > 0) || !(dedup.time_threshold_min > 0))
      fail(Errc::config, "dedup: thresholds must be > 0");
    if (!(split.train_weeks > 0) || !(split.test_weeks > 0))
      fail(Errc::config, "split: week counts must be > 0");
    if (split.val_fraction < 0.0 || split.val_fraction >= 1.0)
      fail(Errc::config, "split.val_fraction: must be in [0, 1)");
    train.validate();
    if (events_format != "csv" && events_format != "jsonl")
      fail(Errc::config, "paths.events_format: must be csv or jsonl");
  }
};

namespace configdetail {

template <typename T>
T field_or(const nlohmann::json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    fail(Errc::config, std::string("config field '") + key + "' has the wrong type");
  }
}

}  // namespace configdetail

inline nlohmann::json config_to_json(const PipelineConfig& c) {
  nlohmann::json j;
  j["city"] = c.city;
  j["grid"] = {{"anchor_lat", c.grid.anchor.lat},
               {"anchor_lng", c.grid.anchor.lng},
               {"cell_size_m", c.grid.cell_size_m},
               {"rows", c.grid.rows},
               {"cols", c.grid.cols}};
  j["interval_minutes"] = c.interval_minutes;
  j["window_intervals"] = c.window_intervals;
  j["utc_offset_minutes"] = c.utc_offset_minutes;
  j["paths"] = {{"events", c.events_path},
                {"events_format", c.events_format},
                {"weather", c.weather_path},
                {"poi", c.poi_path},
                {"word_vectors", c.word_vectors_path},
                {"events_history", c.events_history_path}};
  j["dedup"] = {{"distance_m", c.dedup.dist_threshold_m},
                {"time_minutes", c.dedup.time_threshold_min}};
  j["thresholds"] = {{"mode", c.thresholds_mode}, {"file", c.thresholds_file}};
  j["split"] = {{"train_weeks", c.split.train_weeks},
                {"test_weeks", c.split.test_weeks},
                {"val_fraction", c.split.val_fraction}};
  j["sampling"] = {{"negative_keep_prob", c.negative_keep_prob}, {"seed", c.sampling_seed}};
  j["model"] = {{"type", c.model.type},
                {"embedding_dim", c.model.embedding_dim},
                {"lstm_layers", c.model.lstm_layers},
                {"lstm_hidden", c.model.lstm_hidden},
                {"branch_dense", c.model.branch_dense},
                {"head_sizes", c.model.head_sizes},
                {"penalty", c.model.penalty},
                {"lambda", c.model.lambda}};
  j["train"] = {{"epochs", c.train.epochs},
                {"patience", c.train.patience},
                {"min_delta", c.train.min_delta},
                {"lr", c.train.lr},
                {"batch_size", c.train.batch_size},
                {"seeds", c.train.seeds}};
  j["ablation_scenarios"] = c.ablation_scenarios;
  if (c.synth) {
    const SynthScenario& s = *c.synth;
    j["synth"] = {{"city", s.city},
                  {"anchor_lat", s.anchor.lat},
                  {"anchor_lng", s.anchor.lng},
                  {"rows", s.rows},
                  {"cols", s.cols},
                  {"cell_size_m", s.cell_size_m},
                  {"start_time", format_time(s.start_time)},
                  {"weeks", s.weeks},
                  {"utc_offset_minutes", s.utc_offset_minutes},
                  {"junction_region_fraction", s.junction_region_fraction},
                  {"congestion_burst_prob", s.congestion_burst_prob},
                  {"side_event_prob", s.side_event_prob},
                  {"n_stations", s.n_stations},
                  {"weather_report_minutes", s.weather_report_minutes},
                  {"weather_missing_prob", s.weather_missing_prob},
                  {"planted_duplicates", s.planted_duplicates},
                  {"rule",
                   {{"congestion_threshold", s.rule.congestion_threshold},
                    {"require_junction", s.rule.require_junction},
                    {"require_rush_hour", s.rule.require_rush_hour},
                    {"noise", s.rule.noise}}},
                  {"seed", s.seed}};
  }
  j["out_dir"] = c.out_dir;
  return j;
}

inline PipelineConfig config_from_json(const nlohmann::json& j) {
  using configdetail::field_or;
  PipelineConfig c;
  c.city = field_or<std::string>(j, "city", c.city);
  if (j.contains("grid")) {
    const auto& g = j.at("grid");
    c.grid.anchor.lat = field_or<double>(g, "anchor_lat", 0.0);
    c.grid.anchor.lng = field_or<double>(g, "anchor_lng", 0.0);
    c.grid.cell_size_m = field_or<double>(g, "cell_size_m", 5000.0);
    c.grid.rows = field_or<int>(g, "rows", 1);
    c.grid.cols = field_or<int>(g, "cols", 1);
  }
  c.interval_minutes = field_or<int>(j, "interval_minutes", c.interval_minutes);
  c.window_intervals = field_or<int>(j, "window_intervals", c.window_intervals);
  c.utc_offset_minutes = field_or<int>(j, "utc_offset_minutes", c.utc_offset_minutes);
  if (j.contains("paths")) {
    const auto& p = j.at("paths");
    c.events_path = field_or<std::string>(p, "events", "");
    c.events_format = field_or<std::string>(p, "events_format", "csv");
    c.weather_path = field_or<std::string>(p, "weather", "");
    c.poi_path = field_or<std::string>(p, "poi", "");
    c.word_vectors_path = field_or<std::string>(p, "word_vectors", "");
    c.events_history_path = field_or<std::string>(p, "events_history", "");
  }
  if (j.contains("dedup")) {
    c.dedup.dist_threshold_m = field_or<double>(j.at("dedup"), "distance_m", 250.0);
    c.dedup.time_threshold_min = field_or<double>(j.at("dedup"), "time_minutes", 10.0);
  }
  if (j.contains("thresholds")) {
    c.thresholds_mode = field_or<std::string>(j.at("thresholds"), "mode", "default");
    c.thresholds_file = field_or<std::string>(j.at("thresholds"), "file", "");
  }
  if (j.contains("split")) {
    c.split.train_weeks = field_or<double>(j.at("split"), "train_weeks", 10.0);
    c.split.test_weeks = field_or<double>(j.at("split"), "test_weeks", 2.0);
    c.split.val_fraction = field_or<double>(j.at("split"), "val_fraction", 0.1);
  }
  if (j.contains("sampling")) {
    c.negative_keep_prob = field_or<double>(j.at("sampling"), "negative_keep_prob", 0.02);
    c.sampling_seed = field_or<std::uint64_t>(j.at("sampling"), "seed", 1);
  }
  if (j.contains("model")) {
    const auto& m = j.at("model");
    c.model.type = field_or<std::string>(m, "type", "dap");
    c.model.embedding_dim = field_or<int>(m, "embedding_dim", 128);
    c.model.lstm_layers = field_or<int>(m, "lstm_layers", 2);
    c.model.lstm_hidden = field_or<int>(m, "lstm_hidden", 128);
    c.model.branch_dense = field_or<int>(m, "branch_dense", 128);
    c.model.head_sizes = field_or<std::vector<int>>(m, "head_sizes", {512, 256, 64, 2});
    c.model.penalty = field_or<std::string>(m, "penalty", "none");
    c.model.lambda = field_or<double>(m, "lambda", 0.0);
  }
  if (j.contains("train")) {
    const auto& t = j.at("train");
    c.train.epochs = field_or<int>(t, "epochs", 60);
    c.train.patience = field_or<int>(t, "patience", 10);
    c.train.min_delta = field_or<double>(t, "min_delta", 0.0);
    c.train.lr = field_or<double>(t, "lr", 0.01);
    c.train.batch_size = field_or<int>(t, "batch_size", 64);
    c.train.seeds = field_or<std::vector<std::uint64_t>>(t, "seeds", {1, 2, 3});
  }
  c.ablation_scenarios =
      field_or<std::vector<std::string>>(j, "ablation_scenarios", {});
  if (j.contains("synth")) {
    const auto& s = j.at("synth");
    SynthScenario sc;
    sc.city = field_or<std::string>(s, "city", sc.city);
    sc.anchor.lat = field_or<double>(s, "anchor_lat", sc.anchor.lat);
    sc.anchor.lng = field_or<double>(s, "anchor_lng", sc.anchor.lng);
    sc.rows = field_or<int>(s, "rows", sc.rows);
    sc.cols = field_or<int>(s, "cols", sc.cols);
    sc.cell_size_m = field_or<double>(s, "cell_size_m", sc.cell_size_m);
    if (s.contains("start_time"))
      sc.start_time = parse_time(s.at("start_time").get<std::string>());
    sc.weeks = field_or<int>(s, "weeks", sc.weeks);
    sc.utc_offset_minutes = field_or<int>(s, "utc_offset_minutes", sc.utc_offset_minutes);
    sc.junction_region_fraction =
        field_or<double>(s, "junction_region_fraction", sc.junction_region_fraction);
    sc.congestion_burst_prob =
        field_or<double>(s, "congestion_burst_prob", sc.congestion_burst_prob);
    sc.side_event_prob = field_or<double>(s, "side_event_prob", sc.side_event_prob);
    sc.n_stations = field_or<int>(s, "n_stations", sc.n_stations);
    sc.weather_report_minutes =
        field_or<int>(s, "weather_report_minutes", sc.weather_report_minutes);
    sc.weather_missing_prob =
        field_or<double>(s, "weather_missing_prob", sc.weather_missing_prob);
    sc.planted_duplicates = field_or<int>(s, "planted_duplicates", sc.planted_duplicates);
    if (s.contains("rule")) {
      const auto& r = s.at("rule");
      sc.rule.congestion_threshold =
          field_or<int>(r, "congestion_threshold", sc.rule.congestion_threshold);
      sc.rule.require_junction = field_or<bool>(r, "require_junction", sc.rule.require_junction);
      sc.rule.require_rush_hour =
          field_or<bool>(r, "require_rush_hour", sc.rule.require_rush_hour);
      sc.rule.noise = field_or<double>(r, "noise", sc.rule.noise);
    }
    sc.seed = field_or<std::uint64_t>(s, "seed", sc.seed);
    c.synth = sc;
  }
  c.out_dir = field_or<std::string>(j, "out_dir", c.out_dir);
  return c;
}

inline PipelineConfig load_config(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) fail(Errc::config, "cannot open config file: " + path);
  nlohmann::json j = nlohmann::json::parse(f, nullptr, false);
  if (j.is_discarded()) fail(Errc::config, "config file is not valid JSON: " + path);
  PipelineConfig c = config_from_json(j);
  c.validate();
  return c;
}

}  // namespace dap
