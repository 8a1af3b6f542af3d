#pragma once

// Stage runners behind the CLI. Each stage reads declared inputs, writes
// plain-file outputs under the configured out dir, and records content
// hashes in a run manifest. Stages consume prior-stage files and raise a
// stage-order error when one is missing.

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "dap/ablate.hpp"
#include "dap/config.hpp"
#include "dap/metrics.hpp"
#include "dap/pipelinefmt.hpp"
#include "dap/synth.hpp"
#include "dap/train.hpp"

namespace dap {

namespace stage {

inline std::string integrated_events(const std::string& out) {
  return out + "/integrated_events.csv";
}
inline std::string dedup_report(const std::string& out) { return out + "/dedup_report.json"; }
inline std::string calibration_csv(const std::string& out, AnnotationTarget family) {
  return out + "/calibration_" + std::string(to_string(family)) + ".csv";
}
inline std::string thresholds_json(const std::string& out) { return out + "/thresholds.json"; }
inline std::string augmented(const std::string& out) { return out + "/augmented_accidents.csv"; }
inline std::string samples(const std::string& out, const char* which) {
  return out + "/samples_" + std::string(which) + ".csv";
}
inline std::string featurize_meta(const std::string& out) { return out + "/featurize_meta.json"; }
inline std::string regions_csv(const std::string& out) { return out + "/regions.csv"; }
inline std::string checkpoint(const std::string& out, std::uint64_t seed) {
  return out + "/model_seed" + std::to_string(seed) + ".ckpt";
}
inline std::string history(const std::string& out, std::uint64_t seed) {
  return out + "/history_seed" + std::to_string(seed) + ".csv";
}
inline std::string eval_report_csv(const std::string& out) { return out + "/eval_report.csv"; }
inline std::string eval_report_txt(const std::string& out) { return out + "/eval_report.txt"; }
inline std::string ablation_csv(const std::string& out) { return out + "/ablation_report.csv"; }
inline std::string manifest(const std::string& out) { return out + "/manifest.json"; }

}  // namespace stage

namespace pipedetail {

inline void require_stage_file(const std::string& path, const std::string& producing_stage) {
  if (!std::filesystem::exists(path))
    fail(Errc::stage_order,
         "missing '" + path + "'; run the '" + producing_stage + "' stage first");
}

inline void ensure_out_dir(const PipelineConfig& c) {
  std::filesystem::create_directories(c.out_dir);
}

inline std::string read_file(const std::string& path) {
  auto f = open_input(path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

inline std::string hash_hex(const std::string& bytes) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(fnv1a64(bytes)));
  return buf;
}

// Appends the stage's output hashes to the run manifest.
inline void record_stage(const PipelineConfig& c, const std::string& stage_name,
                         const std::vector<std::string>& files) {
  nlohmann::json manifest;
  const std::string path = stage::manifest(c.out_dir);
  if (std::filesystem::exists(path)) {
    auto f = open_input(path);
    manifest = nlohmann::json::parse(f, nullptr, false);
    if (manifest.is_discarded()) manifest = nlohmann::json::object();
  }
  for (const auto& file : files) {
    const std::string rel = std::filesystem::path(file).filename().string();
    manifest["stages"][stage_name][rel] = hash_hex(read_file(file));
  }
  auto f = open_output(path);
  f << manifest.dump(2) << '\n';
}

inline ThresholdTable thresholds_from_json(const nlohmann::json& j) {
  ThresholdTable tt;
  for (int i = 0; i < kPoiTypeCount; ++i)
    tt.radius_m[i] = j.at(std::string(kPoiTypeNames[i])).get<double>();
  tt.validate();
  return tt;
}

inline nlohmann::json thresholds_to_json(const ThresholdTable& tt) {
  nlohmann::json j;
  for (int i = 0; i < kPoiTypeCount; ++i) j[std::string(kPoiTypeNames[i])] = tt.radius_m[i];
  return j;
}

// Resolve the threshold table per config: built-in defaults, a user file, or
// the calibrate stage's output.
inline ThresholdTable resolve_thresholds(const PipelineConfig& c) {
  if (c.thresholds_mode == "default") return ThresholdTable::defaults();
  std::string path = c.thresholds_file;
  if (c.thresholds_mode == "calibrate") {
    path = stage::thresholds_json(c.out_dir);
    require_stage_file(path, "calibrate");
  }
  auto f = open_input(path);
  nlohmann::json j = nlohmann::json::parse(f, nullptr, false);
  if (j.is_discarded()) fail(Errc::config, "thresholds file is not valid JSON: " + path);
  return thresholds_from_json(j);
}

inline std::unique_ptr<Model> build_from_config(const ModelConfig& mc, const FeatureLayout& layout,
                                                int region_count, std::uint64_t seed) {
  if (mc.type == "dap" || mc.type == "dap-noembed") {
    DapConfig cfg;
    cfg.region_count = region_count;
    cfg.embedding_dim = mc.embedding_dim;
    cfg.lstm_layers = mc.lstm_layers;
    cfg.lstm_hidden = mc.lstm_hidden;
    cfg.branch_dense = mc.branch_dense;
    cfg.head_sizes = mc.head_sizes;
    cfg.use_embedding = mc.type == "dap";
    return build_dap(cfg, layout, seed);
  }
  if (mc.type == "dnn") return build_dnn(layout, seed, mc.head_sizes);
  Penalty p = Penalty::none;
  if (mc.penalty == "l1") p = Penalty::l1;
  if (mc.penalty == "l2") p = Penalty::l2;
  return build_logreg(layout, p, mc.lambda, seed);
}

}  // namespace pipedetail

// ---------------------------------------------------------------------------
// synth: emit a fixture city plus its ground-truth manifest.
// ---------------------------------------------------------------------------

inline void run_synth(const PipelineConfig& c) {
  if (!c.synth) fail(Errc::config, "synth: config has no 'synth' scenario section");
  pipedetail::ensure_out_dir(c);
  const SynthOutput city = generate_city(*c.synth);
  write_city(city, c.out_dir);
  pipedetail::record_stage(c, "synth",
                           {c.out_dir + "/events.csv", c.out_dir + "/weather.csv",
                            c.out_dir + "/poi.csv", c.out_dir + "/wordvec.txt",
                            c.out_dir + "/truth.json"});
}

// ---------------------------------------------------------------------------
// integrate: parse inputs, remove cross-source duplicates.
// ---------------------------------------------------------------------------

inline DedupReport run_integrate(const PipelineConfig& c) {
  pipedetail::ensure_out_dir(c);
  if (c.events_path.empty()) fail(Errc::config, "paths.events: required");
  auto events = parse_events(c.events_path,
                             c.events_format == "csv" ? EventFormat::csv : EventFormat::jsonl);
  auto [survivors, report] = deduplicate(std::move(events), c.dedup);
  {
    auto f = open_output(stage::integrated_events(c.out_dir));
    write_events(f, survivors);
  }
  {
    auto f = open_output(stage::dedup_report(c.out_dir));
    f << nlohmann::json{{"total_in", report.total_in},
                        {"clusters_merged", report.clusters_merged},
                        {"duplicates_removed", report.duplicates_removed},
                        {"duplicate_fraction", report.duplicate_fraction}}
             .dump(2)
      << '\n';
  }
  pipedetail::record_stage(
      c, "integrate", {stage::integrated_events(c.out_dir), stage::dedup_report(c.out_dir)});
  return report;
}

// ---------------------------------------------------------------------------
// calibrate: score the candidate radii for both families and derive the
// 13-type threshold table from the winners.
// ---------------------------------------------------------------------------

inline ThresholdTable run_calibrate(const PipelineConfig& c) {
  pipedetail::ensure_out_dir(c);
  pipedetail::require_stage_file(stage::integrated_events(c.out_dir), "integrate");
  const auto events = parse_events(stage::integrated_events(c.out_dir), EventFormat::csv);
  const auto pois = parse_poi(c.poi_path);

  std::vector<EventRecord> accidents;
  for (const auto& e : events)
    if (e.etype == EventType::accident) accidents.push_back(e);

  const PatternSet ps = PatternSet::defaults();
  double best_intersection = 30.0, best_junction = 100.0;
  std::vector<std::string> written;
  for (AnnotationTarget family : {AnnotationTarget::intersection, AnnotationTarget::junction}) {
    const CalibrationResult res = calibrate_threshold(accidents, pois, family, ps);
    auto f = open_output(stage::calibration_csv(c.out_dir, family));
    csv_write_row(f, {"radius_m", "jaccard"});
    for (std::size_t i = 0; i < res.candidate_radii.size(); ++i)
      csv_write_row(f, {format_double(res.candidate_radii[i]),
                        format_double(res.jaccard_scores[i])});
    written.push_back(stage::calibration_csv(c.out_dir, family));
    (family == AnnotationTarget::intersection ? best_intersection : best_junction) =
        res.best_radius;
  }
  const ThresholdTable tt = ThresholdTable::from_family_radii(best_intersection, best_junction);
  {
    auto f = open_output(stage::thresholds_json(c.out_dir));
    f << pipedetail::thresholds_to_json(tt).dump(2) << '\n';
  }
  written.push_back(stage::thresholds_json(c.out_dir));
  pipedetail::record_stage(c, "calibrate", written);
  return tt;
}

// ---------------------------------------------------------------------------
// annotate: augment each accident record with POI flags, weather, and the
// four period-of-day labels.
// ---------------------------------------------------------------------------

inline void run_annotate(const PipelineConfig& c) {
  pipedetail::ensure_out_dir(c);
  pipedetail::require_stage_file(stage::integrated_events(c.out_dir), "integrate");
  const auto events = parse_events(stage::integrated_events(c.out_dir), EventFormat::csv);
  const auto pois = PoiIndex::build(parse_poi(c.poi_path));
  const auto stations = WeatherStations::build(parse_weather(c.weather_path));
  const ThresholdTable tt = pipedetail::resolve_thresholds(c);

  auto f = open_output(stage::augmented(c.out_dir));
  std::vector<std::string> header = {"id",         "source",   "type",    "lat",
                                     "lng",        "start_time", "end_time", "severity",
                                     "tmc",        "description"};
  for (int i = 0; i < kPoiTypeCount; ++i) header.push_back("poi_" + std::string(kPoiTypeNames[i]));
  for (const char* sys : kDaylightSystemNames) header.push_back("daylight_" + std::string(sys));
  for (const char* w : {"temperature", "humidity", "pressure", "visibility", "wind_speed",
                        "precipitation", "rain", "snow", "fog", "hail", "weather_lag_minutes"})
    header.push_back(w);
  csv_write_row(f, header);

  for (const auto& e : events) {
    if (e.etype != EventType::accident) continue;
    std::vector<std::string> row = {e.id,
                                    std::string(to_string(e.source)),
                                    std::string(to_string(e.etype)),
                                    format_double(e.location.lat),
                                    format_double(e.location.lng),
                                    format_time(e.start_time),
                                    format_time(e.end_time),
                                    e.severity ? std::to_string(*e.severity) : "",
                                    e.tmc.value_or(""),
                                    e.description};
    const auto flags = annotate_poi(e, pois, tt);
    for (bool flag : flags) row.push_back(flag ? "1" : "0");
    for (int sys = 0; sys < 4; ++sys)
      row.push_back(period_of_day(e.location, e.start_time,
                                  static_cast<DaylightSystem>(sys)) == DayNight::day
                        ? "day"
                        : "night");
    if (!stations.empty()) {
      const WeatherJoin j = join_weather(e, stations);
      auto opt = [](const std::optional<double>& o) {
        return o ? format_double(*o) : std::string();
      };
      row.push_back(opt(j.record.temperature));
      row.push_back(opt(j.record.humidity));
      row.push_back(opt(j.record.pressure));
      row.push_back(opt(j.record.visibility));
      row.push_back(opt(j.record.wind_speed));
      row.push_back(opt(j.record.precipitation));
      row.push_back(j.record.rain ? "1" : "0");
      row.push_back(j.record.snow ? "1" : "0");
      row.push_back(j.record.fog ? "1" : "0");
      row.push_back(j.record.hail ? "1" : "0");
      row.push_back(format_double(j.lag_minutes));
    } else {
      for (int k = 0; k < 11; ++k) row.push_back("");
    }
    csv_write_row(f, row);
  }
  f.close();
  pipedetail::record_stage(c, "annotate", {stage::augmented(c.out_dir)});
}

// ---------------------------------------------------------------------------
// featurize: regions, statics, interval timelines, windows, negative
// sampling, temporal split, normalization.
// ---------------------------------------------------------------------------

inline DatasetSplit run_featurize(const PipelineConfig& c) {
  pipedetail::ensure_out_dir(c);
  pipedetail::require_stage_file(stage::integrated_events(c.out_dir), "integrate");
  const auto events = parse_events(stage::integrated_events(c.out_dir), EventFormat::csv);
  if (events.empty()) fail(Errc::empty_input, "featurize: no events after integration");
  const auto pois = parse_poi(c.poi_path);
  const auto stations = WeatherStations::build(parse_weather(c.weather_path));
  const auto wv_load = parse_word_vectors(c.word_vectors_path);

  const RegionSet regions = build_region_set(events, c.grid);
  if (regions.size() == 0) fail(Errc::empty_input, "featurize: no events fall inside the grid");

  FeatureLayout layout;
  layout.steps = c.window_intervals;

  // Interval range covering every event.
  UtcTime t_min = events.front().start_time, t_max = events.front().start_time;
  for (const auto& e : events) {
    t_min = std::min(t_min, e.start_time);
    t_max = std::max(t_max, e.start_time);
  }
  const UtcTime t0 = interval_floor(t_min);
  const int n_intervals = static_cast<int>((interval_floor(t_max) - t0) / kIntervalSeconds) + 1;

  // Group events and POI counts per region.
  std::vector<std::vector<const EventRecord*>> region_events(regions.size());
  for (const auto& e : events) {
    const int idx = regions.index_of(e.location);
    if (idx >= 0) region_events[idx].push_back(&e);
  }
  std::vector<std::array<double, kPoiTypeCount>> poi_counts(regions.size());
  for (auto& pc : poi_counts) pc.fill(0.0);
  for (const auto& p : pois) {
    const int idx = regions.index_of(p.location);
    if (idx >= 0) poi_counts[idx][static_cast<int>(p.ptype)] += 1.0;
  }

  // Desc2Vec history: a separate file when configured, else the integrated
  // events themselves.
  std::vector<EventRecord> history_storage;
  std::vector<std::vector<const EventRecord*>> region_history(regions.size());
  if (!c.events_history_path.empty()) {
    history_storage = parse_events(c.events_history_path, EventFormat::csv);
    for (const auto& e : history_storage) {
      const int idx = regions.index_of(e.location);
      if (idx >= 0) region_history[idx].push_back(&e);
    }
  } else {
    region_history = region_events;
  }

  std::vector<SampleEntry> entries;
  for (std::size_t r = 0; r < regions.size(); ++r) {
    const GeoPoint center = c.grid.cell_center(regions.regions[r].row, regions.regions[r].col);
    RegionStatics statics;
    statics.poi_counts = poi_counts[r];
    statics.desc_vector = desc2vec(region_history[r], wv_load.table);
    const auto timeline = build_region_timeline(region_events[r], t0, n_intervals, stations,
                                                center, c.utc_offset_minutes);
    auto region_entries =
        make_windows(static_cast<int>(r), t0, timeline, statics, layout);
    for (auto& e : region_entries) entries.push_back(std::move(e));
  }

  entries = negative_sample(std::move(entries), c.negative_keep_prob, c.sampling_seed);
  DatasetSplit split = temporal_split(std::move(entries), layout, c.split);

  for (const char* which : {"train", "validation", "test"}) {
    auto f = open_output(stage::samples(c.out_dir, which));
    const auto& list = std::string(which) == "train"
                           ? split.train
                           : (std::string(which) == "validation" ? split.validation : split.test);
    write_samples(f, list, layout);
  }
  {
    auto f = open_output(stage::regions_csv(c.out_dir));
    csv_write_row(f, {"region_index", "row", "col", "center_lat", "center_lng"});
    for (std::size_t r = 0; r < regions.size(); ++r) {
      const GeoPoint center = c.grid.cell_center(regions.regions[r].row, regions.regions[r].col);
      csv_write_row(f, {std::to_string(r), std::to_string(regions.regions[r].row),
                        std::to_string(regions.regions[r].col), format_double(center.lat),
                        format_double(center.lng)});
    }
  }
  {
    auto f = open_output(stage::featurize_meta(c.out_dir));
    f << nlohmann::json{{"layout", layout_to_json(layout)},
                        {"region_count", regions.size()},
                        {"t0", format_time(t0)},
                        {"intervals", n_intervals},
                        {"normalization", split.stats.to_json()},
                        {"train_entries", split.train.size()},
                        {"validation_entries", split.validation.size()},
                        {"test_entries", split.test.size()}}
             .dump(2)
      << '\n';
  }
  pipedetail::record_stage(
      c, "featurize",
      {stage::samples(c.out_dir, "train"), stage::samples(c.out_dir, "validation"),
       stage::samples(c.out_dir, "test"), stage::regions_csv(c.out_dir),
       stage::featurize_meta(c.out_dir)});
  return split;
}

// ---------------------------------------------------------------------------
// train / evaluate / ablate: consume the sample files.
// ---------------------------------------------------------------------------

struct LoadedDataset {
  DatasetSplit split;
  int region_count = 0;
};

inline LoadedDataset load_dataset(const PipelineConfig& c) {
  pipedetail::require_stage_file(stage::featurize_meta(c.out_dir), "featurize");
  auto meta_in = open_input(stage::featurize_meta(c.out_dir));
  const nlohmann::json meta = nlohmann::json::parse(meta_in);
  LoadedDataset ds;
  ds.split.layout = layout_from_json(meta.at("layout"));
  ds.split.stats = NormalizationStats::from_json(meta.at("normalization"));
  ds.region_count = meta.at("region_count").get<int>();
  for (const char* which : {"train", "validation", "test"}) {
    pipedetail::require_stage_file(stage::samples(c.out_dir, which), "featurize");
    auto f = open_input(stage::samples(c.out_dir, which));
    auto list = read_samples(f, ds.split.layout);
    if (std::string(which) == "train") ds.split.train = std::move(list);
    else if (std::string(which) == "validation") ds.split.validation = std::move(list);
    else ds.split.test = std::move(list);
  }
  return ds;
}

inline void run_train(const PipelineConfig& c) {
  pipedetail::ensure_out_dir(c);
  const LoadedDataset ds = load_dataset(c);
  std::vector<std::string> written;
  for (std::uint64_t seed : c.train.seeds) {
    auto model = pipedetail::build_from_config(c.model, ds.split.layout, ds.region_count, seed);
    const TrainResult result = train_model(*model, ds.split, c.train, seed);
    {
      auto f = open_output(stage::history(c.out_dir, seed));
      csv_write_row(f, {"epoch", "train_loss", "val_loss"});
      for (const auto& e : result.history)
        csv_write_row(f, {std::to_string(e.epoch), format_double(e.train_loss),
                          format_double(e.val_loss)});
    }
    {
      auto f = open_output(stage::checkpoint(c.out_dir, seed));
      nn::save_checkpoint(f, model->architecture().dump(), model->parameters(),
                          model->buffers(), seed, result.adam_steps);
    }
    written.push_back(stage::history(c.out_dir, seed));
    written.push_back(stage::checkpoint(c.out_dir, seed));
  }
  pipedetail::record_stage(c, "train", written);
}

inline EvalReport run_evaluate(const PipelineConfig& c) {
  pipedetail::ensure_out_dir(c);
  const LoadedDataset ds = load_dataset(c);

  EvalReport report;
  report.configuration = c.model.type;
  for (std::uint64_t seed : c.train.seeds) {
    const std::string ckpt = stage::checkpoint(c.out_dir, seed);
    pipedetail::require_stage_file(ckpt, "train");
    auto f = open_input(ckpt);
    const auto header = nn::read_checkpoint_header(f);
    auto model = model_from_architecture(nlohmann::json::parse(header.arch_json));
    f.seekg(0);
    nn::load_checkpoint(f, model->parameters(), model->buffers());

    const auto preds = predict(*model, ds.split.test, ds.split.layout);
    std::vector<int> hard, labels;
    for (std::size_t i = 0; i < preds.size(); ++i) {
      hard.push_back(preds[i].hard_label);
      labels.push_back(ds.split.test[i].label);
    }
    SeedEval se;
    se.seed = seed;
    se.counts = confusion(hard, labels);
    se.metrics = prf1(se.counts);
    se.weighted = weighted_f1(se.metrics);
    report.per_seed.push_back(se);
  }
  write_eval_reports(report, stage::eval_report_csv(c.out_dir),
                     stage::eval_report_txt(c.out_dir));
  pipedetail::record_stage(
      c, "evaluate", {stage::eval_report_csv(c.out_dir), stage::eval_report_txt(c.out_dir)});
  return report;
}

inline AblationSpec parse_ablation_scenario(const std::string& text) {
  AblationSpec spec;
  const auto colon = text.find(':');
  const std::string kind = text.substr(0, colon);
  if (kind == "only-one") spec.scenario = AblationSpec::Scenario::only_one;
  else if (kind == "all-but-one") spec.scenario = AblationSpec::Scenario::all_but_one;
  else fail(Errc::config, "ablation scenario '" + text + "': unknown kind");
  if (colon != std::string::npos) {
    std::string rest = text.substr(colon + 1);
    std::size_t pos = 0;
    while (pos <= rest.size() && !rest.empty()) {
      const auto plus = rest.find('+', pos);
      const std::string name =
          rest.substr(pos, plus == std::string::npos ? std::string::npos : plus - pos);
      FeatureCategory cat;
      if (!parse_category(name, cat))
        fail(Errc::config, "ablation scenario '" + text + "': unknown category '" + name + "'");
      spec.categories.insert(cat);
      if (plus == std::string::npos) break;
      pos = plus + 1;
    }
  }
  return spec;
}

inline std::vector<EvalReport> run_ablate(const PipelineConfig& c) {
  pipedetail::ensure_out_dir(c);
  const LoadedDataset ds = load_dataset(c);

  std::vector<std::string> scenario_texts = c.ablation_scenarios;
  if (scenario_texts.empty()) {
    for (const char* cat : {"traffic", "time", "weather"})
      scenario_texts.push_back("only-one:" + std::string(cat));
    for (const char* cat : {"traffic", "time", "weather", "poi", "desc2vec"})
      scenario_texts.push_back("all-but-one:" + std::string(cat));
  }

  // The ablation model is the dap-noembed variant, so branch capacity cannot
  // leak region identity into the comparison.
  ModelConfig mc = c.model;
  mc.type = "dap-noembed";
  const int region_count = ds.region_count;
  ModelBuilder builder = [&](const FeatureLayout& layout, std::uint64_t seed) {
    return pipedetail::build_from_config(mc, layout, region_count, seed);
  };

  std::vector<EvalReport> reports;
  for (const auto& text : scenario_texts)
    reports.push_back(ablate(ds.split, parse_ablation_scenario(text), builder, c.train));

  write_ablation_report(reports, stage::ablation_csv(c.out_dir));
  pipedetail::record_stage(c, "ablate", {stage::ablation_csv(c.out_dir)});
  return reports;
}

// ---------------------------------------------------------------------------
// gradcheck: finite-difference verification of every layer inside a toy-size
// model of each architecture.
// ---------------------------------------------------------------------------

struct GradCheckSummary {
  double max_rel_error = 0.0;
  std::vector<std::pair<std::string, double>> blocks;
};

inline GradCheckSummary run_gradcheck() {
  FeatureLayout layout;
  RngStream rng(12345);

  std::vector<SampleEntry> entries;
  for (int i = 0; i < 4; ++i) {
    SampleEntry e;
    e.region_index = i % 3;
    e.window_start = i * 900;
    e.label = i % 2;
    e.statics.resize(layout.statics_dim());
    for (auto& v : e.statics) v = rng.next_uniform(-1, 1);
    e.dynamics.resize(static_cast<std::size_t>(layout.steps) * layout.interval_dim());
    for (auto& v : e.dynamics) v = rng.next_uniform(-1, 1);
    entries.push_back(std::move(e));
  }

  GradCheckSummary summary;
  auto check_model = [&](Model& m, const char* tag, bool branches) {
    const Batch b = make_batch(entry_pointers(entries), layout, branches, !branches);
    nn::zero_grads(m.parameters());
    m.loss_and_grad(b, Mode::train);  // settle batchnorm running statistics
    nn::zero_grads(m.parameters());
    m.loss_and_grad(b, Mode::eval);
    const auto report = nn::grad_check(
        m.parameters(), [&]() { return m.loss_only(b, Mode::eval); }, 1e-5);
    for (const auto& block : report.blocks)
      summary.blocks.emplace_back(std::string(tag) + "/" + block.name, block.max_rel_error);
    summary.max_rel_error = std::max(summary.max_rel_error, report.max_rel_error);
  };

  DapConfig toy;
  toy.region_count = 3;
  toy.embedding_dim = 8;
  toy.lstm_hidden = 8;
  toy.branch_dense = 8;
  toy.head_sizes = {16, 8, 4, 2};
  auto dap = build_dap(toy, layout, 7);
  check_model(*dap, "dap", true);
  auto dnn = build_dnn(layout, 7, {16, 8, 4, 2});
  check_model(*dnn, "dnn", false);
  auto lr = build_logreg(layout, Penalty::l2, 0.01, 7);
  check_model(*lr, "logreg", false);
  return summary;
}

}  // namespace dap
