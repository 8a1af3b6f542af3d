// Acceptance suite: end-to-end checks of the pipeline's contracts, one line
// of output per criterion. Exits nonzero if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "dap/ablate.hpp"
#include "dap/config.hpp"
#include "dap/pipeline.hpp"
#include "dap/solar.hpp"
#include "dap/synth.hpp"
#include "dap/train.hpp"
#include "support/fixtures.hpp"
#include "support/metric_oracle.hpp"
#include "support/oracles.hpp"

using namespace dap;
namespace fs = std::filesystem;

namespace {

struct Criterion {
  int number;
  const char* name;
  bool passed;
  std::string detail;
  double seconds;
};

std::vector<Criterion> g_results;

class Timer {
public:
  Timer() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

private:
  std::chrono::steady_clock::time_point start_;
};

void record(int number, const char* name, bool passed, const std::string& detail,
            double seconds) {
  g_results.push_back({number, name, passed, detail, seconds});
  std::printf("[%2d/10] %s  %-24s %s (%.1fs)\n", number, passed ? "PASS" : "FAIL", name,
              detail.c_str(), seconds);
  std::fflush(stdout);
}

std::string slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

// ---------------------------------------------------------------------------
// 1. Gradient integrity: every layer plus toy-scale models under central
//    finite differences, max relative error < 1e-4, in under two minutes.
// ---------------------------------------------------------------------------

bool layer_gradchecks(double& worst) {
  using namespace dap::nn;
  RngStream rng(31415);
  auto random_matrix = [&](std::size_t r, std::size_t c) {
    Matrix2D m(r, c);
    for (std::size_t i = 0; i < m.size(); ++i) m.data()[i] = rng.next_uniform(-1, 1);
    return m;
  };
  auto probe_loss = [](const Matrix2D& y, const Matrix2D& probe) {
    double s = 0;
    for (std::size_t i = 0; i < y.size(); ++i) s += y.data()[i] * probe.data()[i];
    return s;
  };
  worst = 0.0;

  for (int trial = 0; trial < 20; ++trial) {
    // dense
    {
      Dense d("d", 3 + trial % 4, 2 + trial % 3, rng);
      const Matrix2D x = random_matrix(4, d.in_dim());
      const Matrix2D probe = random_matrix(4, d.out_dim());
      zero_grads({&d.W, &d.b});
      d.backward(x, probe);
      const auto rep = grad_check(
          {&d.W, &d.b}, [&]() { return probe_loss(d.forward(x), probe); }, 1e-5);
      worst = std::max(worst, rep.max_rel_error);
    }
    // activations via a parameterized input block
    {
      Param px("x", 3, 4);
      px.value = random_matrix(3, 4);
      for (std::size_t i = 0; i < px.value.size(); ++i)
        if (std::abs(px.value.data()[i]) < 0.05) px.value.data()[i] += 0.1;
      const Matrix2D probe = random_matrix(3, 4);
      struct Act {
        Matrix2D (*fwd)(const Matrix2D&);
        Matrix2D (*bwd)(const Matrix2D&, const Matrix2D&);
      };
      const Act acts[3] = {{&sigmoid_forward, &sigmoid_backward},
                           {&relu_forward, &relu_backward},
                           {&tanh_forward, &tanh_backward}};
      for (const Act& a : acts) {
        px.grad = a.bwd(a.fwd(px.value), probe);
        const auto rep = grad_check(
            {&px}, [&]() { return probe_loss(a.fwd(px.value), probe); }, 1e-6);
        worst = std::max(worst, rep.max_rel_error);
      }
    }
    // softmax + cross entropy wrt logits
    {
      Param logits("logits", 5, 2);
      logits.value = random_matrix(5, 2);
      std::vector<int> labels;
      for (int i = 0; i < 5; ++i) labels.push_back(static_cast<int>(rng.next_below(2)));
      logits.grad = softmax_ce_grad(softmax(logits.value), labels);
      const auto rep = grad_check(
          {&logits}, [&]() { return cross_entropy(softmax(logits.value), labels); }, 1e-6);
      worst = std::max(worst, rep.max_rel_error);
    }
    // batchnorm, train mode
    {
      BatchNorm bn("bn", 3);
      Param px("x", 4, 3);
      px.value = random_matrix(4, 3);
      const Matrix2D probe = random_matrix(4, 3);
      zero_grads({&bn.gamma, &bn.beta, &px});
      BatchNorm active = bn;
      active.forward(px.value, Mode::train);
      px.grad = active.backward(probe);
      const auto rep = grad_check(
          {&active.gamma, &active.beta, &px},
          [&]() {
            BatchNorm fresh = bn;
            fresh.gamma.value = active.gamma.value;
            fresh.beta.value = active.beta.value;
            return probe_loss(fresh.forward(px.value, Mode::train), probe);
          },
          1e-6);
      worst = std::max(worst, rep.max_rel_error);
    }
    // lstm stack
    {
      LstmStack stack("lstm", 4, 5, 2, rng);
      std::vector<Matrix2D> seq;
      for (int t = 0; t < 3; ++t) seq.push_back(random_matrix(2, 4));
      const Matrix2D probe = random_matrix(2, 5);
      auto params = stack.parameters();
      zero_grads(params);
      std::vector<LstmLayerCache> caches;
      stack.forward(seq, caches);
      stack.backward(probe, caches);
      const auto rep = grad_check(
          params,
          [&]() {
            std::vector<LstmLayerCache> c;
            return probe_loss(stack.forward(seq, c), probe);
          },
          1e-5);
      worst = std::max(worst, rep.max_rel_error);
    }
  }
  return worst < 1e-4;
}

void criterion_1() {
  Timer timer;
  double worst_layers = 0.0;
  bool ok = layer_gradchecks(worst_layers);
  // full toy-scale models (dap hidden 8 / embedding 8 / batch 4, dnn, logreg)
  const GradCheckSummary models = run_gradcheck();
  ok = ok && models.max_rel_error < 1e-4;
  const double elapsed = timer.seconds();
  ok = ok && elapsed < 120.0;
  char buf[128];
  std::snprintf(buf, sizeof buf, "layers %.2e, toy models %.2e", worst_layers,
                models.max_rel_error);
  record(1, "gradient integrity", ok, buf, elapsed);
}

// ---------------------------------------------------------------------------
// 2. Dedup correctness on 50 random corpora with planted jittered
//    duplicates; order-invariant under 10 shuffles each.
// ---------------------------------------------------------------------------

void criterion_2() {
  Timer timer;
  RngStream rng(9182);
  bool ok = true;
  std::string detail = "50 corpora exact under 10 shuffles";
  for (int corpus = 0; corpus < 50 && ok; ++corpus) {
    const GeoPoint city{38.0 + rng.next_uniform(0, 2), -90.0 + rng.next_uniform(0, 2)};
    const int n_base = 20 + static_cast<int>(rng.next_below(30));
    std::vector<EventRecord> events;
    std::set<std::string> truth;
    std::size_t planted = 0;
    for (int b = 0; b < n_base; ++b) {
      EventRecord e;
      e.id = "B" + std::to_string(b);
      e.source = Source::mapquest_like;
      e.etype = static_cast<EventType>(rng.next_below(7));
      // lattice sites 1500 m apart: clusters cannot bridge
      e.location = oracles::offset_point(city, (b / 8) * 1500.0, (b % 8) * 1500.0);
      e.start_time = 1000000 + b * 1800;
      e.end_time = e.start_time + 900;
      e.description = "base";
      events.push_back(e);
      truth.insert(e.id);
      const int copies = static_cast<int>(rng.next_below(4));
      for (int k = 0; k < copies; ++k) {
        EventRecord c = e;
        c.id = e.id + "c" + std::to_string(k);
        c.source = Source::bing_like;
        c.location = oracles::offset_point(e.location, rng.next_uniform(-140, 140),
                                           rng.next_uniform(-140, 140));
        c.start_time = e.start_time + 30 + static_cast<UtcTime>(rng.next_below(450));
        c.end_time = c.start_time + 900;
        events.push_back(c);
        ++planted;
      }
    }
    for (int shuffle = 0; shuffle < 10 && ok; ++shuffle) {
      auto copy = events;
      rng.shuffle(copy);
      auto [survivors, report] = deduplicate(std::move(copy));
      std::set<std::string> got;
      for (const auto& e : survivors) got.insert(e.id);
      if (got != truth || report.duplicates_removed != planted) {
        ok = false;
        detail = "corpus " + std::to_string(corpus) + " mismatch";
      }
    }
  }
  const double elapsed = timer.seconds();
  ok = ok && elapsed < 60.0;
  record(2, "dedup correctness", ok, detail, elapsed);
}

// ---------------------------------------------------------------------------
// 3. Threshold-calibration recovery of planted radii from the 17-value
//    candidate set, with a unimodal score curve.
// ---------------------------------------------------------------------------

void criterion_3() {
  Timer timer;
  bool ok = true;
  std::string detail;
  const struct {
    double r_star;
    AnnotationTarget family;
  } cases[] = {{30.0, AnnotationTarget::intersection},
               {50.0, AnnotationTarget::intersection},
               {100.0, AnnotationTarget::junction}};
  for (const auto& c : cases) {
    const auto geom = fixtures::make_calibration_geometry(c.r_star, c.family);
    const auto res =
        calibrate_threshold(geom.accidents, geom.pois, c.family, PatternSet::defaults());
    if (res.best_radius != c.r_star) {
      ok = false;
      detail += "r*=" + format_double(c.r_star) + " got " + format_double(res.best_radius) + "; ";
      continue;
    }
    std::size_t peak = 0;
    for (std::size_t i = 0; i < res.candidate_radii.size(); ++i)
      if (res.candidate_radii[i] == c.r_star) peak = i;
    for (std::size_t i = 0; i + 1 <= peak; ++i)
      if (res.jaccard_scores[i] > res.jaccard_scores[i + 1] + 1e-12) ok = false;
    for (std::size_t i = peak; i + 1 < res.jaccard_scores.size(); ++i)
      if (res.jaccard_scores[i] + 1e-12 < res.jaccard_scores[i + 1]) ok = false;
    detail += format_double(c.r_star) + "m ok; ";
  }
  const double elapsed = timer.seconds();
  ok = ok && elapsed < 60.0;
  record(3, "calibration recovery", ok, detail, elapsed);
}

// ---------------------------------------------------------------------------
// 4. Feature-shape law: 305 values per entry, window-count law, one-hot and
//    indicator invariants on 10,000 entries built through the real path.
// ---------------------------------------------------------------------------

void criterion_4() {
  Timer timer;
  bool ok = true;
  std::string detail;

  for (int T = 9; T <= 100 && ok; ++T) {
    std::vector<IntervalVector> tl(T);
    for (auto& v : tl) v.hour_slot[0] = 1.0;
    if (make_windows(0, 0, tl, RegionStatics{}).size() != static_cast<std::size_t>(T - 8)) {
      ok = false;
      detail = "window law broken at T=" + std::to_string(T);
    }
  }

  RngStream rng(5150);
  const FeatureLayout layout;
  std::vector<SampleEntry> entries;
  const GeoPoint center{40.0, -83.0};
  std::vector<WeatherRecord> recs;
  for (int k = 0; k < 200; ++k) {
    WeatherRecord w;
    w.station_id = "S0";
    w.location = center;
    w.time = 1528070400 + k * 5400;
    if (rng.next_double() > 0.1) w.temperature = rng.next_uniform(-5, 35);
    w.humidity = rng.next_uniform(0, 100);
    w.rain = rng.next_double() < 0.2;
    recs.push_back(w);
  }
  const auto stations = WeatherStations::build(recs);
  int timeline_count = 0;
  while (entries.size() < 10000) {
    ++timeline_count;
    const UtcTime t0 =
        interval_floor(1528070400 + static_cast<UtcTime>(rng.next_below(90u * 86400)));
    const int T = 108;
    std::vector<EventRecord> storage;
    for (int i = 0; i < 40; ++i) {
      EventRecord e;
      e.id = "e" + std::to_string(i);
      e.etype = static_cast<EventType>(rng.next_below(7));
      e.location = center;
      e.start_time = t0 + static_cast<UtcTime>(rng.next_below(T * 900));
      e.end_time = e.start_time + 60;
      storage.push_back(e);
    }
    std::vector<const EventRecord*> ptrs;
    for (const auto& e : storage) ptrs.push_back(&e);
    const int offset = static_cast<int>(rng.next_below(25)) * 30 - 360;
    const auto tl = build_region_timeline(ptrs, t0, T, stations, center, offset);
    RegionStatics statics;
    for (auto& v : statics.poi_counts) v = static_cast<double>(rng.next_below(5));
    for (auto& v : statics.desc_vector) v = rng.next_uniform(-1, 1);
    auto es = make_windows(timeline_count, t0, tl, statics, layout);
    for (auto& e : es) entries.push_back(std::move(e));
  }
  const std::size_t n_entries = entries.size();

  auto check_invariants = [&](const std::vector<SampleEntry>& list, bool expect_finite) {
    for (const auto& e : list) {
      if (flatten(e).size() != 305) return false;
      for (int s = 0; s < layout.steps; ++s) {
        const double* block = e.dynamics.data() + s * layout.interval_dim();
        const double weekday = block[7];
        double onehot = 0.0;
        for (int j = 8; j < 13; ++j) {
          if (block[j] != 0.0 && block[j] != 1.0) return false;
          onehot += block[j];
        }
        const double daylight = block[13];
        if (onehot != 1.0) return false;
        if (weekday != 0.0 && weekday != 1.0) return false;
        if (daylight != 0.0 && daylight != 1.0) return false;
        for (int j = 20; j < 24; ++j)
          if (block[j] != 0.0 && block[j] != 1.0) return false;
        if (expect_finite)
          for (int j = 0; j < 24; ++j)
            if (!std::isfinite(block[j])) return false;
      }
    }
    return true;
  };
  ok = ok && check_invariants(entries, false);

  auto split = temporal_split(std::move(entries), layout, SplitParams{0.5, 0.2, 0.1});
  ok = ok && check_invariants(split.train, true) && check_invariants(split.validation, true) &&
       check_invariants(split.test, true);

  if (detail.empty()) detail = std::to_string(n_entries) + " entries, flat 305, T-8 law";
  record(4, "feature-shape law", ok, detail, timer.seconds());
}

// ---------------------------------------------------------------------------
// 5. Learnability end-to-end on a planted-rule city: dap and dnn reach at
//    least 85% of the realized ideal-predictor F1 inside 60 epochs and 15
//    minutes of training; logreg separates a linearly separable fixture.
// ---------------------------------------------------------------------------

struct BayesOracle {
  std::vector<std::vector<int>> congestion;  // per (region_index, interval)
  std::vector<bool> junction;
  UtcTime t0 = 0;
  int intervals = 0;
  int threshold = 2;
  bool require_junction = true;
  bool require_rush = false;
  int utc_offset = 0;

  int rule(const SampleEntry& e) const {
    const int last = static_cast<int>((e.window_start - t0) / kIntervalSeconds) + 7;
    if (last < 0 || last >= intervals) return 0;
    bool fired = congestion[e.region_index][last] >= threshold;
    if (require_junction && !junction[e.region_index]) fired = false;
    if (require_rush) {
      const int h = civil_of(e.window_start + 7 * kIntervalSeconds, utc_offset).hour;
      if (!((h >= 6 && h < 10) || (h >= 15 && h < 19))) fired = false;
    }
    return fired ? 1 : 0;
  }
};

// Recomputes the rule inputs from the integrated events and the fixture's
// ground-truth manifest, independently of the featurization path.
BayesOracle build_bayes_oracle(const PipelineConfig& c) {
  BayesOracle oracle;
  const nlohmann::json truth = nlohmann::json::parse(slurp(c.out_dir + "/truth.json"));
  const nlohmann::json meta = nlohmann::json::parse(slurp(stage::featurize_meta(c.out_dir)));
  oracle.t0 = parse_time(meta.at("t0").get<std::string>());
  oracle.intervals = meta.at("intervals").get<int>();
  oracle.threshold = truth.at("rule").at("congestion_threshold").get<int>();
  oracle.require_junction = truth.at("rule").at("require_junction").get<bool>();
  oracle.require_rush = truth.at("rule").at("require_rush_hour").get<bool>();
  oracle.utc_offset = truth.at("utc_offset_minutes").get<int>();

  std::map<std::pair<int, int>, bool> junction_by_cell;
  for (const auto& r : truth.at("regions"))
    junction_by_cell[{r.at("row").get<int>(), r.at("col").get<int>()}] =
        r.at("junction").get<bool>();

  std::ifstream rf(stage::regions_csv(c.out_dir), std::ios::binary);
  CsvReader reader(rf);
  CsvRow row;
  reader.next(row);  // header
  std::map<int, std::pair<int, int>> cell_of_region;
  while (reader.next(row)) {
    if (row.fields.size() < 3) continue;
    cell_of_region[std::stoi(row.fields[0])] = {std::stoi(row.fields[1]),
                                                std::stoi(row.fields[2])};
  }
  const int n_regions = static_cast<int>(cell_of_region.size());
  oracle.junction.assign(n_regions, false);
  for (const auto& [idx, cell] : cell_of_region) oracle.junction[idx] = junction_by_cell[cell];

  oracle.congestion.assign(n_regions, std::vector<int>(oracle.intervals, 0));
  const auto events = parse_events(stage::integrated_events(c.out_dir), EventFormat::csv);
  const RegionSet regions = build_region_set(events, c.grid);
  for (const auto& e : events) {
    if (e.etype != EventType::congestion) continue;
    const int idx = regions.index_of(e.location);
    if (idx < 0) continue;
    const auto t = (e.start_time - oracle.t0) / kIntervalSeconds;
    if (t >= 0 && t < oracle.intervals) ++oracle.congestion[idx][t];
  }
  return oracle;
}

double accident_f1(const std::vector<int>& preds, const std::vector<int>& labels) {
  return prf1(confusion(preds, labels)).accident.f1.value();
}

void criterion_5() {
  Timer total;
  const std::string dir = "accept5_out";
  fs::remove_all(dir);

  PipelineConfig c;
  c.city = "learnability";
  c.grid.anchor = {39.9, -83.1};
  c.grid.rows = 4;
  c.grid.cols = 4;
  c.out_dir = dir;
  c.events_path = dir + "/events.csv";
  c.weather_path = dir + "/weather.csv";
  c.poi_path = dir + "/poi.csv";
  c.word_vectors_path = dir + "/wordvec.txt";
  c.split = SplitParams{3.0, 1.0, 0.1};
  c.negative_keep_prob = 0.33;
  c.sampling_seed = 7;
  SynthScenario s;
  s.rows = 4;
  s.cols = 4;
  s.weeks = 4;
  s.junction_region_fraction = 0.5;
  s.congestion_burst_prob = 0.35;
  s.rule.congestion_threshold = 2;
  s.rule.require_junction = true;
  s.rule.require_rush_hour = false;
  s.rule.noise = 0.05;
  s.planted_duplicates = 40;
  s.seed = 2024;
  c.synth = s;

  run_synth(c);
  run_integrate(c);
  const DatasetSplit split = run_featurize(c);
  const std::size_t total_entries =
      split.train.size() + split.validation.size() + split.test.size();

  const BayesOracle oracle = build_bayes_oracle(c);
  std::vector<int> bayes_preds, labels;
  for (const auto& e : split.test) {
    bayes_preds.push_back(oracle.rule(e));
    labels.push_back(e.label);
  }
  const double bayes_f1 = accident_f1(bayes_preds, labels);

  const nlohmann::json meta = nlohmann::json::parse(slurp(stage::featurize_meta(c.out_dir)));
  const int region_count = meta.at("region_count").get<int>();

  TrainConfig tc;
  tc.epochs = 60;
  tc.patience = 10;
  tc.min_delta = 3e-4;  // stop once the validation loss plateaus
  tc.lr = 0.01;
  tc.batch_size = 64;
  tc.seeds = {1};

  Timer training;
  auto eval_model = [&](Model& m) {
    train_model(m, split, tc, 1);
    const auto preds = predict(m, split.test, split.layout);
    std::vector<int> hard;
    for (const auto& p : preds) hard.push_back(p.hard_label);
    return accident_f1(hard, labels);
  };
  DapConfig dap_cfg;
  dap_cfg.region_count = region_count;
  auto dap = build_dap(dap_cfg, split.layout, 1);
  const double dap_f1 = eval_model(*dap);
  auto dnn = build_dnn(split.layout, 1);
  const double dnn_f1 = eval_model(*dnn);
  const double train_seconds = training.seconds();

  // Separable fixture for logistic regression.
  bool lr_ok = false;
  {
    FeatureLayout flat_layout;
    flat_layout.steps = 1;
    RngStream rng(14);
    std::vector<SampleEntry> entries;
    for (int i = 0; i < 400; ++i) {
      SampleEntry e;
      e.window_start = i * 900;
      e.statics.resize(flat_layout.statics_dim());
      for (auto& v : e.statics) v = rng.next_uniform(-1, 1);
      e.dynamics.assign(flat_layout.interval_dim(), 0.0);
      const double score = 2.0 * e.statics[0] - e.statics[1];
      e.label = score > 0 ? 1 : 0;
      if (std::abs(score) < 0.2) e.statics[0] += score > 0 ? 0.3 : -0.3;
      entries.push_back(std::move(e));
    }
    DatasetSplit lrs;
    lrs.layout = flat_layout;
    lrs.train = entries;
    lrs.validation = entries;
    TrainConfig ltc;
    ltc.epochs = 50;
    ltc.patience = 49;
    ltc.batch_size = 32;
    ltc.lr = 0.05;
    ltc.seeds = {5};
    auto lr = build_logreg(flat_layout, Penalty::none, 0.0, 5);
    train_model(*lr, lrs, ltc, 5);
    const auto preds = predict(*lr, entries, flat_layout);
    int correct = 0;
    for (std::size_t i = 0; i < preds.size(); ++i)
      correct += preds[i].hard_label == entries[i].label;
    lr_ok = static_cast<double>(correct) / preds.size() >= 0.95;
  }

  const bool size_ok = total_entries >= 15000 && total_entries <= 26000;
  const bool dap_ok = dap_f1 >= 0.85 * bayes_f1;
  const bool dnn_ok = dnn_f1 >= 0.85 * bayes_f1;
  const bool time_ok = train_seconds < 900.0;
  const bool ok = size_ok && dap_ok && dnn_ok && time_ok && lr_ok;

  char buf[192];
  std::snprintf(buf, sizeof buf,
                "%zu entries, ideal %.3f, dap %.3f, dnn %.3f, lr %s, train %.0fs", total_entries,
                bayes_f1, dap_f1, dnn_f1, lr_ok ? "ok" : "fail", train_seconds);
  fs::remove_all(dir);
  record(5, "learnability", ok, buf, total.seconds());
}

// ---------------------------------------------------------------------------
// 6. Ablation discrimination: traffic-only beats weather-only by 0.2 F1 on a
//    traffic-rule fixture; removing time from a rush-hour rule costs at
//    least 0.1 F1 against the unablated run.
// ---------------------------------------------------------------------------

DatasetSplit make_ablation_city(const std::string& dir, bool rush_rule, int& region_count) {
  fs::remove_all(dir);
  PipelineConfig c;
  c.city = "ablation";
  c.grid.anchor = {39.9, -83.1};
  c.grid.rows = 2;
  c.grid.cols = 4;
  c.out_dir = dir;
  c.events_path = dir + "/events.csv";
  c.weather_path = dir + "/weather.csv";
  c.poi_path = dir + "/poi.csv";
  c.word_vectors_path = dir + "/wordvec.txt";
  c.split = SplitParams{1.5, 0.5, 0.1};
  c.negative_keep_prob = 1.0;  // no subsampling: the rule keeps classes balanced enough
  c.sampling_seed = 3;
  SynthScenario s;
  s.rows = 2;
  s.cols = 4;
  s.weeks = 2;
  s.junction_region_fraction = 0.5;
  s.congestion_burst_prob = 0.3;
  s.rule.congestion_threshold = 2;
  s.rule.require_junction = false;
  s.rule.require_rush_hour = rush_rule;
  s.rule.noise = rush_rule ? 0.01 : 0.05;
  s.planted_duplicates = 0;
  s.seed = rush_rule ? 606 : 505;
  c.synth = s;

  run_synth(c);
  run_integrate(c);
  DatasetSplit split = run_featurize(c);
  const nlohmann::json meta = nlohmann::json::parse(slurp(stage::featurize_meta(c.out_dir)));
  region_count = meta.at("region_count").get<int>();
  fs::remove_all(dir);
  return split;
}

void criterion_6() {
  Timer timer;
  TrainConfig tc;
  tc.epochs = 60;
  tc.patience = 5;
  tc.min_delta = 3e-4;
  tc.lr = 0.01;
  tc.batch_size = 64;
  tc.seeds = {1};

  ModelBuilder builder = [&](const FeatureLayout& layout, std::uint64_t seed) {
    DapConfig cfg;
    cfg.region_count = 8;
    cfg.use_embedding = false;  // the designated ablation model
    return build_dap(cfg, layout, seed);
  };

  int regions_a = 0;
  const DatasetSplit city_a = make_ablation_city("accept6a_out", false, regions_a);

  AblationSpec traffic_only;
  traffic_only.scenario = AblationSpec::Scenario::only_one;
  traffic_only.categories = {FeatureCategory::traffic};
  AblationSpec weather_only;
  weather_only.scenario = AblationSpec::Scenario::only_one;
  weather_only.categories = {FeatureCategory::weather};

  const double f1_traffic = ablate(city_a, traffic_only, builder, tc).mean_accident_f1();
  const double f1_weather = ablate(city_a, weather_only, builder, tc).mean_accident_f1();

  int regions_b = 0;
  const DatasetSplit city_b = make_ablation_city("accept6b_out", true, regions_b);
  AblationSpec identity;
  identity.scenario = AblationSpec::Scenario::all_but_one;
  identity.categories = {};
  AblationSpec no_time;
  no_time.scenario = AblationSpec::Scenario::all_but_one;
  no_time.categories = {FeatureCategory::time};

  const double f1_full = ablate(city_b, identity, builder, tc).mean_accident_f1();
  const double f1_no_time = ablate(city_b, no_time, builder, tc).mean_accident_f1();

  const bool gap_ok = f1_traffic - f1_weather >= 0.2;
  const bool time_ok = f1_full - f1_no_time >= 0.1;
  char buf[160];
  std::snprintf(buf, sizeof buf, "traffic %.3f vs weather %.3f; full %.3f vs no-time %.3f",
                f1_traffic, f1_weather, f1_full, f1_no_time);
  record(6, "ablation discrimination", gap_ok && time_ok, buf, timer.seconds());
}

// ---------------------------------------------------------------------------
// 7. Metric oracle: exact agreement with an independent rational-arithmetic
//    implementation on 100 random confusion matrices.
// ---------------------------------------------------------------------------

void criterion_7() {
  Timer timer;
  bool ok = true;
  RngStream rng(2718);
  for (int it = 0; it < 100 && ok; ++it) {
    ConfusionCounts c;
    c.tp = static_cast<std::int64_t>(rng.next_below(10000));
    c.fp = static_cast<std::int64_t>(rng.next_below(10000));
    c.tn = static_cast<std::int64_t>(rng.next_below(10000));
    c.fn = static_cast<std::int64_t>(rng.next_below(10000));
    if (c.total() == 0) c.tp = 1;
    const PrF1 got = prf1(c);
    const auto acc = oracles::oracle_class(c.tp, c.fp, c.fn);
    const auto non = oracles::oracle_class(c.tn, c.fn, c.fp);
    ok = ok && oracles::equal_exact(got.accident.precision, acc.precision) &&
         oracles::equal_exact(got.accident.recall, acc.recall) &&
         oracles::equal_exact(got.accident.f1, acc.f1) &&
         oracles::equal_exact(got.non_accident.f1, non.f1) &&
         got.accident.f1.value() == acc.f1.value();
    if (c.tp + c.fn + c.tn + c.fp > 0) {
      const auto sa = oracles::Frac::make(c.tp + c.fn, 1);
      const auto sn = oracles::Frac::make(c.tn + c.fp, 1);
      const auto want = (acc.f1 * sa + non.f1 * sn) / (sa + sn);
      const Ratio wgot = weighted_f1(got);
      ok = ok && oracles::equal_exact(wgot, want) && wgot.value() == want.value();
    }
  }
  ConfusionCounts ex;
  ex.tp = 5;
  ex.fp = 5;
  ex.fn = 0;
  ok = ok && prf1(ex).accident.f1 == Ratio::of(2, 3);
  record(7, "metric oracle", ok, "100 random matrices exact + worked example", timer.seconds());
}

// ---------------------------------------------------------------------------
// 8. Determinism: two full pipeline runs with identical config and seed
//    produce byte-identical checkpoints, sample files, and reports.
// ---------------------------------------------------------------------------

PipelineConfig determinism_config(const std::string& dir) {
  PipelineConfig c;
  c.city = "det";
  c.grid.anchor = {39.9, -83.1};
  c.grid.rows = 2;
  c.grid.cols = 2;
  c.out_dir = dir;
  c.events_path = dir + "/events.csv";
  c.weather_path = dir + "/weather.csv";
  c.poi_path = dir + "/poi.csv";
  c.word_vectors_path = dir + "/wordvec.txt";
  c.split = SplitParams{0.5, 0.25, 0.1};
  c.negative_keep_prob = 0.3;
  c.sampling_seed = 1;
  c.model.type = "logreg";
  c.train.epochs = 4;
  c.train.patience = 3;
  c.train.seeds = {1};
  c.ablation_scenarios = {"only-one:traffic"};
  SynthScenario s;
  s.rows = 2;
  s.cols = 2;
  s.weeks = 1;
  s.seed = 11;
  s.planted_duplicates = 10;
  c.synth = s;
  return c;
}

void run_full_pipeline(const PipelineConfig& c) {
  run_synth(c);
  run_integrate(c);
  run_calibrate(c);
  run_annotate(c);
  run_featurize(c);
  run_train(c);
  run_evaluate(c);
  run_ablate(c);
}

void criterion_8() {
  Timer timer;
  fs::remove_all("accept8_a");
  fs::remove_all("accept8_b");
  run_full_pipeline(determinism_config("accept8_a"));
  run_full_pipeline(determinism_config("accept8_b"));

  bool ok = true;
  std::string first_diff;
  std::size_t checked = 0;
  for (const auto& entry : fs::directory_iterator("accept8_a")) {
    const std::string name = entry.path().filename().string();
    ++checked;
    if (!fs::exists("accept8_b/" + name) ||
        slurp(entry.path().string()) != slurp("accept8_b/" + name)) {
      ok = false;
      if (first_diff.empty()) first_diff = name;
    }
  }
  ok = ok && checked >= 18;  // checkpoints, samples, and reports all present
  fs::remove_all("accept8_a");
  fs::remove_all("accept8_b");
  record(8, "determinism", ok,
         ok ? std::to_string(checked) + " files byte-identical" : "differs: " + first_diff,
         timer.seconds());
}

// ---------------------------------------------------------------------------
// 9. Negative sampling keep-rate within 3 binomial sigmas of 2%.
// ---------------------------------------------------------------------------

void criterion_9() {
  Timer timer;
  const int n = 100000;
  std::vector<SampleEntry> negatives;
  negatives.reserve(n);
  for (int i = 0; i < n; ++i) {
    SampleEntry e;
    e.window_start = static_cast<UtcTime>(i) * 900;
    e.label = 0;
    negatives.push_back(std::move(e));
  }
  const double p = 0.02;
  const auto kept = negative_sample(std::move(negatives), p, 424242);
  const double mean = n * p;
  const double sigma = std::sqrt(n * p * (1 - p));
  const bool ok = std::abs(static_cast<double>(kept.size()) - mean) <= 3.0 * sigma;
  char buf[96];
  std::snprintf(buf, sizeof buf, "kept %zu of %d (expect %.0f +- %.0f)", kept.size(), n, mean,
                3.0 * sigma);
  record(9, "negative sampling", ok, buf, timer.seconds());
}

// ---------------------------------------------------------------------------
// 10. Solar labeling: monotone across the four systems on 1,000 random
//     pairs; equator-equinox sunrise within 10 minutes of 06:00 true solar
//     time per the independent oracle.
// ---------------------------------------------------------------------------

void criterion_10() {
  Timer timer;
  bool ok = true;
  RngStream rng(1618);
  for (int it = 0; it < 1000 && ok; ++it) {
    const GeoPoint p{rng.next_uniform(-80, 80), rng.next_uniform(-180, 180)};
    const UtcTime t = parse_time("1990-01-01T00:00:00Z") +
                      static_cast<UtcTime>(rng.next_below(40ull * 365 * 86400));
    const bool d0 = period_of_day(p, t, DaylightSystem::sunrise_sunset) == DayNight::day;
    const bool d1 = period_of_day(p, t, DaylightSystem::civil) == DayNight::day;
    const bool d2 = period_of_day(p, t, DaylightSystem::nautical) == DayNight::day;
    const bool d3 = period_of_day(p, t, DaylightSystem::astronomical) == DayNight::day;
    if ((d0 && !d1) || (d1 && !d2) || (d2 && !d3)) ok = false;
  }

  const GeoPoint equator{0.0, 0.0};
  const UtcTime day0 = parse_time("2018-03-20T00:00:00Z");
  const double thr = daylight_threshold_deg(DaylightSystem::sunrise_sunset);
  UtcTime lo = day0 + 3 * 3600, hi = day0 + 9 * 3600;
  ok = ok && solar_elevation(equator, lo) < thr && solar_elevation(equator, hi) >= thr;
  while (hi - lo > 1) {
    const UtcTime mid = lo + (hi - lo) / 2;
    (solar_elevation(equator, mid) >= thr ? hi : lo) = mid;
  }
  const double solar_minutes = oracles::almanac_solar_time_min(equator, hi);
  ok = ok && std::abs(solar_minutes - 360.0) < 10.0;
  char buf[96];
  std::snprintf(buf, sizeof buf, "sunrise at %.1f min solar time (target 360 +- 10)",
                solar_minutes);
  record(10, "solar labeling", ok, buf, timer.seconds());
}

}  // namespace

int main() {
  std::printf("acceptance suite\n");
  criterion_1();
  criterion_2();
  criterion_3();
  criterion_4();
  criterion_5();
  criterion_6();
  criterion_7();
  criterion_8();
  criterion_9();
  criterion_10();

  int passed = 0;
  for (const auto& r : g_results) passed += r.passed;
  std::printf("ACCEPTANCE: %d/10 criteria passed\n", passed);
  return passed == static_cast<int>(g_results.size()) ? 0 : 1;
}
