#pragma once

// Feature-ablation harness. A configuration keeps a subset of the five
// feature categories; excluded categories are removed from the input (the
// dimension shrinks, nothing is zero-filled) and the model is rebuilt at the
// reduced width, trained, and evaluated per seed.

#include <functional>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "dap/metrics.hpp"
#include "dap/models.hpp"
#include "dap/train.hpp"

namespace dap {

enum class FeatureCategory : int { traffic = 0, time = 1, weather = 2, poi = 3, desc2vec = 4 };

inline constexpr const char* kCategoryNames[5] = {"traffic", "time", "weather", "poi", "desc2vec"};

inline bool parse_category(std::string_view s, FeatureCategory& out) {
  for (int i = 0; i < 5; ++i) {
    if (s == kCategoryNames[i]) {
      out = static_cast<FeatureCategory>(i);
      return true;
    }
  }
  return false;
}

struct AblationSpec {
  enum class Scenario { only_one, all_but_one };
  Scenario scenario = Scenario::only_one;
  std::set<FeatureCategory> categories;  // only_one: the kept one; all_but_one: the removed set

  std::set<FeatureCategory> kept() const {
    const std::set<FeatureCategory> all = {FeatureCategory::traffic, FeatureCategory::time,
                                           FeatureCategory::weather, FeatureCategory::poi,
                                           FeatureCategory::desc2vec};
    if (scenario == Scenario::only_one) {
      if (categories.size() != 1)
        fail(Errc::config, "only-one ablation takes exactly one category");
      return categories;
    }
    std::set<FeatureCategory> keep;
    for (FeatureCategory c : all)
      if (!categories.count(c)) keep.insert(c);
    if (keep.empty()) fail(Errc::empty_feature_set, "ablation removed every category");
    return keep;
  }

  std::string name() const {
    std::string n = scenario == Scenario::only_one ? "only-one(" : "all-but-one(";
    bool first = true;
    for (FeatureCategory c : categories) {
      if (!first) n += "+";
      n += kCategoryNames[static_cast<int>(c)];
      first = false;
    }
    return n + ")";
  }
};

// Layout with the dropped categories at width zero.
inline FeatureLayout ablated_layout(const FeatureLayout& full,
                                    const std::set<FeatureCategory>& kept) {
  FeatureLayout l = full;
  if (!kept.count(FeatureCategory::traffic)) l.traffic = 0;
  if (!kept.count(FeatureCategory::time)) l.time = 0;
  if (!kept.count(FeatureCategory::weather)) l.weather = 0;
  if (!kept.count(FeatureCategory::poi)) l.poi = 0;
  if (!kept.count(FeatureCategory::desc2vec)) l.desc2vec = 0;
  if (l.total_dim() == 0) fail(Errc::empty_feature_set, "ablation removed every feature");
  return l;
}

inline SampleEntry project_entry(const SampleEntry& e, const FeatureLayout& full,
                                 const std::set<FeatureCategory>& kept) {
  SampleEntry out;
  out.region_index = e.region_index;
  out.window_start = e.window_start;
  out.label = e.label;

  if (kept.count(FeatureCategory::poi))
    out.statics.insert(out.statics.end(), e.statics.begin(), e.statics.begin() + full.poi);
  if (kept.count(FeatureCategory::desc2vec))
    out.statics.insert(out.statics.end(), e.statics.begin() + full.poi, e.statics.end());

  const int dim = full.interval_dim();
  const bool k_tr = kept.count(FeatureCategory::traffic) > 0;
  const bool k_tm = kept.count(FeatureCategory::time) > 0;
  const bool k_we = kept.count(FeatureCategory::weather) > 0;
  if (k_tr || k_tm || k_we) {
    for (int s = 0; s < full.steps; ++s) {
      const double* block = e.dynamics.data() + static_cast<std::size_t>(s) * dim;
      if (k_tr)
        out.dynamics.insert(out.dynamics.end(), block, block + full.traffic);
      if (k_tm)
        out.dynamics.insert(out.dynamics.end(), block + full.traffic,
                            block + full.traffic + full.time);
      if (k_we)
        out.dynamics.insert(out.dynamics.end(), block + full.traffic + full.time, block + dim);
    }
  }
  return out;
}

inline DatasetSplit project_split(const DatasetSplit& split,
                                  const std::set<FeatureCategory>& kept) {
  DatasetSplit out;
  out.layout = ablated_layout(split.layout, kept);
  auto proj = [&](const std::vector<SampleEntry>& src) {
    std::vector<SampleEntry> dst;
    dst.reserve(src.size());
    for (const auto& e : src) dst.push_back(project_entry(e, split.layout, kept));
    return dst;
  };
  out.train = proj(split.train);
  out.validation = proj(split.validation);
  out.test = proj(split.test);
  out.stats = split.stats;  // normalization already applied upstream
  return out;
}

using ModelBuilder =
    std::function<std::unique_ptr<Model>(const FeatureLayout&, std::uint64_t seed)>;

// Trains and evaluates one ablation configuration per seed.
inline EvalReport ablate(const DatasetSplit& split, const AblationSpec& spec,
                         const ModelBuilder& builder, const TrainConfig& tc) {
  const auto kept = spec.kept();
  const DatasetSplit reduced = project_split(split, kept);

  EvalReport report;
  report.configuration = spec.name();
  for (std::uint64_t seed : tc.seeds) {
    auto model = builder(reduced.layout, seed);
    train_model(*model, reduced, tc, seed);

    const auto preds = predict(*model, reduced.test, reduced.layout);
    std::vector<int> hard, labels;
    hard.reserve(preds.size());
    labels.reserve(preds.size());
    for (std::size_t i = 0; i < preds.size(); ++i) {
      hard.push_back(preds[i].hard_label);
      labels.push_back(reduced.test[i].label);
    }
    SeedEval se;
    se.seed = seed;
    se.counts = confusion(hard, labels);
    se.metrics = prf1(se.counts);
    se.weighted = weighted_f1(se.metrics);
    report.per_seed.push_back(se);
  }
  return report;
}

}  // namespace dap
