#pragma once

// Per-class precision/recall/F1 and support-weighted aggregation. Metrics
// are carried as exact integer fractions so the reported doubles are single
// correctly-rounded divisions; 0/0 cases resolve to 0 by convention.

#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "dap/common.hpp"

namespace dap {

struct ConfusionCounts {
  std::int64_t tp = 0;  // accident predicted accident
  std::int64_t fp = 0;
  std::int64_t tn = 0;
  std::int64_t fn = 0;

  std::int64_t total() const { return tp + fp + tn + fn; }
  friend bool operator==(const ConfusionCounts&, const ConfusionCounts&) = default;
};

inline ConfusionCounts confusion(const std::vector<int>& predictions,
                                 const std::vector<int>& labels) {
  if (predictions.size() != labels.size())
    fail(Errc::shape_error, "confusion: " + std::to_string(predictions.size()) +
                                " predictions vs " + std::to_string(labels.size()) + " labels");
  ConfusionCounts c;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    const bool pred = predictions[i] == 1;
    const bool truth = labels[i] == 1;
    if (pred && truth) ++c.tp;
    else if (pred && !truth) ++c.fp;
    else if (!pred && truth) ++c.fn;
    else ++c.tn;
  }
  return c;
}

// Exact non-negative fraction; num == den == 0 encodes the 0/0 convention.
struct Ratio {
  std::int64_t num = 0;
  std::int64_t den = 0;

  double value() const { return den == 0 ? 0.0 : static_cast<double>(num) / den; }

  static Ratio of(std::int64_t num, std::int64_t den) {
    if (den == 0) return Ratio{0, 0};
    const std::int64_t g = std::gcd(num, den);
    return Ratio{num / g, den / g};
  }

  friend bool operator==(const Ratio& a, const Ratio& b) {
    // cross-multiplied equality; 0/0 equals only 0/0
    if (a.den == 0 || b.den == 0) return a.den == b.den && a.num == b.num;
    return static_cast<__int128>(a.num) * b.den == static_cast<__int128>(b.num) * a.den;
  }
};

struct ClassMetrics {
  Ratio precision;
  Ratio recall;
  Ratio f1;
  std::int64_t support = 0;
};

struct PrF1 {
  ClassMetrics accident;
  ClassMetrics non_accident;
};

namespace metricdetail {

inline ClassMetrics class_metrics(std::int64_t tp, std::int64_t fp, std::int64_t fn,
                                  std::int64_t support) {
  ClassMetrics m;
  m.precision = Ratio::of(tp, tp + fp);
  m.recall = Ratio::of(tp, tp + fn);
  // F1 = 2PR/(P+R) simplifies to 2tp / (2tp + fp + fn); zero when undefined.
  m.f1 = Ratio::of(2 * tp, 2 * tp + fp + fn);
  m.support = support;
  return m;
}

}  // namespace metricdetail

inline PrF1 prf1(const ConfusionCounts& c) {
  PrF1 out;
  out.accident = metricdetail::class_metrics(c.tp, c.fp, c.fn, c.tp + c.fn);
  // swapping class roles swaps the error types
  out.non_accident = metricdetail::class_metrics(c.tn, c.fn, c.fp, c.tn + c.fp);
  return out;
}

// Support-weighted mean of per-class F1 scores, exact.
inline Ratio weighted_f1(const std::vector<Ratio>& f1s, const std::vector<std::int64_t>& supports) {
  if (f1s.size() != supports.size()) fail(Errc::shape_error, "weighted_f1: length mismatch");
  std::int64_t total = 0;
  for (std::int64_t s : supports) total += s;
  if (total == 0) fail(Errc::empty_eval, "weighted_f1: zero total support");

  // sum_i f1_i * s_i / total, accumulated exactly in 128-bit
  __int128 num = 0;
  __int128 den = 1;
  for (std::size_t i = 0; i < f1s.size(); ++i) {
    const std::int64_t fn = f1s[i].den == 0 ? 0 : f1s[i].num;
    const std::int64_t fd = f1s[i].den == 0 ? 1 : f1s[i].den;
    num = num * fd + static_cast<__int128>(fn) * supports[i] * den;
    den *= fd;
  }
  den *= total;
  // reduce back into int64
  auto g = [](__int128 a, __int128 b) {
    while (b != 0) {
      const __int128 t = a % b;
      a = b;
      b = t;
    }
    return a < 0 ? -a : a;
  };
  const __int128 common = g(num, den);
  if (common != 0) {
    num /= common;
    den /= common;
  }
  if (num > INT64_MAX || den > INT64_MAX)
    fail(Errc::shape_error, "weighted_f1: fraction overflow");
  return Ratio{static_cast<std::int64_t>(num), static_cast<std::int64_t>(den)};
}

inline Ratio weighted_f1(const PrF1& m) {
  return weighted_f1({m.accident.f1, m.non_accident.f1},
                     {m.accident.support, m.non_accident.support});
}

// ---------------------------------------------------------------------------
// Evaluation report: per-seed metrics for one configuration plus the mean.
// ---------------------------------------------------------------------------

struct SeedEval {
  std::uint64_t seed = 0;
  ConfusionCounts counts;
  PrF1 metrics;
  Ratio weighted;
};

struct EvalReport {
  std::string configuration;  // model kind or ablation tag
  std::vector<SeedEval> per_seed;

  double mean_accident_f1() const {
    double s = 0;
    for (const auto& e : per_seed) s += e.metrics.accident.f1.value();
    return per_seed.empty() ? 0.0 : s / per_seed.size();
  }
  double mean_non_accident_f1() const {
    double s = 0;
    for (const auto& e : per_seed) s += e.metrics.non_accident.f1.value();
    return per_seed.empty() ? 0.0 : s / per_seed.size();
  }
  double mean_weighted_f1() const {
    double s = 0;
    for (const auto& e : per_seed) s += e.weighted.value();
    return per_seed.empty() ? 0.0 : s / per_seed.size();
  }
};

}  // namespace dap
