#pragma once

// Report serialization: machine CSV plus a human-readable table.

#include <ostream>
#include <string>
#include <vector>

#include "dap/csv.hpp"
#include "dap/metrics.hpp"

namespace dap {

namespace fmtdetail {

inline void eval_rows(std::ostream& csv, const EvalReport& r) {
  auto row = [&](const char* cls, const Ratio& p, const Ratio& rec, const Ratio& f1,
                 std::int64_t support, const std::string& seed) {
    csv_write_row(csv, {r.configuration, cls, format_double(p.value()),
                        format_double(rec.value()), format_double(f1.value()),
                        std::to_string(support), seed});
  };
  for (const auto& s : r.per_seed) {
    const std::string seed = std::to_string(s.seed);
    row("accident", s.metrics.accident.precision, s.metrics.accident.recall,
        s.metrics.accident.f1, s.metrics.accident.support, seed);
    row("non-accident", s.metrics.non_accident.precision, s.metrics.non_accident.recall,
        s.metrics.non_accident.f1, s.metrics.non_accident.support, seed);
    csv_write_row(csv, {r.configuration, "weighted-avg", "", "",
                        format_double(s.weighted.value()),
                        std::to_string(s.metrics.accident.support +
                                       s.metrics.non_accident.support),
                        seed});
  }
  csv_write_row(csv, {r.configuration, "accident", "", "",
                      format_double(r.mean_accident_f1()), "", "mean"});
  csv_write_row(csv, {r.configuration, "non-accident", "", "",
                      format_double(r.mean_non_accident_f1()), "", "mean"});
  csv_write_row(csv, {r.configuration, "weighted-avg", "", "",
                      format_double(r.mean_weighted_f1()), "", "mean"});
}

inline void eval_table(std::ostream& txt, const EvalReport& r) {
  txt << "configuration: " << r.configuration << '\n';
  txt << "  seed        class          precision  recall     f1         support\n";
  char line[160];
  for (const auto& s : r.per_seed) {
    auto print = [&](const char* cls, const ClassMetrics& m) {
      std::snprintf(line, sizeof line, "  %-10llu  %-13s  %-9.4f  %-9.4f  %-9.4f  %lld\n",
                    static_cast<unsigned long long>(s.seed), cls, m.precision.value(),
                    m.recall.value(), m.f1.value(), static_cast<long long>(m.support));
      txt << line;
    };
    print("accident", s.metrics.accident);
    print("non-accident", s.metrics.non_accident);
    std::snprintf(line, sizeof line, "  %-10llu  %-13s  %-9s  %-9s  %-9.4f\n",
                  static_cast<unsigned long long>(s.seed), "weighted-avg", "", "",
                  s.weighted.value());
    txt << line;
  }
  std::snprintf(line, sizeof line,
                "  mean        accident-f1 %.4f  non-accident-f1 %.4f  weighted-f1 %.4f\n",
                r.mean_accident_f1(), r.mean_non_accident_f1(), r.mean_weighted_f1());
  txt << line;
}

}  // namespace fmtdetail

inline void write_eval_reports(const EvalReport& report, const std::string& csv_path,
                               const std::string& txt_path) {
  {
    auto csv = open_output(csv_path);
    csv_write_row(csv, {"configuration", "class", "precision", "recall", "f1", "support", "seed"});
    fmtdetail::eval_rows(csv, report);
  }
  {
    auto txt = open_output(txt_path);
    fmtdetail::eval_table(txt, report);
  }
}

inline void write_ablation_report(const std::vector<EvalReport>& reports,
                                  const std::string& csv_path) {
  auto csv = open_output(csv_path);
  csv_write_row(csv, {"configuration", "class", "precision", "recall", "f1", "support", "seed"});
  for (const auto& r : reports) fmtdetail::eval_rows(csv, r);
}

}  // namespace dap
