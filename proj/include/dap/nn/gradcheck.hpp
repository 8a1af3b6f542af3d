#pragma once

// Central finite-difference gradient verification. The caller computes the
// analytic gradients once (loss + backward), then hands over a pure loss
// closure; each parameter element is perturbed in both directions and the
// numeric slope compared against the stored gradient.

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "dap/nn/layers.hpp"

namespace dap::nn {

struct GradCheckBlock {
  std::string name;
  double max_rel_error = 0.0;
};

struct GradCheckReport {
  std::vector<GradCheckBlock> blocks;
  double max_rel_error = 0.0;  // 0 for a zero-parameter model
};

template <typename LossFn>
GradCheckReport grad_check(const std::vector<Param*>& params, LossFn&& loss, double eps = 1e-5) {
  GradCheckReport report;
  for (Param* p : params) {
    GradCheckBlock block;
    block.name = p->name;
    double* w = p->value.data();
    const double* g = p->grad.data();
    for (std::size_t i = 0; i < p->value.size(); ++i) {
      const double orig = w[i];
      w[i] = orig + eps;
      const double fp = loss();
      w[i] = orig - eps;
      const double fm = loss();
      w[i] = orig;
      const double numeric = (fp - fm) / (2.0 * eps);
      const double analytic = g[i];
      const double denom = std::max({1e-6, std::abs(numeric), std::abs(analytic)});
      block.max_rel_error = std::max(block.max_rel_error,
                                     std::abs(numeric - analytic) / denom);
    }
    report.max_rel_error = std::max(report.max_rel_error, block.max_rel_error);
    report.blocks.push_back(std::move(block));
  }
  return report;
}

}  // namespace dap::nn
