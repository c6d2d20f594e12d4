// Copyright 2026 The Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef KFSEL_CORE_HPP_
#define KFSEL_CORE_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <vector>

#include "kfsel/error.hpp"

namespace kfsel {

// Frame t of a T-frame video sits at normalized time t/(T-1), so the grid
// endpoints are exactly 0 and 1.
inline double grid_time(int t, int T) {
  return static_cast<double>(t) / static_cast<double>(T - 1);
}

/// One temporal Gaussian: unit amplitude, center in normalized time.
struct GaussianParams {
  double center = 0.5;  // in [0, 1]
  double width = 0.1;   // > 0, normalized time units
};

/// Per-frame weights in [0, 1], length T.
struct Mask {
  std::vector<double> values;
};

/// Min-max normalized sum of masks; always spans [0, 1] unless degenerate.
struct FrameDistribution {
  std::vector<double> p;
};

/// N sorted unique frame indices plus the objective they achieve.
struct KeyframeSelection {
  std::vector<int> indices;
  double objective_value = 0.0;
};

/// Evaluates exp(-(t/(T-1) - center)^2 / (2 width^2)) over the frame grid.
inline Mask gaussian_mask(const GaussianParams& params, int T) {
  if (T < 2) {
    throw InvalidArgument("gaussian_mask: T must be >= 2, got " +
                          std::to_string(T));
  }
  if (!(params.width > 0.0) || !std::isfinite(params.center) ||
      !std::isfinite(params.width)) {
    throw InvalidArgument("gaussian_mask: invalid params (center=" +
                          std::to_string(params.center) +
                          ", width=" + std::to_string(params.width) + ")");
  }
  Mask mask;
  mask.values.resize(static_cast<std::size_t>(T));
  const double denom = 2.0 * params.width * params.width;
  for (int t = 0; t < T; ++t) {
    const double d = grid_time(t, T) - params.center;
    mask.values[static_cast<std::size_t>(t)] = std::exp(-(d * d) / denom);
  }
  return mask;
}

/// Sums masks elementwise and min-max normalizes the sum to [0, 1].
/// A constant sum maps to the all-ones vector so top_n stays well-defined.
inline FrameDistribution normalize_sum(const std::vector<Mask>& masks) {
  if (masks.empty()) {
    throw InvalidArgument("normalize_sum: need at least one mask");
  }
  const std::size_t T = masks.front().values.size();
  for (const Mask& m : masks) {
    if (m.values.size() != T) {
      throw InvalidArgument("normalize_sum: mask length mismatch (" +
                            std::to_string(m.values.size()) + " vs " +
                            std::to_string(T) + ")");
    }
  }
  std::vector<double> sum(T, 0.0);
  for (const Mask& m : masks) {
    for (std::size_t t = 0; t < T; ++t) sum[t] += m.values[t];
  }
  const auto [lo_it, hi_it] = std::minmax_element(sum.begin(), sum.end());
  const double lo = *lo_it, hi = *hi_it;
  FrameDistribution dist;
  dist.p.resize(T);
  if (hi == lo) {
    std::fill(dist.p.begin(), dist.p.end(), 1.0);
    return dist;
  }
  const double span = hi - lo;
  for (std::size_t t = 0; t < T; ++t) dist.p[t] = (sum[t] - lo) / span;
  return dist;
}

/// Indices of the N largest values; ties go to the lowest index; output
/// sorted ascending. objective_value is the sum of the selected values.
inline KeyframeSelection top_n(const std::vector<double>& values, int N) {
  const int T = static_cast<int>(values.size());
  if (N < 1 || N > T) {
    throw InvalidArgument("top_n: N=" + std::to_string(N) +
                          " out of range for T=" + std::to_string(T));
  }
  std::vector<int> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return values[static_cast<std::size_t>(a)] >
           values[static_cast<std::size_t>(b)];
  });
  KeyframeSelection sel;
  sel.indices.assign(order.begin(), order.begin() + N);
  std::sort(sel.indices.begin(), sel.indices.end());
  sel.objective_value = 0.0;
  for (int i : sel.indices) sel.objective_value += values[static_cast<std::size_t>(i)];
  return sel;
}

inline KeyframeSelection top_n(const FrameDistribution& dist, int N) {
  return top_n(dist.p, N);
}

}  // namespace kfsel

#endif  // KFSEL_CORE_HPP_
