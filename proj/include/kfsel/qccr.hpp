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

#ifndef KFSEL_QCCR_HPP_
#define KFSEL_QCCR_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <queue>
#include <string>
#include <vector>

#include "kfsel/core.hpp"
#include "kfsel/error.hpp"
#include "kfsel/qtype.hpp"

namespace kfsel {

// Question-conditioned coverage-regularized selection: maximize
//
//   objective(I) = sum_{t in I} s[t] + lambda * c(I)
//
// over index sets of size N, where c is facility-location coverage with a
// Gaussian kernel over frame indices:
//
//   c(I) = (1/T) * sum_t max_{i in I} exp(-(t-i)^2 / (2 tau^2)).
//
// c is monotone submodular, which gives the exact line DP its segment
// decomposition and the lazy greedy its (1-1/e) guarantee.

/// Per-frame relevance scores s(Q, x_t), length T.
struct FrameScores {
  std::vector<double> s;
};

/// Temporal bandwidth of the coverage kernel, in frame-index units.
struct CoverageKernel {
  double tau = 4.0;
};

/// Per-question-type regularization strengths. All three types must be set.
using LambdaTable = std::map<QuestionType, double>;

inline LambdaTable default_lambda_table() {
  return {{QuestionType::kDescriptive, 0.2},
          {QuestionType::kTemporal, 0.8},
          {QuestionType::kCausal, 0.5}};
}

inline double lambda_for(QuestionType qtype, const LambdaTable& table) {
  auto it = table.find(qtype);
  if (it == table.end()) {
    throw ConfigError(std::string("lambda table has no entry for type '") +
                      to_string(qtype) + "'");
  }
  return it->second;
}

namespace detail {

inline void check_kernel(const CoverageKernel& kernel) {
  if (!(kernel.tau > 0.0) || !std::isfinite(kernel.tau)) {
    throw InvalidArgument("coverage kernel: tau must be > 0");
  }
}

inline void check_indices(const std::vector<int>& indices, int T) {
  if (indices.empty()) {
    throw InvalidArgument("index set must be non-empty");
  }
  std::vector<int> sorted = indices;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    if (sorted[i] < 0 || sorted[i] >= T) {
      throw InvalidArgument("index " + std::to_string(sorted[i]) +
                            " out of range [0, " + std::to_string(T) + ")");
    }
    if (i > 0 && sorted[i] == sorted[i - 1]) {
      throw InvalidArgument("duplicate index " + std::to_string(sorted[i]));
    }
  }
}

/// kernel[d] = exp(-d^2 / (2 tau^2)) for d = 0..T-1.
inline std::vector<double> kernel_values(int T, const CoverageKernel& kernel) {
  std::vector<double> k(static_cast<std::size_t>(T));
  const double denom = 2.0 * kernel.tau * kernel.tau;
  for (int d = 0; d < T; ++d) {
    k[static_cast<std::size_t>(d)] =
        std::exp(-static_cast<double>(d) * d / denom);
  }
  return k;
}

inline std::uint64_t binomial_capped(int n, int k, std::uint64_t cap) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  std::uint64_t c = 1;
  for (int i = 1; i <= k; ++i) {
    // c * (n - k + i) may overflow only far past any practical cap.
    double next = static_cast<double>(c) * (n - k + i) / i;
    if (next > static_cast<double>(cap) * 2.0) return cap + 1;
    c = c * static_cast<std::uint64_t>(n - k + i) / static_cast<std::uint64_t>(i);
  }
  return c;
}

}  // namespace detail

/// Facility-location coverage of the whole timeline by the selected frames.
/// Result lies in (0, 1]; the full index set covers exactly 1.
inline double coverage(const std::vector<int>& indices, int T,
                       const CoverageKernel& kernel) {
  detail::check_kernel(kernel);
  detail::check_indices(indices, T);
  const std::vector<double> k = detail::kernel_values(T, kernel);
  double sum = 0.0;
  for (int t = 0; t < T; ++t) {
    double best = 0.0;
    for (int i : indices) {
      const int d = t >= i ? t - i : i - t;
      best = std::max(best, k[static_cast<std::size_t>(d)]);
    }
    sum += best;
  }
  return sum / static_cast<double>(T);
}

/// Score sum plus lambda-weighted coverage for an explicit index set.
inline double objective(const FrameScores& scores,
                        const std::vector<int>& indices, double lambda,
                        const CoverageKernel& kernel) {
  const int T = static_cast<int>(scores.s.size());
  detail::check_indices(indices, T);
  double total = 0.0;
  for (int i : indices) total += scores.s[static_cast<std::size_t>(i)];
  return total + lambda * coverage(indices, T, kernel);
}

/// Reference maximizer: enumerates all N-subsets in lexicographic order.
/// Ties keep the lexicographically smallest index vector. Guarded to
/// C(T, N) <= 10^6 instances; use select_dp beyond that.
inline KeyframeSelection select_brute(const FrameScores& scores, int N,
                                      double lambda,
                                      const CoverageKernel& kernel) {
  const int T = static_cast<int>(scores.s.size());
  if (N < 1 || N > T) {
    throw InvalidArgument("select_brute: N=" + std::to_string(N) +
                          " out of range for T=" + std::to_string(T));
  }
  constexpr std::uint64_t kGuard = 1000000;
  if (detail::binomial_capped(T, N, kGuard) > kGuard) {
    throw InvalidArgument(
        "select_brute: C(T, N) exceeds 10^6 subsets; use select_dp");
  }
  std::vector<int> comb(static_cast<std::size_t>(N));
  for (int i = 0; i < N; ++i) comb[static_cast<std::size_t>(i)] = i;
  KeyframeSelection best;
  bool have = false;
  while (true) {
    const double value = objective(scores, comb, lambda, kernel);
    if (!have || value > best.objective_value) {
      best.indices = comb;
      best.objective_value = value;
      have = true;
    }
    // Advance to the next combination in lexicographic order.
    int i = N - 1;
    while (i >= 0 && comb[static_cast<std::size_t>(i)] == T - N + i) --i;
    if (i < 0) break;
    ++comb[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < N; ++j) {
      comb[static_cast<std::size_t>(j)] = comb[static_cast<std::size_t>(j - 1)] + 1;
    }
  }
  return best;
}

/// Exact maximizer via dynamic programming on the ordered selection
/// i_1 < ... < i_N. The kernel decreases with distance, so every frame is
/// covered by its nearest selected index and the coverage sum splits into
/// per-segment pieces with the boundary at each segment's midpoint. State is
/// (count selected, last index); O(N T^2) time, O(N T) memory. Ties resolve
/// to the lexicographically smallest index vector, matching select_brute.
inline KeyframeSelection select_dp(const FrameScores& scores, int N,
                                   double lambda,
                                   const CoverageKernel& kernel) {
  const int T = static_cast<int>(scores.s.size());
  if (N < 1 || N > T) {
    throw InvalidArgument("select_dp: N=" + std::to_string(N) +
                          " out of range for T=" + std::to_string(T));
  }
  detail::check_kernel(kernel);
  const std::vector<double> k = detail::kernel_values(T, kernel);
  // prefix[d] = sum of kernel values at distances 1..d.
  std::vector<double> prefix(static_cast<std::size_t>(T) + 1, 0.0);
  for (int d = 1; d <= T; ++d) {
    prefix[static_cast<std::size_t>(d)] =
        prefix[static_cast<std::size_t>(d - 1)] +
        (d < T ? k[static_cast<std::size_t>(d)] : 0.0);
  }
  // Interior frames between consecutive selections p < i, each covered by
  // the nearer endpoint: gap g = i-p-1 contributes 2*prefix[g/2] plus the
  // middle kernel value when g is odd.
  const auto between = [&](int p, int i) {
    const int g = i - p - 1;
    double b = 2.0 * prefix[static_cast<std::size_t>(g / 2)];
    if (g % 2 == 1) b += k[static_cast<std::size_t>((g + 1) / 2)];
    return b;
  };
  const double scale = lambda / static_cast<double>(T);

  struct Cell {
    double value = 0.0;
    bool live = false;
    std::vector<int> sel;  // lexicographically smallest maximizer prefix
  };
  std::vector<Cell> prev(static_cast<std::size_t>(T));
  std::vector<Cell> cur(static_cast<std::size_t>(T));
  for (int i = 0; i < T; ++i) {
    Cell& c = prev[static_cast<std::size_t>(i)];
    // Left tail covered by the first selection, plus the kernel peak at i.
    c.value = scores.s[static_cast<std::size_t>(i)] +
              scale * (prefix[static_cast<std::size_t>(i)] + 1.0);
    c.live = true;
    c.sel = {i};
  }
  for (int j = 2; j <= N; ++j) {
    for (int i = 0; i < T; ++i) {
      Cell& c = cur[static_cast<std::size_t>(i)];
      c.live = false;
      c.sel.clear();
      for (int p = j - 2; p < i; ++p) {
        const Cell& pc = prev[static_cast<std::size_t>(p)];
        if (!pc.live) continue;
        const double cand = pc.value + scores.s[static_cast<std::size_t>(i)] +
                            scale * (between(p, i) + 1.0);
        const bool better =
            !c.live || cand > c.value ||
            (cand == c.value &&
             std::lexicographical_compare(pc.sel.begin(), pc.sel.end(),
                                          c.sel.begin(), c.sel.end() - 1));
        if (better) {
          c.value = cand;
          c.live = true;
          c.sel = pc.sel;
          c.sel.push_back(i);
        }
      }
    }
    std::swap(prev, cur);
  }
  KeyframeSelection best;
  bool have = false;
  for (int i = 0; i < T; ++i) {
    const Cell& c = prev[static_cast<std::size_t>(i)];
    if (!c.live) continue;
    const double total =
        c.value + scale * prefix[static_cast<std::size_t>(T - 1 - i)];
    const bool better =
        !have || total > best.objective_value ||
        (total == best.objective_value &&
         std::lexicographical_compare(c.sel.begin(), c.sel.end(),
                                      best.indices.begin(),
                                      best.indices.end()));
    if (better) {
      best.indices = c.sel;
      best.objective_value = total;
      have = true;
    }
  }
  // Canonical objective so values compare exactly across solvers.
  best.objective_value = objective(scores, best.indices, lambda, kernel);
  return best;
}

/// Lazy greedy (CELF): a max-priority queue holds possibly stale marginal
/// gains; a popped entry is accepted only if it was computed in the current
/// round, otherwise it is refreshed and reinserted. Submodularity makes the
/// stale values valid upper bounds. Ties go to the lowest index.
inline KeyframeSelection select_greedy(const FrameScores& scores, int N,
                                       double lambda,
                                       const CoverageKernel& kernel) {
  const int T = static_cast<int>(scores.s.size());
  if (N < 1 || N > T) {
    throw InvalidArgument("select_greedy: N=" + std::to_string(N) +
                          " out of range for T=" + std::to_string(T));
  }
  detail::check_kernel(kernel);
  const std::vector<double> k = detail::kernel_values(T, kernel);
  const double scale = lambda / static_cast<double>(T);
  std::vector<double> covered(static_cast<std::size_t>(T), 0.0);
  std::vector<bool> taken(static_cast<std::size_t>(T), false);

  const auto gain = [&](int i) {
    double delta = 0.0;
    for (int t = 0; t < T; ++t) {
      const int d = t >= i ? t - i : i - t;
      const double v = k[static_cast<std::size_t>(d)];
      if (v > covered[static_cast<std::size_t>(t)]) {
        delta += v - covered[static_cast<std::size_t>(t)];
      }
    }
    return scores.s[static_cast<std::size_t>(i)] + scale * delta;
  };

  struct Entry {
    double gain;
    int index;
    int round;
  };
  struct Less {
    bool operator()(const Entry& a, const Entry& b) const {
      if (a.gain != b.gain) return a.gain < b.gain;
      return a.index > b.index;  // equal gains: lowest index on top
    }
  };
  std::priority_queue<Entry, std::vector<Entry>, Less> queue;
  for (int i = 0; i < T; ++i) queue.push({gain(i), i, 0});

  KeyframeSelection sel;
  int round = 0;
  while (static_cast<int>(sel.indices.size()) < N && !queue.empty()) {
    Entry e = queue.top();
    queue.pop();
    if (taken[static_cast<std::size_t>(e.index)]) continue;
    if (e.round != round) {
      queue.push({gain(e.index), e.index, round});
      continue;
    }
    taken[static_cast<std::size_t>(e.index)] = true;
    sel.indices.push_back(e.index);
    for (int t = 0; t < T; ++t) {
      const int d = t >= e.index ? t - e.index : e.index - t;
      covered[static_cast<std::size_t>(t)] = std::max(
          covered[static_cast<std::size_t>(t)], k[static_cast<std::size_t>(d)]);
    }
    ++round;
  }
  std::sort(sel.indices.begin(), sel.indices.end());
  sel.objective_value = objective(scores, sel.indices, lambda, kernel);
  return sel;
}

}  // namespace kfsel

#endif  // KFSEL_QCCR_HPP_
