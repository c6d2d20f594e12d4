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

#ifndef KFSEL_SKS_HPP_
#define KFSEL_SKS_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "kfsel/core.hpp"
#include "kfsel/error.hpp"
#include "kfsel/generator.hpp"
#include "kfsel/qccr.hpp"
#include "kfsel/text.hpp"

namespace kfsel {

// Synthetic keyframe supervision: similarity-based top-N labels fused with a
// deterministic rule ranker that stands in for an LMM. The ranker applies
// four prioritized rules: informative frames first, near-duplicates collapse
// to the earliest, before/after cues restrict the candidate range, and an
// even-spacing fallback fills whatever remains.

/// Per-frame annotations the rule ranker consumes.
struct FrameMeta {
  int index = 0;
  std::set<std::string> entities;
  std::set<std::string> actions;
  int segment_id = 0;
  std::vector<double> feature;
};

enum class TemporalCue { kNone, kBefore, kAfter };

inline const char* to_string(TemporalCue cue) {
  switch (cue) {
    case TemporalCue::kNone: return "none";
    case TemporalCue::kBefore: return "before";
    case TemporalCue::kAfter: return "after";
  }
  return "none";
}

/// What the question refers to, plus an optional before/after anchor.
struct QuestionMeta {
  std::string text;
  std::set<std::string> referenced_entities;
  std::set<std::string> referenced_actions;
  TemporalCue temporal_cue = TemporalCue::kNone;
  std::optional<std::string> cue_anchor;
};

/// K pseudo keyframe timestamps in [0,1], sorted ascending, with per-label
/// supervision weights.
struct PseudoLabels {
  std::vector<double> timestamps;
  std::vector<double> source_weights;
};

/// rule_rank output: the chosen indices plus diagnostics for skipped rules.
struct RuleRankResult {
  std::vector<int> indices;
  std::vector<std::string> diagnostics;
};

/// Top-N frames by similarity converted to timestamps t/(T-1).
inline PseudoLabels clip_labels(const FrameScores& sim, int N) {
  const int T = static_cast<int>(sim.s.size());
  const KeyframeSelection sel = top_n(sim.s, N);
  PseudoLabels labels;
  labels.timestamps.reserve(static_cast<std::size_t>(N));
  for (int i : sel.indices) labels.timestamps.push_back(grid_time(i, T));
  labels.source_weights.assign(static_cast<std::size_t>(N), 1.0);
  return labels;
}

namespace detail {

inline double cosine(const std::vector<double>& a,
                     const std::vector<double>& b) {
  if (a.size() != b.size() || a.empty()) return 0.0;
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na < 1e-24 || nb < 1e-24) return 0.0;
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int n) : parent(static_cast<std::size_t>(n)) {
    std::iota(parent.begin(), parent.end(), 0);
  }
  int find(int x) {
    while (parent[static_cast<std::size_t>(x)] != x) {
      parent[static_cast<std::size_t>(x)] =
          parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
      x = parent[static_cast<std::size_t>(x)];
    }
    return x;
  }
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[static_cast<std::size_t>(std::max(a, b))] = std::min(a, b);
  }
};

/// Evenly spaced indices round(j*(T-1)/(N-1)); a single frame sits at 0.
inline std::vector<int> even_spacing(int T, int N) {
  std::vector<int> out;
  out.reserve(static_cast<std::size_t>(N));
  if (N == 1) {
    out.push_back(0);
    return out;
  }
  for (int j = 0; j < N; ++j) {
    out.push_back(static_cast<int>(std::lround(
        static_cast<double>(j) * (T - 1) / static_cast<double>(N - 1))));
  }
  return out;
}

}  // namespace detail

/// Deterministic stand-in for the LMM ranker. Returns exactly N unique
/// sorted in-range indices for any metadata.
inline RuleRankResult rule_rank(const std::vector<FrameMeta>& frames,
                                const QuestionMeta& q, int N,
                                double dup_threshold = 0.95) {
  const int T = static_cast<int>(frames.size());
  if (N < 1 || N > T) {
    throw InvalidArgument("rule_rank: N=" + std::to_string(N) +
                          " out of range for T=" + std::to_string(T));
  }
  for (int i = 0; i < T; ++i) {
    if (frames[static_cast<std::size_t>(i)].index != i) {
      throw InvalidArgument("rule_rank: frames must be indexed 0..T-1 in order");
    }
  }
  RuleRankResult result;

  // Rule 1: informativeness = overlap between frame annotations and the
  // question's references.
  std::vector<int> overlap(static_cast<std::size_t>(T), 0);
  for (int i = 0; i < T; ++i) {
    const FrameMeta& fm = frames[static_cast<std::size_t>(i)];
    int score = 0;
    for (const std::string& e : fm.entities) {
      if (q.referenced_entities.count(e)) ++score;
    }
    for (const std::string& a : fm.actions) {
      if (q.referenced_actions.count(a)) ++score;
    }
    overlap[static_cast<std::size_t>(i)] = score;
  }

  // Rule 2: collapse near-duplicate groups (feature cosine above threshold,
  // or identical entities/actions/segment) to their earliest member.
  detail::UnionFind groups(T);
  for (int i = 0; i < T; ++i) {
    const FrameMeta& fi = frames[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < T; ++j) {
      const FrameMeta& fj = frames[static_cast<std::size_t>(j)];
      const bool same_meta = fi.segment_id == fj.segment_id &&
                             fi.entities == fj.entities &&
                             fi.actions == fj.actions;
      if (same_meta ||
          detail::cosine(fi.feature, fj.feature) >= dup_threshold) {
        groups.unite(i, j);
      }
    }
  }
  std::vector<bool> survives(static_cast<std::size_t>(T), false);
  for (int i = 0; i < T; ++i) {
    // unite() always roots groups at their minimum index.
    survives[static_cast<std::size_t>(i)] = groups.find(i) == i;
  }

  // Rule 3: before/after cues restrict candidates relative to the anchor
  // action's first (before) or last (after) occurrence.
  if (q.temporal_cue != TemporalCue::kNone) {
    if (!q.cue_anchor.has_value()) {
      throw InvalidArgument("rule_rank: temporal cue without cue_anchor");
    }
    int anchor = -1;
    if (q.temporal_cue == TemporalCue::kAfter) {
      for (int i = 0; i < T; ++i) {
        if (frames[static_cast<std::size_t>(i)].actions.count(*q.cue_anchor)) {
          anchor = i;
        }
      }
    } else {
      for (int i = T - 1; i >= 0; --i) {
        if (frames[static_cast<std::size_t>(i)].actions.count(*q.cue_anchor)) {
          anchor = i;
        }
      }
    }
    if (anchor < 0) {
      result.diagnostics.push_back("temporal cue skipped: anchor '" +
                                   *q.cue_anchor + "' not present");
    } else if (q.temporal_cue == TemporalCue::kAfter) {
      for (int i = 0; i <= anchor; ++i) survives[static_cast<std::size_t>(i)] = false;
    } else {
      for (int i = anchor; i < T; ++i) survives[static_cast<std::size_t>(i)] = false;
    }
  }

  // Informative candidates, highest overlap first, earliest on ties.
  std::vector<int> candidates;
  for (int i = 0; i < T; ++i) {
    if (survives[static_cast<std::size_t>(i)] &&
        overlap[static_cast<std::size_t>(i)] > 0) {
      candidates.push_back(i);
    }
  }
  std::stable_sort(candidates.begin(), candidates.end(), [&](int a, int b) {
    return overlap[static_cast<std::size_t>(a)] >
           overlap[static_cast<std::size_t>(b)];
  });

  std::vector<int> chosen;
  std::vector<bool> used(static_cast<std::size_t>(T), false);
  for (int i : candidates) {
    if (static_cast<int>(chosen.size()) == N) break;
    chosen.push_back(i);
    used[static_cast<std::size_t>(i)] = true;
  }

  // Rule 4: fill (or fall back entirely) with evenly spaced indices,
  // deflecting collisions to the nearest unused frame.
  if (static_cast<int>(chosen.size()) < N) {
    if (chosen.empty()) {
      result.diagnostics.push_back("uniform fallback: no informative frames");
    }
    for (int target : detail::even_spacing(T, N)) {
      if (static_cast<int>(chosen.size()) == N) break;
      int best = -1;
      for (int d = 0; d < T; ++d) {
        const int lo = target - d, hi = target + d;
        if (lo >= 0 && !used[static_cast<std::size_t>(lo)]) {
          best = lo;
          break;
        }
        if (hi < T && !used[static_cast<std::size_t>(hi)]) {
          best = hi;
          break;
        }
      }
      chosen.push_back(best);
      used[static_cast<std::size_t>(best)] = true;
    }
  }
  std::sort(chosen.begin(), chosen.end());
  result.indices = std::move(chosen);
  return result;
}

/// Weighted union of both label sources: weight = alpha for ranker labels,
/// (1-alpha) for similarity labels, summed when a timestamp is in both.
/// Keeps the N heaviest candidates, earliest timestamp on ties.
inline PseudoLabels fuse_labels(const PseudoLabels& clip,
                                const PseudoLabels& vlm, double alpha, int N) {
  if (alpha < 0.0 || alpha > 1.0) {
    throw InvalidArgument("fuse_labels: alpha must be in [0, 1]");
  }
  struct Candidate {
    double ts;
    double weight;
  };
  std::vector<Candidate> cands;
  const auto upsert = [&](double ts, double w) {
    for (Candidate& c : cands) {
      if (c.ts == ts) {
        c.weight += w;
        return;
      }
    }
    cands.push_back({ts, w});
  };
  for (double ts : vlm.timestamps) upsert(ts, alpha);
  for (double ts : clip.timestamps) upsert(ts, 1.0 - alpha);
  if (static_cast<int>(cands.size()) < N) {
    throw InvalidArgument("fuse_labels: fewer than N distinct candidates");
  }
  std::sort(cands.begin(), cands.end(), [](const Candidate& a, const Candidate& b) {
    if (a.weight != b.weight) return a.weight > b.weight;
    return a.ts < b.ts;
  });
  cands.resize(static_cast<std::size_t>(N));
  std::sort(cands.begin(), cands.end(),
            [](const Candidate& a, const Candidate& b) { return a.ts < b.ts; });
  PseudoLabels fused;
  for (const Candidate& c : cands) {
    fused.timestamps.push_back(c.ts);
    fused.source_weights.push_back(c.weight);
  }
  return fused;
}

/// One unit-peak Gaussian mask per timestamp, all of width sigma_target,
/// in timestamp order.
inline TargetMasks target_masks(const PseudoLabels& labels, int T,
                                double sigma_target) {
  if (!(sigma_target > 0.0)) {
    throw InvalidArgument("target_masks: sigma_target must be > 0");
  }
  std::vector<double> ts = labels.timestamps;
  std::sort(ts.begin(), ts.end());
  TargetMasks targets;
  targets.w.reserve(ts.size());
  for (double t : ts) {
    targets.w.push_back(gaussian_mask({t, sigma_target}, T));
  }
  return targets;
}

/// Builds QuestionMeta from plain text by intersecting question and answer
/// tokens with the vocabulary present in the frame annotations. The cue
/// anchor is the first action-vocabulary token after the cue word; a cue
/// with no resolvable anchor is dropped.
inline QuestionMeta derive_question_meta(const std::string& question_text,
                                         const std::string& answer_text,
                                         const std::vector<FrameMeta>& frames) {
  QuestionMeta meta;
  meta.text = question_text;
  std::set<std::string> entity_vocab, action_vocab;
  for (const FrameMeta& fm : frames) {
    entity_vocab.insert(fm.entities.begin(), fm.entities.end());
    action_vocab.insert(fm.actions.begin(), fm.actions.end());
  }
  const std::vector<std::string> qtokens = tokenize(question_text);
  std::vector<std::string> all_tokens = qtokens;
  const std::vector<std::string> atokens = tokenize(answer_text);
  all_tokens.insert(all_tokens.end(), atokens.begin(), atokens.end());
  for (const std::string& tok : all_tokens) {
    if (entity_vocab.count(tok)) meta.referenced_entities.insert(tok);
    if (action_vocab.count(tok)) meta.referenced_actions.insert(tok);
  }
  for (std::size_t i = 0; i < qtokens.size(); ++i) {
    TemporalCue cue = TemporalCue::kNone;
    if (qtokens[i] == "before") cue = TemporalCue::kBefore;
    if (qtokens[i] == "after") cue = TemporalCue::kAfter;
    if (cue == TemporalCue::kNone) continue;
    for (std::size_t j = i + 1; j < qtokens.size(); ++j) {
      if (action_vocab.count(qtokens[j])) {
        meta.temporal_cue = cue;
        meta.cue_anchor = qtokens[j];
        return meta;
      }
    }
  }
  return meta;
}

}  // namespace kfsel

#endif  // KFSEL_SKS_HPP_
