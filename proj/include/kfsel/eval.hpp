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

#ifndef KFSEL_EVAL_HPP_
#define KFSEL_EVAL_HPP_

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "kfsel/core.hpp"
#include "kfsel/data.hpp"
#include "kfsel/error.hpp"
#include "kfsel/qtype.hpp"

namespace kfsel {

// Selection-quality metrics against planted or pseudo ground truth, broken
// down by question type the way ablation runs are compared.

/// Fraction of ground-truth keyframes recovered by the selection.
inline double recall_at_n(const KeyframeSelection& selected,
                          const std::vector<int>& truth) {
  if (selected.indices.empty() || truth.empty()) {
    throw InvalidArgument("recall_at_n: empty selection or truth");
  }
  const std::set<int> truth_set(truth.begin(), truth.end());
  int hits = 0;
  for (int i : selected.indices) {
    if (truth_set.count(i)) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(truth_set.size());
}

/// Population standard deviation of the indices, normalized by (T-1).
inline double temporal_spread(const std::vector<int>& indices, int T) {
  if (indices.empty() || T < 2) return 0.0;
  double mean = 0.0;
  for (int i : indices) mean += i;
  mean /= static_cast<double>(indices.size());
  double var = 0.0;
  for (int i : indices) var += (i - mean) * (i - mean);
  var /= static_cast<double>(indices.size());
  return std::sqrt(var) / static_cast<double>(T - 1);
}

/// Smallest difference between consecutive sorted indices; 0 when fewer
/// than two indices.
inline int min_gap(const std::vector<int>& indices) {
  if (indices.size() < 2) return 0;
  std::vector<int> sorted = indices;
  std::sort(sorted.begin(), sorted.end());
  int gap = sorted[1] - sorted[0];
  for (std::size_t i = 2; i < sorted.size(); ++i) {
    gap = std::min(gap, sorted[i] - sorted[i - 1]);
  }
  return gap;
}

struct MetricBucket {
  int count = 0;
  int with_truth = 0;
  double recall_at_n = 0.0;
  double mean_temporal_spread = 0.0;
  double mean_min_gap = 0.0;
  double objective_ratio_greedy = 1.0;
};

struct EvalReport {
  MetricBucket overall;
  std::map<QuestionType, MetricBucket> per_qtype;
};

namespace detail {

struct MetricAccum {
  int count = 0;
  int with_truth = 0;
  double recall_sum = 0.0;
  double spread_sum = 0.0;
  double gap_sum = 0.0;
  double ratio_sum = 0.0;
  int ratio_count = 0;

  MetricBucket finalize() const {
    MetricBucket b;
    b.count = count;
    b.with_truth = with_truth;
    b.recall_at_n = with_truth > 0 ? recall_sum / with_truth : 0.0;
    b.mean_temporal_spread = count > 0 ? spread_sum / count : 0.0;
    b.mean_min_gap = count > 0 ? gap_sum / count : 0.0;
    b.objective_ratio_greedy = ratio_count > 0 ? ratio_sum / ratio_count : 1.0;
    return b;
  }
};

inline OrderedJson bucket_json(const MetricBucket& b) {
  OrderedJson j;
  j["count"] = b.count;
  j["with_truth"] = b.with_truth;
  j["recall_at_n"] = b.recall_at_n;
  j["mean_temporal_spread"] = b.mean_temporal_spread;
  j["mean_min_gap"] = b.mean_min_gap;
  j["objective_ratio_greedy"] = b.objective_ratio_greedy;
  return j;
}

}  // namespace detail

/// Aggregates selection metrics overall and per question type. Ordered,
/// deterministic output; missing truth rows only affect the recall average.
inline EvalReport build_report(const SelectionsFile& selections,
                               const TruthFile& truth,
                               const DiagFile* diagnostics = nullptr) {
  const int T = selections.T;
  detail::MetricAccum overall;
  std::map<QuestionType, detail::MetricAccum> per_type;
  for (QuestionType qt : kAllQuestionTypes) per_type[qt];  // fixed key set

  for (const SelectionRecord& rec : selections.records) {
    const QuestionType qt = parse_question_type(rec.qtype);
    detail::MetricAccum* accums[2] = {&overall, &per_type[qt]};
    const QuestionKey key{rec.video_id, rec.question_id};
    const auto truth_it = truth.by_question.find(key);
    for (detail::MetricAccum* acc : accums) {
      acc->count += 1;
      acc->spread_sum += temporal_spread(rec.indices, T);
      acc->gap_sum += min_gap(rec.indices);
      if (truth_it != truth.by_question.end()) {
        KeyframeSelection sel;
        sel.indices = rec.indices;
        acc->with_truth += 1;
        acc->recall_sum += recall_at_n(sel, truth_it->second);
      }
      if (diagnostics != nullptr) {
        const auto diag_it = diagnostics->by_question.find(key);
        if (diag_it != diagnostics->by_question.end() &&
            std::abs(diag_it->second.objective_exact) > 1e-15) {
          const double ratio = diag_it->second.objective_greedy /
                               diag_it->second.objective_exact;
          acc->ratio_sum += std::clamp(ratio, 0.0, 1.0);
          acc->ratio_count += 1;
        }
      }
    }
  }

  EvalReport report;
  report.overall = overall.finalize();
  for (const auto& [qt, acc] : per_type) {
    report.per_qtype[qt] = acc.finalize();
  }
  return report;
}

inline detail::OrderedJson report_json(const EvalReport& report) {
  detail::OrderedJson j;
  j["counts"] = detail::OrderedJson::object();
  j["counts"]["total"] = report.overall.count;
  for (QuestionType qt : kAllQuestionTypes) {
    j["counts"][to_string(qt)] = report.per_qtype.at(qt).count;
  }
  j["recall_at_n"] = report.overall.recall_at_n;
  j["mean_temporal_spread"] = report.overall.mean_temporal_spread;
  j["mean_min_gap"] = report.overall.mean_min_gap;
  j["objective_ratio_greedy"] = report.overall.objective_ratio_greedy;
  j["per_qtype"] = detail::OrderedJson::object();
  for (QuestionType qt : kAllQuestionTypes) {
    j["per_qtype"][to_string(qt)] = detail::bucket_json(report.per_qtype.at(qt));
  }
  return j;
}

inline void write_report(const EvalReport& report, const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    throw Error("cannot open report file for writing: " + path);
  }
  out << report_json(report).dump(2) << "\n";
}

}  // namespace kfsel

#endif  // KFSEL_EVAL_HPP_
