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

#ifndef KFSEL_DATA_HPP_
#define KFSEL_DATA_HPP_

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "kfsel/error.hpp"
#include "kfsel/qccr.hpp"
#include "kfsel/qtype.hpp"
#include "kfsel/rng.hpp"
#include "kfsel/sks.hpp"

namespace kfsel {

// All corpora are JSONL: a header line {"format": ..., "T": ...} followed by
// one record per line. Loaders validate strictly and report every problem
// with file:line context; unknown fields only warn.

inline constexpr const char* kQAFormat = "kfsel-qa-v1";
inline constexpr const char* kScoresFormat = "kfsel-scores-v1";
inline constexpr const char* kMetaFormat = "kfsel-meta-v1";
inline constexpr const char* kLabelsFormat = "kfsel-labels-v1";
inline constexpr const char* kTruthFormat = "kfsel-truth-v1";
inline constexpr const char* kSelectionsFormat = "kfsel-selections-v1";
inline constexpr const char* kDiagFormat = "kfsel-diag-v1";

using QuestionKey = std::pair<std::string, std::string>;  // (video, question)

struct QARecord {
  std::string video_id;
  std::string question_id;
  std::string question;
  std::string answer;
  std::vector<std::string> choices;
  std::optional<QuestionType> qtype;
};

struct ScoreRecord {
  std::string video_id;
  std::string question_id;
  FrameScores scores;
};

struct MetaRecord {
  std::string video_id;
  std::vector<FrameMeta> frames;
};

struct LabelRecord {
  std::string video_id;
  std::string question_id;
  PseudoLabels labels;
  std::vector<std::string> sources;
};

struct TruthRecord {
  std::string video_id;
  std::string question_id;
  std::vector<int> indices;
};

struct SelectionRecord {
  std::string video_id;
  std::string question_id;
  std::vector<int> indices;
  double objective = 0.0;
  double lambda = 0.0;
  std::string qtype;
};

struct SolverDiagRecord {
  std::string video_id;
  std::string question_id;
  double objective_greedy = 0.0;
  double objective_exact = 0.0;
};

struct QAFile {
  int T = 0;
  std::vector<QARecord> records;
};
struct ScoresFile {
  int T = 0;
  std::vector<ScoreRecord> records;
  std::map<QuestionKey, std::size_t> index;
  const FrameScores& at(const QuestionKey& key) const {
    auto it = index.find(key);
    if (it == index.end()) {
      throw InvalidArgument("no scores for (" + key.first + ", " + key.second + ")");
    }
    return records[it->second].scores;
  }
};
struct MetaFile {
  int T = 0;
  std::vector<MetaRecord> records;
  std::map<std::string, std::size_t> index;
  const std::vector<FrameMeta>& at(const std::string& video_id) const {
    auto it = index.find(video_id);
    if (it == index.end()) {
      throw InvalidArgument("no frame metadata for video " + video_id);
    }
    return records[it->second].frames;
  }
};
struct LabelsFile {
  int T = 0;
  std::vector<LabelRecord> records;
};
struct TruthFile {
  int T = 0;
  std::map<QuestionKey, std::vector<int>> by_question;
};
struct SelectionsFile {
  int T = 0;
  std::vector<SelectionRecord> records;
};
struct DiagFile {
  int T = 0;
  std::map<QuestionKey, SolverDiagRecord> by_question;
};

namespace detail {

using Json = nlohmann::json;
using OrderedJson = nlohmann::ordered_json;

inline Json parse_line(const std::string& path, std::size_t line_no,
                       const std::string& line) {
  try {
    return Json::parse(line);
  } catch (const Json::parse_error& e) {
    throw ParseError(path, line_no, std::string("invalid JSON: ") + e.what());
  }
}

inline const Json& require(const Json& row, const char* key,
                           const std::string& path, std::size_t line_no) {
  auto it = row.find(key);
  if (it == row.end()) {
    throw ParseError(path, line_no,
                     std::string("missing required field '") + key + "'");
  }
  return *it;
}

inline std::string require_string(const Json& row, const char* key,
                                  const std::string& path, std::size_t line_no) {
  const Json& v = require(row, key, path, line_no);
  if (!v.is_string()) {
    throw ParseError(path, line_no, std::string("field '") + key + "' must be a string");
  }
  return v.get<std::string>();
}

inline int require_int(const Json& row, const char* key,
                       const std::string& path, std::size_t line_no) {
  const Json& v = require(row, key, path, line_no);
  if (!v.is_number_integer()) {
    throw ParseError(path, line_no, std::string("field '") + key + "' must be an integer");
  }
  return v.get<int>();
}

inline double to_finite_double(const Json& v, const char* key,
                               const std::string& path, std::size_t line_no) {
  if (!v.is_number()) {
    throw ParseError(path, line_no, std::string("field '") + key + "' must hold numbers");
  }
  const double x = v.get<double>();
  if (!std::isfinite(x)) {
    throw ParseError(path, line_no, std::string("field '") + key + "' holds a non-finite value");
  }
  return x;
}

inline void warn_unknown_fields(const Json& row,
                                const std::set<std::string>& known,
                                const std::string& path, std::size_t line_no) {
  for (auto it = row.begin(); it != row.end(); ++it) {
    if (!known.count(it.key())) {
      std::cerr << "warning: " << path << ":" << line_no << ": unknown field '"
                << it.key() << "'\n";
    }
  }
}

/// Reads the header line and streams each record line to the row callback.
template <typename RowFn>
int read_jsonl(const std::string& path, const char* expected_format,
               RowFn&& row_fn) {
  std::ifstream in(path);
  if (!in) {
    throw Error("cannot open file: " + path);
  }
  std::string line;
  std::size_t line_no = 0;
  int T = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const Json row = parse_line(path, line_no, line);
    if (!row.is_object()) {
      throw ParseError(path, line_no, "expected a JSON object");
    }
    if (!have_header) {
      const std::string format = require_string(row, "format", path, line_no);
      if (format != expected_format) {
        throw ParseError(path, line_no, "expected format '" +
                                            std::string(expected_format) +
                                            "', got '" + format + "'");
      }
      T = require_int(row, "T", path, line_no);
      if (T < 2) {
        throw ParseError(path, line_no, "header T must be >= 2");
      }
      have_header = true;
      continue;
    }
    row_fn(row, line_no, T);
  }
  if (!have_header) {
    throw ParseError(path, 1, std::string("missing header line with format '") +
                                  expected_format + "'");
  }
  return T;
}

class JsonlWriter {
 public:
  JsonlWriter(const std::string& path, const char* format, int T) : out_(path) {
    if (!out_) {
      throw Error("cannot open file for writing: " + path);
    }
    OrderedJson header;
    header["format"] = format;
    header["T"] = T;
    out_ << header.dump() << "\n";
  }
  void row(const OrderedJson& j) { out_ << j.dump() << "\n"; }

 private:
  std::ofstream out_;
};

}  // namespace detail

// ---------------------------------------------------------------------------
// Loaders

inline QAFile load_qa(const std::string& path) {
  QAFile file;
  static const std::set<std::string> known = {"video_id", "question_id",
                                              "question", "answer", "choices",
                                              "qtype"};
  file.T = detail::read_jsonl(
      path, kQAFormat, [&](const detail::Json& row, std::size_t line_no, int) {
        detail::warn_unknown_fields(row, known, path, line_no);
        QARecord rec;
        rec.video_id = detail::require_string(row, "video_id", path, line_no);
        rec.question_id = detail::require_string(row, "question_id", path, line_no);
        rec.question = detail::require_string(row, "question", path, line_no);
        rec.answer = detail::require_string(row, "answer", path, line_no);
        if (rec.video_id.empty() || rec.question_id.empty()) {
          throw ParseError(path, line_no, "video_id and question_id must be non-empty");
        }
        if (row.contains("choices")) {
          if (!row["choices"].is_array()) {
            throw ParseError(path, line_no, "field 'choices' must be an array");
          }
          for (const auto& c : row["choices"]) {
            if (!c.is_string()) {
              throw ParseError(path, line_no, "field 'choices' must hold strings");
            }
            rec.choices.push_back(c.get<std::string>());
          }
        }
        if (row.contains("qtype")) {
          const std::string qt =
              detail::require_string(row, "qtype", path, line_no);
          try {
            rec.qtype = parse_question_type(qt);
          } catch (const ConfigError& e) {
            throw ParseError(path, line_no, e.what());
          }
        }
        file.records.push_back(std::move(rec));
      });
  return file;
}

inline ScoresFile load_scores(const std::string& path) {
  ScoresFile file;
  static const std::set<std::string> known = {"video_id", "question_id",
                                              "scores"};
  file.T = detail::read_jsonl(
      path, kScoresFormat,
      [&](const detail::Json& row, std::size_t line_no, int T) {
        detail::warn_unknown_fields(row, known, path, line_no);
        ScoreRecord rec;
        rec.video_id = detail::require_string(row, "video_id", path, line_no);
        rec.question_id = detail::require_string(row, "question_id", path, line_no);
        const detail::Json& arr = detail::require(row, "scores", path, line_no);
        if (!arr.is_array() || static_cast<int>(arr.size()) != T) {
          throw ParseError(path, line_no,
                           "field 'scores' must be an array of exactly T=" +
                               std::to_string(T) + " numbers, got " +
                               std::to_string(arr.is_array() ? arr.size() : 0));
        }
        for (const auto& v : arr) {
          rec.scores.s.push_back(detail::to_finite_double(v, "scores", path, line_no));
        }
        const QuestionKey key{rec.video_id, rec.question_id};
        if (file.index.count(key)) {
          throw ParseError(path, line_no, "duplicate (video_id, question_id)");
        }
        file.index[key] = file.records.size();
        file.records.push_back(std::move(rec));
      });
  return file;
}

inline MetaFile load_meta(const std::string& path) {
  MetaFile file;
  static const std::set<std::string> known = {"video_id", "frames"};
  static const std::set<std::string> known_frame = {"index", "entities",
                                                    "actions", "segment_id",
                                                    "feature"};
  file.T = detail::read_jsonl(
      path, kMetaFormat,
      [&](const detail::Json& row, std::size_t line_no, int T) {
        detail::warn_unknown_fields(row, known, path, line_no);
        MetaRecord rec;
        rec.video_id = detail::require_string(row, "video_id", path, line_no);
        const detail::Json& frames = detail::require(row, "frames", path, line_no);
        if (!frames.is_array() || static_cast<int>(frames.size()) != T) {
          throw ParseError(path, line_no,
                           "field 'frames' must be an array of exactly T=" +
                               std::to_string(T) + " frames");
        }
        std::size_t feature_dim = 0;
        for (const auto& fj : frames) {
          if (!fj.is_object()) {
            throw ParseError(path, line_no, "frame entries must be objects");
          }
          detail::warn_unknown_fields(fj, known_frame, path, line_no);
          FrameMeta fm;
          fm.index = detail::require_int(fj, "index", path, line_no);
          if (fm.index != static_cast<int>(rec.frames.size())) {
            throw ParseError(path, line_no,
                             "frame index " + std::to_string(fm.index) +
                                 " out of order (expected " +
                                 std::to_string(rec.frames.size()) + ")");
          }
          fm.segment_id = detail::require_int(fj, "segment_id", path, line_no);
          const detail::Json& ents = detail::require(fj, "entities", path, line_no);
          const detail::Json& acts = detail::require(fj, "actions", path, line_no);
          const detail::Json& feat = detail::require(fj, "feature", path, line_no);
          if (!ents.is_array() || !acts.is_array() || !feat.is_array()) {
            throw ParseError(path, line_no,
                             "frame entities/actions/feature must be arrays");
          }
          for (const auto& e : ents) {
            if (!e.is_string()) {
              throw ParseError(path, line_no, "entities must hold strings");
            }
            fm.entities.insert(e.get<std::string>());
          }
          for (const auto& a : acts) {
            if (!a.is_string()) {
              throw ParseError(path, line_no, "actions must hold strings");
            }
            fm.actions.insert(a.get<std::string>());
          }
          for (const auto& v : feat) {
            fm.feature.push_back(detail::to_finite_double(v, "feature", path, line_no));
          }
          if (feature_dim == 0) {
            feature_dim = fm.feature.size();
          } else if (fm.feature.size() != feature_dim) {
            throw ParseError(path, line_no, "inconsistent feature dimension");
          }
          rec.frames.push_back(std::move(fm));
        }
        const std::string vid = rec.video_id;
        if (file.index.count(vid)) {
          throw ParseError(path, line_no, "duplicate video_id " + vid);
        }
        file.index[vid] = file.records.size();
        file.records.push_back(std::move(rec));
      });
  return file;
}

inline LabelsFile load_labels(const std::string& path) {
  LabelsFile file;
  static const std::set<std::string> known = {"video_id", "question_id",
                                              "timestamps", "weights",
                                              "sources"};
  file.T = detail::read_jsonl(
      path, kLabelsFormat,
      [&](const detail::Json& row, std::size_t line_no, int) {
        detail::warn_unknown_fields(row, known, path, line_no);
        LabelRecord rec;
        rec.video_id = detail::require_string(row, "video_id", path, line_no);
        rec.question_id = detail::require_string(row, "question_id", path, line_no);
        const detail::Json& ts = detail::require(row, "timestamps", path, line_no);
        const detail::Json& ws = detail::require(row, "weights", path, line_no);
        if (!ts.is_array() || !ws.is_array() || ts.size() != ws.size() ||
            ts.empty()) {
          throw ParseError(path, line_no,
                           "timestamps/weights must be equal-length non-empty arrays");
        }
        double prev = -1.0;
        for (const auto& v : ts) {
          const double x = detail::to_finite_double(v, "timestamps", path, line_no);
          if (x < 0.0 || x > 1.0 || x < prev) {
            throw ParseError(path, line_no,
                             "timestamps must be sorted ascending within [0, 1]");
          }
          prev = x;
          rec.labels.timestamps.push_back(x);
        }
        for (const auto& v : ws) {
          const double w = detail::to_finite_double(v, "weights", path, line_no);
          if (w < 0.0 || w > 1.0) {
            throw ParseError(path, line_no, "weights must lie in [0, 1]");
          }
          rec.labels.source_weights.push_back(w);
        }
        if (row.contains("sources")) {
          if (!row["sources"].is_array()) {
            throw ParseError(path, line_no, "field 'sources' must be an array");
          }
          for (const auto& s : row["sources"]) {
            if (!s.is_string()) {
              throw ParseError(path, line_no, "sources must hold strings");
            }
            rec.sources.push_back(s.get<std::string>());
          }
        }
        file.records.push_back(std::move(rec));
      });
  return file;
}

inline TruthFile load_truth(const std::string& path) {
  TruthFile file;
  static const std::set<std::string> known = {"video_id", "question_id",
                                              "indices"};
  file.T = detail::read_jsonl(
      path, kTruthFormat,
      [&](const detail::Json& row, std::size_t line_no, int T) {
        detail::warn_unknown_fields(row, known, path, line_no);
        const std::string vid = detail::require_string(row, "video_id", path, line_no);
        const std::string qid = detail::require_string(row, "question_id", path, line_no);
        const detail::Json& arr = detail::require(row, "indices", path, line_no);
        if (!arr.is_array() || arr.empty()) {
          throw ParseError(path, line_no, "indices must be a non-empty array");
        }
        std::vector<int> indices;
        for (const auto& v : arr) {
          if (!v.is_number_integer()) {
            throw ParseError(path, line_no, "indices must be integers");
          }
          const int i = v.get<int>();
          if (i < 0 || i >= T) {
            throw ParseError(path, line_no,
                             "index " + std::to_string(i) + " out of range [0, " +
                                 std::to_string(T) + ")");
          }
          indices.push_back(i);
        }
        file.by_question[{vid, qid}] = std::move(indices);
      });
  return file;
}

inline SelectionsFile load_selections(const std::string& path) {
  SelectionsFile file;
  static const std::set<std::string> known = {"video_id", "question_id",
                                              "indices", "objective", "lambda",
                                              "qtype"};
  file.T = detail::read_jsonl(
      path, kSelectionsFormat,
      [&](const detail::Json& row, std::size_t line_no, int T) {
        detail::warn_unknown_fields(row, known, path, line_no);
        SelectionRecord rec;
        rec.video_id = detail::require_string(row, "video_id", path, line_no);
        rec.question_id = detail::require_string(row, "question_id", path, line_no);
        const detail::Json& arr = detail::require(row, "indices", path, line_no);
        if (!arr.is_array() || arr.empty()) {
          throw ParseError(path, line_no, "indices must be a non-empty array");
        }
        int prev = -1;
        for (const auto& v : arr) {
          if (!v.is_number_integer()) {
            throw ParseError(path, line_no, "indices must be integers");
          }
          const int i = v.get<int>();
          if (i < 0 || i >= T || i <= prev) {
            throw ParseError(path, line_no,
                             "indices must be strictly increasing within [0, T)");
          }
          prev = i;
          rec.indices.push_back(i);
        }
        rec.objective = detail::to_finite_double(
            detail::require(row, "objective", path, line_no), "objective", path, line_no);
        rec.lambda = detail::to_finite_double(
            detail::require(row, "lambda", path, line_no), "lambda", path, line_no);
        rec.qtype = detail::require_string(row, "qtype", path, line_no);
        try {
          parse_question_type(rec.qtype);
        } catch (const ConfigError& e) {
          throw ParseError(path, line_no, e.what());
        }
        file.records.push_back(std::move(rec));
      });
  return file;
}

inline DiagFile load_diag(const std::string& path) {
  DiagFile file;
  static const std::set<std::string> known = {"video_id", "question_id",
                                              "objective_greedy",
                                              "objective_exact"};
  file.T = detail::read_jsonl(
      path, kDiagFormat,
      [&](const detail::Json& row, std::size_t line_no, int) {
        detail::warn_unknown_fields(row, known, path, line_no);
        SolverDiagRecord rec;
        rec.video_id = detail::require_string(row, "video_id", path, line_no);
        rec.question_id = detail::require_string(row, "question_id", path, line_no);
        rec.objective_greedy = detail::to_finite_double(
            detail::require(row, "objective_greedy", path, line_no),
            "objective_greedy", path, line_no);
        rec.objective_exact = detail::to_finite_double(
            detail::require(row, "objective_exact", path, line_no),
            "objective_exact", path, line_no);
        file.by_question[{rec.video_id, rec.question_id}] = rec;
      });
  return file;
}

// ---------------------------------------------------------------------------
// Writers

inline void write_qa(const std::string& path, int T,
                     const std::vector<QARecord>& records) {
  detail::JsonlWriter out(path, kQAFormat, T);
  for (const QARecord& rec : records) {
    detail::OrderedJson j;
    j["video_id"] = rec.video_id;
    j["question_id"] = rec.question_id;
    j["question"] = rec.question;
    j["answer"] = rec.answer;
    if (!rec.choices.empty()) j["choices"] = rec.choices;
    if (rec.qtype.has_value()) j["qtype"] = to_string(*rec.qtype);
    out.row(j);
  }
}

inline void write_scores(const std::string& path, int T,
                         const std::vector<ScoreRecord>& records) {
  detail::JsonlWriter out(path, kScoresFormat, T);
  for (const ScoreRecord& rec : records) {
    detail::OrderedJson j;
    j["video_id"] = rec.video_id;
    j["question_id"] = rec.question_id;
    j["scores"] = rec.scores.s;
    out.row(j);
  }
}

inline void write_meta(const std::string& path, int T,
                       const std::vector<MetaRecord>& records) {
  detail::JsonlWriter out(path, kMetaFormat, T);
  for (const MetaRecord& rec : records) {
    detail::OrderedJson j;
    j["video_id"] = rec.video_id;
    detail::OrderedJson frames = detail::OrderedJson::array();
    for (const FrameMeta& fm : rec.frames) {
      detail::OrderedJson fj;
      fj["index"] = fm.index;
      fj["entities"] = std::vector<std::string>(fm.entities.begin(), fm.entities.end());
      fj["actions"] = std::vector<std::string>(fm.actions.begin(), fm.actions.end());
      fj["segment_id"] = fm.segment_id;
      fj["feature"] = fm.feature;
      frames.push_back(std::move(fj));
    }
    j["frames"] = std::move(frames);
    out.row(j);
  }
}

inline void write_labels(const std::string& path, int T,
                         const std::vector<LabelRecord>& records) {
  detail::JsonlWriter out(path, kLabelsFormat, T);
  for (const LabelRecord& rec : records) {
    detail::OrderedJson j;
    j["video_id"] = rec.video_id;
    j["question_id"] = rec.question_id;
    j["timestamps"] = rec.labels.timestamps;
    j["weights"] = rec.labels.source_weights;
    j["sources"] = rec.sources;
    out.row(j);
  }
}

inline void write_truth(const std::string& path, int T,
                        const std::vector<TruthRecord>& records) {
  detail::JsonlWriter out(path, kTruthFormat, T);
  for (const TruthRecord& rec : records) {
    detail::OrderedJson j;
    j["video_id"] = rec.video_id;
    j["question_id"] = rec.question_id;
    j["indices"] = rec.indices;
    out.row(j);
  }
}

inline void write_selections(const std::string& path, int T,
                             const std::vector<SelectionRecord>& records) {
  detail::JsonlWriter out(path, kSelectionsFormat, T);
  for (const SelectionRecord& rec : records) {
    detail::OrderedJson j;
    j["video_id"] = rec.video_id;
    j["question_id"] = rec.question_id;
    j["indices"] = rec.indices;
    j["objective"] = rec.objective;
    j["lambda"] = rec.lambda;
    j["qtype"] = rec.qtype;
    out.row(j);
  }
}

inline void write_diag(const std::string& path, int T,
                       const std::vector<SolverDiagRecord>& records) {
  detail::JsonlWriter out(path, kDiagFormat, T);
  for (const SolverDiagRecord& rec : records) {
    detail::OrderedJson j;
    j["video_id"] = rec.video_id;
    j["question_id"] = rec.question_id;
    j["objective_greedy"] = rec.objective_greedy;
    j["objective_exact"] = rec.objective_exact;
    out.row(j);
  }
}

// ---------------------------------------------------------------------------
// Synthetic corpus

struct SyntheticCorpusConfig {
  int num_videos = 20;
  int T = 32;
  int N_gt = 4;  // planted keyframes per question
  int entity_vocab_size = 40;
  int segment_count = 8;
  double noise_sigma = 0.05;
  std::uint64_t seed = 7;
};

struct SynthOutputs {
  std::string qa_path;
  std::string scores_path;
  std::string meta_path;
  std::string truth_path;
};

namespace detail {

/// Gram-Schmidt orthonormalization of n seeded Gaussian vectors in R^dim.
inline std::vector<std::vector<double>> orthonormal_basis(Rng& rng, int n,
                                                          int dim) {
  std::vector<std::vector<double>> basis;
  basis.reserve(static_cast<std::size_t>(n));
  while (static_cast<int>(basis.size()) < n) {
    std::vector<double> v(static_cast<std::size_t>(dim));
    for (double& x : v) x = normal(rng);
    for (const auto& b : basis) {
      double dot = 0.0;
      for (int i = 0; i < dim; ++i) dot += v[static_cast<std::size_t>(i)] * b[static_cast<std::size_t>(i)];
      for (int i = 0; i < dim; ++i) v[static_cast<std::size_t>(i)] -= dot * b[static_cast<std::size_t>(i)];
    }
    double norm = 0.0;
    for (double x : v) norm += x * x;
    norm = std::sqrt(norm);
    if (norm < 1e-8) continue;  // degenerate draw, redo
    for (double& x : v) x /= norm;
    basis.push_back(std::move(v));
  }
  return basis;
}

inline std::string pad4(int v) {
  std::string s = std::to_string(v);
  while (s.size() < 4) s.insert(s.begin(), '0');
  return s;
}

}  // namespace detail

/// Writes a fully deterministic synthetic corpus with planted keyframes.
///
/// Each video is split into segments with a shared base feature per segment,
/// so same-segment frames are near-duplicates. Every question plants N_gt
/// ground-truth frames that carry the question's referenced entity/action
/// and a feature boost along the question's own direction (orthogonal to all
/// segment bases). Temporal and causal questions additionally plant strongly
/// boosted distractor frames on the wrong side of the timeline, so raw
/// similarity ranks them above the ground truth while the rule ranker
/// excludes them. Similarity scores are dot products plus noise.
inline SynthOutputs synth_corpus(const SyntheticCorpusConfig& config,
                                 const std::string& out_dir) {
  const int T = config.T;
  const int S = config.segment_count;
  const int N_gt = config.N_gt;
  if (T < 2 || N_gt < 1 || N_gt > T) {
    throw ConfigError("synth_corpus: need 1 <= N_gt <= T and T >= 2");
  }
  if (S < N_gt + 2 || T < S) {
    throw ConfigError(
        "synth_corpus: need segment_count >= N_gt + 2 and T >= segment_count");
  }
  if (config.entity_vocab_size < 2 * S + 8) {
    throw ConfigError(
        "synth_corpus: entity_vocab_size must be >= 2 * segment_count + 8");
  }
  if (config.noise_sigma < 0.0) {
    throw ConfigError("synth_corpus: noise_sigma must be >= 0");
  }
  if (config.num_videos < 1) {
    throw ConfigError("synth_corpus: num_videos must be >= 1");
  }
  std::filesystem::create_directories(out_dir);

  const int F = std::max(16, S + 3);
  const double kTruthBoost = 1.5;
  const double kDistractorBoost = 2.5;
  Rng rng(config.seed);

  std::vector<QARecord> qa_rows;
  std::vector<ScoreRecord> score_rows;
  std::vector<MetaRecord> meta_rows;
  std::vector<TruthRecord> truth_rows;

  const auto ent_name = [](std::size_t i) { return "ent" + std::to_string(i); };
  const auto act_name = [](std::size_t i) { return "act" + std::to_string(i); };

  for (int v = 0; v < config.num_videos; ++v) {
    const std::string video_id = "v" + detail::pad4(v);
    const auto basis = detail::orthonormal_basis(rng, S + 3, F);

    // Segment structure and background annotations.
    std::vector<int> seg_of(static_cast<std::size_t>(T));
    std::vector<std::vector<int>> seg_frames(static_cast<std::size_t>(S));
    for (int t = 0; t < T; ++t) {
      const int s = static_cast<int>(
          static_cast<long long>(t) * S / static_cast<long long>(T));
      seg_of[static_cast<std::size_t>(t)] = s;
      seg_frames[static_cast<std::size_t>(s)].push_back(t);
    }
    std::set<std::string> avoid_ent, avoid_act;
    std::vector<std::set<std::string>> bg_ent(static_cast<std::size_t>(S));
    std::vector<std::set<std::string>> bg_act(static_cast<std::size_t>(S));
    for (int s = 0; s < S; ++s) {
      while (bg_ent[static_cast<std::size_t>(s)].size() < 2) {
        bg_ent[static_cast<std::size_t>(s)].insert(
            ent_name(uniform_index(rng, static_cast<std::size_t>(config.entity_vocab_size))));
      }
      bg_act[static_cast<std::size_t>(s)].insert(
          act_name(uniform_index(rng, static_cast<std::size_t>(config.entity_vocab_size))));
      avoid_ent.insert(bg_ent[static_cast<std::size_t>(s)].begin(),
                       bg_ent[static_cast<std::size_t>(s)].end());
      avoid_act.insert(bg_act[static_cast<std::size_t>(s)].begin(),
                       bg_act[static_cast<std::size_t>(s)].end());
    }
    const auto fresh = [&](std::set<std::string>& avoid, auto namer) {
      for (int tries = 0; tries < 10000; ++tries) {
        std::string name = namer(
            uniform_index(rng, static_cast<std::size_t>(config.entity_vocab_size)));
        if (!avoid.count(name)) {
          avoid.insert(name);
          return name;
        }
      }
      throw ConfigError("synth_corpus: vocabulary exhausted");
    };

    // Per-frame extras accumulated while planning the three questions.
    std::vector<std::set<std::string>> extra_ent(static_cast<std::size_t>(T));
    std::vector<std::set<std::string>> extra_act(static_cast<std::size_t>(T));
    std::vector<std::vector<std::pair<double, int>>> boosts(
        static_cast<std::size_t>(T));  // (coefficient, question qi)
    std::set<int> used_frames;

    const auto pick_frame = [&](int segment) {
      const auto& frames = seg_frames[static_cast<std::size_t>(segment)];
      std::vector<int> unused;
      for (int t : frames) {
        if (!used_frames.count(t)) unused.push_back(t);
      }
      const auto& pool = unused.empty() ? frames : unused;
      const int t = pool[uniform_index(rng, pool.size())];
      used_frames.insert(t);
      return t;
    };
    const auto pick_segments = [&](int lo, int hi, int count) {
      // count distinct segments from [lo, hi], shuffled then sorted.
      std::vector<int> range;
      for (int s = lo; s <= hi; ++s) range.push_back(s);
      shuffle(range, rng);
      range.resize(static_cast<std::size_t>(count));
      std::sort(range.begin(), range.end());
      return range;
    };

    struct QuestionPlan {
      std::string question_id;
      std::string text;
      std::string answer;
      QuestionType qtype;
      int direction;  // index into basis, S + qi
      std::vector<int> truth;
    };
    std::vector<QuestionPlan> plans;

    // Descriptive: truth frames carry the referenced entity and action.
    {
      QuestionPlan plan;
      plan.question_id = video_id + "q0";
      plan.qtype = QuestionType::kDescriptive;
      plan.direction = S;
      const std::string e1 = fresh(avoid_ent, ent_name);
      const std::string aM = fresh(avoid_act, act_name);
      for (int s : pick_segments(0, S - 1, N_gt)) {
        const int t = pick_frame(s);
        extra_ent[static_cast<std::size_t>(t)].insert(e1);
        extra_act[static_cast<std::size_t>(t)].insert(aM);
        boosts[static_cast<std::size_t>(t)].push_back({kTruthBoost, 0});
        plan.truth.push_back(t);
      }
      plan.text = "what is the " + e1 + " doing with the " + aM + " in clip " +
                  plan.question_id;
      plan.answer = "the " + aM;
      plans.push_back(std::move(plan));
    }

    // Temporal: an anchor action splits the timeline; truth sits on the cue
    // side, strongly boosted distractors on the other.
    {
      QuestionPlan plan;
      plan.question_id = video_id + "q1";
      plan.qtype = QuestionType::kTemporal;
      plan.direction = S + 1;
      const bool after = v % 2 == 0;
      const std::string e1 = fresh(avoid_ent, ent_name);
      const std::string aM = fresh(avoid_act, act_name);
      const std::string aA = fresh(avoid_act, act_name);
      int s_a;
      std::vector<int> truth_segs;
      std::vector<int> distractor_segs;
      if (after) {
        s_a = 1 + static_cast<int>(uniform_index(
                      rng, static_cast<std::size_t>(S - N_gt - 1)));
        truth_segs = pick_segments(s_a + 1, S - 1, N_gt);
        for (int s = s_a - 1; s >= 0 && static_cast<int>(distractor_segs.size()) < 2; --s) {
          distractor_segs.push_back(s);
        }
      } else {
        s_a = N_gt + static_cast<int>(uniform_index(
                         rng, static_cast<std::size_t>(S - N_gt - 1)));
        truth_segs = pick_segments(0, s_a - 1, N_gt);
        for (int s = s_a + 1; s < S && static_cast<int>(distractor_segs.size()) < 2; ++s) {
          distractor_segs.push_back(s);
        }
      }
      while (distractor_segs.size() < 2) {
        distractor_segs.push_back(distractor_segs.back());
      }
      const int anchor_frame = pick_frame(s_a);
      extra_act[static_cast<std::size_t>(anchor_frame)].insert(aA);
      for (int s : truth_segs) {
        const int t = pick_frame(s);
        extra_ent[static_cast<std::size_t>(t)].insert(e1);
        extra_act[static_cast<std::size_t>(t)].insert(aM);
        boosts[static_cast<std::size_t>(t)].push_back({kTruthBoost, 1});
        plan.truth.push_back(t);
      }
      for (int s : distractor_segs) {
        const int t = pick_frame(s);
        extra_ent[static_cast<std::size_t>(t)].insert(e1);
        extra_act[static_cast<std::size_t>(t)].insert(aM);
        boosts[static_cast<std::size_t>(t)].push_back({kDistractorBoost, 1});
      }
      plan.text = "what does the " + e1 + " do with the " + aM + " " +
                  (after ? "after" : "before") + " the " + aA + " in clip " +
                  plan.question_id;
      plan.answer = "the " + aM;
      plans.push_back(std::move(plan));
    }

    // Causal: truth is the cause (named only in the answer); the distractors
    // show the effect the question asks about.
    {
      QuestionPlan plan;
      plan.question_id = video_id + "q2";
      plan.qtype = QuestionType::kCausal;
      plan.direction = S + 2;
      const std::string e1 = fresh(avoid_ent, ent_name);
      const std::string aC = fresh(avoid_act, act_name);
      const std::string aE = fresh(avoid_act, act_name);
      for (int s : pick_segments(0, S - 3, N_gt)) {
        const int t = pick_frame(s);
        extra_ent[static_cast<std::size_t>(t)].insert(e1);
        extra_act[static_cast<std::size_t>(t)].insert(aC);
        boosts[static_cast<std::size_t>(t)].push_back({kTruthBoost, 2});
        plan.truth.push_back(t);
      }
      for (int s : {S - 2, S - 1}) {
        const int t = pick_frame(s);
        extra_act[static_cast<std::size_t>(t)].insert(aE);
        boosts[static_cast<std::size_t>(t)].push_back({kDistractorBoost, 2});
      }
      plan.text = "why does the " + e1 + " " + aE + " in clip " + plan.question_id;
      plan.answer = "because of the " + aC;
      plans.push_back(std::move(plan));
    }

    // Finalize frame features: segment base + boosts + noise, normalized.
    std::vector<std::vector<double>> features(static_cast<std::size_t>(T));
    for (int t = 0; t < T; ++t) {
      std::vector<double> f = basis[static_cast<std::size_t>(seg_of[static_cast<std::size_t>(t)])];
      for (const auto& [coef, qi] : boosts[static_cast<std::size_t>(t)]) {
        const auto& dir = basis[static_cast<std::size_t>(S + qi)];
        for (int i = 0; i < F; ++i) f[static_cast<std::size_t>(i)] += coef * dir[static_cast<std::size_t>(i)];
      }
      for (int i = 0; i < F; ++i) {
        f[static_cast<std::size_t>(i)] += config.noise_sigma * normal(rng);
      }
      double norm = 0.0;
      for (double x : f) norm += x * x;
      norm = std::sqrt(norm);
      if (norm > 0.0) {
        for (double& x : f) x /= norm;
      }
      features[static_cast<std::size_t>(t)] = std::move(f);
    }

    MetaRecord meta;
    meta.video_id = video_id;
    for (int t = 0; t < T; ++t) {
      FrameMeta fm;
      fm.index = t;
      fm.segment_id = seg_of[static_cast<std::size_t>(t)];
      fm.entities = bg_ent[static_cast<std::size_t>(fm.segment_id)];
      fm.entities.insert(extra_ent[static_cast<std::size_t>(t)].begin(),
                         extra_ent[static_cast<std::size_t>(t)].end());
      fm.actions = bg_act[static_cast<std::size_t>(fm.segment_id)];
      fm.actions.insert(extra_act[static_cast<std::size_t>(t)].begin(),
                        extra_act[static_cast<std::size_t>(t)].end());
      fm.feature = features[static_cast<std::size_t>(t)];
      meta.frames.push_back(std::move(fm));
    }
    meta_rows.push_back(std::move(meta));

    for (const QuestionPlan& plan : plans) {
      QARecord qa;
      qa.video_id = video_id;
      qa.question_id = plan.question_id;
      qa.question = plan.text;
      qa.answer = plan.answer;
      qa.qtype = plan.qtype;
      qa_rows.push_back(std::move(qa));

      ScoreRecord sc;
      sc.video_id = video_id;
      sc.question_id = plan.question_id;
      const auto& dir = basis[static_cast<std::size_t>(plan.direction)];
      for (int t = 0; t < T; ++t) {
        double dot = 0.0;
        for (int i = 0; i < F; ++i) {
          dot += features[static_cast<std::size_t>(t)][static_cast<std::size_t>(i)] *
                 dir[static_cast<std::size_t>(i)];
        }
        sc.scores.s.push_back(dot + config.noise_sigma * normal(rng));
      }
      score_rows.push_back(std::move(sc));

      TruthRecord truth;
      truth.video_id = video_id;
      truth.question_id = plan.question_id;
      truth.indices = plan.truth;
      std::sort(truth.indices.begin(), truth.indices.end());
      truth_rows.push_back(std::move(truth));
    }
  }

  SynthOutputs out;
  const std::filesystem::path dir(out_dir);
  out.qa_path = (dir / "qa.jsonl").string();
  out.scores_path = (dir / "scores.jsonl").string();
  out.meta_path = (dir / "meta.jsonl").string();
  out.truth_path = (dir / "truth.jsonl").string();
  write_qa(out.qa_path, T, qa_rows);
  write_scores(out.scores_path, T, score_rows);
  write_meta(out.meta_path, T, meta_rows);
  write_truth(out.truth_path, T, truth_rows);
  return out;
}

}  // namespace kfsel

#endif  // KFSEL_DATA_HPP_
