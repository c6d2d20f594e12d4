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

#ifndef KFSEL_CLIENT_HPP_
#define KFSEL_CLIENT_HPP_

#include <chrono>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <httplib.h>
#include <json.hpp>

#include "kfsel/error.hpp"
#include "kfsel/sks.hpp"

namespace kfsel {

// Optional HTTP contract for a real ranker backend (an LMM serving frame
// rankings). The engine never requires it; on any client error the caller
// falls back to the in-process rule ranker.
//
// POST <endpoint>/rank
//   request:  {"question": str, "frames": [{"index", "entities", "actions",
//              "segment_id"}], "n": int}
//   response: {"indices": [int, ...], "confidence"?: [real, ...]}
//             or {"refusal": str}
// A valid response carries at least n unique in-range indices.

struct ExternalRankRequest {
  std::string question;
  std::vector<FrameMeta> frames;
  int n = 4;
};

struct ExternalRankResponse {
  std::vector<int> indices;
  std::optional<std::vector<double>> confidence;
};

inline ExternalRankResponse external_rank(const std::string& endpoint,
                                          const ExternalRankRequest& req,
                                          std::chrono::milliseconds timeout) {
  nlohmann::ordered_json body;
  body["question"] = req.question;
  nlohmann::ordered_json frames = nlohmann::ordered_json::array();
  for (const FrameMeta& fm : req.frames) {
    nlohmann::ordered_json fj;
    fj["index"] = fm.index;
    fj["entities"] = std::vector<std::string>(fm.entities.begin(), fm.entities.end());
    fj["actions"] = std::vector<std::string>(fm.actions.begin(), fm.actions.end());
    fj["segment_id"] = fm.segment_id;
    frames.push_back(std::move(fj));
  }
  body["frames"] = std::move(frames);
  body["n"] = req.n;

  httplib::Client client(endpoint);
  client.set_connection_timeout(timeout);
  client.set_read_timeout(timeout);
  client.set_write_timeout(timeout);
  const httplib::Result res =
      client.Post("/rank", body.dump(), "application/json");
  if (!res) {
    const httplib::Error err = res.error();
    if (err == httplib::Error::ConnectionTimeout ||
        err == httplib::Error::Read || err == httplib::Error::Write) {
      throw RankClientError(RankClientError::Kind::kTimeout,
                            "external ranker timed out: " + httplib::to_string(err));
    }
    throw RankClientError(RankClientError::Kind::kNetwork,
                          "external ranker unreachable: " + httplib::to_string(err));
  }
  if (res->status < 200 || res->status >= 300) {
    throw RankClientError(RankClientError::Kind::kProtocol,
                          "external ranker returned HTTP " +
                              std::to_string(res->status));
  }
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(res->body);
  } catch (const nlohmann::json::parse_error& e) {
    throw RankClientError(RankClientError::Kind::kProtocol,
                          std::string("external ranker sent invalid JSON: ") + e.what());
  }
  if (j.contains("refusal")) {
    throw RankClientError(RankClientError::Kind::kRefusal,
                          "external ranker refused: " +
                              (j["refusal"].is_string()
                                   ? j["refusal"].get<std::string>()
                                   : std::string("(no reason)")));
  }
  if (!j.is_object() || !j.contains("indices") || !j["indices"].is_array()) {
    throw RankClientError(RankClientError::Kind::kProtocol,
                          "external ranker response lacks an 'indices' array");
  }
  ExternalRankResponse out;
  const int T = static_cast<int>(req.frames.size());
  std::set<int> seen;
  for (const auto& v : j["indices"]) {
    if (!v.is_number_integer()) {
      throw RankClientError(RankClientError::Kind::kValidation,
                            "ranked indices must be integers");
    }
    const int i = v.get<int>();
    if (i < 0 || i >= T) {
      throw RankClientError(RankClientError::Kind::kValidation,
                            "ranked index " + std::to_string(i) +
                                " out of range [0, " + std::to_string(T) + ")");
    }
    if (!seen.insert(i).second) {
      throw RankClientError(RankClientError::Kind::kValidation,
                            "duplicate ranked index " + std::to_string(i));
    }
    out.indices.push_back(i);
  }
  if (static_cast<int>(out.indices.size()) < req.n) {
    throw RankClientError(RankClientError::Kind::kValidation,
                          "external ranker returned " +
                              std::to_string(out.indices.size()) +
                              " indices, need at least " + std::to_string(req.n));
  }
  if (j.contains("confidence")) {
    if (!j["confidence"].is_array()) {
      throw RankClientError(RankClientError::Kind::kValidation,
                            "'confidence' must be an array");
    }
    std::vector<double> conf;
    for (const auto& v : j["confidence"]) {
      if (!v.is_number()) {
        throw RankClientError(RankClientError::Kind::kValidation,
                              "'confidence' must hold numbers");
      }
      conf.push_back(v.get<double>());
    }
    out.confidence = std::move(conf);
  }
  return out;
}

}  // namespace kfsel

#endif  // KFSEL_CLIENT_HPP_
