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

#ifndef KFSEL_QTYPE_HPP_
#define KFSEL_QTYPE_HPP_

#include <array>
#include <string>

#include "kfsel/error.hpp"
#include "kfsel/text.hpp"

namespace kfsel {

enum class QuestionType { kDescriptive, kTemporal, kCausal };

inline constexpr std::array<QuestionType, 3> kAllQuestionTypes = {
    QuestionType::kDescriptive, QuestionType::kTemporal,
    QuestionType::kCausal};

inline const char* to_string(QuestionType type) {
  switch (type) {
    case QuestionType::kDescriptive: return "descriptive";
    case QuestionType::kTemporal: return "temporal";
    case QuestionType::kCausal: return "causal";
  }
  return "descriptive";
}

inline QuestionType parse_question_type(const std::string& s) {
  if (s == "descriptive") return QuestionType::kDescriptive;
  if (s == "temporal") return QuestionType::kTemporal;
  if (s == "causal") return QuestionType::kCausal;
  throw ConfigError("unknown question type: '" + s + "'");
}

// Keyword decision table. Causal cues outrank temporal cues, so a question
// that opens with "why" and also mentions "after" still classifies causal.
// The cue lists are closed; anything unmatched is descriptive.
inline QuestionType classify(const std::string& text) {
  std::string lower;
  lower.reserve(text.size());
  for (unsigned char c : text) {
    lower.push_back(static_cast<char>(std::tolower(c)));
  }
  const std::size_t first = lower.find_first_not_of(" \t\r\n");
  const bool leading_why =
      first != std::string::npos && lower.compare(first, 3, "why") == 0;
  const auto contains = [&](const char* needle) {
    return lower.find(needle) != std::string::npos;
  };
  if (leading_why || contains("how come") || contains("what causes") ||
      contains("reason")) {
    return QuestionType::kCausal;
  }
  if (contains("before") || contains("after") || contains("when") ||
      contains("while") || contains("then") || contains("during") ||
      contains("at the end") || contains("at the start")) {
    return QuestionType::kTemporal;
  }
  return QuestionType::kDescriptive;
}

}  // namespace kfsel

#endif  // KFSEL_QTYPE_HPP_
