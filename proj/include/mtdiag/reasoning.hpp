#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mtdiag/corpus.hpp"
#include "mtdiag/tokenize.hpp"

namespace mtdiag {

/// Raw output split at the first delimited deliberation block. Byte
/// bookkeeping holds: reasoning + answer + the delimiters present
/// reassemble the raw text.
struct ReasoningSplit {
  std::string reasoning_text;  // empty when no block was found
  std::string answer_text;
  bool unterminated = false;  // open delimiter without a close; flagged as a warning
};

inline constexpr const char* kDefaultReasoningOpen = "<think>";
inline constexpr const char* kDefaultReasoningClose = "</think>";

/// Absent delimiters give empty reasoning and the whole text as answer; an
/// unterminated open delimiter captures to the end and sets the flag.
ReasoningSplit split_reasoning(const std::string& raw,
                               const std::string& open_delim = kDefaultReasoningOpen,
                               const std::string& close_delim = kDefaultReasoningClose);

/// Token budget of the deliberation segment under the generating model's own
/// tokenizer. Empty reasoning counts 0.
int64_t count_reasoning_tokens(const VocabModel& model, const ReasoningSplit& split);

struct ReasoningStats {
  LanguagePair pair;
  std::string model_name;
  std::vector<int64_t> count_per_instance;
  double mean = 0.0;
};

ReasoningStats aggregate_reasoning(const LanguagePair& pair, const std::string& model_name,
                                   const std::vector<int64_t>& counts);

/// Raw outputs file: JSONL {instance_id, lp, model, raw}.
struct RawOutput {
  std::string instance_id;
  std::string lp;
  std::string model;
  std::string raw;
};

std::vector<RawOutput> load_raw_outputs(const std::string& path);

}  // namespace mtdiag
