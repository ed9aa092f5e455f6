#include "mtdiag/reasoning.hpp"

#include <fstream>
#include <numeric>

#include <json.hpp>

#include "mtdiag/error.hpp"

namespace mtdiag {

ReasoningSplit split_reasoning(const std::string& raw, const std::string& open_delim,
                               const std::string& close_delim) {
  if (open_delim.empty() || close_delim.empty()) {
    throw Error("reasoning delimiters must be non-empty");
  }
  ReasoningSplit split;
  const size_t open_pos = raw.find(open_delim);
  if (open_pos == std::string::npos) {
    split.answer_text = raw;
    return split;
  }
  const size_t body_start = open_pos + open_delim.size();
  const size_t close_pos = raw.find(close_delim, body_start);
  if (close_pos == std::string::npos) {
    split.reasoning_text = raw.substr(body_start);
    split.answer_text = raw.substr(0, open_pos);
    split.unterminated = true;
    return split;
  }
  split.reasoning_text = raw.substr(body_start, close_pos - body_start);
  split.answer_text = raw.substr(0, open_pos) + raw.substr(close_pos + close_delim.size());
  return split;
}

int64_t count_reasoning_tokens(const VocabModel& model, const ReasoningSplit& split) {
  if (split.reasoning_text.empty()) return 0;
  return static_cast<int64_t>(encode(model, split.reasoning_text).ids.size());
}

ReasoningStats aggregate_reasoning(const LanguagePair& pair, const std::string& model_name,
                                   const std::vector<int64_t>& counts) {
  if (counts.empty()) {
    throw Error("aggregate_reasoning needs at least one instance for " + pair.str());
  }
  for (int64_t c : counts) {
    if (c < 0) throw Error("negative reasoning token count");
  }
  ReasoningStats stats;
  stats.pair = pair;
  stats.model_name = model_name;
  stats.count_per_instance = counts;
  stats.mean = static_cast<double>(std::accumulate(counts.begin(), counts.end(), int64_t{0})) /
               static_cast<double>(counts.size());
  return stats;
}

std::vector<RawOutput> load_raw_outputs(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("missing raw outputs file: " + path);
  std::vector<RawOutput> out;
  std::vector<std::string> problems;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    nlohmann::json rec;
    try {
      rec = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      problems.push_back("line " + std::to_string(line_no) + ": invalid json (" + e.what() + ")");
      continue;
    }
    auto need = [&rec](const char* key) {
      return rec.contains(key) && rec[key].is_string();
    };
    if (!need("instance_id") || !need("lp") || !need("model") || !need("raw")) {
      problems.push_back("line " + std::to_string(line_no) +
                         ": expected {instance_id, lp, model, raw}");
      continue;
    }
    out.push_back({rec["instance_id"].get<std::string>(), rec["lp"].get<std::string>(),
                   rec["model"].get<std::string>(), rec["raw"].get<std::string>()});
  }
  if (!problems.empty()) throw Error("raw outputs load failed for " + path, problems);
  return out;
}

}  // namespace mtdiag
