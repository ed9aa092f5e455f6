#include "mtdiag/noise.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "mtdiag/csv.hpp"
#include "mtdiag/error.hpp"
#include "mtdiag/tokenize.hpp"

namespace mtdiag {

NoisePatternSet NoisePatternSet::from_strings(const std::vector<std::string>& patterns) {
  if (patterns.empty()) throw Error("pattern set must not be empty");
  NoisePatternSet set;
  for (const auto& p : patterns) {
    try {
      set.compiled_.emplace_back(p, std::regex::ECMAScript | std::regex::icase);
    } catch (const std::regex_error& e) {
      throw Error("pattern '" + p + "' does not compile: " + e.what());
    }
    set.sources_.push_back(p);
  }
  return set;
}

NoisePatternSet NoisePatternSet::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("missing patterns file: " + path);
  std::vector<std::string> patterns;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    patterns.push_back(line);
  }
  if (patterns.empty()) throw Error("patterns file " + path + " has no patterns");
  return from_strings(patterns);
}

const NoisePatternSet& NoisePatternSet::default_set() {
  static const NoisePatternSet set = from_strings(
      {"explanation", "indicate", "analysis", "note:", "translation:"});
  return set;
}

bool NoisePatternSet::matches(const std::string& text) const {
  for (const auto& re : compiled_) {
    if (std::regex_search(text, re)) return true;
  }
  return false;
}

bool detect_explanatory(const std::string& text, const NoisePatternSet& patterns) {
  return patterns.matches(text);
}

LangPrediction identify_language(const std::string& text, const LanguageIdentifier& identifier) {
  return identifier.predict("", text);
}

Script codepoint_script(uint32_t cp) {
  struct Range {
    uint32_t lo, hi;
    Script script;
  };
  static const Range ranges[] = {
      {0x0041, 0x005A, Script::latin},   {0x0061, 0x007A, Script::latin},
      {0x00C0, 0x024F, Script::latin},   {0x1E00, 0x1EFF, Script::latin},
      {0x0370, 0x03FF, Script::greek},   {0x0400, 0x052F, Script::cyrillic},
      {0x0530, 0x058F, Script::armenian},{0x0590, 0x05FF, Script::hebrew},
      {0x0600, 0x06FF, Script::arabic},  {0x0750, 0x077F, Script::arabic},
      {0x0900, 0x097F, Script::devanagari}, {0x0980, 0x09FF, Script::bengali},
      {0x0A80, 0x0AFF, Script::gujarati},{0x0B80, 0x0BFF, Script::tamil},
      {0x0C00, 0x0C7F, Script::telugu},  {0x0C80, 0x0CFF, Script::kannada},
      {0x0D00, 0x0D7F, Script::malayalam}, {0x0E00, 0x0E7F, Script::thai},
      {0x10A0, 0x10FF, Script::georgian},{0x1780, 0x17FF, Script::khmer},
      {0x1100, 0x11FF, Script::hangul},  {0x3130, 0x318F, Script::hangul},
      {0xAC00, 0xD7AF, Script::hangul},  {0x3400, 0x4DBF, Script::han},
      {0x4E00, 0x9FFF, Script::han},     {0xF900, 0xFAFF, Script::han},
      {0x3040, 0x309F, Script::kana},    {0x30A0, 0x30FF, Script::kana},
  };
  // 0xD7 and 0xF7 are the multiplication/division signs inside Latin-1
  if (cp == 0xD7 || cp == 0xF7) return Script::other;
  for (const auto& r : ranges) {
    if (cp >= r.lo && cp <= r.hi) return r.script;
  }
  return Script::other;
}

Script expected_script(const std::string& code) {
  static const std::map<std::string, Script> table = {
      {"en", Script::latin},   {"de", Script::latin},   {"fr", Script::latin},
      {"it", Script::latin},   {"es", Script::latin},   {"pt", Script::latin},
      {"cs", Script::latin},   {"pl", Script::latin},   {"nl", Script::latin},
      {"sv", Script::latin},   {"da", Script::latin},   {"no", Script::latin},
      {"fi", Script::latin},   {"hu", Script::latin},   {"ro", Script::latin},
      {"tr", Script::latin},   {"vi", Script::latin},   {"id", Script::latin},
      {"ms", Script::latin},   {"sw", Script::latin},   {"et", Script::latin},
      {"lt", Script::latin},   {"lv", Script::latin},   {"hr", Script::latin},
      {"sk", Script::latin},   {"sl", Script::latin},
      {"ru", Script::cyrillic},{"uk", Script::cyrillic},{"bg", Script::cyrillic},
      {"sr", Script::cyrillic},{"be", Script::cyrillic},{"kk", Script::cyrillic},
      {"el", Script::greek},   {"he", Script::hebrew},  {"ar", Script::arabic},
      {"fa", Script::arabic},  {"ur", Script::arabic},  {"hi", Script::devanagari},
      {"mr", Script::devanagari}, {"ne", Script::devanagari}, {"bn", Script::bengali},
      {"gu", Script::gujarati},{"ta", Script::tamil},   {"te", Script::telugu},
      {"kn", Script::kannada}, {"ml", Script::malayalam}, {"th", Script::thai},
      {"ka", Script::georgian},{"km", Script::khmer},   {"ko", Script::hangul},
      {"zh", Script::han},     {"ja", Script::kana},
  };
  auto it = table.find(code);
  return it == table.end() ? Script::other : it->second;
}

namespace {

bool is_letter(uint32_t cp) { return codepoint_script(cp) != Script::other; }

// ASCII + Latin-1 + Greek + Cyrillic lowercasing; other scripts are unicase
// or irrelevant for the profiles shipped here.
uint32_t simple_lower(uint32_t cp) {
  if (cp >= 'A' && cp <= 'Z') return cp + 0x20;
  if (cp >= 0xC0 && cp <= 0xDE && cp != 0xD7) return cp + 0x20;
  if (cp >= 0x391 && cp <= 0x3A9 && cp != 0x3A2) return cp + 0x20;
  if (cp >= 0x410 && cp <= 0x42F) return cp + 0x20;
  if (cp >= 0x400 && cp <= 0x40F) return cp + 0x50;
  return cp;
}

// letters lowered, everything else collapsed to single spaces
std::vector<uint32_t> normalize_for_trigrams(const std::string& text) {
  std::vector<uint32_t> out;
  bool pending_space = false;
  for (uint32_t cp : utf8_decode(text)) {
    if (is_letter(cp)) {
      if (pending_space && !out.empty()) out.push_back(' ');
      pending_space = false;
      out.push_back(simple_lower(cp));
    } else {
      pending_space = true;
    }
  }
  return out;
}

std::vector<std::string> extract_trigrams(const std::vector<uint32_t>& cps) {
  std::vector<std::string> out;
  if (cps.size() < 3) return out;
  for (size_t i = 0; i + 3 <= cps.size(); ++i) {
    out.push_back(utf8_encode(cps[i]) + utf8_encode(cps[i + 1]) + utf8_encode(cps[i + 2]));
  }
  return out;
}

}  // namespace

TrigramProfile TrigramProfile::train(const std::string& language,
                                     const std::vector<std::string>& texts) {
  std::unordered_map<std::string, int64_t> counts;
  int64_t total = 0;
  for (const auto& text : texts) {
    for (auto& tri : extract_trigrams(normalize_for_trigrams(text))) {
      ++counts[tri];
      ++total;
    }
  }
  if (total == 0) throw Error("no trigrams extractable from training text for " + language);
  TrigramProfile profile;
  profile.language = language;
  const double denom = static_cast<double>(total) + static_cast<double>(counts.size()) + 1.0;
  for (const auto& [tri, count] : counts) {
    profile.log_freq[tri] = std::log((static_cast<double>(count) + 1.0) / denom);
  }
  profile.floor = std::log(1.0 / denom);
  return profile;
}

std::string TrigramProfile::dump() const {
  CsvWriter w;
  w.header({"trigram", "log_freq"});
  w.row({"", format_fixed(floor, 8)});
  std::vector<std::pair<std::string, double>> sorted(log_freq.begin(), log_freq.end());
  std::sort(sorted.begin(), sorted.end());
  for (const auto& [tri, lf] : sorted) w.row({tri, format_fixed(lf, 8)});
  return w.str();
}

void TrigramProfile::save(const std::string& path) const { write_file(path, dump()); }

TrigramProfile TrigramProfile::load(const std::string& path, const std::string& language) {
  auto table = read_csv(path);
  if (table.header != std::vector<std::string>{"trigram", "log_freq"}) {
    throw Error("trigram profile " + path + " must have header trigram,log_freq");
  }
  TrigramProfile profile;
  profile.language = language;
  bool floor_seen = false;
  double min_lf = 0.0;
  for (const auto& row : table.rows) {
    if (row.size() != 2) throw Error("bad row in trigram profile " + path);
    auto lf = parse_double(row[1]);
    if (!lf) throw Error("unparseable log_freq in trigram profile " + path);
    if (row[0].empty()) {
      profile.floor = *lf;
      floor_seen = true;
    } else {
      profile.log_freq[row[0]] = *lf;
      min_lf = std::min(min_lf, *lf);
    }
  }
  if (profile.log_freq.empty()) throw Error("trigram profile " + path + " has no trigrams");
  if (!floor_seen) profile.floor = min_lf - 2.0;
  return profile;
}

TrigramIdentifier::TrigramIdentifier(std::vector<TrigramProfile> profiles)
    : profiles_(std::move(profiles)) {
  if (profiles_.empty()) throw Error("trigram identifier needs at least one profile");
}

LangPrediction TrigramIdentifier::predict(const std::string&, const std::string& text) const {
  auto cps = normalize_for_trigrams(text);
  std::vector<uint32_t> letters;
  for (uint32_t cp : cps) {
    if (cp != ' ') letters.push_back(cp);
  }
  if (letters.empty()) return {"und", 0.0};

  auto trigrams = extract_trigrams(cps);

  std::vector<double> scores;
  scores.reserve(profiles_.size());
  constexpr double kScriptWeight = 2.0;
  constexpr double kScriptEps = 0.01;
  for (const auto& profile : profiles_) {
    double loglik = 0.0;
    if (!trigrams.empty()) {
      for (const auto& tri : trigrams) {
        auto it = profile.log_freq.find(tri);
        loglik += it == profile.log_freq.end() ? profile.floor : it->second;
      }
      loglik /= static_cast<double>(trigrams.size());
    } else {
      loglik = profile.floor;
    }
    const Script want = expected_script(profile.language);
    int64_t in_script = 0;
    for (uint32_t cp : letters) {
      if (codepoint_script(cp) == want) ++in_script;
    }
    const double fraction = static_cast<double>(in_script) / static_cast<double>(letters.size());
    scores.push_back(loglik + kScriptWeight * std::log(kScriptEps + fraction));
  }

  size_t best = 0;
  for (size_t i = 1; i < scores.size(); ++i) {
    if (scores[i] > scores[best]) best = i;
  }
  double denom = 0.0;
  for (double s : scores) denom += std::exp(s - scores[best]);
  return {profiles_[best].language, 1.0 / denom};
}

ExternalPredictions ExternalPredictions::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("missing predictions file: " + path);
  ExternalPredictions out;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    nlohmann::json rec;
    try {
      rec = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw Error(path + " line " + std::to_string(line_no) + ": invalid json: " + e.what());
    }
    if (!rec.contains("instance_id") || !rec.contains("lang") || !rec.contains("confidence")) {
      throw Error(path + " line " + std::to_string(line_no) +
                  ": expected {instance_id, lang, confidence}");
    }
    LangPrediction pred{rec["lang"].get<std::string>(), rec["confidence"].get<double>()};
    if (pred.confidence < 0.0 || pred.confidence > 1.0) {
      throw Error(path + " line " + std::to_string(line_no) + ": confidence outside [0,1]");
    }
    out.by_id_[rec["instance_id"].get<std::string>()] = pred;
  }
  return out;
}

LangPrediction ExternalPredictions::predict(const std::string& instance_id,
                                            const std::string&) const {
  auto it = by_id_.find(instance_id);
  if (it == by_id_.end()) return {"und", 0.0};
  return it->second;
}

bool wrong_language(const LangPrediction& prediction, const std::string& expected,
                    double threshold) {
  if (!(threshold > 0.0 && threshold <= 1.0)) throw Error("threshold must be in (0,1]");
  return prediction.language != expected && prediction.confidence > threshold;
}

NoiseReport clean_rate(const std::vector<Output>& outputs, const std::string& expected_language,
                       const NoisePatternSet& patterns, const LanguageIdentifier& identifier,
                       const NoiseOptions& options) {
  if (outputs.empty()) throw Error("clean_rate needs at least one output");
  NoiseReport report;
  report.total = static_cast<int64_t>(outputs.size());
  for (const auto& out : outputs) {
    const bool explanatory = detect_explanatory(out.text, patterns);

    bool wrong = false;
    if (options.per_line) {
      std::istringstream lines(out.text);
      std::string line;
      while (std::getline(lines, line)) {
        if (line.empty()) continue;
        if (wrong_language(identifier.predict(out.id, line), expected_language,
                           options.threshold)) {
          wrong = true;
          break;
        }
      }
    } else {
      wrong = wrong_language(identifier.predict(out.id, out.text), expected_language,
                             options.threshold);
    }

    if (explanatory) ++report.explanatory;
    if (wrong) ++report.wrong_lang;
    if (explanatory || wrong) ++report.union_count;
  }
  return report;
}

NoiseReport clean_rate(const std::vector<std::string>& outputs,
                       const std::string& expected_language, const NoisePatternSet& patterns,
                       const LanguageIdentifier& identifier, const NoiseOptions& options) {
  std::vector<Output> wrapped;
  wrapped.reserve(outputs.size());
  for (size_t i = 0; i < outputs.size(); ++i) {
    wrapped.push_back({std::to_string(i), outputs[i]});
  }
  return clean_rate(wrapped, expected_language, patterns, identifier, options);
}

}  // namespace mtdiag
