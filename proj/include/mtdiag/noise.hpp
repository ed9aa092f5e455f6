#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <regex>
#include <string>
#include <unordered_map>
#include <vector>

namespace mtdiag {

/// Ordered set of case-insensitive regular expressions flagging explanatory
/// meta-text in model outputs. The set is configuration, loaded from a
/// patterns file (one regex per line, '#' comments), never hard-coded.
class NoisePatternSet {
 public:
  static NoisePatternSet from_strings(const std::vector<std::string>& patterns);
  static NoisePatternSet load(const std::string& path);
  /// "explanation", "indicate", "analysis", "note:", "translation:"
  static const NoisePatternSet& default_set();

  bool matches(const std::string& text) const;
  const std::vector<std::string>& sources() const { return sources_; }

 private:
  std::vector<std::string> sources_;
  std::vector<std::regex> compiled_;
};

/// true iff any pattern matches anywhere in the text.
bool detect_explanatory(const std::string& text, const NoisePatternSet& patterns);

struct LangPrediction {
  std::string language;  // "und" when undetermined
  double confidence = 0.0;
};

class LanguageIdentifier {
 public:
  virtual ~LanguageIdentifier() = default;
  virtual LangPrediction predict(const std::string& instance_id, const std::string& text) const = 0;
};

LangPrediction identify_language(const std::string& text, const LanguageIdentifier& identifier);

/// Character-trigram log-frequency profile with additive smoothing; the
/// floor is the smoothed probability of an unseen trigram. Profiles are
/// trainable from any text sample and round-trip through CSV
/// (trigram,log_freq; an empty trigram field carries the floor).
struct TrigramProfile {
  std::string language;
  std::unordered_map<std::string, double> log_freq;
  double floor = -18.0;

  static TrigramProfile train(const std::string& language, const std::vector<std::string>& texts);
  static TrigramProfile load(const std::string& path, const std::string& language);
  std::string dump() const;
  void save(const std::string& path) const;
};

/// Built-in identifier: per-language trigram log-likelihood per trigram plus
/// a unicode-script prior; confidence is the softmax over candidate
/// languages. Text without letters is undetermined at confidence 0.
class TrigramIdentifier : public LanguageIdentifier {
 public:
  explicit TrigramIdentifier(std::vector<TrigramProfile> profiles);
  LangPrediction predict(const std::string& instance_id, const std::string& text) const override;

 private:
  std::vector<TrigramProfile> profiles_;
};

/// Pass-through identifier over a JSONL file {instance_id, lang, confidence}.
class ExternalPredictions : public LanguageIdentifier {
 public:
  static ExternalPredictions load(const std::string& path);
  LangPrediction predict(const std::string& instance_id, const std::string& text) const override;

 private:
  std::map<std::string, LangPrediction> by_id_;
};

/// Wrong-language rule: predicted language differs from the expected one AND
/// the identifier is more confident than the threshold (strictly greater).
bool wrong_language(const LangPrediction& prediction, const std::string& expected,
                    double threshold = 0.60);

/// Classification counts for one batch of outputs. Counts are primary; the
/// three rates derive from them. union_count uses |E ∪ W| so an output that
/// is both explanatory and wrong-language is removed from the clean set once.
struct NoiseReport {
  int64_t total = 0;
  int64_t explanatory = 0;
  int64_t wrong_lang = 0;
  int64_t union_count = 0;

  double clean_rate() const { return static_cast<double>(total - union_count) / total; }
  double explanatory_rate() const { return static_cast<double>(explanatory) / total; }
  double wrong_language_rate() const { return static_cast<double>(wrong_lang) / total; }
};

struct NoiseOptions {
  double threshold = 0.60;
  bool per_line = false;  // language-identify each line instead of the whole output
};

struct Output {
  std::string id;
  std::string text;
};

NoiseReport clean_rate(const std::vector<Output>& outputs, const std::string& expected_language,
                       const NoisePatternSet& patterns, const LanguageIdentifier& identifier,
                       const NoiseOptions& options = {});

/// Convenience overload; ids become "0", "1", ...
NoiseReport clean_rate(const std::vector<std::string>& outputs,
                       const std::string& expected_language, const NoisePatternSet& patterns,
                       const LanguageIdentifier& identifier, const NoiseOptions& options = {});

/// Major unicode script of a codepoint, for the identifier's priors.
enum class Script {
  latin, greek, cyrillic, armenian, hebrew, arabic, devanagari, bengali, gujarati,
  tamil, telugu, kannada, malayalam, thai, georgian, khmer, hangul, han, kana, other
};

Script codepoint_script(uint32_t codepoint);
Script expected_script(const std::string& language_code);  // Script::other if unknown

}  // namespace mtdiag
