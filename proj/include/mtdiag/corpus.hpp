#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace mtdiag {

/// Directed source→target language combination. Direction matters:
/// (de,fr) and (fr,de) are distinct pairs.
struct LanguagePair {
  std::string src;
  std::string tgt;

  static LanguagePair make(std::string src, std::string tgt);
  static LanguagePair parse(const std::string& text);  // "ar-he"
  std::string str() const { return src + "-" + tgt; }
  LanguagePair reversed() const { return {tgt, src}; }

  friend bool operator==(const LanguagePair&, const LanguagePair&) = default;
  friend auto operator<=>(const LanguagePair&, const LanguagePair&) = default;
};

struct Instance {
  std::string id;
  std::string src_text;
  std::optional<std::string> ref_text;
  std::optional<std::string> hyp_text;
  std::optional<std::string> raw_output;
};

struct Corpus {
  LanguagePair pair;
  std::vector<Instance> instances;  // load order, deterministic
  std::string source_tag;

  size_t size() const { return instances.size(); }
};

enum class CorpusFormat { jsonl, tsv };

/// JSONL schema: one object per line, keys {id, src, ref, hyp, raw}; id and
/// src required. TSV is header-driven with the same column names. Malformed
/// records are collected with line numbers and the load fails if any exist.
Corpus load_corpus(const std::string& path, CorpusFormat format, const LanguagePair& pair);

/// Canonical JSONL serialization (fixed key order, optionals omitted).
/// load(serialize(c)) then serialize again is byte-identical.
std::string serialize_corpus_jsonl(const Corpus& corpus);

/// splitmix64: the pinned PRNG for every sampling operation.
class SplitMix64 {
 public:
  explicit SplitMix64(uint64_t seed) : state_(seed) {}
  uint64_t next();
  /// next() reduced modulo bound; bound must be nonzero.
  uint64_t next_below(uint64_t bound);

 private:
  uint64_t state_;
};

/// Sampling without replacement: Fisher-Yates shuffle driven by splitmix64,
/// then the first n elements in shuffled order. Same (corpus, n, seed) gives
/// identical output.
Corpus sample(const Corpus& corpus, size_t n, uint64_t seed);

inline constexpr size_t kDefaultDemonstrationCount = 5;

/// k demonstration instances (conventionally kDefaultDemonstrationCount)
/// from a pool disjoint from the test corpus (caller-asserted). Same
/// mechanism as sample().
std::vector<Instance> sample_demonstrations(const Corpus& pool, size_t k, uint64_t seed);

enum class PromptTemplate { p0, p1, p2 };

PromptTemplate parse_prompt_template(const std::string& name);  // "p0" | "p1" | "p2"
std::string prompt_template_name(PromptTemplate t);

/// ISO-639-1 code → English name lookup used by prompt rendering.
class LanguageNames {
 public:
  static const LanguageNames& builtin();
  static LanguageNames load_csv(const std::string& path);  // columns: code,name

  std::string name(const std::string& code) const;  // throws on unknown code
  bool knows(const std::string& code) const;

 private:
  std::map<std::string, std::string> names_;
};

/// Render one of the three translation prompts. Demonstrations are rendered
/// as filled templates placed before the final query, in order, one template
/// per demonstration; each demonstration must carry ref_text. The filled
/// form appends the reference after the template (same line for p0, next
/// line for p1/p2).
std::string render_prompt(PromptTemplate tpl, const LanguagePair& pair,
                          const std::string& src_text,
                          const std::vector<Instance>& demonstrations,
                          const LanguageNames& names = LanguageNames::builtin());

}  // namespace mtdiag
