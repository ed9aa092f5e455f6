#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mtdiag/corpus.hpp"

namespace mtdiag {

enum class Metric { comet, bleu, chrf };

Metric parse_metric(const std::string& name);
std::string metric_name(Metric m);

struct BleuConfig {
  enum class Smoothing { none, exp };
  int max_ngram = 4;
  Smoothing smoothing = Smoothing::none;
  bool use_13a_tokenizer = true;  // otherwise plain whitespace splitting
};

/// Corpus-level BLEU over one hypothesis/reference per segment:
/// 100 * BP * exp(mean of ln p_n), modified n-gram precisions clipped per
/// segment, BP = min(1, exp(1 - r/c)). Unsmoothed zero precision at any
/// order gives 0.
double bleu(const std::vector<std::string>& hypotheses, const std::vector<std::string>& references,
            const BleuConfig& config = {});

struct ChrfConfig {
  int char_order = 6;
  int word_order = 2;  // 2 = chrF++
  double beta = 2.0;
};

/// Corpus-level chrF++: per order (six character orders on
/// whitespace-stripped codepoints, two word orders on punctuation-separated
/// tokens) an F_beta from corpus-summed match statistics; the score is 100
/// times the arithmetic mean over orders with any n-grams on both sides.
double chrf(const std::vector<std::string>& hypotheses, const std::vector<std::string>& references,
            const ChrfConfig& config = {});

/// mteval 13a word tokenization, reimplemented rule by rule:
///   0. drop "<skipped>", join hyphenated line breaks, newlines to spaces,
///      unescape &quot; &amp; &lt; &gt;
///   1. pad every char in the ASCII ranges 0x20-0x26, 0x28-0x2B, 0x2F,
///      0x3A-0x40, 0x5B-0x60, 0x7B-0x7E with spaces (apostrophe, comma,
///      hyphen, period and digits excluded)
///   2. pad '.' and ',' when NOT preceded by a digit
///   3. pad '.' and ',' when NOT followed by a digit
///   4. pad '-' when preceded by a digit
/// then split on whitespace. Non-ASCII text passes through untouched.
std::vector<std::string> tokenize_13a(const std::string& line);

/// chrF++ word tokens: whitespace split, then a single leading or trailing
/// ASCII punctuation character of a multi-char token becomes its own token.
std::vector<std::string> chrf_word_tokens(const std::string& line);

enum class Granularity { corpus_level, segment_level };

struct ScoreTable {
  Metric metric = Metric::comet;
  Granularity granularity = Granularity::corpus_level;
  std::map<std::pair<std::string, std::string>, double> entries;  // (model, lp) -> score

  std::optional<double> score(const std::string& model, const std::string& lp) const;
  std::vector<std::string> models() const;
  std::vector<std::string> pairs_for(const std::string& model) const;
};

/// Corpus-level CSV (model,lp,score) or segment-level JSONL
/// {model, lp, instance_id, score} (segment scores are averaged per
/// (model, lp)). Scores outside the metric's nominal range warn, never
/// reject; duplicate (model, lp) keys are errors.
ScoreTable load_scores(const std::string& path, Metric metric,
                       std::vector<std::string>* warnings = nullptr);

struct DeltaRecord {
  LanguagePair pair;
  std::string reasoning_model;
  std::string instruct_model;
  std::optional<double> delta_comet;
  std::optional<double> delta_bleu;

  double delta() const { return delta_comet ? *delta_comet : *delta_bleu; }
};

/// Per-LP score difference reasoning minus instruct for every pairing entry.
/// LPs missing on either side are omitted and logged to warnings; pairing
/// names absent from the tables are errors.
std::vector<DeltaRecord> delta_scores(const ScoreTable& reasoning, const ScoreTable& instruct,
                                      const std::map<std::string, std::string>& model_pairing,
                                      std::vector<std::string>* warnings = nullptr);

}  // namespace mtdiag
