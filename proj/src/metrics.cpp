#include "mtdiag/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "mtdiag/csv.hpp"
#include "mtdiag/error.hpp"
#include "mtdiag/tokenize.hpp"

namespace mtdiag {

Metric parse_metric(const std::string& name) {
  if (name == "comet") return Metric::comet;
  if (name == "bleu") return Metric::bleu;
  if (name == "chrf") return Metric::chrf;
  throw Error("unknown metric: " + name);
}

std::string metric_name(Metric m) {
  switch (m) {
    case Metric::comet: return "comet";
    case Metric::bleu: return "bleu";
    case Metric::chrf: return "chrf";
  }
  return "?";
}

namespace {

void replace_all(std::string& s, const std::string& from, const std::string& to) {
  size_t pos = 0;
  while ((pos = s.find(from, pos)) != std::string::npos) {
    s.replace(pos, from.size(), to);
    pos += to.size();
  }
}

bool in_13a_padded_class(unsigned char c) {
  return (c >= 0x20 && c <= 0x26) || (c >= 0x28 && c <= 0x2B) || c == 0x2F ||
         (c >= 0x3A && c <= 0x40) || (c >= 0x5B && c <= 0x60) || (c >= 0x7B && c <= 0x7E);
}

bool is_digit(unsigned char c) { return c >= '0' && c <= '9'; }

std::vector<std::string> split_whitespace(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
      if (!cur.empty()) {
        out.push_back(cur);
        cur.clear();
      }
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

}  // namespace

std::vector<std::string> tokenize_13a(const std::string& line) {
  std::string s = line;
  replace_all(s, "<skipped>", "");
  replace_all(s, "-\n", "");
  replace_all(s, "\n", " ");
  if (s.find('&') != std::string::npos) {
    replace_all(s, "&quot;", "\"");
    replace_all(s, "&amp;", "&");
    replace_all(s, "&lt;", "<");
    replace_all(s, "&gt;", ">");
  }
  s = " " + s + " ";

  std::string t;
  t.reserve(s.size() * 2);
  for (unsigned char c : s) {
    if (in_13a_padded_class(c)) {
      t += ' ';
      t += static_cast<char>(c);
      t += ' ';
    } else {
      t += static_cast<char>(c);
    }
  }

  // '.' and ',' split off unless glued to digits on the relevant side
  auto sub_scan = [](const std::string& in, auto matcher) {
    std::string out;
    size_t i = 0;
    while (i < in.size()) {
      size_t consumed = matcher(in, i, out);
      if (consumed == 0) {
        out += in[i];
        ++i;
      } else {
        i += consumed;
      }
    }
    return out;
  };

  t = sub_scan(t, [](const std::string& in, size_t i, std::string& out) -> size_t {
    // ([^0-9])([.,]) -> "\1 \2 "
    if (i + 1 < in.size() && !is_digit(static_cast<unsigned char>(in[i])) &&
        (in[i + 1] == '.' || in[i + 1] == ',')) {
      out += in[i];
      out += ' ';
      out += in[i + 1];
      out += ' ';
      return 2;
    }
    return 0;
  });
  t = sub_scan(t, [](const std::string& in, size_t i, std::string& out) -> size_t {
    // ([.,])([^0-9]) -> " \1 \2"
    if (i + 1 < in.size() && (in[i] == '.' || in[i] == ',') &&
        !is_digit(static_cast<unsigned char>(in[i + 1]))) {
      out += ' ';
      out += in[i];
      out += ' ';
      out += in[i + 1];
      return 2;
    }
    return 0;
  });
  t = sub_scan(t, [](const std::string& in, size_t i, std::string& out) -> size_t {
    // ([0-9])(-) -> "\1 - "
    if (i + 1 < in.size() && is_digit(static_cast<unsigned char>(in[i])) && in[i + 1] == '-') {
      out += in[i];
      out += " - ";
      return 2;
    }
    return 0;
  });

  return split_whitespace(t);
}

namespace {

using NgramCounts = std::map<std::vector<std::string>, int64_t>;

NgramCounts count_ngrams(const std::vector<std::string>& tokens, int n) {
  NgramCounts counts;
  if (n <= 0 || tokens.size() < static_cast<size_t>(n)) return counts;
  for (size_t i = 0; i + n <= tokens.size(); ++i) {
    std::vector<std::string> gram(tokens.begin() + static_cast<ptrdiff_t>(i),
                                  tokens.begin() + static_cast<ptrdiff_t>(i + n));
    ++counts[gram];
  }
  return counts;
}

int64_t clipped_matches(const NgramCounts& hyp, const NgramCounts& ref) {
  int64_t total = 0;
  for (const auto& [gram, count] : hyp) {
    auto it = ref.find(gram);
    if (it != ref.end()) total += std::min(count, it->second);
  }
  return total;
}

}  // namespace

double bleu(const std::vector<std::string>& hypotheses, const std::vector<std::string>& references,
            const BleuConfig& config) {
  if (hypotheses.size() != references.size()) {
    throw Error("bleu: " + std::to_string(hypotheses.size()) + " hypotheses vs " +
                std::to_string(references.size()) + " references");
  }
  if (hypotheses.empty()) throw Error("bleu: empty corpus");
  const int max_n = config.max_ngram;
  std::vector<int64_t> matches(static_cast<size_t>(max_n), 0);
  std::vector<int64_t> totals(static_cast<size_t>(max_n), 0);
  int64_t hyp_len = 0;
  int64_t ref_len = 0;
  for (size_t s = 0; s < hypotheses.size(); ++s) {
    auto hyp_tokens = config.use_13a_tokenizer ? tokenize_13a(hypotheses[s])
                                               : split_whitespace(hypotheses[s]);
    auto ref_tokens = config.use_13a_tokenizer ? tokenize_13a(references[s])
                                               : split_whitespace(references[s]);
    hyp_len += static_cast<int64_t>(hyp_tokens.size());
    ref_len += static_cast<int64_t>(ref_tokens.size());
    for (int n = 1; n <= max_n; ++n) {
      auto hyp_grams = count_ngrams(hyp_tokens, n);
      auto ref_grams = count_ngrams(ref_tokens, n);
      matches[static_cast<size_t>(n - 1)] += clipped_matches(hyp_grams, ref_grams);
      int64_t possible = static_cast<int64_t>(hyp_tokens.size()) - n + 1;
      totals[static_cast<size_t>(n - 1)] += std::max<int64_t>(0, possible);
    }
  }

  if (hyp_len == 0) return 0.0;

  // orders beyond the longest hypothesis carry no information; the mean runs
  // over the effective orders only, so identity scores stay at 100 for short
  // segments
  int effective_order = 0;
  for (int n = 1; n <= max_n; ++n) {
    if (totals[static_cast<size_t>(n - 1)] == 0) break;
    effective_order = n;
  }
  if (effective_order == 0) return 0.0;

  double log_precision_sum = 0.0;
  double smooth_mult = 1.0;
  for (int n = 1; n <= effective_order; ++n) {
    int64_t m = matches[static_cast<size_t>(n - 1)];
    int64_t t = totals[static_cast<size_t>(n - 1)];
    double p;
    if (m == 0) {
      if (config.smoothing == BleuConfig::Smoothing::exp) {
        smooth_mult *= 2.0;
        p = 1.0 / (smooth_mult * static_cast<double>(t));
      } else {
        return 0.0;
      }
    } else {
      p = static_cast<double>(m) / static_cast<double>(t);
    }
    log_precision_sum += std::log(p);
  }

  double bp = 1.0;
  if (hyp_len < ref_len) {
    bp = std::exp(1.0 - static_cast<double>(ref_len) / static_cast<double>(hyp_len));
  }
  return 100.0 * bp * std::exp(log_precision_sum / effective_order);
}

namespace {

bool is_ascii_punct(uint32_t cp) {
  // python string.punctuation
  static const std::string punct = "!\"#$%&'()*+,-./:;<=>?@[\\]^_`{|}~";
  return cp < 128 && punct.find(static_cast<char>(cp)) != std::string::npos;
}

}  // namespace

std::vector<std::string> chrf_word_tokens(const std::string& line) {
  std::vector<std::string> out;
  for (const auto& word : split_whitespace(line)) {
    auto cps = utf8_decode(word);
    if (cps.size() <= 1) {
      out.push_back(word);
      continue;
    }
    if (is_ascii_punct(cps.back())) {
      std::string head;
      for (size_t i = 0; i + 1 < cps.size(); ++i) head += utf8_encode(cps[i]);
      out.push_back(head);
      out.push_back(utf8_encode(cps.back()));
    } else if (is_ascii_punct(cps.front())) {
      out.push_back(utf8_encode(cps.front()));
      std::string tail;
      for (size_t i = 1; i < cps.size(); ++i) tail += utf8_encode(cps[i]);
      out.push_back(tail);
    } else {
      out.push_back(word);
    }
  }
  return out;
}

namespace {

using CpNgramCounts = std::map<std::vector<uint32_t>, int64_t>;

CpNgramCounts count_char_ngrams(const std::vector<uint32_t>& cps, int n) {
  CpNgramCounts counts;
  if (n <= 0 || cps.size() < static_cast<size_t>(n)) return counts;
  for (size_t i = 0; i + n <= cps.size(); ++i) {
    std::vector<uint32_t> gram(cps.begin() + static_cast<ptrdiff_t>(i),
                               cps.begin() + static_cast<ptrdiff_t>(i + n));
    ++counts[gram];
  }
  return counts;
}

int64_t cp_clipped_matches(const CpNgramCounts& hyp, const CpNgramCounts& ref) {
  int64_t total = 0;
  for (const auto& [gram, count] : hyp) {
    auto it = ref.find(gram);
    if (it != ref.end()) total += std::min(count, it->second);
  }
  return total;
}

std::vector<uint32_t> strip_whitespace_cps(const std::string& text) {
  std::vector<uint32_t> out;
  for (uint32_t cp : utf8_decode(text)) {
    if (cp == ' ' || cp == '\t' || cp == '\n' || cp == '\r') continue;
    out.push_back(cp);
  }
  return out;
}

}  // namespace

double chrf(const std::vector<std::string>& hypotheses, const std::vector<std::string>& references,
            const ChrfConfig& config) {
  if (hypotheses.size() != references.size()) {
    throw Error("chrf: " + std::to_string(hypotheses.size()) + " hypotheses vs " +
                std::to_string(references.size()) + " references");
  }
  if (hypotheses.empty()) throw Error("chrf: empty corpus");

  const int orders = config.char_order + config.word_order;
  std::vector<int64_t> hyp_total(static_cast<size_t>(orders), 0);
  std::vector<int64_t> ref_total(static_cast<size_t>(orders), 0);
  std::vector<int64_t> match_total(static_cast<size_t>(orders), 0);

  for (size_t s = 0; s < hypotheses.size(); ++s) {
    auto hyp_cps = strip_whitespace_cps(hypotheses[s]);
    auto ref_cps = strip_whitespace_cps(references[s]);
    for (int n = 1; n <= config.char_order; ++n) {
      auto h = count_char_ngrams(hyp_cps, n);
      auto r = count_char_ngrams(ref_cps, n);
      size_t o = static_cast<size_t>(n - 1);
      for (const auto& [g, c] : h) hyp_total[o] += c;
      for (const auto& [g, c] : r) ref_total[o] += c;
      match_total[o] += cp_clipped_matches(h, r);
    }
    auto hyp_words = chrf_word_tokens(hypotheses[s]);
    auto ref_words = chrf_word_tokens(references[s]);
    for (int n = 1; n <= config.word_order; ++n) {
      auto h = count_ngrams(hyp_words, n);
      auto r = count_ngrams(ref_words, n);
      size_t o = static_cast<size_t>(config.char_order + n - 1);
      for (const auto& [g, c] : h) hyp_total[o] += c;
      for (const auto& [g, c] : r) ref_total[o] += c;
      match_total[o] += clipped_matches(h, r);
    }
  }

  const double factor = config.beta * config.beta;
  double score_sum = 0.0;
  int effective_orders = 0;
  for (int o = 0; o < orders; ++o) {
    size_t i = static_cast<size_t>(o);
    if (hyp_total[i] == 0 || ref_total[i] == 0) continue;  // order absent from corpus
    double prec = static_cast<double>(match_total[i]) / static_cast<double>(hyp_total[i]);
    double rec = static_cast<double>(match_total[i]) / static_cast<double>(ref_total[i]);
    double denom = factor * prec + rec;
    score_sum += denom > 0.0 ? (1.0 + factor) * prec * rec / denom : 0.0;
    ++effective_orders;
  }
  if (effective_orders == 0) return 0.0;
  return 100.0 * score_sum / effective_orders;
}

std::optional<double> ScoreTable::score(const std::string& model, const std::string& lp) const {
  auto it = entries.find({model, lp});
  if (it == entries.end()) return std::nullopt;
  return it->second;
}

std::vector<std::string> ScoreTable::models() const {
  std::set<std::string> seen;
  std::vector<std::string> out;
  for (const auto& [key, value] : entries) {
    if (seen.insert(key.first).second) out.push_back(key.first);
  }
  return out;
}

std::vector<std::string> ScoreTable::pairs_for(const std::string& model) const {
  std::vector<std::string> out;
  for (const auto& [key, value] : entries) {
    if (key.first == model) out.push_back(key.second);
  }
  return out;
}

namespace {

void check_nominal_range(Metric metric, const std::string& model, const std::string& lp,
                         double score, std::vector<std::string>* warnings) {
  bool outside = metric == Metric::comet ? (score < 0.0 || score > 1.0)
                                         : (score < 0.0 || score > 100.0);
  if (outside && warnings != nullptr) {
    warnings->push_back("score " + format_fixed(score, 4) + " for (" + model + ", " + lp +
                        ") is outside the nominal " + metric_name(metric) + " range");
  }
}

}  // namespace

ScoreTable load_scores(const std::string& path, Metric metric,
                       std::vector<std::string>* warnings) {
  ScoreTable table;
  table.metric = metric;

  auto ends_with = [](const std::string& s, const std::string& suffix) {
    return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
  };

  if (ends_with(path, ".jsonl")) {
    table.granularity = Granularity::segment_level;
    std::ifstream in(path);
    if (!in) throw Error("missing score file: " + path);
    std::map<std::pair<std::string, std::string>, std::pair<double, int64_t>> sums;
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
      if (!rec.contains("model") || !rec.contains("lp") || !rec.contains("score") ||
          !rec["score"].is_number()) {
        throw Error(path + " line " + std::to_string(line_no) +
                    ": expected {model, lp, instance_id, score}");
      }
      auto key = std::make_pair(rec["model"].get<std::string>(), rec["lp"].get<std::string>());
      double score = rec["score"].get<double>();
      check_nominal_range(metric, key.first, key.second, score, warnings);
      auto& [sum, count] = sums[key];
      sum += score;
      ++count;
    }
    for (const auto& [key, agg] : sums) {
      table.entries[key] = agg.first / static_cast<double>(agg.second);
    }
    return table;
  }

  auto csv = read_csv(path);
  if (csv.header.size() < 3 || csv.header[0] != "model" || csv.header[1] != "lp" ||
      csv.header[2] != "score") {
    throw Error("score table " + path + " must have header model,lp,score");
  }
  size_t row_no = 0;
  for (const auto& row : csv.rows) {
    ++row_no;
    if (row.size() < 3) throw Error(path + " row " + std::to_string(row_no) + ": too few cells");
    auto score = parse_double(row[2]);
    if (!score) {
      throw Error(path + " row " + std::to_string(row_no) + ": unparseable score '" + row[2] + "'");
    }
    auto key = std::make_pair(row[0], row[1]);
    if (table.entries.count(key)) {
      throw Error(path + " row " + std::to_string(row_no) + ": duplicate (model, lp) = (" +
                  row[0] + ", " + row[1] + ")");
    }
    check_nominal_range(metric, row[0], row[1], *score, warnings);
    table.entries[key] = *score;
  }
  return table;
}

std::vector<DeltaRecord> delta_scores(const ScoreTable& reasoning, const ScoreTable& instruct,
                                      const std::map<std::string, std::string>& model_pairing,
                                      std::vector<std::string>* warnings) {
  if (reasoning.metric != instruct.metric) {
    throw Error("delta_scores needs two tables of the same metric");
  }
  if (reasoning.metric == Metric::chrf) {
    throw Error("delta_scores supports comet and bleu tables");
  }
  std::vector<DeltaRecord> out;
  for (const auto& [reasoning_model, instruct_model] : model_pairing) {
    auto r_pairs = reasoning.pairs_for(reasoning_model);
    if (r_pairs.empty()) {
      throw Error("pairing names model '" + reasoning_model + "' absent from the reasoning table");
    }
    if (instruct.pairs_for(instruct_model).empty()) {
      throw Error("pairing names model '" + instruct_model + "' absent from the instruct table");
    }
    for (const auto& lp : r_pairs) {
      auto r = reasoning.score(reasoning_model, lp);
      auto i = instruct.score(instruct_model, lp);
      if (!i) {
        if (warnings != nullptr) {
          warnings->push_back("lp " + lp + " missing for instruct model " + instruct_model +
                              "; record omitted");
        }
        continue;
      }
      DeltaRecord rec;
      rec.pair = LanguagePair::parse(lp);
      rec.reasoning_model = reasoning_model;
      rec.instruct_model = instruct_model;
      double delta = *r - *i;
      if (reasoning.metric == Metric::comet) rec.delta_comet = delta;
      else rec.delta_bleu = delta;
      out.push_back(std::move(rec));
    }
  }
  return out;
}

}  // namespace mtdiag
