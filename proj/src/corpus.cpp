#include "mtdiag/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "mtdiag/csv.hpp"
#include "mtdiag/error.hpp"

namespace mtdiag {

namespace {

bool valid_code(const std::string& code) {
  if (code.size() != 2) return false;
  return code[0] >= 'a' && code[0] <= 'z' && code[1] >= 'a' && code[1] <= 'z';
}

}  // namespace

LanguagePair LanguagePair::make(std::string src, std::string tgt) {
  if (!valid_code(src) || !valid_code(tgt)) {
    throw Error("language codes must be lowercase two-letter: '" + src + "', '" + tgt + "'");
  }
  if (src == tgt) throw Error("language pair must have distinct sides: " + src + "-" + tgt);
  return LanguagePair{std::move(src), std::move(tgt)};
}

LanguagePair LanguagePair::parse(const std::string& text) {
  auto dash = text.find('-');
  if (dash == std::string::npos) throw Error("language pair must look like 'xx-yy': " + text);
  return make(text.substr(0, dash), text.substr(dash + 1));
}

namespace {

Corpus load_jsonl(const std::string& path, const LanguagePair& pair) {
  std::ifstream in(path);
  if (!in) throw Error("missing corpus file: " + path);
  Corpus corpus{pair, {}, path};
  std::vector<std::string> problems;
  std::set<std::string> seen_ids;
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
    if (!rec.is_object()) {
      problems.push_back("line " + std::to_string(line_no) + ": record is not an object");
      continue;
    }
    Instance inst;
    if (rec.contains("id") && rec["id"].is_string()) {
      inst.id = rec["id"].get<std::string>();
    } else {
      problems.push_back("line " + std::to_string(line_no) + ": missing string field 'id'");
      continue;
    }
    if (rec.contains("src") && rec["src"].is_string()) {
      inst.src_text = rec["src"].get<std::string>();
    }
    if (inst.src_text.empty()) {
      problems.push_back("line " + std::to_string(line_no) + ": empty or missing 'src'");
      continue;
    }
    if (!seen_ids.insert(inst.id).second) {
      problems.push_back("line " + std::to_string(line_no) + ": duplicate id '" + inst.id + "'");
      continue;
    }
    auto opt_str = [&rec](const char* key) -> std::optional<std::string> {
      if (rec.contains(key) && rec[key].is_string() && !rec[key].get<std::string>().empty()) {
        return rec[key].get<std::string>();
      }
      return std::nullopt;
    };
    inst.ref_text = opt_str("ref");
    inst.hyp_text = opt_str("hyp");
    inst.raw_output = opt_str("raw");
    corpus.instances.push_back(std::move(inst));
  }
  if (!problems.empty()) {
    throw Error("corpus load failed for " + path, problems);
  }
  return corpus;
}

Corpus load_tsv(const std::string& path, const LanguagePair& pair) {
  std::ifstream in(path);
  if (!in) throw Error("missing corpus file: " + path);
  Corpus corpus{pair, {}, path};
  std::string line;
  if (!std::getline(in, line)) throw Error("tsv corpus has no header: " + path);
  if (!line.empty() && line.back() == '\r') line.pop_back();

  auto split_tabs = [](const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
      if (c == '\t') {
        out.push_back(cur);
        cur.clear();
      } else {
        cur += c;
      }
    }
    out.push_back(cur);
    return out;
  };

  auto header = split_tabs(line);
  auto col = [&header](const std::string& name) -> std::optional<size_t> {
    auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) return std::nullopt;
    return static_cast<size_t>(it - header.begin());
  };
  auto id_col = col("id");
  auto src_col = col("src");
  if (!id_col) throw Error("tsv corpus " + path + " is missing required column 'id'");
  if (!src_col) throw Error("tsv corpus " + path + " is missing required column 'src'");
  auto ref_col = col("ref");
  auto hyp_col = col("hyp");
  auto raw_col = col("raw");

  std::vector<std::string> problems;
  std::set<std::string> seen_ids;
  size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto cells = split_tabs(line);
    if (cells.size() != header.size()) {
      problems.push_back("line " + std::to_string(line_no) + ": expected " +
                         std::to_string(header.size()) + " columns, got " +
                         std::to_string(cells.size()));
      continue;
    }
    Instance inst;
    inst.id = cells[*id_col];
    inst.src_text = cells[*src_col];
    if (inst.src_text.empty()) {
      problems.push_back("line " + std::to_string(line_no) + ": empty 'src'");
      continue;
    }
    if (!seen_ids.insert(inst.id).second) {
      problems.push_back("line " + std::to_string(line_no) + ": duplicate id '" + inst.id + "'");
      continue;
    }
    auto opt_cell = [&cells](std::optional<size_t> c) -> std::optional<std::string> {
      if (!c || cells[*c].empty()) return std::nullopt;
      return cells[*c];
    };
    inst.ref_text = opt_cell(ref_col);
    inst.hyp_text = opt_cell(hyp_col);
    inst.raw_output = opt_cell(raw_col);
    corpus.instances.push_back(std::move(inst));
  }
  if (!problems.empty()) {
    throw Error("corpus load failed for " + path, problems);
  }
  return corpus;
}

}  // namespace

Corpus load_corpus(const std::string& path, CorpusFormat format, const LanguagePair& pair) {
  switch (format) {
    case CorpusFormat::jsonl:
      return load_jsonl(path, pair);
    case CorpusFormat::tsv:
      return load_tsv(path, pair);
  }
  throw Error("unknown corpus format");
}

std::string serialize_corpus_jsonl(const Corpus& corpus) {
  std::string out;
  for (const auto& inst : corpus.instances) {
    nlohmann::ordered_json rec;
    rec["id"] = inst.id;
    rec["src"] = inst.src_text;
    if (inst.ref_text) rec["ref"] = *inst.ref_text;
    if (inst.hyp_text) rec["hyp"] = *inst.hyp_text;
    if (inst.raw_output) rec["raw"] = *inst.raw_output;
    out += rec.dump();
    out += '\n';
  }
  return out;
}

uint64_t SplitMix64::next() {
  uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

uint64_t SplitMix64::next_below(uint64_t bound) { return next() % bound; }

namespace {

// Fisher-Yates over index vector; modulo reduction is deliberate, the
// contract is determinism across platforms, not unbiasedness at 2^64 scale.
std::vector<size_t> shuffled_indices(size_t count, uint64_t seed) {
  std::vector<size_t> idx(count);
  for (size_t i = 0; i < count; ++i) idx[i] = i;
  SplitMix64 rng(seed);
  for (size_t i = count; i > 1; --i) {
    size_t j = static_cast<size_t>(rng.next_below(i));
    std::swap(idx[i - 1], idx[j]);
  }
  return idx;
}

}  // namespace

Corpus sample(const Corpus& corpus, size_t n, uint64_t seed) {
  if (n > corpus.size()) {
    throw Error("sample size " + std::to_string(n) + " exceeds corpus size " +
                std::to_string(corpus.size()));
  }
  auto idx = shuffled_indices(corpus.size(), seed);
  Corpus out{corpus.pair, {}, corpus.source_tag};
  out.instances.reserve(n);
  for (size_t i = 0; i < n; ++i) out.instances.push_back(corpus.instances[idx[i]]);
  return out;
}

std::vector<Instance> sample_demonstrations(const Corpus& pool, size_t k, uint64_t seed) {
  if (k > pool.size()) {
    throw Error("demonstration count " + std::to_string(k) + " exceeds pool size " +
                std::to_string(pool.size()));
  }
  auto idx = shuffled_indices(pool.size(), seed);
  std::vector<Instance> out;
  out.reserve(k);
  for (size_t i = 0; i < k; ++i) out.push_back(pool.instances[idx[i]]);
  return out;
}

PromptTemplate parse_prompt_template(const std::string& name) {
  if (name == "p0") return PromptTemplate::p0;
  if (name == "p1") return PromptTemplate::p1;
  if (name == "p2") return PromptTemplate::p2;
  throw Error("unknown prompt template: " + name);
}

std::string prompt_template_name(PromptTemplate t) {
  switch (t) {
    case PromptTemplate::p0: return "p0";
    case PromptTemplate::p1: return "p1";
    case PromptTemplate::p2: return "p2";
  }
  return "?";
}

const LanguageNames& LanguageNames::builtin() {
  static const LanguageNames instance = [] {
    LanguageNames n;
    // ISO-639-1 codes covering the shipped corpora plus common languages.
    const std::pair<const char*, const char*> entries[] = {
        {"ar", "Arabic"},     {"be", "Belarusian"}, {"bg", "Bulgarian"},  {"bn", "Bengali"},
        {"cs", "Czech"},      {"da", "Danish"},     {"de", "German"},     {"el", "Greek"},
        {"en", "English"},    {"es", "Spanish"},    {"et", "Estonian"},   {"fa", "Persian"},
        {"fi", "Finnish"},    {"fr", "French"},     {"gu", "Gujarati"},   {"he", "Hebrew"},
        {"hi", "Hindi"},      {"hr", "Croatian"},   {"hu", "Hungarian"},  {"id", "Indonesian"},
        {"it", "Italian"},    {"ja", "Japanese"},   {"ka", "Georgian"},   {"kk", "Kazakh"},
        {"km", "Khmer"},      {"kn", "Kannada"},    {"ko", "Korean"},     {"lt", "Lithuanian"},
        {"lv", "Latvian"},    {"ml", "Malayalam"},  {"mr", "Marathi"},    {"ms", "Malay"},
        {"ne", "Nepali"},     {"nl", "Dutch"},      {"no", "Norwegian"},  {"pl", "Polish"},
        {"pt", "Portuguese"}, {"ro", "Romanian"},   {"ru", "Russian"},    {"sk", "Slovak"},
        {"sl", "Slovenian"},  {"sr", "Serbian"},    {"sv", "Swedish"},    {"sw", "Swahili"},
        {"ta", "Tamil"},      {"te", "Telugu"},     {"th", "Thai"},       {"tr", "Turkish"},
        {"uk", "Ukrainian"},  {"ur", "Urdu"},       {"vi", "Vietnamese"}, {"zh", "Chinese"},
    };
    for (const auto& [code, name] : entries) n.names_[code] = name;
    return n;
  }();
  return instance;
}

LanguageNames LanguageNames::load_csv(const std::string& path) {
  LanguageNames n;
  auto table = read_csv(path);
  if (table.header.size() < 2 || table.header[0] != "code" || table.header[1] != "name") {
    throw Error("language name table " + path + " must have header code,name");
  }
  for (const auto& row : table.rows) {
    if (row.size() < 2 || row[0].empty() || row[1].empty()) {
      throw Error("bad row in language name table " + path);
    }
    n.names_[row[0]] = row[1];
  }
  return n;
}

std::string LanguageNames::name(const std::string& code) const {
  auto it = names_.find(code);
  if (it == names_.end()) throw Error("unknown language code: " + code);
  return it->second;
}

bool LanguageNames::knows(const std::string& code) const { return names_.count(code) > 0; }

namespace {

std::string fill_template(PromptTemplate tpl, const std::string& src_lang,
                          const std::string& tgt_lang, const std::string& src_text) {
  switch (tpl) {
    case PromptTemplate::p0:
      return src_lang + ": " + src_text + "\n" + tgt_lang + ":";
    case PromptTemplate::p1:
      return "Translate the following " + src_lang + " into " + tgt_lang + ": " + src_text;
    case PromptTemplate::p2:
      return "Translate the following " + src_lang + " into " + tgt_lang +
             " and only output the target text: " + src_text;
  }
  throw Error("unknown prompt template");
}

}  // namespace

std::string render_prompt(PromptTemplate tpl, const LanguagePair& pair,
                          const std::string& src_text,
                          const std::vector<Instance>& demonstrations,
                          const LanguageNames& names) {
  const std::string src_lang = names.name(pair.src);
  const std::string tgt_lang = names.name(pair.tgt);
  std::string out;
  for (const auto& demo : demonstrations) {
    if (!demo.ref_text) {
      throw Error("demonstration instance '" + demo.id + "' has no reference text");
    }
    out += fill_template(tpl, src_lang, tgt_lang, demo.src_text);
    // p0 ends with "<target-language>:", the reference continues that line;
    // the instruction templates put the reference on the next line.
    out += (tpl == PromptTemplate::p0) ? " " : "\n";
    out += *demo.ref_text;
    out += "\n";
  }
  out += fill_template(tpl, src_lang, tgt_lang, src_text);
  return out;
}

}  // namespace mtdiag
