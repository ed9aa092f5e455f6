#include "mtdiag/tokenize.hpp"

#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include <json.hpp>

#include "mtdiag/csv.hpp"
#include "mtdiag/error.hpp"

namespace mtdiag {

const std::array<uint32_t, 256>& byte_to_unicode() {
  static const std::array<uint32_t, 256> table = [] {
    std::array<uint32_t, 256> t{};
    std::array<bool, 256> printable{};
    auto mark = [&printable](int lo, int hi) {
      for (int b = lo; b <= hi; ++b) printable[b] = true;
    };
    mark('!', '~');
    mark(0xA1, 0xAC);
    mark(0xAE, 0xFF);
    uint32_t n = 0;
    for (int b = 0; b < 256; ++b) {
      t[b] = printable[b] ? static_cast<uint32_t>(b) : 256 + n++;
    }
    return t;
  }();
  return table;
}

std::string utf8_encode(uint32_t cp) {
  std::string out;
  if (cp < 0x80) {
    out += static_cast<char>(cp);
  } else if (cp < 0x800) {
    out += static_cast<char>(0xC0 | (cp >> 6));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else if (cp < 0x10000) {
    out += static_cast<char>(0xE0 | (cp >> 12));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else {
    out += static_cast<char>(0xF0 | (cp >> 18));
    out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  }
  return out;
}

std::vector<uint32_t> utf8_decode(const std::string& text) {
  std::vector<uint32_t> out;
  size_t i = 0;
  while (i < text.size()) {
    uint8_t b0 = static_cast<uint8_t>(text[i]);
    uint32_t cp = 0;
    size_t len = 1;
    if (b0 < 0x80) {
      cp = b0;
    } else if ((b0 & 0xE0) == 0xC0) {
      cp = b0 & 0x1F;
      len = 2;
    } else if ((b0 & 0xF0) == 0xE0) {
      cp = b0 & 0x0F;
      len = 3;
    } else if ((b0 & 0xF8) == 0xF0) {
      cp = b0 & 0x07;
      len = 4;
    } else {
      // invalid lead byte: treat as latin-1 so nothing is ever lost
      out.push_back(b0);
      ++i;
      continue;
    }
    if (i + len > text.size()) {
      out.push_back(b0);
      ++i;
      continue;
    }
    bool ok = true;
    for (size_t k = 1; k < len; ++k) {
      uint8_t bk = static_cast<uint8_t>(text[i + k]);
      if ((bk & 0xC0) != 0x80) {
        ok = false;
        break;
      }
      cp = (cp << 6) | (bk & 0x3F);
    }
    if (!ok) {
      out.push_back(b0);
      ++i;
      continue;
    }
    out.push_back(cp);
    i += len;
  }
  return out;
}

std::string byte_symbol(uint8_t byte) { return utf8_encode(byte_to_unicode()[byte]); }

void VocabModel::finalize() {
  if (vocab_size == 0) vocab_size = static_cast<int64_t>(vocab.size());
  id_to_token.clear();
  for (const auto& [token, id] : vocab) {
    if (id < 0) throw Error("vocab id for token '" + token + "' is negative");
    auto [it, inserted] = id_to_token.emplace(id, token);
    if (!inserted) {
      throw Error("duplicate vocab id " + std::to_string(id) + " ('" + it->second + "' and '" +
                  token + "')");
    }
  }
}

const std::string* VocabModel::token_for(int64_t id) const {
  auto it = id_to_token.find(id);
  return it == id_to_token.end() ? nullptr : &it->second;
}

VocabModel load_vocab(const std::string& vocab_path, const std::optional<std::string>& merges_path,
                      bool byte_level, const std::string& model_name) {
  VocabModel model;
  model.model_name = model_name.empty() ? vocab_path : model_name;
  model.byte_level = byte_level;

  std::ifstream in(vocab_path);
  if (!in) throw Error("missing vocab file: " + vocab_path);
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw Error("vocab file " + vocab_path + " is not valid json: " + e.what());
  }
  if (!doc.is_object()) throw Error("vocab file " + vocab_path + " must be a json object");
  for (auto it = doc.begin(); it != doc.end(); ++it) {
    if (!it.value().is_number_integer()) {
      throw Error("vocab entry '" + it.key() + "' has a non-integer id");
    }
    model.vocab[it.key()] = it.value().get<int64_t>();
  }
  model.finalize();

  if (merges_path) {
    std::ifstream mi(*merges_path);
    if (!mi) throw Error("missing merges file: " + *merges_path);
    std::string line;
    size_t line_no = 0;
    while (std::getline(mi, line)) {
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty()) continue;
      if (line_no == 1 && line.rfind("#version", 0) == 0) continue;
      auto space = line.find(' ');
      if (space == std::string::npos || space == 0 || space + 1 >= line.size()) {
        throw Error("merges file " + *merges_path + " line " + std::to_string(line_no) +
                    ": expected 'left right'");
      }
      std::string left = line.substr(0, space);
      std::string right = line.substr(space + 1);
      for (const std::string& part : {left, right, left + right}) {
        if (!model.vocab.count(part)) {
          throw Error("merge rule '" + left + " " + right + "' references symbol '" + part +
                      "' absent from the vocab");
        }
      }
      model.merges.emplace_back(std::move(left), std::move(right));
    }
  }
  return model;
}

namespace {

struct PairHash {
  size_t operator()(const std::pair<std::string, std::string>& p) const {
    return std::hash<std::string>()(p.first) * 1000003u ^ std::hash<std::string>()(p.second);
  }
};

}  // namespace

IdSequence encode(const VocabModel& model, const std::string& text,
                  const std::string& instance_id) {
  IdSequence seq;
  seq.instance_id = instance_id;
  if (text.empty()) return seq;

  std::vector<std::string> symbols;
  if (model.byte_level) {
    symbols.reserve(text.size());
    for (unsigned char b : text) symbols.push_back(byte_symbol(b));
  } else {
    for (uint32_t cp : utf8_decode(text)) symbols.push_back(utf8_encode(cp));
  }

  std::unordered_map<std::pair<std::string, std::string>, size_t, PairHash> rank;
  for (size_t i = 0; i < model.merges.size(); ++i) {
    rank.emplace(model.merges[i], i);
  }

  // one merge per iteration: best-ranked pair present, leftmost occurrence
  while (symbols.size() > 1 && !rank.empty()) {
    size_t best_rank = std::numeric_limits<size_t>::max();
    size_t best_pos = 0;
    for (size_t i = 0; i + 1 < symbols.size(); ++i) {
      auto it = rank.find({symbols[i], symbols[i + 1]});
      if (it != rank.end() && it->second < best_rank) {
        best_rank = it->second;
        best_pos = i;
      }
    }
    if (best_rank == std::numeric_limits<size_t>::max()) break;
    symbols[best_pos] += symbols[best_pos + 1];
    symbols.erase(symbols.begin() + static_cast<ptrdiff_t>(best_pos) + 1);
  }

  seq.ids.reserve(symbols.size());
  for (const auto& sym : symbols) {
    auto it = model.vocab.find(sym);
    if (it != model.vocab.end()) {
      seq.ids.push_back(it->second);
    } else if (model.unk_id) {
      seq.ids.push_back(*model.unk_id);
    } else {
      throw Error("symbol '" + sym + "' is not in the vocab of " + model.model_name +
                  " and no unknown-token id is configured");
    }
  }
  return seq;
}

std::string decode(const VocabModel& model, const std::vector<int64_t>& ids) {
  std::string joined;
  for (int64_t id : ids) {
    const std::string* token = model.token_for(id);
    if (token == nullptr) {
      throw Error("id " + std::to_string(id) + " is not in the vocab of " + model.model_name);
    }
    joined += *token;
  }
  if (!model.byte_level) return joined;

  static const std::map<uint32_t, uint8_t> reverse = [] {
    std::map<uint32_t, uint8_t> r;
    const auto& fwd = byte_to_unicode();
    for (int b = 0; b < 256; ++b) r[fwd[b]] = static_cast<uint8_t>(b);
    return r;
  }();
  std::string bytes;
  for (uint32_t cp : utf8_decode(joined)) {
    auto it = reverse.find(cp);
    if (it == reverse.end()) {
      throw Error("codepoint " + std::to_string(cp) + " is not a remapped byte");
    }
    bytes += static_cast<char>(it->second);
  }
  return bytes;
}

std::vector<IdSequence> load_pretokenized(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("missing pre-tokenized file: " + path);
  std::vector<IdSequence> out;
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
    if (!rec.contains("instance_id") || !rec["instance_id"].is_string() ||
        !rec.contains("ids") || !rec["ids"].is_array()) {
      problems.push_back("line " + std::to_string(line_no) +
                         ": expected {instance_id, ids:[...]}");
      continue;
    }
    IdSequence seq;
    seq.instance_id = rec["instance_id"].get<std::string>();
    bool ok = true;
    for (const auto& v : rec["ids"]) {
      if (!v.is_number_integer() || v.get<int64_t>() < 0) {
        problems.push_back("line " + std::to_string(line_no) + ": ids must be non-negative");
        ok = false;
        break;
      }
      seq.ids.push_back(v.get<int64_t>());
    }
    if (ok) out.push_back(std::move(seq));
  }
  if (!problems.empty()) throw Error("pre-tokenized load failed for " + path, problems);
  return out;
}

std::string dump_pretokenized(const std::vector<IdSequence>& sequences) {
  std::string out;
  for (const auto& seq : sequences) {
    nlohmann::ordered_json rec;
    rec["instance_id"] = seq.instance_id;
    rec["ids"] = seq.ids;
    out += rec.dump();
    out += '\n';
  }
  return out;
}

std::set<int64_t> unique_ids(const std::vector<IdSequence>& sequences,
                             const std::set<int64_t>& excluded_specials) {
  std::set<int64_t> out;
  for (const auto& seq : sequences) {
    out.insert(seq.ids.begin(), seq.ids.end());
  }
  for (int64_t s : excluded_specials) out.erase(s);
  return out;
}

}  // namespace mtdiag
