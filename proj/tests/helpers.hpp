#pragma once

#include <atomic>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "mtdiag/tokenize.hpp"

namespace testutil {

/// Unique scratch directory removed on destruction.
class TempDir {
 public:
  TempDir() {
    auto base = std::filesystem::temp_directory_path();
    static std::atomic<int> counter{0};
    path_ = base / ("mtdiag_test_" + std::to_string(::getpid()) + "_" +
                    std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  std::string dir() const { return path_.string(); }
  std::string file(const std::string& name, const std::string& content) const {
    auto p = path_ / name;
    std::filesystem::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary);
    out << content;
    return p.string();
  }
  std::string sub(const std::string& name) const { return (path_ / name).string(); }

 private:
  std::filesystem::path path_;
};

inline std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

/// In-memory character-level toy model {a:0, b:1, ab:2} with merge (a, b).
inline mtdiag::VocabModel abc_model() {
  mtdiag::VocabModel m;
  m.model_name = "abc-toy";
  m.byte_level = false;
  m.vocab = {{"a", 0}, {"b", 1}, {"ab", 2}};
  m.merges = {{"a", "b"}};
  m.finalize();
  return m;
}

/// Byte-level toy model: all 256 byte symbols plus a few merges over ascii
/// letters. Returned in memory; write_toy_vocab_files dumps the same model
/// as vocab.json + merges.txt.
inline mtdiag::VocabModel toy_byte_model() {
  mtdiag::VocabModel m;
  m.model_name = "toy-byte";
  m.byte_level = true;
  for (int b = 0; b < 256; ++b) {
    m.vocab[mtdiag::byte_symbol(static_cast<uint8_t>(b))] = b;
  }
  auto add_merge = [&m](const std::string& left, const std::string& right) {
    m.vocab[left + right] = static_cast<int64_t>(m.vocab.size());
    m.merges.emplace_back(left, right);
  };
  add_merge("a", "b");    // ab
  add_merge("ab", "ab");  // abab
  add_merge("c", "d");    // cd
  add_merge("e", "f");    // ef
  add_merge("t", "h");    // th
  add_merge("th", "e");   // the
  m.finalize();
  return m;
}

inline std::pair<std::string, std::string> write_toy_vocab_files(const TempDir& tmp,
                                                                 const std::string& prefix = "toy") {
  auto model = toy_byte_model();
  nlohmann::json vocab_doc = nlohmann::json::object();
  for (const auto& [token, id] : model.vocab) vocab_doc[token] = id;
  std::string merges;
  for (const auto& [left, right] : model.merges) merges += left + " " + right + "\n";
  return {tmp.file(prefix + "_vocab.json", vocab_doc.dump()),
          tmp.file(prefix + "_merges.txt", merges)};
}

inline std::string jsonl_corpus(const std::vector<std::array<std::string, 3>>& rows) {
  // rows of (id, src, ref)
  std::string out;
  for (const auto& [id, src, ref] : rows) {
    nlohmann::ordered_json rec;
    rec["id"] = id;
    rec["src"] = src;
    if (!ref.empty()) rec["ref"] = ref;
    out += rec.dump() + "\n";
  }
  return out;
}

inline std::vector<double> random_vector(std::mt19937_64& rng, size_t n, double lo = -5.0,
                                         double hi = 5.0) {
  std::uniform_real_distribution<double> dist(lo, hi);
  std::vector<double> out(n);
  for (auto& v : out) v = dist(rng);
  return out;
}

/// integers from a small range, so ties actually occur
inline std::vector<double> random_tied_vector(std::mt19937_64& rng, size_t n, int values = 6) {
  std::uniform_int_distribution<int> dist(0, values - 1);
  std::vector<double> out(n);
  for (auto& v : out) v = static_cast<double>(dist(rng));
  return out;
}

}  // namespace testutil
