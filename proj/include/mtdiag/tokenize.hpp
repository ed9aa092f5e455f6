#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

namespace mtdiag {

/// Tokenizer vocabulary plus encoding rules. Immutable after load; encode()
/// may be called concurrently.
struct VocabModel {
  std::string model_name;
  std::unordered_map<std::string, int64_t> vocab;  // token string -> id
  int64_t vocab_size = 0;                          // entry count unless overridden
  std::vector<std::pair<std::string, std::string>> merges;  // priority order
  bool byte_level = true;
  std::optional<int64_t> unk_id;
  std::set<int64_t> specials;  // ids excluded from activation counting on request

  const std::string* token_for(int64_t id) const;  // nullptr if unknown

  // built when the model is constructed through load_vocab / finalize()
  std::unordered_map<int64_t, std::string> id_to_token;
  void finalize();  // validates ids, builds the reverse map
};

struct IdSequence {
  std::string instance_id;
  std::vector<int64_t> ids;
};

/// Vocab file: JSON object token -> integer id. Merges file: one
/// "left right" pair per line in priority order (a leading "#version" line
/// is tolerated). Both merge sides and their concatenation must be vocab
/// entries.
VocabModel load_vocab(const std::string& vocab_path,
                      const std::optional<std::string>& merges_path = std::nullopt,
                      bool byte_level = true, const std::string& model_name = "");

/// Greedy BPE: the text becomes bytes (byte-level, via the printable-unicode
/// byte remapping) or unicode codepoints, then merge rules apply in priority
/// order until none matches; lowest rule index wins, leftmost occurrence on
/// equal rank. Pure function of (model, text).
IdSequence encode(const VocabModel& model, const std::string& text,
                  const std::string& instance_id = "");

/// Inverse of encode for byte-level models: reproduces the input bytes.
std::string decode(const VocabModel& model, const std::vector<int64_t>& ids);

/// Pre-tokenized escape hatch: JSONL lines {instance_id, ids:[...]}; ids must
/// be non-negative (range against a vocab_size is checked where a model is
/// known). dump_pretokenized is the byte-identical round-trip counterpart.
std::vector<IdSequence> load_pretokenized(const std::string& path);
std::string dump_pretokenized(const std::vector<IdSequence>& sequences);

/// Union of all ids across sequences, optionally dropping special ids.
std::set<int64_t> unique_ids(const std::vector<IdSequence>& sequences,
                             const std::set<int64_t>& excluded_specials = {});

/// GPT-2-style byte <-> printable unicode remapping used by byte-level BPE.
const std::array<uint32_t, 256>& byte_to_unicode();
std::string byte_symbol(uint8_t byte);  // UTF-8 string of the remapped codepoint

// small UTF-8 helpers shared by tokenization and the language identifier
std::vector<uint32_t> utf8_decode(const std::string& text);
std::string utf8_encode(uint32_t codepoint);

}  // namespace mtdiag
