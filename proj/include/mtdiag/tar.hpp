#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mtdiag/tokenize.hpp"

namespace mtdiag {

/// Activation statistics for one (language, model) cell. The exact counts
/// are primary; the ratio is their float projection and any percent
/// rounding is presentation only.
struct TarRecord {
  std::string language;
  std::string model_name;
  int64_t unique_count = 0;
  int64_t vocab_size = 0;

  double ratio() const { return static_cast<double>(unique_count) / static_cast<double>(vocab_size); }
  std::string percent(int decimals = 2) const;  // e.g. "1.63%"
};

struct TarMatrix {
  std::vector<std::string> languages;  // row order
  std::vector<std::string> models;     // column order
  std::vector<std::optional<double>> cells;  // row-major; absent stays absent, never zero

  const std::optional<double>& at(size_t lang_idx, size_t model_idx) const {
    return cells[lang_idx * models.size() + model_idx];
  }
};

/// Vocabulary fraction activated by a sample: unique_count / vocab_size.
double token_activation_rate(int64_t unique_count, int64_t vocab_size);

/// Encode every text with the model, pool unique ids, build the record.
TarRecord tar_for_language(const VocabModel& model, const std::vector<std::string>& texts,
                           const std::string& language, bool exclude_specials = false);

/// Same from pre-tokenized sequences; every id is range-checked against
/// vocab_size.
TarRecord tar_from_sequences(const std::string& model_name, int64_t vocab_size,
                             const std::vector<IdSequence>& sequences,
                             const std::string& language,
                             const std::set<int64_t>& specials = {},
                             bool exclude_specials = false);

/// Pair-level TAR: source rate plus target rate, same model on both sides.
double pair_tar(const TarRecord& src, const TarRecord& tgt);

/// Assemble the language x model grid in the given orders; at most one
/// record per cell, absent cells flagged explicitly.
TarMatrix build_tar_matrix(const std::vector<TarRecord>& records,
                           const std::vector<std::string>& languages,
                           const std::vector<std::string>& models);

/// Order derived from first appearance in the record list.
TarMatrix build_tar_matrix(const std::vector<TarRecord>& records);

/// Heatmap-ready CSV: languages as rows, models as columns, ratios at 4
/// decimals, absent cells empty.
std::string tar_matrix_csv(const TarMatrix& matrix,
                           const std::vector<std::string>& provenance = {});

}  // namespace mtdiag
