#include "mtdiag/tar.hpp"

#include <algorithm>
#include <map>

#include "mtdiag/csv.hpp"
#include "mtdiag/error.hpp"

namespace mtdiag {

std::string TarRecord::percent(int decimals) const {
  return format_percent(ratio(), decimals);
}

double token_activation_rate(int64_t unique_count, int64_t vocab_size) {
  if (vocab_size <= 0) throw Error("vocab_size must be positive");
  if (unique_count < 0 || unique_count > vocab_size) {
    throw Error("unique_count " + std::to_string(unique_count) + " out of range for vocab_size " +
                std::to_string(vocab_size));
  }
  return static_cast<double>(unique_count) / static_cast<double>(vocab_size);
}

TarRecord tar_for_language(const VocabModel& model, const std::vector<std::string>& texts,
                           const std::string& language, bool exclude_specials) {
  if (texts.empty()) throw Error("tar_for_language needs at least one text for " + language);
  std::vector<IdSequence> seqs;
  seqs.reserve(texts.size());
  for (const auto& text : texts) seqs.push_back(encode(model, text));
  return tar_from_sequences(model.model_name, model.vocab_size, seqs, language, model.specials,
                            exclude_specials);
}

TarRecord tar_from_sequences(const std::string& model_name, int64_t vocab_size,
                             const std::vector<IdSequence>& sequences,
                             const std::string& language, const std::set<int64_t>& specials,
                             bool exclude_specials) {
  if (vocab_size <= 0) throw Error("vocab_size must be positive for model " + model_name);
  for (const auto& seq : sequences) {
    for (int64_t id : seq.ids) {
      if (id >= vocab_size) {
        throw Error("instance " + seq.instance_id + " has id " + std::to_string(id) +
                    " >= vocab_size " + std::to_string(vocab_size) + " of model " + model_name);
      }
    }
  }
  auto ids = unique_ids(sequences, exclude_specials ? specials : std::set<int64_t>{});
  TarRecord rec;
  rec.language = language;
  rec.model_name = model_name;
  rec.unique_count = static_cast<int64_t>(ids.size());
  rec.vocab_size = vocab_size;
  return rec;
}

double pair_tar(const TarRecord& src, const TarRecord& tgt) {
  if (src.model_name != tgt.model_name) {
    throw Error("pair_tar across models: '" + src.model_name + "' vs '" + tgt.model_name + "'");
  }
  return src.ratio() + tgt.ratio();
}

TarMatrix build_tar_matrix(const std::vector<TarRecord>& records,
                           const std::vector<std::string>& languages,
                           const std::vector<std::string>& models) {
  TarMatrix m;
  m.languages = languages;
  m.models = models;
  m.cells.assign(languages.size() * models.size(), std::nullopt);
  auto index_of = [](const std::vector<std::string>& v, const std::string& s) {
    auto it = std::find(v.begin(), v.end(), s);
    return it == v.end() ? v.size() : static_cast<size_t>(it - v.begin());
  };
  for (const auto& rec : records) {
    size_t li = index_of(languages, rec.language);
    size_t mi = index_of(models, rec.model_name);
    if (li == languages.size() || mi == models.size()) {
      throw Error("record (" + rec.language + ", " + rec.model_name +
                  ") is outside the declared language/model lists");
    }
    auto& cell = m.cells[li * models.size() + mi];
    if (cell.has_value()) {
      throw Error("duplicate record for (" + rec.language + ", " + rec.model_name + ")");
    }
    cell = rec.ratio();
  }
  return m;
}

TarMatrix build_tar_matrix(const std::vector<TarRecord>& records) {
  std::vector<std::string> languages;
  std::vector<std::string> models;
  for (const auto& rec : records) {
    if (std::find(languages.begin(), languages.end(), rec.language) == languages.end()) {
      languages.push_back(rec.language);
    }
    if (std::find(models.begin(), models.end(), rec.model_name) == models.end()) {
      models.push_back(rec.model_name);
    }
  }
  return build_tar_matrix(records, languages, models);
}

std::string tar_matrix_csv(const TarMatrix& matrix, const std::vector<std::string>& provenance) {
  CsvWriter w;
  for (const auto& p : provenance) w.comment(p);
  std::vector<std::string> header{"language"};
  header.insert(header.end(), matrix.models.begin(), matrix.models.end());
  w.header(std::move(header));
  for (size_t li = 0; li < matrix.languages.size(); ++li) {
    std::vector<std::string> row{matrix.languages[li]};
    for (size_t mi = 0; mi < matrix.models.size(); ++mi) {
      const auto& cell = matrix.at(li, mi);
      row.push_back(cell ? format_fixed(*cell, 4) : "");
    }
    w.row(std::move(row));
  }
  return w.str();
}

}  // namespace mtdiag
