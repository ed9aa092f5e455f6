#pragma once

// Builds a complete miniature run: corpora, toy vocab, distances, scores,
// raw reasoning outputs, noise outputs and the config wiring them together.
// Shared between the report tests and the acceptance suite.

#include <string>
#include <vector>

#include <json.hpp>

#include "helpers.hpp"

namespace testutil {

struct FullFixture {
  std::string config_path;
  std::string loo_data_path;      // training-mix csv (copied from tests/data)
  std::string out_dir;            // where commands write
  nlohmann::json config;          // the document behind config_path
};

inline std::string corpus_jsonl(const std::vector<std::pair<std::string, std::string>>& rows,
                                const std::string& id_prefix) {
  std::string out;
  int i = 0;
  for (const auto& [src, ref] : rows) {
    nlohmann::ordered_json rec;
    rec["id"] = id_prefix + std::to_string(i++);
    rec["src"] = src;
    rec["ref"] = ref;
    out += rec.dump() + "\n";
  }
  return out;
}

inline FullFixture build_full_fixture(const TempDir& tmp, const std::string& test_data_dir) {
  FullFixture fx;
  auto [vocab_path, merges_path] = write_toy_vocab_files(tmp);

  // each language draws on a differently sized alphabet so activation rates
  // differ per language (the correlation fixtures need variance)
  tmp.file("corpus_en_de.jsonl", corpus_jsonl({{"ab ba ab", "cde dec ce"},
                                               {"ba ab abab", "dce ced cd"},
                                               {"abab baab", "ecd ce de"},
                                               {"bbaa abba", "ced dec ee"},
                                               {"aabb ab", "cd ed dd"},
                                               {"ab ab ba", "de ce cde"}},
                                              "ed"));
  tmp.file("corpus_fr_it.jsonl", corpus_jsonl({{"fgh ghf hfg", "ijklm mlkji jkl"},
                                               {"hgf fgh ffg", "klmij lmijk lm"},
                                               {"ghh ffh ghf", "mijk jklm im"},
                                               {"fhg ghf hh", "kmli ijml ki"},
                                               {"ffgg hh fg", "lmkj mikl jm"},
                                               {"gh fg hf", "ijk lmk mij"}},
                                              "fi"));

  // six facet distances for every unordered pair of the four languages
  std::string distances =
      "lang1,lang2,genetic,geographic,syntactic,phonological,inventory,featural\n"
      "de,en,0.30,0.10,0.25,0.40,0.35,0.30\n"
      "en,fr,0.55,0.20,0.35,0.50,0.45,0.45\n"
      "en,it,0.60,0.30,0.40,0.45,0.50,0.50\n"
      "de,fr,0.50,0.15,0.30,0.55,0.40,0.40\n"
      "de,it,0.55,0.25,0.45,0.50,0.55,0.45\n"
      "fr,it,0.20,0.15,0.20,0.30,0.25,0.20\n";
  tmp.file("distances.csv", distances);

  // corpus-level scores for the instruct ("base") and reasoning ("think") models
  const std::vector<std::string> lps{"en-de", "de-en", "fr-it", "it-fr", "en-fr", "de-it"};
  std::string comet = "model,lp,score\n";
  std::string bleu = "model,lp,score\n";
  double base_score = 0.70;
  double delta = 0.010;
  for (const auto& lp : lps) {
    comet += "base," + lp + "," + std::to_string(base_score) + "\n";
    comet += "think," + lp + "," + std::to_string(base_score + delta) + "\n";
    bleu += "base," + lp + "," + std::to_string(base_score * 40.0) + "\n";
    bleu += "think," + lp + "," + std::to_string(base_score * 40.0 + delta * 60.0) + "\n";
    base_score += 0.025;
    delta += 0.004;
  }
  tmp.file("scores_comet.csv", comet);
  tmp.file("scores_bleu.csv", bleu);

  // raw reasoning outputs: think blocks of varying length per language pair
  std::string raw;
  int block = 1;
  for (const auto& lp : lps) {
    for (int i = 0; i < 3; ++i) {
      nlohmann::ordered_json rec;
      rec["instance_id"] = lp + "#" + std::to_string(i);
      rec["lp"] = lp;
      rec["model"] = "think";
      std::string thought(static_cast<size_t>(block + i), 'x');
      rec["raw"] = "<think>" + thought + "</think>answer " + std::to_string(i);
      raw += rec.dump() + "\n";
    }
    block += 2;
  }
  tmp.file("raw_think.jsonl", raw);

  // noise outputs for (base, p2, en-de): 10 outputs, 2 explanatory, 1 wrong-language
  std::string noise_outputs;
  std::string predictions;
  for (int i = 0; i < 10; ++i) {
    nlohmann::ordered_json rec;
    rec["instance_id"] = "n" + std::to_string(i);
    rec["text"] = i == 2 || i == 5 ? "explanation: noisy output " + std::to_string(i)
                                   : "saubere ausgabe " + std::to_string(i);
    noise_outputs += rec.dump() + "\n";
    nlohmann::ordered_json pred;
    pred["instance_id"] = "n" + std::to_string(i);
    pred["lang"] = i == 8 ? "en" : "de";
    pred["confidence"] = 0.95;
    predictions += pred.dump() + "\n";
  }
  tmp.file("noise_base_p2.jsonl", noise_outputs);

  // all-clean file for (base, p0, en-de)
  std::string clean_outputs;
  for (int i = 10; i < 14; ++i) {
    nlohmann::ordered_json rec;
    rec["instance_id"] = "n" + std::to_string(i);
    rec["text"] = "saubere ausgabe " + std::to_string(i);
    clean_outputs += rec.dump() + "\n";
    nlohmann::ordered_json pred;
    pred["instance_id"] = "n" + std::to_string(i);
    pred["lang"] = "de";
    pred["confidence"] = 0.95;
    predictions += pred.dump() + "\n";
  }
  tmp.file("noise_base_p0.jsonl", clean_outputs);
  tmp.file("predictions.jsonl", predictions);

  fx.loo_data_path = tmp.file("loo_data.csv", slurp(test_data_dir + "/bloomz7b1_training_mix.csv"));
  fx.out_dir = tmp.sub("out");

  nlohmann::json cfg;
  cfg["seed"] = 42;
  cfg["out_dir"] = "out";
  cfg["alpha"] = 0.05;
  cfg["corpora"] = {{{"lp", "en-de"}, {"path", "corpus_en_de.jsonl"}, {"format", "jsonl"}},
                    {{"lp", "fr-it"}, {"path", "corpus_fr_it.jsonl"}, {"format", "jsonl"}}};
  cfg["models"] = {
      {{"name", "base"}, {"vocab", "toy_vocab.json"}, {"merges", "toy_merges.txt"}},
      {{"name", "think"},
       {"vocab", "toy_vocab.json"},
       {"merges", "toy_merges.txt"},
       {"reasoning_open", "<think>"},
       {"reasoning_close", "</think>"}}};
  cfg["languages"] = {{{"code", "en"}, {"corpus", "en-de"}, {"side", "src"}},
                      {{"code", "de"}, {"corpus", "en-de"}, {"side", "tgt"}},
                      {{"code", "fr"}, {"corpus", "fr-it"}, {"side", "src"}},
                      {{"code", "it"}, {"corpus", "fr-it"}, {"side", "tgt"}}};
  cfg["distances"] = "distances.csv";
  cfg["scores"] = {{"comet", "scores_comet.csv"}, {"bleu", "scores_bleu.csv"}};
  cfg["model_pairing"] = {{"think", "base"}};
  cfg["noise"] = {{"threshold", 0.6},
                  {"identifier", {{"mode", "external"}, {"path", "predictions.jsonl"}}},
                  {"outputs",
                   {{{"model", "base"}, {"prompt", "p2"}, {"lp", "en-de"},
                     {"path", "noise_base_p2.jsonl"}},
                    {{"model", "base"}, {"prompt", "p0"}, {"lp", "en-de"},
                     {"path", "noise_base_p0.jsonl"}}}}};
  cfg["reasoning_outputs"] = {{{"model", "think"}, {"path", "raw_think.jsonl"}}};

  fx.config = cfg;
  fx.config_path = tmp.file("config.json", cfg.dump(2));
  return fx;
}

}  // namespace testutil
