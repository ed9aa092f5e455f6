#include "mtdiag/report.hpp"

#include <algorithm>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "mtdiag/csv.hpp"
#include "mtdiag/error.hpp"
#include "mtdiag/reasoning.hpp"
#include "mtdiag/tar.hpp"
#include "mtdiag/tokenize.hpp"
#include "mtdiag/typology.hpp"
#include "mtdiag/version.hpp"

namespace fs = std::filesystem;

namespace mtdiag {

uint64_t fnv1a64(const std::string& data) {
  uint64_t hash = 1469598103934665603ull;
  for (unsigned char c : data) {
    hash ^= c;
    hash *= 1099511628211ull;
  }
  return hash;
}

std::string hex64(uint64_t value) {
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<size_t>(i)] = digits[value & 0xF];
    value >>= 4;
  }
  return out;
}

std::string RunConfig::resolve(const std::string& path) const {
  fs::path p(path);
  if (p.is_absolute() || base_dir.empty()) return path;
  return (fs::path(base_dir) / p).string();
}

std::string RunConfig::out_path(const std::string& filename) const {
  return (fs::path(resolve(out_dir)) / filename).string();
}

namespace {

RunConfig parse_config_json(const nlohmann::json& doc, const std::string& base_dir) {
  RunConfig cfg;
  cfg.base_dir = base_dir;
  if (doc.contains("seed")) cfg.seed = doc["seed"].get<uint64_t>();
  if (doc.contains("out_dir")) cfg.out_dir = doc["out_dir"].get<std::string>();
  if (doc.contains("alpha")) cfg.alpha = doc["alpha"].get<double>();
  if (doc.contains("sample_size") && !doc["sample_size"].is_null()) {
    cfg.sample_size = doc["sample_size"].get<size_t>();
  }
  if (doc.contains("corpora")) {
    for (const auto& c : doc["corpora"]) {
      CorpusConfig cc;
      cc.lp = LanguagePair::parse(c.at("lp").get<std::string>());
      cc.path = c.at("path").get<std::string>();
      std::string format = c.value("format", "jsonl");
      if (format == "jsonl") cc.format = CorpusFormat::jsonl;
      else if (format == "tsv") cc.format = CorpusFormat::tsv;
      else throw Error("corpus format must be jsonl or tsv, got " + format);
      cfg.corpora.push_back(std::move(cc));
    }
  }
  if (doc.contains("models")) {
    for (const auto& m : doc["models"]) {
      ModelConfig mc;
      mc.name = m.at("name").get<std::string>();
      if (m.contains("vocab") && !m["vocab"].is_null()) mc.vocab_path = m["vocab"].get<std::string>();
      if (m.contains("merges") && !m["merges"].is_null()) mc.merges_path = m["merges"].get<std::string>();
      mc.byte_level = m.value("byte_level", true);
      if (m.contains("vocab_size") && !m["vocab_size"].is_null()) {
        mc.vocab_size_override = m["vocab_size"].get<int64_t>();
      }
      if (m.contains("specials")) {
        for (const auto& s : m["specials"]) mc.specials.insert(s.get<int64_t>());
      }
      mc.exclude_specials = m.value("exclude_specials", false);
      mc.reasoning_open = m.value("reasoning_open", std::string("<think>"));
      mc.reasoning_close = m.value("reasoning_close", std::string("</think>"));
      if (m.contains("pretokenized")) {
        for (auto it = m["pretokenized"].begin(); it != m["pretokenized"].end(); ++it) {
          mc.pretokenized[it.key()] = it.value().get<std::string>();
        }
      }
      cfg.models.push_back(std::move(mc));
    }
  }
  if (doc.contains("languages")) {
    for (const auto& l : doc["languages"]) {
      LanguageSideConfig lc;
      lc.code = l.at("code").get<std::string>();
      lc.corpus_lp = l.at("corpus").get<std::string>();
      std::string side = l.value("side", "src");
      if (side == "src") lc.side = CorpusSide::src;
      else if (side == "tgt") lc.side = CorpusSide::tgt;
      else throw Error("language side must be src or tgt, got " + side);
      cfg.languages.push_back(std::move(lc));
    }
  }
  if (doc.contains("distances") && !doc["distances"].is_null()) {
    cfg.distances_path = doc["distances"].get<std::string>();
  }
  if (doc.contains("scores")) {
    for (auto it = doc["scores"].begin(); it != doc["scores"].end(); ++it) {
      parse_metric(it.key());  // validates the key
      cfg.score_paths[it.key()] = it.value().get<std::string>();
    }
  }
  if (doc.contains("model_pairing")) {
    for (auto it = doc["model_pairing"].begin(); it != doc["model_pairing"].end(); ++it) {
      cfg.model_pairing[it.key()] = it.value().get<std::string>();
    }
  }
  if (doc.contains("noise")) {
    const auto& n = doc["noise"];
    if (n.contains("patterns") && !n["patterns"].is_null()) {
      cfg.noise.patterns_path = n["patterns"].get<std::string>();
    }
    cfg.noise.threshold = n.value("threshold", 0.60);
    cfg.noise.per_line = n.value("per_line", false);
    if (n.contains("identifier")) {
      const auto& ident = n["identifier"];
      cfg.noise.identifier_mode = ident.value("mode", "trigram");
      if (ident.contains("profiles")) {
        for (auto it = ident["profiles"].begin(); it != ident["profiles"].end(); ++it) {
          cfg.noise.profiles[it.key()] = it.value().get<std::string>();
        }
      }
      if (ident.contains("path")) cfg.noise.external_predictions = ident["path"].get<std::string>();
    }
    if (n.contains("outputs")) {
      for (const auto& o : n["outputs"]) {
        NoiseOutputConfig oc;
        oc.model = o.at("model").get<std::string>();
        oc.prompt = o.at("prompt").get<std::string>();
        parse_prompt_template(oc.prompt);  // p0 | p1 | p2
        oc.lp = LanguagePair::parse(o.at("lp").get<std::string>());
        oc.path = o.at("path").get<std::string>();
        cfg.noise.outputs.push_back(std::move(oc));
      }
    }
  }
  if (doc.contains("reasoning_outputs")) {
    for (const auto& r : doc["reasoning_outputs"]) {
      ReasoningOutputConfig rc;
      rc.model = r.at("model").get<std::string>();
      rc.path = r.at("path").get<std::string>();
      cfg.reasoning_outputs.push_back(std::move(rc));
    }
  }

  std::set<std::string> seen;
  for (const auto& c : cfg.corpora) {
    if (!seen.insert("corpus:" + c.lp.str()).second) {
      throw Error("duplicate corpus declaration for " + c.lp.str());
    }
  }
  for (const auto& m : cfg.models) {
    if (!seen.insert("model:" + m.name).second) {
      throw Error("duplicate model declaration for " + m.name);
    }
  }
  for (const auto& l : cfg.languages) {
    if (!seen.insert("language:" + l.code).second) {
      throw Error("duplicate side designation for language " + l.code);
    }
  }
  return cfg;
}

void apply_overrides(nlohmann::json& doc, const ConfigOverrides& overrides) {
  if (overrides.seed) doc["seed"] = *overrides.seed;
  if (overrides.out_dir) doc["out_dir"] = *overrides.out_dir;
  if (overrides.alpha) doc["alpha"] = *overrides.alpha;
}

}  // namespace

RunContext load_run_config(const std::string& config_path, const ConfigOverrides& overrides) {
  std::ifstream in(config_path);
  if (!in) throw Error("missing config file: " + config_path);
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw Error("config " + config_path + " is not valid json: " + e.what());
  }
  apply_overrides(doc, overrides);
  RunContext ctx;
  // nlohmann objects iterate in key order, so dump() is canonical
  ctx.config_hash = hex64(fnv1a64(doc.dump()));
  ctx.config = parse_config_json(doc, fs::path(config_path).parent_path().string());
  return ctx;
}

RunContext make_adhoc_context(const std::map<std::string, std::string>& keys,
                              const ConfigOverrides& overrides) {
  nlohmann::json doc = nlohmann::json::object();
  for (const auto& [k, v] : keys) doc[k] = v;
  apply_overrides(doc, overrides);
  RunContext ctx;
  ctx.config_hash = hex64(fnv1a64(doc.dump()));
  ctx.config = parse_config_json(doc, ".");
  return ctx;
}

namespace {

std::string iso_timestamp() {
  std::time_t t;
  if (const char* env = std::getenv("SOURCE_DATE_EPOCH")) {
    t = static_cast<std::time_t>(std::strtoll(env, nullptr, 10));
  } else {
    t = std::time(nullptr);
  }
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void update_manifest(RunContext& ctx, const std::vector<Artifact>& new_artifacts) {
  const std::string manifest_path = ctx.config.out_path("manifest.json");
  const fs::path out_root = fs::path(manifest_path).parent_path();
  fs::create_directories(out_root);

  std::map<std::string, std::string> artifacts;  // path (relative to out_dir) -> name
  std::vector<std::string> warnings;
  if (fs::exists(manifest_path)) {
    try {
      nlohmann::json existing = nlohmann::json::parse(read_file(manifest_path));
      if (existing.value("config_hash", "") == ctx.config_hash) {
        for (const auto& a : existing["artifacts"]) {
          artifacts[a.at("path").get<std::string>()] = a.at("name").get<std::string>();
        }
        for (const auto& w : existing["warnings"]) warnings.push_back(w.get<std::string>());
      }
    } catch (const std::exception&) {
      // stale or foreign manifest; start fresh
    }
  }
  for (const auto& a : new_artifacts) {
    std::error_code ec;
    fs::path rel = fs::proximate(fs::path(a.path), out_root, ec);
    artifacts[ec || rel.empty() ? a.path : rel.string()] = a.name;
  }
  for (const auto& w : ctx.warnings) {
    if (std::find(warnings.begin(), warnings.end(), w) == warnings.end()) warnings.push_back(w);
  }

  nlohmann::ordered_json doc;
  doc["config_hash"] = ctx.config_hash;
  doc["version"] = MTDIAG_VERSION;
  doc["generated_at"] = iso_timestamp();
  doc["artifacts"] = nlohmann::ordered_json::array();
  for (const auto& [path, name] : artifacts) {
    doc["artifacts"].push_back({{"name", name}, {"path", path}});
  }
  doc["warnings"] = warnings;
  write_file(manifest_path, doc.dump(2) + "\n");
}

std::string provenance_line(const RunContext& ctx) {
  return std::string("mtdiag ") + MTDIAG_VERSION + " config=" + ctx.config_hash;
}

std::string stats_provenance_line(const RunContext& ctx) {
  return "alpha=" + format_fixed(ctx.config.alpha, 4) +
         " p_values=t_approx(r,rho);normal_approx(tau) tau_variant=b";
}

std::string significance_marker(bool significant) { return significant ? "*" : ""; }

// shared corpus/vocab/TAR plumbing ------------------------------------------

struct PipelineCache {
  std::map<std::string, Corpus> corpora;                 // key: lp string
  std::map<std::string, VocabModel> vocabs;              // key: model name
  std::map<std::pair<std::string, std::string>, TarRecord> tar_records;  // (model, lang)
};

const Corpus& corpus_for_lp(RunContext& ctx, PipelineCache& cache, const std::string& lp) {
  auto it = cache.corpora.find(lp);
  if (it != cache.corpora.end()) return it->second;
  for (const auto& cc : ctx.config.corpora) {
    if (cc.lp.str() == lp) {
      Corpus corpus = load_corpus(ctx.config.resolve(cc.path), cc.format, cc.lp);
      if (ctx.config.sample_size && *ctx.config.sample_size < corpus.size()) {
        corpus = sample(corpus, *ctx.config.sample_size, ctx.config.seed);
      }
      return cache.corpora.emplace(lp, std::move(corpus)).first->second;
    }
  }
  throw Error("no corpus declared for language pair " + lp);
}

std::vector<std::string> texts_for_language(RunContext& ctx, PipelineCache& cache,
                                            const std::string& code) {
  const LanguageSideConfig* side = nullptr;
  for (const auto& l : ctx.config.languages) {
    if (l.code == code) {
      side = &l;
      break;
    }
  }
  if (side == nullptr) {
    throw Error("no corpus-side designation for language '" + code + "'");
  }
  const Corpus& corpus = corpus_for_lp(ctx, cache, side->corpus_lp);
  std::vector<std::string> texts;
  texts.reserve(corpus.size());
  for (const auto& inst : corpus.instances) {
    if (side->side == CorpusSide::src) {
      texts.push_back(inst.src_text);
    } else {
      if (!inst.ref_text) {
        throw Error("instance " + inst.id + " in " + side->corpus_lp +
                    " has no target-side text for language " + code);
      }
      texts.push_back(*inst.ref_text);
    }
  }
  return texts;
}

const VocabModel& vocab_for_model(RunContext& ctx, PipelineCache& cache, const ModelConfig& mc) {
  auto it = cache.vocabs.find(mc.name);
  if (it != cache.vocabs.end()) return it->second;
  if (!mc.vocab_path) throw Error("model " + mc.name + " has no vocab file configured");
  VocabModel model = load_vocab(ctx.config.resolve(*mc.vocab_path),
                                mc.merges_path ? std::optional<std::string>(
                                                     ctx.config.resolve(*mc.merges_path))
                                               : std::nullopt,
                                mc.byte_level, mc.name);
  if (mc.vocab_size_override) model.vocab_size = *mc.vocab_size_override;
  model.specials = mc.specials;
  return cache.vocabs.emplace(mc.name, std::move(model)).first->second;
}

/// TAR for one (model, language); pretokenized files win over the built-in
/// encoder. Returns nullptr when the model has no input path for the
/// language (pretokenized-only models may leave cells absent).
const TarRecord* tar_record_for(RunContext& ctx, PipelineCache& cache, const ModelConfig& mc,
                                const std::string& code) {
  auto key = std::make_pair(mc.name, code);
  auto it = cache.tar_records.find(key);
  if (it != cache.tar_records.end()) return &it->second;

  auto pre = mc.pretokenized.find(code);
  if (pre != mc.pretokenized.end()) {
    int64_t vocab_size = 0;
    if (mc.vocab_size_override) {
      vocab_size = *mc.vocab_size_override;
    } else if (mc.vocab_path) {
      vocab_size = vocab_for_model(ctx, cache, mc).vocab_size;
    } else {
      throw Error("model " + mc.name + " uses pretokenized input but declares no vocab_size");
    }
    auto seqs = load_pretokenized(ctx.config.resolve(pre->second));
    TarRecord rec = tar_from_sequences(mc.name, vocab_size, seqs, code, mc.specials,
                                       mc.exclude_specials);
    return &cache.tar_records.emplace(key, std::move(rec)).first->second;
  }

  if (!mc.vocab_path) {
    if (mc.pretokenized.empty()) {
      throw Error("model " + mc.name + " has neither a vocab nor pretokenized inputs");
    }
    return nullptr;  // pretokenized-only model without data for this language
  }
  const VocabModel& model = vocab_for_model(ctx, cache, mc);
  auto texts = texts_for_language(ctx, cache, code);
  TarRecord rec = tar_for_language(model, texts, code, mc.exclude_specials);
  return &cache.tar_records.emplace(key, std::move(rec)).first->second;
}

}  // namespace

std::vector<Artifact> cmd_tar(RunContext& ctx) {
  if (ctx.config.models.empty()) throw Error("tar: no models configured");
  if (ctx.config.languages.empty()) throw Error("tar: no language-side designations configured");
  PipelineCache cache;

  std::vector<TarRecord> records;
  std::vector<std::string> languages;
  std::vector<std::string> model_names;
  for (const auto& l : ctx.config.languages) languages.push_back(l.code);
  for (const auto& m : ctx.config.models) model_names.push_back(m.name);

  for (const auto& mc : ctx.config.models) {
    for (const auto& l : ctx.config.languages) {
      const TarRecord* rec = tar_record_for(ctx, cache, mc, l.code);
      if (rec == nullptr) {
        ctx.warnings.push_back("no activation data for (" + l.code + ", " + mc.name +
                               "); cell left absent");
        continue;
      }
      records.push_back(*rec);
    }
  }

  fs::create_directories(ctx.config.resolve(ctx.config.out_dir));

  CsvWriter rec_csv;
  rec_csv.comment(provenance_line(ctx));
  rec_csv.header({"language", "model", "unique_count", "vocab_size", "tar", "tar_percent"});
  for (const auto& r : records) {
    rec_csv.row({r.language, r.model_name, std::to_string(r.unique_count),
                 std::to_string(r.vocab_size), format_fixed(r.ratio(), 4), r.percent(2)});
  }
  const std::string records_path = ctx.config.out_path("tar_records.csv");
  rec_csv.write(records_path);

  TarMatrix matrix = build_tar_matrix(records, languages, model_names);
  const std::string matrix_path = ctx.config.out_path("tar_matrix.csv");
  write_file(matrix_path, tar_matrix_csv(matrix, {provenance_line(ctx)}));

  std::vector<Artifact> artifacts{{"tar_records", records_path}, {"tar_matrix", matrix_path}};
  update_manifest(ctx, artifacts);
  return artifacts;
}

std::vector<Artifact> cmd_noise(RunContext& ctx) {
  const auto& nc = ctx.config.noise;
  if (nc.outputs.empty()) throw Error("noise: no output files configured");

  NoisePatternSet patterns = nc.patterns_path
                                 ? NoisePatternSet::load(ctx.config.resolve(*nc.patterns_path))
                                 : NoisePatternSet::default_set();

  std::unique_ptr<LanguageIdentifier> identifier;
  if (nc.identifier_mode == "trigram") {
    if (nc.profiles.empty()) throw Error("noise: trigram identifier needs profile files");
    std::vector<TrigramProfile> profiles;
    for (const auto& [lang, path] : nc.profiles) {
      profiles.push_back(TrigramProfile::load(ctx.config.resolve(path), lang));
    }
    identifier = std::make_unique<TrigramIdentifier>(std::move(profiles));
  } else if (nc.identifier_mode == "external") {
    if (!nc.external_predictions) throw Error("noise: external identifier needs a predictions path");
    identifier = std::make_unique<ExternalPredictions>(
        ExternalPredictions::load(ctx.config.resolve(*nc.external_predictions)));
  } else {
    throw Error("noise: identifier mode must be trigram or external");
  }

  NoiseOptions options;
  options.threshold = nc.threshold;
  options.per_line = nc.per_line;

  // aggregate counts per (model, prompt) across language pairs
  std::map<std::pair<std::string, std::string>, NoiseReport> cells;
  std::vector<std::string> model_order;
  std::set<std::string> prompt_set;
  for (const auto& oc : nc.outputs) {
    if (std::find(model_order.begin(), model_order.end(), oc.model) == model_order.end()) {
      model_order.push_back(oc.model);
    }
    prompt_set.insert(oc.prompt);
    auto outputs = load_noise_outputs(ctx.config.resolve(oc.path));
    NoiseReport report = clean_rate(outputs, oc.lp.tgt, patterns, *identifier, options);
    auto& cell = cells[{oc.model, oc.prompt}];
    cell.total += report.total;
    cell.explanatory += report.explanatory;
    cell.wrong_lang += report.wrong_lang;
    cell.union_count += report.union_count;
  }

  std::vector<std::string> prompts(prompt_set.begin(), prompt_set.end());

  CsvWriter w;
  w.comment(provenance_line(ctx));
  std::vector<std::string> header{"model"};
  for (const char* rate : {"clean", "expl", "wrongl"}) {
    for (const auto& p : prompts) header.push_back(std::string(rate) + "_" + p);
  }
  w.header(std::move(header));
  for (const auto& model : model_order) {
    std::vector<std::string> row{model};
    auto cell_str = [&cells, &model](const std::string& prompt, auto getter) -> std::string {
      auto it = cells.find({model, prompt});
      if (it == cells.end()) return "/";
      return format_percent(getter(it->second), 2);
    };
    for (const auto& p : prompts) {
      row.push_back(cell_str(p, [](const NoiseReport& r) { return r.clean_rate(); }));
    }
    for (const auto& p : prompts) {
      row.push_back(cell_str(p, [](const NoiseReport& r) { return r.explanatory_rate(); }));
    }
    for (const auto& p : prompts) {
      row.push_back(cell_str(p, [](const NoiseReport& r) { return r.wrong_language_rate(); }));
    }
    w.row(std::move(row));
  }

  fs::create_directories(ctx.config.resolve(ctx.config.out_dir));
  const std::string path = ctx.config.out_path("noise_report.csv");
  w.write(path);
  std::vector<Artifact> artifacts{{"noise_report", path}};
  update_manifest(ctx, artifacts);
  return artifacts;
}

std::vector<Artifact> cmd_correlate(RunContext& ctx, Metric metric) {
  auto score_it = ctx.config.score_paths.find(metric_name(metric));
  if (score_it == ctx.config.score_paths.end()) {
    throw Error("correlate: no score file configured for metric " + metric_name(metric));
  }
  if (!ctx.config.distances_path) throw Error("correlate: no distances file configured");

  ScoreTable scores = load_scores(ctx.config.resolve(score_it->second), metric, &ctx.warnings);
  DistanceTable distances = load_distances(ctx.config.resolve(*ctx.config.distances_path));
  PipelineCache cache;

  std::set<std::string> config_model_names;
  for (const auto& mc : ctx.config.models) config_model_names.insert(mc.name);
  for (const auto& scored : scores.models()) {
    if (!config_model_names.count(scored)) {
      ctx.warnings.push_back("scored model '" + scored + "' is not configured; row skipped");
    }
  }

  CsvWriter w;
  w.comment(provenance_line(ctx));
  w.comment(stats_provenance_line(ctx));
  std::vector<std::string> header{"model"};
  for (const char* f : kFeatureColumns) {
    header.push_back(f);
    header.push_back(std::string(f) + "_sig");
  }
  w.header(std::move(header));

  CsvWriter features_csv;
  features_csv.comment(provenance_line(ctx));
  std::vector<std::string> features_header{"model", "lp"};
  for (const char* f : kFeatureColumns) features_header.push_back(f);
  features_csv.header(std::move(features_header));

  for (const auto& mc : ctx.config.models) {
    auto lps = scores.pairs_for(mc.name);
    if (lps.empty()) {
      ctx.warnings.push_back("model '" + mc.name + "' has no scores for " + metric_name(metric) +
                             "; row skipped");
      continue;
    }
    std::vector<PairFeatures> features;
    for (const auto& lp : lps) {
      LanguagePair pair = LanguagePair::parse(lp);
      const TarRecord* src_rec = tar_record_for(ctx, cache, mc, pair.src);
      const TarRecord* tgt_rec = tar_record_for(ctx, cache, mc, pair.tgt);
      if (src_rec == nullptr || tgt_rec == nullptr) {
        throw Error("model " + mc.name + " lacks activation data for pair " + lp);
      }
      features.push_back(pair_features(pair, distances, *src_rec, *tgt_rec));
      std::vector<std::string> frow{mc.name, lp};
      for (double value : features.back().feature_values()) {
        frow.push_back(format_fixed(value, 4));
      }
      features_csv.row(std::move(frow));
    }
    auto row_results = correlate_features(features, scores, mc.name, ctx.config.alpha);
    std::vector<std::string> row{mc.name};
    for (const auto& fc : row_results) {
      if (fc.result) {
        row.push_back(format_fixed(fc.result->r, 4));
        row.push_back(significance_marker(fc.result->significant_r));
      } else {
        ctx.warnings.push_back("model '" + mc.name + "' feature '" + fc.feature +
                               "': " + fc.error);
        row.push_back("NA");
        row.push_back("");
      }
    }
    w.row(std::move(row));
  }

  fs::create_directories(ctx.config.resolve(ctx.config.out_dir));
  const std::string path = ctx.config.out_path("correlation_" + metric_name(metric) + ".csv");
  const std::string features_path =
      ctx.config.out_path("pair_features_" + metric_name(metric) + ".csv");
  w.write(path);
  features_csv.write(features_path);
  std::vector<Artifact> artifacts{{"correlation_" + metric_name(metric), path},
                                  {"pair_features_" + metric_name(metric), features_path}};
  update_manifest(ctx, artifacts);
  return artifacts;
}

std::vector<Artifact> cmd_loo(RunContext& ctx, const std::string& data_csv_path) {
  auto table = read_csv(data_csv_path);
  if (table.header != std::vector<std::string>{"label", "actual", "tar"}) {
    throw Error("loo data " + data_csv_path + " must have header label,actual,tar");
  }
  PairedSample sample;
  for (const auto& row : table.rows) {
    if (row.size() != 3) throw Error("loo data row needs 3 cells");
    auto actual = parse_double(row[1]);
    auto tar = parse_double(row[2]);
    if (!actual || !tar) throw Error("loo data has unparseable numbers in row for " + row[0]);
    sample.labels.push_back(row[0]);
    sample.x.push_back(*actual);
    sample.y.push_back(*tar);
  }
  LooResult result = leave_one_out(sample, ctx.config.alpha);

  CsvWriter w;
  w.comment(provenance_line(ctx));
  w.comment(stats_provenance_line(ctx));
  w.header({"left_out", "n", "r", "p_r", "r_sig", "rho", "p_rho", "rho_sig", "tau", "p_tau",
            "tau_sig"});
  for (const auto& [label, c] : result.rows) {
    w.row({label, std::to_string(c.n), format_fixed(c.r, 4), format_fixed(c.p_r, 6),
           significance_marker(c.significant_r), format_fixed(c.rho, 4), format_fixed(c.p_rho, 6),
           significance_marker(c.significant_rho), format_fixed(c.tau, 4),
           format_fixed(c.p_tau, 6), significance_marker(c.significant_tau)});
  }

  fs::create_directories(ctx.config.resolve(ctx.config.out_dir));
  const std::string path = ctx.config.out_path("loo.csv");
  w.write(path);
  std::vector<Artifact> artifacts{{"loo", path}};
  update_manifest(ctx, artifacts);
  return artifacts;
}

std::vector<Artifact> cmd_reasoning(RunContext& ctx) {
  if (ctx.config.model_pairing.empty()) throw Error("reasoning: no model pairing configured");
  PipelineCache cache;

  std::optional<ScoreTable> comet_scores, bleu_scores;
  if (auto it = ctx.config.score_paths.find("comet"); it != ctx.config.score_paths.end()) {
    comet_scores = load_scores(ctx.config.resolve(it->second), Metric::comet, &ctx.warnings);
  }
  if (auto it = ctx.config.score_paths.find("bleu"); it != ctx.config.score_paths.end()) {
    bleu_scores = load_scores(ctx.config.resolve(it->second), Metric::bleu, &ctx.warnings);
  }

  CsvWriter pairs_csv;
  pairs_csv.comment(provenance_line(ctx));
  pairs_csv.header({"reasoning_model", "instruct_model", "lp", "src_tar", "tgt_tar",
                    "mean_reasoning_tokens", "n_instances", "delta_comet", "delta_bleu"});

  CsvWriter corr_csv;
  corr_csv.comment(provenance_line(ctx));
  corr_csv.comment(stats_provenance_line(ctx));
  corr_csv.comment(
      "reference full-scale values: tokens_vs_tgt_tar r=-0.2572 rho=-0.3177 tau=-0.2306; "
      "tokens_vs_delta_comet ols_r_squared=0.628");
  corr_csv.header({"reasoning_model", "instruct_model", "x", "y", "n", "r", "p_r", "r_sig", "rho",
                   "p_rho", "rho_sig", "tau", "p_tau", "tau_sig", "ols_slope", "ols_intercept",
                   "ols_r_squared", "error"});

  for (const auto& [reasoning_model, instruct_model] : ctx.config.model_pairing) {
    const ModelConfig* mc = nullptr;
    for (const auto& m : ctx.config.models) {
      if (m.name == reasoning_model) {
        mc = &m;
        break;
      }
    }
    if (mc == nullptr) throw Error("reasoning model '" + reasoning_model + "' is not configured");
    const VocabModel& vocab = vocab_for_model(ctx, cache, *mc);

    // group this model's raw outputs by language pair
    std::map<std::string, std::vector<int64_t>> counts_by_lp;
    bool any_outputs = false;
    for (const auto& rc : ctx.config.reasoning_outputs) {
      if (rc.model != reasoning_model) continue;
      any_outputs = true;
      for (const auto& raw : load_raw_outputs(ctx.config.resolve(rc.path))) {
        if (raw.model != reasoning_model) {
          ctx.warnings.push_back("raw output " + raw.instance_id + " labeled model '" + raw.model +
                                 "' inside a file declared for '" + reasoning_model + "'");
          continue;
        }
        ReasoningSplit split = split_reasoning(raw.raw, mc->reasoning_open, mc->reasoning_close);
        if (split.unterminated) {
          ctx.warnings.push_back("unterminated reasoning block in instance " + raw.instance_id +
                                 " (" + raw.lp + ", " + reasoning_model + ")");
        }
        counts_by_lp[raw.lp].push_back(count_reasoning_tokens(vocab, split));
      }
    }
    if (!any_outputs) {
      throw Error("reasoning: no raw output files configured for model " + reasoning_model);
    }

    // one score table carries both models' rows; the pairing selects them
    std::map<std::string, double> comet_delta, bleu_delta;
    std::map<std::string, std::string> single_pairing{{reasoning_model, instruct_model}};
    if (comet_scores) {
      for (const auto& d : delta_scores(*comet_scores, *comet_scores, single_pairing,
                                        &ctx.warnings)) {
        comet_delta[d.pair.str()] = *d.delta_comet;
      }
    }
    if (bleu_scores) {
      for (const auto& d : delta_scores(*bleu_scores, *bleu_scores, single_pairing,
                                        &ctx.warnings)) {
        bleu_delta[d.pair.str()] = *d.delta_bleu;
      }
    }

    std::vector<double> tokens, tgt_tars, delta_c_x, delta_c_y, delta_b_x, delta_b_y;
    for (const auto& [lp, counts] : counts_by_lp) {
      LanguagePair pair = LanguagePair::parse(lp);
      ReasoningStats stats = aggregate_reasoning(pair, reasoning_model, counts);
      const TarRecord* src_rec = tar_record_for(ctx, cache, *mc, pair.src);
      const TarRecord* tgt_rec = tar_record_for(ctx, cache, *mc, pair.tgt);
      if (src_rec == nullptr || tgt_rec == nullptr) {
        throw Error("model " + reasoning_model + " lacks activation data for pair " + lp);
      }
      auto dc = comet_delta.find(lp);
      auto db = bleu_delta.find(lp);
      pairs_csv.row({reasoning_model, instruct_model, lp, format_fixed(src_rec->ratio(), 4),
                     format_fixed(tgt_rec->ratio(), 4), format_fixed(stats.mean, 2),
                     std::to_string(counts.size()),
                     dc != comet_delta.end() ? format_fixed(dc->second, 4) : "",
                     db != bleu_delta.end() ? format_fixed(db->second, 2) : ""});
      tokens.push_back(stats.mean);
      tgt_tars.push_back(tgt_rec->ratio());
      if (dc != comet_delta.end()) {
        delta_c_x.push_back(stats.mean);
        delta_c_y.push_back(dc->second);
      }
      if (db != bleu_delta.end()) {
        delta_b_x.push_back(stats.mean);
        delta_b_y.push_back(db->second);
      }
    }

    auto corr_row = [&](const std::string& y_name, const std::vector<double>& x,
                        const std::vector<double>& y) {
      std::vector<std::string> row{reasoning_model, instruct_model, "mean_reasoning_tokens",
                                   y_name, std::to_string(x.size())};
      try {
        PairedSample s;
        s.x = x;
        s.y = y;
        CorrelationResult c = correlate(s, ctx.config.alpha);
        OlsFit fit = ols_fit(x, y);
        row.insert(row.end(),
                   {format_fixed(c.r, 4), format_fixed(c.p_r, 6),
                    significance_marker(c.significant_r), format_fixed(c.rho, 4),
                    format_fixed(c.p_rho, 6), significance_marker(c.significant_rho),
                    format_fixed(c.tau, 4), format_fixed(c.p_tau, 6),
                    significance_marker(c.significant_tau), format_fixed(fit.slope, 6),
                    format_fixed(fit.intercept, 6), format_fixed(fit.r_squared, 4), ""});
      } catch (const Error& e) {
        ctx.warnings.push_back("correlation mean_reasoning_tokens vs " + y_name + " for " +
                               reasoning_model + ": " + e.what());
        row.insert(row.end(), {"", "", "", "", "", "", "", "", "", "", "", "", e.what()});
      }
      corr_csv.row(std::move(row));
    };
    corr_row("tgt_tar", tokens, tgt_tars);
    if (comet_scores) corr_row("delta_comet", delta_c_x, delta_c_y);
    if (bleu_scores) corr_row("delta_bleu", delta_b_x, delta_b_y);
  }

  fs::create_directories(ctx.config.resolve(ctx.config.out_dir));
  const std::string pairs_path = ctx.config.out_path("reasoning_pairs.csv");
  const std::string corr_path = ctx.config.out_path("reasoning_correlations.csv");
  pairs_csv.write(pairs_path);
  corr_csv.write(corr_path);
  std::vector<Artifact> artifacts{{"reasoning_pairs", pairs_path},
                                  {"reasoning_correlations", corr_path}};
  update_manifest(ctx, artifacts);
  return artifacts;
}

double cmd_metrics(const std::string& hyp_path, const std::string& ref_path, Metric metric,
                   BleuConfig::Smoothing smoothing) {
  auto read_lines = [](const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("missing file: " + path);
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      lines.push_back(line);
    }
    return lines;
  };
  auto hyps = read_lines(hyp_path);
  auto refs = read_lines(ref_path);
  if (metric == Metric::bleu) {
    BleuConfig cfg;
    cfg.smoothing = smoothing;
    return bleu(hyps, refs, cfg);
  }
  if (metric == Metric::chrf) return chrf(hyps, refs);
  throw Error("metrics command computes bleu or chrf");
}

std::vector<Artifact> cmd_manifest(RunContext& ctx) {
  update_manifest(ctx, {});
  return {{"manifest", ctx.config.out_path("manifest.json")}};
}

std::vector<Output> load_noise_outputs(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("missing outputs file: " + path);
  std::vector<Output> out;
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
    if (!rec.contains("instance_id") || !rec.contains("text")) {
      throw Error(path + " line " + std::to_string(line_no) + ": expected {instance_id, text}");
    }
    out.push_back({rec["instance_id"].get<std::string>(), rec["text"].get<std::string>()});
  }
  return out;
}

}  // namespace mtdiag
