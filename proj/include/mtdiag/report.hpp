#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "mtdiag/corpus.hpp"
#include "mtdiag/metrics.hpp"
#include "mtdiag/noise.hpp"
#include "mtdiag/stats.hpp"

namespace mtdiag {

enum class CorpusSide { src, tgt };

struct CorpusConfig {
  LanguagePair lp;
  std::string path;
  CorpusFormat format = CorpusFormat::jsonl;
};

struct ModelConfig {
  std::string name;
  std::optional<std::string> vocab_path;
  std::optional<std::string> merges_path;
  bool byte_level = true;
  std::optional<int64_t> vocab_size_override;
  std::set<int64_t> specials;
  bool exclude_specials = false;
  std::string reasoning_open = "<think>";
  std::string reasoning_close = "</think>";
  std::map<std::string, std::string> pretokenized;  // language code -> id file
};

/// Designates the corpus side a language's TAR sample comes from; every
/// language can appear in several pairs, so the choice is explicit
/// configuration, never inferred.
struct LanguageSideConfig {
  std::string code;
  std::string corpus_lp;
  CorpusSide side = CorpusSide::src;
};

struct NoiseOutputConfig {
  std::string model;
  std::string prompt;  // p0 | p1 | p2
  LanguagePair lp;
  std::string path;  // JSONL {instance_id, text}
};

struct NoiseRunConfig {
  std::optional<std::string> patterns_path;
  double threshold = 0.60;
  bool per_line = false;
  std::string identifier_mode = "trigram";          // "trigram" | "external"
  std::map<std::string, std::string> profiles;      // language -> profile csv
  std::optional<std::string> external_predictions;  // JSONL path
  std::vector<NoiseOutputConfig> outputs;
};

struct ReasoningOutputConfig {
  std::string model;
  std::string path;  // JSONL {instance_id, lp, model, raw}
};

/// Declarative run configuration; a single JSON file documented key by key
/// in the README. Paths are resolved relative to the config file.
struct RunConfig {
  std::string base_dir;
  uint64_t seed = 0;
  std::string out_dir = "out";
  double alpha = kDefaultAlpha;
  std::optional<size_t> sample_size;
  std::vector<CorpusConfig> corpora;
  std::vector<ModelConfig> models;
  std::vector<LanguageSideConfig> languages;
  std::optional<std::string> distances_path;
  std::map<std::string, std::string> score_paths;    // metric -> path
  std::map<std::string, std::string> model_pairing;  // reasoning -> instruct
  NoiseRunConfig noise;
  std::vector<ReasoningOutputConfig> reasoning_outputs;

  std::string resolve(const std::string& path) const;
  std::string out_path(const std::string& filename) const;
};

struct ConfigOverrides {
  std::optional<uint64_t> seed;
  std::optional<std::string> out_dir;
  std::optional<double> alpha;
};

struct Artifact {
  std::string name;
  std::string path;
};

/// A loaded config plus the hash of its effective JSON (after overrides);
/// warnings accumulate across the command and land in the manifest.
struct RunContext {
  RunConfig config;
  std::string config_hash;
  std::vector<std::string> warnings;
};

RunContext load_run_config(const std::string& config_path, const ConfigOverrides& overrides = {});
/// Context for config-less commands; the effective JSON covers the few knobs.
RunContext make_adhoc_context(const std::map<std::string, std::string>& keys,
                              const ConfigOverrides& overrides = {});

uint64_t fnv1a64(const std::string& data);
std::string hex64(uint64_t value);

// command bodies; each writes its artifacts under out_dir and merges them
// into out_dir/manifest.json
std::vector<Artifact> cmd_tar(RunContext& ctx);
std::vector<Artifact> cmd_noise(RunContext& ctx);
std::vector<Artifact> cmd_correlate(RunContext& ctx, Metric metric);
std::vector<Artifact> cmd_loo(RunContext& ctx, const std::string& data_csv_path);
std::vector<Artifact> cmd_reasoning(RunContext& ctx);
double cmd_metrics(const std::string& hyp_path, const std::string& ref_path, Metric metric,
                   BleuConfig::Smoothing smoothing = BleuConfig::Smoothing::none);
std::vector<Artifact> cmd_manifest(RunContext& ctx);

/// Reads {instance_id, text} JSONL for the noise command.
std::vector<Output> load_noise_outputs(const std::string& path);

}  // namespace mtdiag
