#include <iostream>
#include <map>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "mtdiag/csv.hpp"
#include "mtdiag/error.hpp"
#include "mtdiag/report.hpp"
#include "mtdiag/version.hpp"

namespace {

struct GlobalArgs {
  std::string config_path;
  std::optional<uint64_t> seed;
  std::optional<std::string> out_dir;
  std::optional<double> alpha;

  mtdiag::ConfigOverrides overrides() const { return {seed, out_dir, alpha}; }
};

void add_common(CLI::App* cmd, GlobalArgs& args, bool config_required = true) {
  auto* config = cmd->add_option("--config", args.config_path, "run configuration (json)");
  if (config_required) config->required();
  cmd->add_option("--seed", args.seed, "override the configured sampling seed");
  cmd->add_option("--out", args.out_dir, "override the configured output directory");
  cmd->add_option("--alpha", args.alpha, "override the significance level");
}

void print_artifacts(const std::vector<mtdiag::Artifact>& artifacts) {
  for (const auto& a : artifacts) {
    std::cout << a.name << " -> " << a.path << "\n";
  }
}

// warnings are informational: they reach stderr and the manifest, never the
// exit code
void report_warnings(const mtdiag::RunContext& ctx) {
  for (const auto& w : ctx.warnings) mtdiag::log_warn(w);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"machine-translation diagnostics toolkit"};
  app.set_version_flag("--version", MTDIAG_VERSION);
  app.require_subcommand(1);

  GlobalArgs tar_args;
  auto* tar_cmd = app.add_subcommand("tar", "token activation rate matrix and records");
  add_common(tar_cmd, tar_args);

  GlobalArgs noise_args;
  auto* noise_cmd = app.add_subcommand("noise", "clean-translation-rate report");
  add_common(noise_cmd, noise_args);

  GlobalArgs corr_args;
  std::string corr_metric = "comet";
  auto* corr_cmd = app.add_subcommand("correlate", "feature/score correlation table");
  add_common(corr_cmd, corr_args);
  corr_cmd->add_option("--metric", corr_metric, "comet | bleu | chrf")->required();

  GlobalArgs loo_args;
  std::string loo_data;
  auto* loo_cmd = app.add_subcommand("loo", "leave-one-out correlation sweep");
  add_common(loo_cmd, loo_args, /*config_required=*/false);
  loo_cmd->add_option("--data", loo_data, "csv with header label,actual,tar")->required();

  GlobalArgs reasoning_args;
  auto* reasoning_cmd = app.add_subcommand("reasoning", "reasoning-token scatters and correlations");
  add_common(reasoning_cmd, reasoning_args);

  std::string metrics_metric, metrics_hyp, metrics_ref, metrics_smoothing = "none";
  auto* metrics_cmd = app.add_subcommand("metrics", "bleu/chrf over plain-text files");
  metrics_cmd->add_option("--metric", metrics_metric, "bleu | chrf")->required();
  metrics_cmd->add_option("--hyp", metrics_hyp, "hypotheses, one segment per line")->required();
  metrics_cmd->add_option("--ref", metrics_ref, "references, one segment per line")->required();
  metrics_cmd->add_option("--smoothing", metrics_smoothing, "bleu smoothing: none | exp");

  GlobalArgs manifest_args;
  auto* manifest_cmd = app.add_subcommand("manifest", "write the run manifest");
  add_common(manifest_cmd, manifest_args);

  CLI11_PARSE(app, argc, argv);

  try {
    if (tar_cmd->parsed()) {
      auto ctx = mtdiag::load_run_config(tar_args.config_path, tar_args.overrides());
      print_artifacts(mtdiag::cmd_tar(ctx));
      report_warnings(ctx);
    } else if (noise_cmd->parsed()) {
      auto ctx = mtdiag::load_run_config(noise_args.config_path, noise_args.overrides());
      print_artifacts(mtdiag::cmd_noise(ctx));
      report_warnings(ctx);
    } else if (corr_cmd->parsed()) {
      auto ctx = mtdiag::load_run_config(corr_args.config_path, corr_args.overrides());
      print_artifacts(mtdiag::cmd_correlate(ctx, mtdiag::parse_metric(corr_metric)));
      report_warnings(ctx);
    } else if (loo_cmd->parsed()) {
      mtdiag::RunContext ctx;
      if (!loo_args.config_path.empty()) {
        ctx = mtdiag::load_run_config(loo_args.config_path, loo_args.overrides());
      } else {
        ctx = mtdiag::make_adhoc_context({{"loo_data", loo_data}}, loo_args.overrides());
      }
      print_artifacts(mtdiag::cmd_loo(ctx, loo_data));
      report_warnings(ctx);
    } else if (reasoning_cmd->parsed()) {
      auto ctx = mtdiag::load_run_config(reasoning_args.config_path, reasoning_args.overrides());
      print_artifacts(mtdiag::cmd_reasoning(ctx));
      report_warnings(ctx);
    } else if (metrics_cmd->parsed()) {
      auto smoothing = mtdiag::BleuConfig::Smoothing::none;
      if (metrics_smoothing == "exp") smoothing = mtdiag::BleuConfig::Smoothing::exp;
      else if (metrics_smoothing != "none") throw mtdiag::Error("smoothing must be none or exp");
      double score = mtdiag::cmd_metrics(metrics_hyp, metrics_ref,
                                         mtdiag::parse_metric(metrics_metric), smoothing);
      std::cout << metrics_metric << " " << mtdiag::format_fixed(score, 2) << "\n";
    } else if (manifest_cmd->parsed()) {
      auto ctx = mtdiag::load_run_config(manifest_args.config_path, manifest_args.overrides());
      print_artifacts(mtdiag::cmd_manifest(ctx));
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
