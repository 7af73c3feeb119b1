#include <iostream>

#include <CLI11.hpp>

#include "cli_util.hpp"
#include "commands.hpp"
#include "nomiclaw/common.hpp"
#include "nomiclaw/stats/linalg.hpp"
#include "nomiclaw/stats/tests.hpp"

namespace cli = nomiclaw::cli;

int main(int argc, char** argv) {
  CLI::App app{"nomiclaw: propose-justify-vote simulation and analysis toolkit"};
  app.require_subcommand(1);

  cli::SimulateArgs simulate;
  auto* sim = app.add_subcommand("simulate", "Play games and write run logs");
  sim->add_option("--manifest", simulate.manifest, "Batch manifest (key = value file)")
      ->required();
  sim->add_option("--out", simulate.out_override, "Override the manifest out_dir");
  sim->add_option("--jobs", simulate.jobs_override, "Parallel games (or NOMIC_JOBS)");
  sim->add_option("--seed", simulate.seed_override, "Override the manifest seed")
      ->each([&](const std::string&) { simulate.has_seed_override = true; });
  sim->add_option("--backend-url", simulate.backend_url_override,
                  "Chat endpoint base URL (or NOMIC_BACKEND_URL)");

  cli::ExportArgs exp;
  auto* export_cmd = app.add_subcommand("export", "Flatten run logs to the analysis CSV");
  export_cmd->add_option("--logs", exp.logs_dir, "Directory of run logs")->required();
  export_cmd->add_option("--csv", exp.csv_path, "Output CSV path")->required();
  export_cmd->add_flag("--allow-unbalanced", exp.allow_unbalanced,
                       "Exit 0 even when the table is unbalanced");

  cli::MetricsArgs metrics;
  auto* metrics_cmd = app.add_subcommand("metrics", "Interaction metric report");
  metrics_cmd->add_option("--csv", metrics.csv_path, "Analysis CSV")->required();
  metrics_cmd->add_option("--by", metrics.by, "Group by: model | condition")
      ->check(CLI::IsMember({"model", "condition"}));
  metrics_cmd->add_option("--condition", metrics.condition_filter,
                          "Filter rows: hetero | homo");
  metrics_cmd->add_option("--out", metrics.out, "Output CSV (stdout when absent)");
  metrics_cmd->add_flag("--ri-include-self", metrics.ri_include_self,
                        "Count prior self-votes as reciprocity opportunities");
  metrics_cmd->add_flag("--ri-per-round", metrics.ri_per_round,
                        "One reciprocity opportunity per round, not per supporter");
  metrics_cmd->add_flag("--fmw-final-score", metrics.fmw_final_score,
                        "First-mover advantage = highest final run score");

  cli::StatsArgs stats;
  auto* stats_cmd = app.add_subcommand("stats", "Statistical analyses");
  stats_cmd->add_option("subcommand", stats.subcommand,
                        "wins | pairwise | glm | gee | pca | cluster")
      ->required()
      ->check(CLI::IsMember({"wins", "pairwise", "glm", "gee", "pca", "cluster"}));
  stats_cmd->add_option("--csv", stats.csv_path, "Analysis CSV")->required();
  stats_cmd->add_option("--out", stats.out,
                        "Output CSV file (directory for pca/cluster)");
  stats_cmd->add_option("--ref", stats.ref, "Reference model (glm/gee)");
  stats_cmd->add_flag("--drop-model", stats.drop_model, "GEE without the model factor");
  stats_cmd->add_flag("--drop-vignette", stats.drop_vignette,
                      "GEE without the vignette factor");
  stats_cmd->add_option("--metrics", stats.metrics,
                        "Comma list of metrics for pca/cluster");
  stats_cmd->add_option("--k", stats.cut_k, "Emit cluster assignments for k clusters");

  cli::ThemesArgs themes;
  auto* themes_cmd = app.add_subcommand("themes", "Thematic coding pipeline");
  themes_cmd->add_option("subcommand", themes.subcommand,
                         "annotate | sample | agreement | trends")
      ->required()
      ->check(CLI::IsMember({"annotate", "sample", "agreement", "trends"}));
  themes_cmd->add_option("--csv", themes.csv_path, "Analysis CSV");
  themes_cmd->add_option("--out", themes.out, "Output CSV file or directory");
  themes_cmd->add_option("--classifier", themes.classifiers,
                         "mock or backend:<model> (repeatable)");
  themes_cmd->add_option("--rate", themes.rate_per_sec, "Requests per second cap");
  themes_cmd->add_option("--checkpoint", themes.checkpoint,
                         "Annotation store for crash-safe resumption");
  themes_cmd->add_option("--backend-url", themes.backend_url, "Chat endpoint base URL");
  themes_cmd->add_option("--fraction", themes.fraction, "Sample fraction (0, 1]");
  themes_cmd->add_option("--seed", themes.seed, "Sample seed");
  themes_cmd->add_option("--sample", themes.sample_path,
                         "Human-labeled sample CSV (agreement)");
  themes_cmd->add_option("--store", themes.store_path,
                         "Annotation store JSONL (agreement)");

  cli::ReportArgs report;
  auto* report_cmd = app.add_subcommand("report", "Every figure-ready table at once");
  report_cmd->add_option("--csv", report.csv_path, "Analysis CSV")->required();
  report_cmd->add_option("--out", report.out_dir, "Output directory")->required();
  report_cmd->add_option("--ref", report.ref, "Reference model for glm/gee");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return cli::kInputFailure;
  }

  try {
    if (sim->parsed()) return cli::run_simulate(simulate);
    if (export_cmd->parsed()) return cli::run_export(exp);
    if (metrics_cmd->parsed()) return cli::run_metrics(metrics);
    if (stats_cmd->parsed()) return cli::run_stats(stats);
    if (themes_cmd->parsed()) return cli::run_themes(themes);
    if (report_cmd->parsed()) return cli::run_report(report);
  } catch (const nomiclaw::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return cli::kInputFailure;
  } catch (const nomiclaw::ValidationError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return cli::kInputFailure;
  } catch (const nomiclaw::ProtocolError& e) {
    std::cerr << "protocol error: " << e.what() << "\n";
    return cli::kInputFailure;
  } catch (const nomiclaw::stats::DegenerateInput& e) {
    std::cerr << "degenerate input: " << e.what() << "\n";
    return cli::kInputFailure;
  } catch (const nomiclaw::stats::SingularMatrix& e) {
    std::cerr << "unusable design: " << e.what() << "\n";
    return cli::kInputFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return cli::kRuntimeFailure;
  }
  return cli::kInputFailure;
}
