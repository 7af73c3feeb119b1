#include <iostream>

#include "cli_util.hpp"
#include "commands.hpp"
#include "nomiclaw/metrics.hpp"
#include "nomiclaw/themes.hpp"

namespace nomiclaw::cli {

// Emits every figure-ready table derivable from the CSV into one
// directory by delegating to the metrics/stats/themes commands. Theme
// tables are skipped with a notice when the CSV has no annotations.
int run_report(const ReportArgs& args) {
  Table table = load_table_or_fail(args.csv_path);
  std::filesystem::create_directories(args.out_dir);

  MetricsArgs metrics;
  metrics.csv_path = args.csv_path;
  metrics.by = "model";
  metrics.out = args.out_dir / "metrics_by_model.csv";
  int rc = run_metrics(metrics);
  if (rc != kOk) return rc;
  metrics.by = "condition";
  metrics.out = args.out_dir / "metrics_by_condition.csv";
  rc = run_metrics(metrics);
  if (rc != kOk) return rc;

  StatsArgs stats;
  stats.csv_path = args.csv_path;
  stats.ref = args.ref;

  stats.subcommand = "wins";
  stats.out = args.out_dir / "wins_table.csv";
  rc = run_stats(stats);
  if (rc != kOk) return rc;

  stats.subcommand = "pairwise";
  stats.out = args.out_dir / "pairwise_z.csv";
  rc = run_stats(stats);
  if (rc != kOk) return rc;

  stats.subcommand = "glm";
  stats.out = args.out_dir / "glm_table.csv";
  rc = run_stats(stats);
  if (rc != kOk) return rc;

  bool multiple_runs = group_by_run(table).size() > 1;
  if (multiple_runs) {
    stats.subcommand = "gee";
    stats.out = args.out_dir / "gee_table.csv";
    rc = run_stats(stats);
    if (rc != kOk) return rc;
  } else {
    std::cout << "single run: gee_table.csv skipped\n";
  }

  stats.subcommand = "pca";
  stats.out = args.out_dir;
  rc = run_stats(stats);
  if (rc != kOk) return rc;

  stats.subcommand = "cluster";
  stats.out = args.out_dir;
  stats.cut_k = 3;
  rc = run_stats(stats);
  if (rc != kOk) return rc;

  bool any_theme = false;
  for (const auto& r : table)
    if (!r.rule_theme.empty() || !r.reasoning_theme.empty() || !r.vote_theme.empty())
      any_theme = true;
  if (any_theme) {
    ThemesArgs themes;
    themes.subcommand = "trends";
    themes.csv_path = args.csv_path;
    themes.out = args.out_dir;
    rc = run_themes(themes);
    if (rc != kOk) return rc;
  } else {
    std::cout << "no theme annotations: theme_trends.csv and persistence_or.csv "
                 "skipped\n";
  }

  std::cout << "report written to " << args.out_dir.string() << "\n";
  return kOk;
}

}  // namespace nomiclaw::cli
