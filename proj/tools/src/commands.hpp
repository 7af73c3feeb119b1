#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace nomiclaw::cli {

struct SimulateArgs {
  std::filesystem::path manifest;
  std::filesystem::path out_override;
  int jobs_override = 0;
  std::uint64_t seed_override = 0;
  bool has_seed_override = false;
  std::string backend_url_override;
};
int run_simulate(const SimulateArgs& args);

struct ExportArgs {
  std::filesystem::path logs_dir;
  std::filesystem::path csv_path;
  bool allow_unbalanced = false;
};
int run_export(const ExportArgs& args);

struct MetricsArgs {
  std::filesystem::path csv_path;
  std::string by = "model";  // model | condition
  std::string condition_filter;
  std::filesystem::path out;
  bool ri_include_self = false;
  bool ri_per_round = false;
  bool fmw_final_score = false;
};
int run_metrics(const MetricsArgs& args);

struct StatsArgs {
  std::string subcommand;  // wins | pairwise | glm | gee | pca | cluster
  std::filesystem::path csv_path;
  std::filesystem::path out;  // file for tabular subs, directory for pca/cluster
  std::string ref;            // GLM/GEE reference model
  bool drop_model = false;
  bool drop_vignette = false;
  std::string metrics;  // comma list for pca/cluster
  int cut_k = 0;
};
int run_stats(const StatsArgs& args);

struct ThemesArgs {
  std::string subcommand;  // annotate | sample | agreement | trends
  std::filesystem::path csv_path;
  std::filesystem::path out;
  std::vector<std::string> classifiers;  // "mock" or "backend:<model>"
  double rate_per_sec = 0.0;
  std::filesystem::path checkpoint;
  std::string backend_url;
  double fraction = 0.10;
  std::uint64_t seed = 7;
  std::filesystem::path sample_path;  // filled human sample (agreement)
  std::filesystem::path store_path;   // annotation store (agreement)
};
int run_themes(const ThemesArgs& args);

struct ReportArgs {
  std::filesystem::path csv_path;
  std::filesystem::path out_dir;
  std::string ref;
};
int run_report(const ReportArgs& args);

}  // namespace nomiclaw::cli
