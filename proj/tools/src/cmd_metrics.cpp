#include <iostream>

#include "cli_util.hpp"
#include "commands.hpp"
#include "nomiclaw/metrics.hpp"

namespace nomiclaw::cli {

int run_metrics(const MetricsArgs& args) {
  Table table = load_table_or_fail(args.csv_path);

  RiOptions ri;
  ri.include_self_support = args.ri_include_self;
  ri.per_round = args.ri_per_round;
  std::vector<UnitMetrics> units =
      compute_unit_metrics(table, ri, args.fmw_final_score);

  std::optional<Condition> filter;
  if (!args.condition_filter.empty())
    filter = condition_from_string(args.condition_filter);
  bool by_model = args.by != "condition";
  std::vector<MetricReport> reports = summarize_units(units, by_model, filter);
  if (reports.empty()) {
    std::cerr << "no units match the requested grouping\n";
    return kInputFailure;
  }

  std::vector<std::string> header = {by_model ? "model" : "condition"};
  for (const auto& name : all_metric_names()) {
    header.push_back(name + "_mean");
    header.push_back(name + "_sd");
    header.push_back(name + "_n");
  }
  std::vector<std::vector<std::string>> rows;
  for (const auto& report : reports) {
    std::vector<std::string> row = {report.group};
    for (const auto& name : all_metric_names()) {
      const MetricStat& stat = report.stats.at(name);
      if (stat.n == 0) {
        row.insert(row.end(), {"", "", "0"});
      } else {
        row.push_back(format_double(stat.mean));
        row.push_back(format_double(stat.sd));
        row.push_back(std::to_string(stat.n));
      }
    }
    rows.push_back(std::move(row));
  }
  emit_csv(args.out, header, rows);
  return kOk;
}

}  // namespace nomiclaw::cli
