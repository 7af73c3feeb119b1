#include <algorithm>
#include <cmath>
#include <iostream>
#include <set>
#include <sstream>

#include "cli_util.hpp"
#include "commands.hpp"
#include "nomiclaw/metrics.hpp"
#include "nomiclaw/stats/gee.hpp"
#include "nomiclaw/stats/glm.hpp"
#include "nomiclaw/stats/multivariate.hpp"
#include "nomiclaw/stats/tests.hpp"

namespace nomiclaw::cli {

namespace {

using stats::LogitDesign;

int stats_wins(const StatsArgs& args, const Table& table) {
  WinSummary s = summarize_wins(table);

  std::vector<std::vector<std::string>> rows;
  std::vector<double> observed;
  for (const auto& [model, wins] : s.wins_per_model) {
    int rounds = s.rounds_per_model.at(model);
    rows.push_back({model, std::to_string(wins), std::to_string(rounds),
                    format_rate3(static_cast<double>(wins) / rounds)});
    observed.push_back(static_cast<double>(wins));
  }
  rows.push_back({"(undecided)", std::to_string(s.undecided_rounds),
                  std::to_string(s.total_rounds),
                  format_rate3(static_cast<double>(s.undecided_rounds) /
                               s.total_rounds)});
  emit_csv(args.out, {"model", "wins", "rounds", "win_rate"}, rows);

  if (observed.size() >= 2) {
    std::vector<double> uniform(observed.size(), 1.0 / observed.size());
    stats::TestResult chi = stats::chi_square_gof(observed, uniform);
    std::cout << "chi2=" << format_double(chi.statistic, "%.4f")
              << " df=" << format_double(chi.df, "%.0f")
              << " p=" << format_double(chi.p_value, "%.4e")
              << " undecided=" << s.undecided_rounds << "/" << s.total_rounds
              << "\n";
  } else {
    std::cout << "chi2 skipped (single model)"
              << " undecided=" << s.undecided_rounds << "/" << s.total_rounds
              << "\n";
  }
  return kOk;
}

int stats_pairwise(const StatsArgs& args, const Table& table) {
  WinSummary s = summarize_wins(table);
  if (s.wins_per_model.size() < 2) {
    std::cerr << "pairwise tests need at least two models\n";
    return kInputFailure;
  }

  struct Pair {
    std::string a, b;
    int wa, na, wb, nb;
    stats::TestResult test;
    bool defined = false;  // both-zero (or both-saturated) pairs have no test
  };
  std::vector<Pair> pairs;
  std::vector<std::pair<std::string, int>> models = s.wins_per_model;
  std::sort(models.begin(), models.end());  // name order for stable output
  int degenerate = 0;
  for (std::size_t i = 0; i < models.size(); ++i) {
    for (std::size_t j = i + 1; j < models.size(); ++j) {
      Pair p;
      p.a = models[i].first;
      p.b = models[j].first;
      p.wa = models[i].second;
      p.wb = models[j].second;
      p.na = s.rounds_per_model.at(p.a);
      p.nb = s.rounds_per_model.at(p.b);
      try {
        p.test = stats::two_prop_z(p.wa, p.na, p.wb, p.nb);
        p.defined = true;
      } catch (const stats::DegenerateInput&) {
        ++degenerate;
      }
      pairs.push_back(std::move(p));
    }
  }
  // Adjust over the family of defined tests only.
  std::vector<double> p_values;
  for (const auto& p : pairs)
    if (p.defined) p_values.push_back(p.test.p_value);
  std::vector<double> adjusted = stats::benjamini_hochberg(p_values);

  std::vector<std::vector<std::string>> rows;
  std::size_t adj_index = 0;
  for (const auto& p : pairs) {
    if (p.defined) {
      double adj = adjusted[adj_index++];
      rows.push_back({p.a, p.b, std::to_string(p.wa), std::to_string(p.wb),
                      format_double(p.test.statistic, "%.4f"),
                      format_double(p.test.p_value, "%.6e"),
                      format_double(adj, "%.6e"), adj < 0.05 ? "*" : ""});
    } else {
      rows.push_back({p.a, p.b, std::to_string(p.wa), std::to_string(p.wb), "", "",
                      "", "degenerate"});
    }
  }
  emit_csv(args.out,
           {"model_a", "model_b", "wins_a", "wins_b", "z", "p", "p_adj", "sig"},
           rows);
  if (degenerate > 0)
    std::cout << degenerate
              << " pair(s) degenerate (pooled proportion 0 or 1), excluded from "
                 "the BH family\n";
  return kOk;
}

LogitDesign build_design(const Table& table, const std::string& ref_model,
                         bool with_model, bool with_vignette) {
  std::vector<int> outcomes;
  std::vector<std::string> models, vignettes;
  for (const auto& r : table) {
    outcomes.push_back(r.won ? 1 : 0);
    models.push_back(r.model_id);
    vignettes.push_back(r.vignette_id);
  }
  std::vector<std::pair<std::string, const std::vector<std::string>*>> factors;
  if (with_model) factors.push_back({"model", &models});
  if (with_vignette) factors.push_back({"vignette", &vignettes});
  std::map<std::string, std::string> refs;
  if (!ref_model.empty()) refs["model"] = ref_model;
  return stats::encode_logit_design(outcomes, factors, refs);
}

std::string default_reference(const Table& table) {
  WinSummary s = summarize_wins(table);
  return s.wins_per_model.empty() ? "" : s.wins_per_model.front().first;
}

int stats_glm(const StatsArgs& args, const Table& table) {
  std::string ref = args.ref.empty() ? default_reference(table) : args.ref;
  LogitDesign design = build_design(table, ref, true, false);
  stats::FitResult fit = stats::glm_logit(design);

  std::vector<std::vector<std::string>> rows;
  for (std::size_t i = 0; i < fit.coef_names.size(); ++i) {
    rows.push_back({fit.coef_names[i], format_double(fit.estimate[i], "%.4f"),
                    format_double(fit.std_error[i], "%.4f"),
                    format_double(fit.z_value[i], "%.4f"),
                    format_double(fit.odds_ratio[i], "%.4f"),
                    format_double(fit.ci_low[i], "%.4f"),
                    format_double(fit.ci_high[i], "%.4f"),
                    format_double(fit.p_value[i], "%.6g")});
  }
  emit_csv(args.out,
           {"term", "estimate", "std_error", "z", "odds_ratio", "ci_low",
            "ci_high", "p"},
           rows);
  std::cout << "reference=" << ref
            << " deviance=" << format_double(fit.deviance, "%.2f")
            << " residual_df=" << fit.residual_df
            << " dispersion=" << format_double(fit.dispersion_ratio, "%.2f")
            << " converged=" << (fit.converged ? "true" : "false")
            << " iterations=" << fit.iterations << "\n";
  // A flagged non-converged fit (separation) is still a reportable
  // result; only computational failures exit non-zero.
  return kOk;
}

int stats_gee(const StatsArgs& args, const Table& table) {
  std::string ref = args.ref.empty() ? default_reference(table) : args.ref;
  LogitDesign design =
      build_design(table, ref, !args.drop_model, !args.drop_vignette);
  std::vector<std::string> clusters;
  for (const auto& r : table) clusters.push_back(r.run_id);
  stats::GeeResult fit = stats::gee_logit_exchangeable(design, clusters);

  std::vector<std::vector<std::string>> rows;
  for (std::size_t i = 0; i < fit.coef_names.size(); ++i) {
    rows.push_back({fit.coef_names[i], format_double(fit.estimate[i], "%.4f"),
                    format_double(fit.robust_se[i], "%.4f"),
                    format_double(fit.z_value[i], "%.4f"),
                    format_double(fit.wald_p[i], "%.6g")});
  }
  emit_csv(args.out, {"term", "estimate", "robust_se", "z", "p"}, rows);
  std::cout << "alpha=" << format_double(fit.alpha, "%.4f")
            << " clusters=" << fit.n_clusters
            << " converged=" << (fit.converged ? "true" : "false") << "\n";
  return kOk;
}

/// Nine baseline voting-behavior metrics for the multivariate views.
std::vector<std::string> default_pca_metrics() {
  return {"svr", "avr", "wr", "vv", "vp", "ri", "csr", "bs", "ed"};
}

struct ModelMatrix {
  std::vector<std::string> models;
  std::vector<std::string> metrics;
  stats::Matrix values;
};

ModelMatrix model_metric_matrix(const Table& table, const std::string& metric_list) {
  std::vector<std::string> metrics = default_pca_metrics();
  if (!metric_list.empty()) {
    metrics.clear();
    std::istringstream in(metric_list);
    std::string item;
    while (std::getline(in, item, ',')) {
      const auto& known = all_metric_names();
      if (std::find(known.begin(), known.end(), item) == known.end())
        throw ConfigError("unknown metric '" + item + "'");
      metrics.push_back(item);
    }
    if (metrics.size() < 2) throw ConfigError("need at least two metrics");
  }

  std::vector<UnitMetrics> units = compute_unit_metrics(table);
  std::vector<MetricReport> reports = summarize_units(units, true);
  ModelMatrix out;
  out.metrics = metrics;
  for (const auto& r : reports) out.models.push_back(r.group);
  out.values = stats::Matrix(out.models.size(), metrics.size());
  for (std::size_t i = 0; i < reports.size(); ++i)
    for (std::size_t j = 0; j < metrics.size(); ++j)
      out.values(i, j) = reports[i].stats.at(metrics[j]).mean;
  return out;
}

int stats_pca(const StatsArgs& args, const Table& table) {
  ModelMatrix m = model_metric_matrix(table, args.metrics);
  stats::PcaResult result = stats::pca(m.values);

  std::filesystem::path dir = args.out.empty() ? "." : args.out;
  std::filesystem::create_directories(dir);

  std::vector<std::vector<std::string>> variance_rows;
  for (std::size_t i = 0; i < result.variance_fraction.size(); ++i)
    variance_rows.push_back({"PC" + std::to_string(i + 1),
                             format_double(result.eigenvalues[i]),
                             format_double(result.variance_fraction[i])});
  emit_csv(dir / "pca_variance.csv", {"component", "eigenvalue", "variance_fraction"},
           variance_rows);

  std::vector<std::string> loading_header = {"metric"};
  for (std::size_t j = 0; j < result.used_columns.size(); ++j)
    loading_header.push_back("PC" + std::to_string(j + 1));
  std::vector<std::vector<std::string>> loading_rows;
  for (std::size_t i = 0; i < result.used_columns.size(); ++i) {
    std::vector<std::string> row = {m.metrics[result.used_columns[i]]};
    for (std::size_t j = 0; j < result.used_columns.size(); ++j)
      row.push_back(format_double(result.loadings(i, j)));
    loading_rows.push_back(std::move(row));
  }
  emit_csv(dir / "pca_loadings.csv", loading_header, loading_rows);

  std::vector<std::string> score_header = {"model"};
  for (std::size_t j = 0; j < result.used_columns.size(); ++j)
    score_header.push_back("PC" + std::to_string(j + 1));
  std::vector<std::vector<std::string>> score_rows;
  for (std::size_t i = 0; i < m.models.size(); ++i) {
    std::vector<std::string> row = {m.models[i]};
    for (std::size_t j = 0; j < result.used_columns.size(); ++j)
      row.push_back(format_double(result.scores(i, j)));
    score_rows.push_back(std::move(row));
  }
  emit_csv(dir / "pca_scores.csv", score_header, score_rows);

  for (int dropped : result.dropped_columns)
    std::cout << "dropped zero-variance metric: " << m.metrics[dropped] << "\n";
  std::cout << "pca tables written to " << dir.string() << "\n";
  return kOk;
}

int stats_cluster(const StatsArgs& args, const Table& table) {
  ModelMatrix m = model_metric_matrix(table, args.metrics);

  // Standardize columns so no metric dominates the Ward objective.
  stats::Matrix z(m.values.rows(), m.values.cols());
  for (std::size_t c = 0; c < m.values.cols(); ++c) {
    double mean = 0.0;
    for (std::size_t r = 0; r < m.values.rows(); ++r) mean += m.values(r, c);
    mean /= m.values.rows();
    double ss = 0.0;
    for (std::size_t r = 0; r < m.values.rows(); ++r)
      ss += (m.values(r, c) - mean) * (m.values(r, c) - mean);
    double sd = m.values.rows() > 1 ? std::sqrt(ss / (m.values.rows() - 1)) : 0.0;
    for (std::size_t r = 0; r < m.values.rows(); ++r)
      z(r, c) = sd > 0 ? (m.values(r, c) - mean) / sd : 0.0;
  }

  stats::ClusterTree tree = stats::ward_cluster(z);
  std::filesystem::path dir = args.out.empty() ? "." : args.out;
  std::filesystem::create_directories(dir);

  std::vector<std::vector<std::string>> merge_rows;
  for (std::size_t i = 0; i < tree.merges.size(); ++i) {
    const stats::Merge& merge = tree.merges[i];
    auto name = [&](int id) {
      return id < tree.n_leaves ? m.models[id] : "cluster_" + std::to_string(id);
    };
    merge_rows.push_back({std::to_string(tree.n_leaves + static_cast<int>(i)),
                          name(merge.left), name(merge.right),
                          format_double(merge.height), std::to_string(merge.size)});
  }
  emit_csv(dir / "cluster_merges.csv", {"cluster_id", "left", "right", "height", "size"},
           merge_rows);

  if (args.cut_k > 0) {
    std::vector<int> labels = stats::cut(tree, args.cut_k);
    std::vector<std::vector<std::string>> label_rows;
    for (std::size_t i = 0; i < m.models.size(); ++i)
      label_rows.push_back({m.models[i], std::to_string(labels[i])});
    emit_csv(dir / "cluster_assignments.csv", {"model", "cluster"}, label_rows);
  }
  std::cout << "cluster tables written to " << dir.string() << "\n";
  return kOk;
}

}  // namespace

int run_stats(const StatsArgs& args) {
  Table table = load_table_or_fail(args.csv_path);
  if (args.subcommand == "wins") return stats_wins(args, table);
  if (args.subcommand == "pairwise") return stats_pairwise(args, table);
  if (args.subcommand == "glm") return stats_glm(args, table);
  if (args.subcommand == "gee") return stats_gee(args, table);
  if (args.subcommand == "pca") return stats_pca(args, table);
  if (args.subcommand == "cluster") return stats_cluster(args, table);
  std::cerr << "unknown stats subcommand: " << args.subcommand << "\n";
  return kInputFailure;
}

}  // namespace nomiclaw::cli
