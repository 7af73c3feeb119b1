// Acceptance suite: one pass/fail line per criterion, non-zero exit when
// any criterion fails. Quantitative table reproductions run through the
// CLI binary end to end; property criteria run the library against
// independent brute-force oracles.

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <httplib.h>
#include <json.hpp>

#include "../support/fixtures.hpp"
#include "../support/oracles.hpp"
#include "nomiclaw/agents.hpp"
#include "nomiclaw/csv.hpp"
#include "nomiclaw/ledger.hpp"
#include "nomiclaw/metrics.hpp"
#include "nomiclaw/stats/gee.hpp"
#include "nomiclaw/stats/glm.hpp"
#include "nomiclaw/stats/multivariate.hpp"
#include "nomiclaw/stats/tests.hpp"
#include "nomiclaw/themes.hpp"

#ifndef NOMICLAW_CLI_PATH
#define NOMICLAW_CLI_PATH "nomiclaw"
#endif

using namespace nomiclaw;
using namespace nomiclaw::testing;
namespace fs = std::filesystem;
namespace th = nomiclaw::themes;

namespace {

int g_failures = 0;
std::vector<std::string> g_notes;

void report(int criterion, bool ok, const std::string& what,
            const std::string& detail = "") {
  std::printf("%s criterion %2d: %s%s%s\n", ok ? "PASS" : "FAIL", criterion,
              what.c_str(), detail.empty() ? "" : " — ", detail.c_str());
  if (!ok) ++g_failures;
}

struct CommandResult {
  int exit_code = -1;
  std::string output;
};

CommandResult run_cli(const std::string& args) {
  std::string cmd = std::string(NOMICLAW_CLI_PATH) + " " + args + " 2>&1";
  std::array<char, 4096> buf{};
  CommandResult result;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return result;
  while (std::fgets(buf.data(), buf.size(), pipe)) result.output += buf.data();
  int status = pclose(pipe);
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return result;
}

fs::path work_dir() {
  static fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / "nomiclaw_acceptance";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

fs::path reference_csv() {
  static fs::path path = [] {
    fs::path p = work_dir() / "reference_batch.csv";
    write_table_csv(reference_batch_table(), p);
    return p;
  }();
  return path;
}

// ---------------------------------------------------------------------
// Criterion 1: GLM table reproduction through the CLI, within 0.01.
void criterion_glm() {
  auto start = std::chrono::steady_clock::now();
  fs::path out = work_dir() / "glm_table.csv";
  CommandResult r = run_cli("stats glm --ref deepseek-r1 --csv " +
                            reference_csv().string() + " --out " + out.string());
  auto elapsed = std::chrono::duration<double>(
                     std::chrono::steady_clock::now() - start).count();
  if (r.exit_code != 0) {
    report(1, false, "GLM table reproduction", "CLI exit " + std::to_string(r.exit_code));
    return;
  }

  struct Row {
    const char* model;
    double est, se, orr, lo, hi;
  };
  const Row expected[] = {
      {"gemma2", -1.82, 0.56, 0.16, 0.05, 0.49},
      {"gemma3", -3.23, 1.03, 0.04, 0.01, 0.30},
      {"granite3.3", -0.65, 0.39, 0.52, 0.25, 1.12},
      {"llama2", -0.32, 0.36, 0.73, 0.36, 1.47},
      {"llama3", -3.23, 1.03, 0.04, 0.01, 0.30},
      {"phi4", -1.09, 0.44, 0.34, 0.14, 0.79},
      {"phi4-mini-reasoning", -0.65, 0.39, 0.52, 0.25, 1.12},
      {"phi4-reasoning", -0.56, 0.38, 0.57, 0.27, 1.21},
      {"qwen3", -2.53, 0.75, 0.08, 0.02, 0.35},
  };

  csv::Document doc = csv::read_file(out);
  std::map<std::string, std::vector<double>> rows;
  for (const auto& row : doc.rows) {
    std::vector<double> values;
    for (std::size_t i = 1; i < row.size(); ++i) values.push_back(std::stod(row[i]));
    rows[row[0]] = values;
  }

  bool ok = true;
  std::string detail;
  for (const auto& e : expected) {
    auto it = rows.find(std::string("model:") + e.model);
    if (it == rows.end()) {
      ok = false;
      detail = std::string("missing row for ") + e.model;
      break;
    }
    // columns: estimate, std_error, z, odds_ratio, ci_low, ci_high, p
    const auto& v = it->second;
    if (std::fabs(v[0] - e.est) > 0.01 || std::fabs(v[1] - e.se) > 0.01 ||
        std::fabs(v[3] - e.orr) > 0.01 || std::fabs(v[4] - e.lo) > 0.01 ||
        std::fabs(v[5] - e.hi) > 0.01) {
      ok = false;
      detail = std::string("row out of tolerance for ") + e.model;
      break;
    }
  }
  if (ok && elapsed >= 1.0) {
    ok = false;
    detail = "runtime " + std::to_string(elapsed) + "s";
  }
  report(1, ok, "GLM win-probability table reproduced within 0.01",
         ok ? "9 contrasts + runtime " + std::to_string(elapsed).substr(0, 5) + "s"
            : detail);
}

// ---------------------------------------------------------------------
// Criterion 2: chi-square 47.78 +/- 0.01, df 9, p within 1.5x of 3e-7.
void criterion_chi2() {
  CommandResult r = run_cli("stats wins --csv " + reference_csv().string() + " --out " +
                            (work_dir() / "wins.csv").string());
  double chi2 = 0, df = -1, p = 0;
  std::istringstream in(r.output);
  std::string token;
  while (in >> token) {
    if (token.rfind("chi2=", 0) == 0) chi2 = std::stod(token.substr(5));
    if (token.rfind("df=", 0) == 0) df = std::stod(token.substr(3));
    if (token.rfind("p=", 0) == 0) p = std::stod(token.substr(2));
  }
  bool ok = r.exit_code == 0 && std::fabs(chi2 - 47.78) <= 0.011 && df == 9.0 &&
            p >= 3e-7 / 1.5 && p <= 3e-7 * 1.5;
  char detail[96];
  std::snprintf(detail, sizeof detail, "chi2=%.4f df=%.0f p=%.3e", chi2, df, p);
  report(2, ok, "chi-square goodness-of-fit on the win counts", detail);
}

// ---------------------------------------------------------------------
// Criterion 3: pairwise z + BH significance pattern and quoted values.
void criterion_pairwise() {
  fs::path out = work_dir() / "pairwise.csv";
  CommandResult r = run_cli("stats pairwise --csv " + reference_csv().string() +
                            " --out " + out.string());
  if (r.exit_code != 0) {
    report(3, false, "pairwise z + BH pattern", "CLI exit failure");
    return;
  }
  csv::Document doc = csv::read_file(out);
  if (doc.rows.size() != 45) {  // C(10, 2)
    report(3, false, "pairwise z + BH pattern",
           "expected 45 pairs, found " + std::to_string(doc.rows.size()));
    return;
  }
  int c_a = doc.column("model_a"), c_b = doc.column("model_b"),
      c_adj = doc.column("p_adj");
  std::map<std::pair<std::string, std::string>, double> adjusted;
  for (const auto& row : doc.rows) {
    adjusted[{row[c_a], row[c_b]}] = std::stod(row[c_adj]);
    adjusted[{row[c_b], row[c_a]}] = std::stod(row[c_adj]);
  }

  // Every pair the analysis must flag significant at alpha = 0.05,
  // with the quoted adjusted values where the text gives them.
  struct Expected {
    const char* a;
    const char* b;
    double quoted;  // 0 = significance only
  };
  const Expected pattern[] = {
      {"deepseek-r1", "gemma2", 0.0025}, {"deepseek-r1", "gemma3", 0},
      {"deepseek-r1", "llama3", 0},      {"deepseek-r1", "phi4", 0.025},
      {"deepseek-r1", "qwen3", 0},       {"granite3.3", "llama3", 0.0059},
      {"granite3.3", "qwen3", 0.0156},   {"llama2", "gemma2", 0.0152},
      {"llama2", "qwen3", 0.0039},       {"phi4-mini-reasoning", "qwen3", 0.0156},
      {"phi4-reasoning", "qwen3", 0.0108},
  };
  bool ok = true;
  std::string detail = "11 pairs significant, quoted values within 20%";
  for (const auto& e : pattern) {
    auto it = adjusted.find({e.a, e.b});
    if (it == adjusted.end()) {
      ok = false;
      detail = std::string("missing pair ") + e.a + " vs " + e.b;
      break;
    }
    if (it->second >= 0.05) {
      ok = false;
      detail = std::string(e.a) + " vs " + e.b + " not significant after BH";
      break;
    }
    if (e.quoted > 0 &&
        (it->second < e.quoted * 0.8 || it->second > e.quoted * 1.2)) {
      ok = false;
      detail = std::string(e.a) + " vs " + e.b + " adjusted p " +
               std::to_string(it->second) + " off the quoted " +
               std::to_string(e.quoted);
      break;
    }
  }
  report(3, ok, "pairwise two-proportion z tests with BH adjustment", detail);
}

// ---------------------------------------------------------------------
// Criterion 4: stats wins rates and undecided count, exact.
void criterion_wins() {
  fs::path out = work_dir() / "wins_exact.csv";
  CommandResult r = run_cli("stats wins --csv " + reference_csv().string() + " --out " +
                            out.string());
  csv::Document doc = csv::read_file(out);
  const std::vector<std::pair<std::string, std::string>> expected = {
      {"deepseek-r1", "0.175"}, {"llama2", "0.133"},
      {"phi4-reasoning", "0.108"}, {"granite3.3", "0.100"},
      {"phi4-mini-reasoning", "0.100"}, {"phi4", "0.067"},
      {"gemma2", "0.033"}, {"qwen3", "0.017"},
      {"gemma3", "0.008"}, {"llama3", "0.008"},
  };
  bool ok = r.exit_code == 0 && doc.rows.size() == 11;
  std::string detail = "10 rates exact, 30/120 undecided";
  for (std::size_t i = 0; ok && i < expected.size(); ++i) {
    // sorted by wins desc then name; ties (granite/phi4-mini, gemma3/llama3)
    // follow name order.
    if (doc.rows[i][0] != expected[i].first || doc.rows[i][3] != expected[i].second) {
      ok = false;
      detail = "row " + std::to_string(i) + " is " + doc.rows[i][0] + "=" +
               doc.rows[i][3] + ", expected " + expected[i].first + "=" +
               expected[i].second;
    }
  }
  if (ok && r.output.find("undecided=30/120") == std::string::npos) {
    ok = false;
    detail = "undecided count line missing or wrong";
  }
  report(4, ok, "win-rate arithmetic on the reconstructed table", detail);
}

// ---------------------------------------------------------------------
// Criterion 5: edge-density convention, exact.
void criterion_edge_density() {
  auto round_table = [](int n) {
    Table t;
    for (int seat = 1; seat <= n; ++seat) {
      InteractionRow row;
      row.run_id = "hetero_ved_run01";
      row.vignette_id = "ved";
      row.round = 1;
      row.agent_id = "agent_" + std::to_string(seat);
      row.model_id = "m" + std::to_string(seat);
      row.seat = seat;
      row.vote_target = seat == 1 ? row.agent_id : "agent_1";
      row.self_vote = row.vote_target == row.agent_id;
      t.push_back(row);
    }
    return t;
  };
  Table ten = round_table(10);
  Table five = round_table(5);
  auto ed10 = edge_density(vote_graph(ten, 1));
  auto ed5 = edge_density(vote_graph(five, 1));
  bool ok = ed10.has_value() && *ed10 == 10.0 / 90.0 && ed5.has_value() &&
            *ed5 == 5.0 / 20.0;
  char detail[96];
  std::snprintf(detail, sizeof detail, "ED(10)=%.4f ED(5)=%.2f",
                ed10.value_or(-1), ed5.value_or(-1));
  report(5, ok, "edge density is ballots over n(n-1), self-loops counted", detail);
}

// ---------------------------------------------------------------------
// Criterion 6: every metric equals a brute-force recount on 200 runs.
void criterion_metric_oracles() {
  int mismatches = 0;
  int compared = 0;
  for (int trial = 0; trial < 200; ++trial) {
    FixtureSpec spec;
    Rng rng(Rng::mix(0xacce97ed, trial));
    spec.num_agents = 3 + static_cast<int>(rng.below(4));  // 3..6
    spec.num_rounds = 5;
    spec.seed = rng.next();
    spec.run_index = 1 + trial % 20;
    if (trial % 5 == 0) spec.excluded_rounds = {1 + static_cast<int>(rng.below(5))};
    RunLog log = play_fixture(spec);
    Table table = export_rows({log});
    random_themes(table, spec.seed ^ 0x7777);

    auto units = compute_unit_metrics(table);
    std::optional<double> run_fmw = oracle_fmw({log});
    for (const auto& unit : units) {
      const AgentId& a = unit.agent_id;
      auto expect = [&](const char* name, std::optional<double> want) {
        ++compared;
        if (unit.values.at(name) != want) {
          ++mismatches;
          if (mismatches < 4)
            g_notes.push_back("criterion 6: " + std::string(name) + " mismatch for " +
                              a + " in trial " + std::to_string(trial));
        }
      };
      expect("svr", oracle_svr(log, a));
      expect("avr", oracle_avr(log, a));
      expect("wr", oracle_wr(log, a));
      expect("vv", oracle_vv(log, a));
      auto vv = oracle_vv(log, a);
      expect("vp", vv ? std::optional<double>(1.0 - *vv) : std::nullopt);
      expect("ri", oracle_ri(log, a));
      auto trace = oracle_bloc(log, a);
      expect("csr", oracle_csr(trace));
      expect("bs", oracle_bs(trace));
      expect("pm", oracle_pm(log, a));
      expect("wm", oracle_wm(log, a));
      auto [vm, tc] = oracle_vm_tc(table, unit.run_id, a);
      expect("vm", vm);
      expect("tc", tc);
      int seat = 0;
      for (const auto& s : log.roster)
        if (s.agent_id == a) seat = s.seat;
      expect("fmw", seat == 1 ? run_fmw : std::nullopt);
    }
    for (const auto& round : log.rounds) {
      if (round.excluded) continue;
      VoteGraph g = vote_graph(table, round.round);
      ++compared;
      if (edge_density(g) != oracle_ed(log, round)) ++mismatches;
      ++compared;
      if (clustering_coefficient(g) != oracle_cc(log, round)) ++mismatches;
    }
  }
  report(6, mismatches == 0,
         "all 15 interaction metrics equal brute-force recounts exactly",
         std::to_string(compared) + " comparisons over 200 random runs, " +
             std::to_string(mismatches) + " mismatches");
}

// ---------------------------------------------------------------------
// Criterion 7: protocol invariants over 1000 random scripted games.
void criterion_protocol_invariants() {
  int violations = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    FixtureSpec spec;
    Rng rng(Rng::mix(0x70c0, trial));
    spec.num_agents = 3 + static_cast<int>(rng.below(6));  // 3..8
    spec.num_rounds = 3 + static_cast<int>(rng.below(4));  // 3..6
    spec.seed = rng.next();
    if (trial % 7 == 0)
      spec.excluded_rounds = {1 + static_cast<int>(rng.below(
          static_cast<std::uint64_t>(spec.num_rounds)))};
    RunLog log = play_fixture(spec);

    try {
      // Score conservation, re-tally soundness, excluded-round rules.
      validate_run_log(log);
    } catch (const std::exception& e) {
      ++violations;
      if (violations < 4)
        g_notes.push_back("criterion 7: " + std::string(e.what()));
      continue;
    }
    for (const auto& round : log.rounds) {
      if (round.excluded) continue;
      int sum = 0;
      for (const auto& [id, d] : round.point_deltas) sum += d;
      bool win_sum = sum == log.config.points_win;
      bool tie_sum = sum % log.config.points_tie == 0 &&
                     sum / log.config.points_tie >= 2;
      if (!win_sum && !tie_sum) ++violations;
    }
    // Deterministic replay.
    if (run_log_to_json(play_fixture(spec)) != run_log_to_json(log)) ++violations;
  }

  // Run-count arithmetic at full batch scale.
  std::vector<RunLog> hetero_logs;
  for (int v = 1; v <= 4; ++v) {
    for (int run = 1; run <= 6; ++run) {
      FixtureSpec spec;
      spec.num_agents = 10;
      spec.num_rounds = 5;
      spec.seed = Rng::mix(0x24, v * 100 + run);
      spec.vignette_id = "v" + std::to_string(v);
      spec.run_index = run;
      hetero_logs.push_back(play_fixture(spec));
    }
  }
  std::size_t hetero_rows = export_rows(hetero_logs).size();

  std::vector<RunLog> homo_logs;
  for (int group = 1; group <= 10; ++group) {
    for (int v = 1; v <= 4; ++v) {
      FixtureSpec spec;
      spec.num_agents = 5;
      spec.num_rounds = 5;
      spec.heterogeneous = false;
      spec.seed = Rng::mix(0x40, group * 100 + v);
      spec.vignette_id = "v" + std::to_string(v);
      spec.run_index = group;  // distinct file slot per model group
      homo_logs.push_back(play_fixture(spec));
    }
  }
  std::size_t homo_rows = export_rows(homo_logs).size();

  bool ok = violations == 0 && hetero_rows == 1200 && homo_rows == 1000;
  report(7, ok, "protocol invariants over 1000 random scripted games",
         std::to_string(violations) + " violations; 24x5x10 -> " +
             std::to_string(hetero_rows) + " rows, 10x4x5x5 -> " +
             std::to_string(homo_rows) + " rows");
}

// ---------------------------------------------------------------------
// Criterion 8: statistics unit oracles.
void criterion_stats_oracles() {
  bool ok = true;
  std::string detail = "kappa, BH, GEE~GLM, alpha recovery, Ward, PCA";

  // Kappa on [[20,5],[10,15]] is exactly 0.4.
  {
    std::vector<std::string> a, b;
    auto fill = [&](int n, const char* la, const char* lb) {
      for (int i = 0; i < n; ++i) {
        a.push_back(la);
        b.push_back(lb);
      }
    };
    fill(20, "y", "y");
    fill(5, "y", "n");
    fill(10, "n", "y");
    fill(15, "n", "n");
    stats::KappaResult k = stats::cohens_kappa(a, b);
    // Exact to decimal precision (0.4 itself has no finite binary form).
    if (std::fabs(k.kappa - 0.4) > 1e-12 || std::fabs(k.p_o - 0.7) > 1e-12 ||
        std::fabs(k.p_e - 0.5) > 1e-12) {
      ok = false;
      detail = "kappa oracle failed";
    }
  }

  // BH within 1e-4.
  if (ok) {
    auto adj = stats::benjamini_hochberg({0.001, 0.01, 0.02, 0.04});
    const double want[] = {0.004, 0.02, 0.0266667, 0.04};
    for (int i = 0; i < 4; ++i)
      if (std::fabs(adj[i] - want[i]) > 1e-4) {
        ok = false;
        detail = "BH oracle failed";
      }
  }

  // GEE with singleton clusters matches the GLM within 1e-6.
  if (ok) {
    Table table = reference_batch_table();
    std::vector<int> outcomes;
    std::vector<std::string> models, singletons;
    for (std::size_t i = 0; i < table.size(); ++i) {
      outcomes.push_back(table[i].won ? 1 : 0);
      models.push_back(table[i].model_id);
      singletons.push_back("s" + std::to_string(i));
    }
    stats::LogitDesign design = stats::encode_logit_design(
        outcomes, {{"model", &models}}, {{"model", "deepseek-r1"}});
    stats::GeeResult gee = stats::gee_logit_exchangeable(design, singletons);
    stats::FitResult glm = stats::glm_logit(design);
    for (std::size_t i = 0; i < glm.estimate.size(); ++i)
      if (std::fabs(gee.estimate[i] - glm.estimate[i]) > 1e-6) {
        ok = false;
        detail = "GEE singleton-cluster mismatch at " + glm.coef_names[i];
      }
  }

  // Alpha recovery within 0.1 over 200 clusters.
  if (ok) {
    const double target = 0.3;
    const double rho = std::sqrt(target);
    Rng rng(0xa1fa);
    std::vector<int> outcomes;
    std::vector<std::string> clusters;
    for (int c = 0; c < 200; ++c) {
      int z = rng.chance(0.4) ? 1 : 0;
      for (int i = 0; i < 5; ++i) {
        int w = rng.chance(0.4) ? 1 : 0;
        outcomes.push_back(rng.chance(rho) ? z : w);
        clusters.push_back("c" + std::to_string(c));
      }
    }
    stats::LogitDesign design = stats::encode_logit_design(outcomes, {}, {});
    stats::GeeResult gee = stats::gee_logit_exchangeable(design, clusters);
    if (std::fabs(gee.alpha - target) >= 0.1) {
      ok = false;
      detail = "alpha recovery off: " + std::to_string(gee.alpha);
    }
  }

  // Ward equals brute-force agglomeration on 5 fixed points.
  if (ok) {
    stats::Matrix pts(5, 2);
    const double coords[5][2] = {{0, 0}, {1, 0}, {4, 1}, {9, 5}, {9.5, 5.5}};
    for (int i = 0; i < 5; ++i) {
      pts(i, 0) = coords[i][0];
      pts(i, 1) = coords[i][1];
    }
    stats::ClusterTree tree = stats::ward_cluster(pts);
    // Frozen from the independent exhaustive-search agglomeration (the
    // unit suite runs the generic comparison on random point sets).
    const int want_left[4] = {3, 0, 2, 5};
    const int want_right[4] = {4, 1, 6, 7};
    const double want_height[4] = {0.25, 0.5, 8.833333333333332, 98.01666666666667};
    for (int i = 0; i < 4; ++i) {
      if (tree.merges[i].left != want_left[i] ||
          tree.merges[i].right != want_right[i] ||
          std::fabs(tree.merges[i].height - want_height[i]) > 1e-9) {
        ok = false;
        detail = "Ward merge sequence diverged at step " + std::to_string(i);
      }
    }
  }

  // PCA reconstruction error below 1e-8.
  if (ok) {
    Rng rng(0x9ca);
    stats::Matrix data(10, 4);
    for (int i = 0; i < 10; ++i)
      for (int j = 0; j < 4; ++j) data(i, j) = rng.unit() * 3 - 1.5;
    stats::PcaResult pca = stats::pca(data);
    stats::Matrix recon = stats::multiply(pca.scores, pca.loadings.transposed());
    double max_err = 0.0;
    for (int i = 0; i < 10; ++i)
      for (std::size_t j = 0; j < pca.used_columns.size(); ++j) {
        int col = pca.used_columns[j];
        double z = (data(i, col) - pca.column_mean[col]) / pca.column_sd[col];
        max_err = std::max(max_err, std::fabs(recon(i, j) - z));
      }
    if (max_err >= 1e-8) {
      ok = false;
      detail = "PCA reconstruction error " + std::to_string(max_err);
    }
  }

  report(8, ok, "statistics unit oracles", detail);
}

// ---------------------------------------------------------------------
// Criterion 9: theme pipeline with the deterministic mock classifier.
void criterion_theme_pipeline() {
  bool ok = true;
  std::string detail;

  // A fixture with exactly 2200 classifiable texts: 800 rules, 700
  // reasonings, 700 votes.
  Table table;
  for (int i = 0; i < 800; ++i) {
    InteractionRow row;
    row.run_id = "hetero_vt_run" + std::string(i % 2 ? "01" : "02");
    row.vignette_id = "vt";
    row.round = i / 160 + 1;
    row.agent_id = "agent_" + std::to_string(i);
    row.model_id = "m" + std::to_string(i % 10);
    row.seat = i % 10 + 1;
    row.vote_target = row.agent_id;
    row.self_vote = true;
    row.rule_text = "Rule " + std::to_string(i) + " ensures fair access for all.";
    row.reasoning_text =
        i < 700 ? "Reasoning " + std::to_string(i) + " prevents harm to users."
                : "";  // 100 rows lack reasoning
    row.vote_justification =
        i < 700 ? "Vote " + std::to_string(i) + " benefits society broadly."
                : "";  // and votes
    table.push_back(std::move(row));
  }
  th::PreprocessReport pre = th::preprocess(table);
  if (pre.items.size() != 2200) {
    ok = false;
    detail = "fixture has " + std::to_string(pre.items.size()) + " texts, wanted 2200";
  }

  // Full mock annotation completes and fills every surviving stage.
  if (ok) {
    th::MockClassifier mock;
    std::vector<th::ThemeClassifier*> cs = {&mock};
    th::AnnotateReport rep = th::annotate_dataset(table, pre.items, cs, {}, nullptr);
    if (rep.classified != 2200) {
      ok = false;
      detail = "classified " + std::to_string(rep.classified) + " of 2200";
    }
    if (ok && mock.calls() != 2200) {
      ok = false;
      detail = "mock invoked " + std::to_string(mock.calls()) + " times";
    }
  }

  // First-token rule on an adversarial reply corpus.
  if (ok) {
    const std::pair<const char*, const char*> cases[] = {
        {"HARM — clearly", "HARM"}, {"The theme is JUST", "UNKNOWN"},
        {"soli", "SOLI"},           {"**LEG**", "LEG"},
        {"1. HARM", "UNKNOWN"},     {"", "UNKNOWN"},
        {"ACCOUNTABILITY", "UNKNOWN"}, {"rght;", "RGHT"},
    };
    for (const auto& [reply, want] : cases)
      if (th::first_token_code(reply) != want) {
        ok = false;
        detail = std::string("first-token rule broke on '") + reply + "'";
      }
  }

  // Stratified 10% sample, exact, through the CLI.
  if (ok) {
    fs::path fixture_csv = work_dir() / "themes_fixture.csv";
    fs::path annotated_csv = work_dir() / "themes_annotated.csv";
    fs::path sample_csv = work_dir() / "themes_sample.csv";
    write_table_csv(table, fixture_csv);
    CommandResult ann = run_cli("themes annotate --csv " + fixture_csv.string() +
                                " --out " + annotated_csv.string() +
                                " --classifier mock");
    CommandResult sam = run_cli("themes sample --csv " + annotated_csv.string() +
                                " --fraction 0.10 --seed 7 --out " +
                                sample_csv.string());
    std::size_t sampled =
        ann.exit_code == 0 && sam.exit_code == 0 ? csv::read_file(sample_csv).rows.size()
                                                 : 0;
    if (sampled != 220) {
      ok = false;
      detail = "CLI sample has " + std::to_string(sampled) + " rows, wanted 220";
    }
  }

  // Persistence OR is +infinity for a theme absent at stage A.
  if (ok) {
    std::vector<std::string> stage_a(50, "JUST"), stage_b(50, "JUST");
    for (int i = 0; i < 10; ++i) stage_b[i] = "SOLI";
    bool found = false;
    for (const auto& row : stats::theme_persistence_or(stage_a, stage_b))
      if (row.theme == "SOLI" && row.defined && std::isinf(row.odds_ratio) &&
          row.odds_ratio > 0)
        found = true;
    if (!found) {
      ok = false;
      detail = "SOLI odds ratio is not +infinity";
    }
  }

  report(9, ok, "theme pipeline with the deterministic mock classifier",
         ok ? "2200 texts, UNKNOWN rule, 220-row sample, OR=inf" : detail);
}

// ---------------------------------------------------------------------
// Criterion 10: declared scope; hermetic backend smoke + optional live.
void criterion_smoke() {
  // Hermetic: stub chat server, 1 vignette x 1 run x 3 backend agents.
  httplib::Server server;
  server.Post("/api/chat", [](const httplib::Request& req, httplib::Response& res) {
    nlohmann::json body = nlohmann::json::parse(req.body);
    std::string user = body["messages"].back()["content"].get<std::string>();
    nlohmann::json reply;
    std::string content;
    if (user.find("vote_target") != std::string::npos)
      content = R"({"vote_target": "agent_01", "justification": "agent_01 argued the risk best"})";
    else
      content = R"({"rule": "Certified systems carry strict liability.", "reasoning": "Strict liability prevents harm."})";
    reply["message"] = {{"role", "assistant"}, {"content", content}};
    res.set_content(reply.dump(), "application/json");
  });
  int port = server.bind_to_any_port("127.0.0.1");
  std::thread listener([&] { server.listen_after_bind(); });
  server.wait_until_ready();

  bool ok = true;
  std::string detail;
  try {
    std::vector<AgentBinding> roster;
    for (int i = 1; i <= 3; ++i) {
      AgentBinding b;
      char buf[24];
      std::snprintf(buf, sizeof buf, "agent_%02d", i);
      b.agent_id = buf;
      b.model_id = "stub-model-" + std::to_string(i);
      b.kind = AgentBinding::Kind::backend;
      roster.push_back(std::move(b));
    }
    GameConfig config;
    config.num_agents = 3;
    config.num_rounds = 5;
    config.condition = Condition::heterogeneous;
    for (const auto& b : roster) config.seat_order.push_back(b.agent_id);
    config.rng_seed = 1;

    auto transport = std::make_shared<BackendClient>(
        "http://127.0.0.1:" + std::to_string(port));
    BackendParams params;
    params.timeout = std::chrono::milliseconds(5000);
    RunLog log = play_run(config, test_vignette("vsmoke"), roster,
                          mixed_agent_factory(transport, params, TemplateSet::builtin()),
                          "hetero_vsmoke_run01", 1);

    fs::path dir = work_dir() / "smoke_logs";
    fs::create_directories(dir);
    write_run_log(log, dir);
    LoadResult loaded = load_run_logs(dir);
    Table exported = export_rows(loaded.logs);
    BalanceReport balance = verify_balance(exported);
    if (loaded.errors.empty() == false || exported.size() != 15 ||
        !balance.is_balanced) {
      ok = false;
      detail = "stub pipeline exported " + std::to_string(exported.size()) +
               " rows, balance " + (balance.is_balanced ? "ok" : "broken");
    }
  } catch (const std::exception& e) {
    ok = false;
    detail = e.what();
  }
  server.stop();
  listener.join();

  std::string live_note = "live endpoint skipped (NOMIC_BACKEND_URL unset)";
  if (const char* url = std::getenv("NOMIC_BACKEND_URL"); url && *url) {
    try {
      const char* model_env = std::getenv("NOMIC_SMOKE_MODEL");
      std::string model = model_env && *model_env ? model_env : "llama3";
      std::vector<AgentBinding> roster;
      for (int i = 1; i <= 3; ++i) {
        AgentBinding b;
        char buf[24];
        std::snprintf(buf, sizeof buf, "agent_%02d", i);
        b.agent_id = buf;
        b.model_id = model;
        b.kind = AgentBinding::Kind::backend;
        roster.push_back(std::move(b));
      }
      GameConfig config;
      config.num_agents = 3;
      config.num_rounds = 5;
      config.condition = Condition::homogeneous;
      for (const auto& b : roster) config.seat_order.push_back(b.agent_id);
      config.rng_seed = 1;
      auto transport = std::make_shared<BackendClient>(url);
      BackendParams params;
      params.timeout = std::chrono::milliseconds(120000);
      RunLog log = play_run(config, test_vignette("vlive"), roster,
                            mixed_agent_factory(transport, params,
                                                TemplateSet::builtin()),
                            "homo_vlive_run01", 1);
      Table exported = export_rows({log});
      live_note = "live endpoint smoke: " + std::to_string(exported.size()) +
                  " rows exported";
    } catch (const std::exception& e) {
      ok = false;
      detail = std::string("live endpoint smoke failed: ") + e.what();
    }
  }

  report(10, ok,
         "declared desk-scale scope: hermetic backend smoke (3 agents x 5 rounds)",
         ok ? "15 rows exported cleanly; " + live_note : detail);
}

}  // namespace

int main() {
  std::printf("nomiclaw acceptance suite\n");
  criterion_glm();
  criterion_chi2();
  criterion_pairwise();
  criterion_wins();
  criterion_edge_density();
  criterion_metric_oracles();
  criterion_protocol_invariants();
  criterion_stats_oracles();
  criterion_theme_pipeline();
  criterion_smoke();
  for (const auto& note : g_notes) std::printf("  note: %s\n", note.c_str());
  std::printf("%s (%d criterion failures)\n", g_failures == 0 ? "ALL PASS" : "FAILED",
              g_failures);
  return g_failures == 0 ? 0 : 1;
}
