#include <cmath>
#include <iostream>

#include "cli_util.hpp"
#include "commands.hpp"
#include "nomiclaw/csv.hpp"
#include "nomiclaw/metrics.hpp"
#include "nomiclaw/themes.hpp"

namespace nomiclaw::cli {

namespace {

namespace th = nomiclaw::themes;

std::vector<std::unique_ptr<th::ThemeClassifier>> build_classifiers(
    const ThemesArgs& args) {
  std::vector<std::unique_ptr<th::ThemeClassifier>> out;
  std::shared_ptr<BackendClient> transport;
  for (const auto& spec : args.classifiers) {
    if (spec == "mock") {
      out.push_back(std::make_unique<th::MockClassifier>());
    } else if (spec.rfind("backend:", 0) == 0) {
      std::string model = spec.substr(8);
      if (model.empty()) throw ConfigError("backend classifier needs a model id");
      if (!transport)
        transport = std::make_shared<BackendClient>(
            BackendClient::resolve_base_url(args.backend_url));
      BackendParams params;
      params.temperature = 0.0;  // coding should be as deterministic as offered
      out.push_back(std::make_unique<th::BackendClassifier>(transport, model, params));
    } else {
      throw ConfigError("unknown classifier '" + spec +
                        "' (use mock or backend:<model>)");
    }
  }
  if (out.empty()) out.push_back(std::make_unique<th::MockClassifier>());
  return out;
}

int themes_annotate(const ThemesArgs& args) {
  Table table = load_table_or_fail(args.csv_path);
  th::PreprocessReport pre = th::preprocess(table);
  std::cout << "classifiable texts: " << pre.items.size()
            << " (dropped empty=" << pre.dropped_empty
            << " short=" << pre.dropped_short << ")\n";

  auto classifiers = build_classifiers(args);
  std::vector<th::ThemeClassifier*> raw;
  for (const auto& c : classifiers) raw.push_back(c.get());

  th::AnnotateOptions opts;
  opts.rate_per_sec = args.rate_per_sec;
  if (!args.checkpoint.empty()) opts.checkpoint = args.checkpoint;
  th::AnnotateReport report = th::annotate_dataset(table, pre.items, raw, opts, nullptr);

  annotate_mentions(table);
  if (args.out.empty()) throw ConfigError("annotate needs --out <csv>");
  write_table_csv(table, args.out);

  std::cout << "classified=" << report.classified
            << " skipped_checkpointed=" << report.skipped_checkpointed
            << " unknown=" << report.unknown << " -> " << args.out.string() << "\n";
  return kOk;
}

int themes_sample(const ThemesArgs& args) {
  Table table = load_table_or_fail(args.csv_path);
  th::PreprocessReport pre = th::preprocess(table);
  std::vector<th::SampleRow> sample =
      th::sample_for_agreement(pre.items, args.fraction, args.seed);

  std::vector<std::vector<std::string>> rows;
  for (const auto& s : sample)
    rows.push_back({s.run_id, std::to_string(s.round), s.agent_id,
                    th::to_string(s.stage), s.text, s.human_label});
  if (args.out.empty()) throw ConfigError("sample needs --out <csv>");
  emit_csv(args.out, {"run_id", "round", "agent_id", "stage", "text", "human_label"},
           rows);
  std::cout << "sampled " << sample.size() << " of " << pre.items.size()
            << " texts -> " << args.out.string() << "\n";
  return kOk;
}

int themes_agreement(const ThemesArgs& args) {
  if (args.sample_path.empty() || args.store_path.empty())
    throw ConfigError("agreement needs --sample <csv> and --store <jsonl>");

  csv::Document doc = csv::read_file(args.sample_path);
  int c_run = doc.column("run_id"), c_round = doc.column("round"),
      c_agent = doc.column("agent_id"), c_stage = doc.column("stage"),
      c_text = doc.column("text"), c_label = doc.column("human_label");
  if (c_run < 0 || c_round < 0 || c_agent < 0 || c_stage < 0 || c_label < 0)
    throw ValidationError("sample CSV lacks the expected columns");

  std::vector<th::SampleRow> human;
  for (const auto& row : doc.rows) {
    th::SampleRow s;
    s.run_id = row[c_run];
    s.round = std::stoi(row[c_round]);
    s.agent_id = row[c_agent];
    s.stage = th::stage_from_string(row[c_stage]);
    s.text = c_text >= 0 ? row[c_text] : "";
    s.human_label = row[c_label];
    human.push_back(std::move(s));
  }

  th::AnnotationStore store(args.store_path);
  store.load();
  std::vector<th::AgreementRow> report = th::agreement_report(human, store);

  std::vector<std::vector<std::string>> rows;
  for (const auto& r : report)
    rows.push_back({th::to_string(r.stage), r.classifier_id,
                    std::to_string(r.kappa.n), format_double(r.kappa.p_o, "%.4f"),
                    format_double(r.kappa.p_e, "%.4f"),
                    format_double(r.kappa.kappa, "%.4f"),
                    r.below_bar ? "below_0.7" : "ok"});
  emit_csv(args.out, {"stage", "classifier", "n", "p_o", "p_e", "kappa", "validation"},
           rows);
  return kOk;
}

int themes_trends(const ThemesArgs& args) {
  Table table = load_table_or_fail(args.csv_path);
  bool any_theme = false;
  for (const auto& r : table)
    if (!r.rule_theme.empty() || !r.reasoning_theme.empty() || !r.vote_theme.empty())
      any_theme = true;
  if (!any_theme) {
    std::cerr << "no theme annotations in " << args.csv_path.string()
              << "; run 'themes annotate' first\n";
    return kInputFailure;
  }

  std::filesystem::path dir = args.out.empty() ? "." : args.out;
  std::filesystem::create_directories(dir);

  std::vector<th::ThemeFrequencyRow> freq = th::theme_frequencies(table);
  std::vector<std::vector<std::string>> freq_rows;
  for (const auto& f : freq)
    freq_rows.push_back({f.vignette_id, condition_short_name(f.condition),
                         th::to_string(f.stage), f.code, std::to_string(f.count),
                         format_double(f.fraction, "%.4f")});
  emit_csv(dir / "theme_trends.csv",
           {"vignette_id", "condition", "stage", "code", "count", "fraction"},
           freq_rows);

  // Persistence: proposal themes vs reasoning themes, per condition.
  std::vector<std::vector<std::string>> or_rows;
  for (Condition cond : {Condition::heterogeneous, Condition::homogeneous}) {
    std::vector<std::string> stage_a, stage_b;
    for (const auto& r : table) {
      if (condition_of_run(r.run_id) != cond) continue;
      stage_a.push_back(r.rule_theme.empty() ? th::kUnknown : r.rule_theme);
      stage_b.push_back(r.reasoning_theme.empty() ? th::kUnknown : r.reasoning_theme);
    }
    if (stage_a.empty()) continue;
    bool all_unknown = true;
    for (const auto& s : stage_a)
      if (s != th::kUnknown) all_unknown = false;
    if (all_unknown) continue;
    for (const auto& row : stats::theme_persistence_or(stage_a, stage_b)) {
      or_rows.push_back({condition_short_name(cond), row.theme,
                         format_double(row.p_a, "%.4f"),
                         format_double(row.p_b, "%.4f"),
                         row.defined ? format_double(row.odds_ratio, "%.4f")
                                     : "undefined"});
    }
  }
  emit_csv(dir / "persistence_or.csv",
           {"condition", "theme", "proposal_freq", "reasoning_freq", "odds_ratio"},
           or_rows);

  std::cout << "theme tables written to " << dir.string() << "\n";
  return kOk;
}

}  // namespace

int run_themes(const ThemesArgs& args) {
  if (args.subcommand == "annotate") return themes_annotate(args);
  if (args.subcommand == "sample") return themes_sample(args);
  if (args.subcommand == "agreement") return themes_agreement(args);
  if (args.subcommand == "trends") return themes_trends(args);
  std::cerr << "unknown themes subcommand: " << args.subcommand << "\n";
  return kInputFailure;
}

}  // namespace nomiclaw::cli
