#include "nomiclaw/themes.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>
#include <tuple>

#include <json.hpp>

namespace nomiclaw::themes {

namespace {

using nlohmann::json;

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return s;
}

}  // namespace

const std::vector<std::string>& code_alphabet() {
  static const std::vector<std::string> codes = {
      "JUST", "LEG", "ACC", "TRAN", "CONS", "HARM", "RGHT", "UTIL", "RESP", "SOLI"};
  return codes;
}

bool is_theme_code(const std::string& code) {
  const auto& alphabet = code_alphabet();
  return std::find(alphabet.begin(), alphabet.end(), code) != alphabet.end();
}

const Codebook& Codebook::standard() {
  static const Codebook book = [] {
    Codebook b;
    b.entries = {
        {"JUST", "Fairness / Justice",
         "natural-law, Rawlsian, and human-dignity traditions",
         "Appeals to equity, non-discrimination, or procedural justice.",
         {"ensures fair access", "avoids unjust bias", "fair", "equitable",
          "justice"}},
        {"LEG", "Legality / Rule of Law",
         "legal positivism and constitutionalism",
         "Focuses on legal validity, codified norms, and procedural legitimacy.",
         {"violates statute", "complies with regulation", "statute", "lawful",
          "codified"}},
        {"ACC", "Accountability",
         "legal realism and the institutional rule of law",
         "Emphasizes traceability, institutional responsibility, or enforcement.",
         {"requires oversight", "holds someone accountable", "accountable",
          "oversight", "auditable"}},
        {"TRAN", "Transparency",
         "legal-process and democratic legal theory",
         "Concerns access to reasoning, interpretability, and due process.",
         {"must be explainable", "opaque systems are unjust", "transparent",
          "explainable", "interpretability"}},
        {"CONS", "Consent / Autonomy",
         "liberalism and social-contract theory",
         "Centers voluntary agreement, informed choice, and personal autonomy.",
         {"without user consent", "requires opt-in", "consent", "autonomy",
          "informed choice"}},
        {"HARM", "Harm / Risk",
         "utilitarianism, tort law, and the precautionary principle",
         "Focuses on preventing physical, social, or systemic harm.",
         {"prevents harm", "reduces future risk", "harm", "risk", "dangerous"}},
        {"RGHT", "Rights-based Reasoning",
         "natural-rights and human-rights law",
         "Appeals to inherent dignity, privacy, or liberty.",
         {"violates right to privacy", "restricts freedom", "privacy", "liberty",
          "rights"}},
        {"UTIL", "Utility / Welfare",
         "consequentialism and the economic analysis of law",
         "Frames decisions as maximizing benefit or efficiency.",
         {"reduces cost", "greatest good for most people", "efficient",
          "cost-benefit", "welfare"}},
        {"RESP", "Responsibility / Liability",
         "civil and criminal law",
         "Assigns legal or moral burden.",
         {"shared responsibility", "who is liable for failure", "liable",
          "responsibility", "negligence"}},
        {"SOLI", "Solidarity / Common Good",
         "communitarianism",
         "Advocates collective welfare, public interest, or environmental justice.",
         {"benefits society", "protects future generations", "common good",
          "public interest", "society"}},
    };
    return b;
  }();
  return book;
}

const CodebookEntry* Codebook::find(const std::string& code) const {
  for (const auto& e : entries)
    if (e.code == code) return &e;
  return nullptr;
}

std::string Codebook::system_prompt() const {
  std::ostringstream out;
  out << "You are a legal content coder. Classify the dominant legal theme of "
         "the text into exactly one of these codes:\n";
  for (const auto& e : entries)
    out << "- " << e.code << " (" << e.name << "): " << e.description << "\n";
  out << "Reply with the code only. Your first token must be one of: ";
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (i) out << ", ";
    out << entries[i].code;
  }
  out << ".\n";
  return out.str();
}

std::string to_string(Stage s) {
  switch (s) {
    case Stage::rule: return "rule";
    case Stage::reasoning: return "reasoning";
    case Stage::vote: return "vote";
  }
  return "rule";
}

Stage stage_from_string(const std::string& s) {
  if (s == "rule") return Stage::rule;
  if (s == "reasoning") return Stage::reasoning;
  if (s == "vote") return Stage::vote;
  throw ValidationError("unknown stage: " + s);
}

std::string ClassificationItem::key() const {
  return run_id + "|" + std::to_string(round) + "|" + agent_id + "|" + to_string(stage);
}

PreprocessReport preprocess(const Table& table) {
  PreprocessReport report;
  auto consider = [&](const InteractionRow& row, Stage stage, const std::string& text) {
    if (text.empty()) {
      ++report.dropped_empty;
      return;
    }
    if (text.size() < 10) {
      ++report.dropped_short;
      return;
    }
    report.items.push_back({row.run_id, row.round, row.agent_id, stage, text});
  };
  for (const auto& row : table) {
    consider(row, Stage::rule, row.rule_text);
    consider(row, Stage::reasoning, row.reasoning_text);
    consider(row, Stage::vote, row.vote_justification);
  }
  return report;
}

std::string first_token_code(const std::string& reply) {
  std::size_t begin = reply.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return kUnknown;
  std::size_t end = reply.find_first_of(" \t\r\n", begin);
  std::string token = reply.substr(begin, end == std::string::npos ? std::string::npos
                                                                   : end - begin);
  std::string cleaned;
  for (unsigned char c : token)
    if (std::isalnum(c)) cleaned += static_cast<char>(std::toupper(c));
  return is_theme_code(cleaned) ? cleaned : kUnknown;
}

MockClassifier::MockClassifier(const Codebook& codebook) : codebook_(&codebook) {}

Result<std::string> MockClassifier::classify_raw(const std::string&,
                                                 const std::string& text) {
  ++calls_;
  std::string low = lower(text);
  for (const auto& entry : codebook_->entries)
    for (const auto& cue : entry.cues)
      if (low.find(lower(cue)) != std::string::npos)
        return Result<std::string>::ok(entry.code);
  return Result<std::string>::ok("none of the codes apply");
}

BackendClassifier::BackendClassifier(std::shared_ptr<ChatTransport> transport,
                                     ModelId model, BackendParams params)
    : transport_(std::move(transport)), model_(std::move(model)),
      params_(std::move(params)) {}

Result<std::string> BackendClassifier::classify_raw(const std::string& system_prompt,
                                                    const std::string& text) {
  std::vector<ChatMessage> messages = {{"system", system_prompt}, {"user", text}};
  return transport_->complete(model_, messages, params_);
}

std::string classify(const std::string& text, ThemeClassifier& classifier,
                     const Codebook& codebook) {
  Result<std::string> reply = classifier.classify_raw(codebook.system_prompt(), text);
  if (!reply) return kUnknown;
  return first_token_code(reply.value());
}

AnnotationStore::AnnotationStore(std::filesystem::path path)
    : path_(std::move(path)) {}

namespace {

std::string store_key(const std::string& run_id, int round, const std::string& agent,
                      Stage stage, const std::string& classifier_id) {
  return run_id + "|" + std::to_string(round) + "|" + agent + "|" +
         to_string(stage) + "|" + classifier_id;
}

}  // namespace

void AnnotationStore::load() {
  annotations_.clear();
  index_.clear();
  std::ifstream in(path_);
  if (!in) return;  // fresh store
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded()) continue;  // torn tail write from a crash
    Annotation a;
    a.run_id = j.at("run_id").get<std::string>();
    a.round = j.at("round").get<int>();
    a.agent_id = j.at("agent_id").get<std::string>();
    a.stage = stage_from_string(j.at("stage").get<std::string>());
    a.classifier_id = j.at("classifier").get<std::string>();
    a.code = j.at("code").get<std::string>();
    a.raw_reply = j.value("raw_reply", "");
    index_[store_key(a.run_id, a.round, a.agent_id, a.stage, a.classifier_id)] =
        annotations_.size();
    annotations_.push_back(std::move(a));
  }
}

bool AnnotationStore::contains(const ClassificationItem& item,
                               const std::string& classifier_id) const {
  return index_.count(
             store_key(item.run_id, item.round, item.agent_id, item.stage,
                       classifier_id)) > 0;
}

const Annotation* AnnotationStore::find(const ClassificationItem& item,
                                        const std::string& classifier_id) const {
  auto it = index_.find(
      store_key(item.run_id, item.round, item.agent_id, item.stage, classifier_id));
  return it == index_.end() ? nullptr : &annotations_[it->second];
}

void AnnotationStore::append(const Annotation& a) {
  json j;
  j["run_id"] = a.run_id;
  j["round"] = a.round;
  j["agent_id"] = a.agent_id;
  j["stage"] = to_string(a.stage);
  j["classifier"] = a.classifier_id;
  j["code"] = a.code;
  j["raw_reply"] = a.raw_reply;
  std::ofstream out(path_, std::ios::app);
  if (!out) throw IoError("cannot append to annotation store " + path_.string());
  out << j.dump() << "\n";
  index_[store_key(a.run_id, a.round, a.agent_id, a.stage, a.classifier_id)] =
      annotations_.size();
  annotations_.push_back(a);
}

AnnotateReport annotate_dataset(Table& table,
                                const std::vector<ClassificationItem>& items,
                                const std::vector<ThemeClassifier*>& classifiers,
                                const AnnotateOptions& opts, AnnotationStore* store) {
  if (classifiers.empty()) throw ConfigError("annotate needs at least one classifier");
  const Codebook& codebook = Codebook::standard();
  const std::string system_prompt = codebook.system_prompt();

  std::unique_ptr<AnnotationStore> local_store;
  if (!store && opts.checkpoint) {
    local_store = std::make_unique<AnnotationStore>(*opts.checkpoint);
    local_store->load();
    store = local_store.get();
  }

  RateLimiter limiter(opts.rate_per_sec);

  std::map<std::string, InteractionRow*> rows;
  for (auto& row : table)
    rows[row.run_id + "|" + std::to_string(row.round) + "|" + row.agent_id] = &row;

  AnnotateReport report;
  for (const auto& item : items) {
    for (ThemeClassifier* classifier : classifiers) {
      std::string code;
      if (store && store->contains(item, classifier->id())) {
        code = store->find(item, classifier->id())->code;
        ++report.skipped_checkpointed;
      } else {
        if (opts.rate_per_sec > 0) limiter.acquire();
        Result<std::string> reply = classifier->classify_raw(system_prompt, item.text);
        std::string raw = reply ? reply.value() : "<error: " + reply.error() + ">";
        code = reply ? first_token_code(reply.value()) : kUnknown;
        ++report.classified;
        if (store)
          store->append({item.run_id, item.round, item.agent_id, item.stage,
                         classifier->id(), code, raw});
      }
      if (code == kUnknown) ++report.unknown;

      // The first classifier's codes land in the table columns.
      if (classifier == classifiers.front()) {
        auto it = rows.find(item.run_id + "|" + std::to_string(item.round) + "|" +
                            item.agent_id);
        if (it != rows.end()) {
          switch (item.stage) {
            case Stage::rule: it->second->rule_theme = code; break;
            case Stage::reasoning: it->second->reasoning_theme = code; break;
            case Stage::vote: it->second->vote_theme = code; break;
          }
        }
      }
    }
  }
  return report;
}

std::vector<SampleRow> sample_for_agreement(const std::vector<ClassificationItem>& items,
                                            double fraction, std::uint64_t seed) {
  if (fraction <= 0.0 || fraction > 1.0)
    throw ConfigError("sample fraction must be in (0, 1]");

  std::vector<SampleRow> sample;
  for (Stage stage : {Stage::rule, Stage::reasoning, Stage::vote}) {
    std::vector<const ClassificationItem*> pool;
    for (const auto& item : items)
      if (item.stage == stage) pool.push_back(&item);
    if (pool.empty()) continue;

    auto k = static_cast<std::size_t>(
        std::llround(fraction * static_cast<double>(pool.size())));
    k = std::min(k, pool.size());

    // Partial Fisher-Yates with the project RNG keeps samples identical
    // across platforms for a given seed.
    Rng rng(Rng::mix(seed, Rng::hash_string(to_string(stage))));
    for (std::size_t i = 0; i < k; ++i) {
      std::size_t j = i + rng.below(pool.size() - i);
      std::swap(pool[i], pool[j]);
    }
    for (std::size_t i = 0; i < k; ++i)
      sample.push_back({pool[i]->run_id, pool[i]->round, pool[i]->agent_id,
                        pool[i]->stage, pool[i]->text, ""});
  }
  return sample;
}

std::vector<AgreementRow> agreement_report(const std::vector<SampleRow>& human_rows,
                                           const AnnotationStore& store) {
  std::set<std::string> classifier_ids;
  for (const auto& a : store.all()) classifier_ids.insert(a.classifier_id);
  if (classifier_ids.empty())
    throw ValidationError("annotation store holds no labels");

  std::vector<std::string> missing;
  for (const auto& row : human_rows)
    if (row.human_label.empty())
      missing.push_back(row.run_id + "|" + std::to_string(row.round) + "|" +
                        row.agent_id + "|" + to_string(row.stage));
  if (!missing.empty()) {
    std::string joined;
    for (const auto& m : missing) joined += "\n  " + m;
    throw ValidationError("human labels missing for:" + joined);
  }

  std::vector<AgreementRow> out;
  for (Stage stage : {Stage::rule, Stage::reasoning, Stage::vote}) {
    bool stage_present = false;
    for (const auto& row : human_rows)
      if (row.stage == stage) stage_present = true;
    if (!stage_present)
      throw ValidationError("sample lacks stage " + to_string(stage));

    for (const auto& classifier_id : classifier_ids) {
      std::vector<std::string> human, model;
      std::vector<std::string> unmatched;
      for (const auto& row : human_rows) {
        if (row.stage != stage) continue;
        ClassificationItem item{row.run_id, row.round, row.agent_id, row.stage, ""};
        const Annotation* a = store.find(item, classifier_id);
        if (!a) {
          unmatched.push_back(item.key());
          continue;
        }
        human.push_back(row.human_label);
        model.push_back(a->code);
      }
      if (!unmatched.empty()) {
        std::string joined;
        for (const auto& m : unmatched) joined += "\n  " + m;
        throw ValidationError("no stored " + classifier_id + " labels for:" + joined);
      }
      AgreementRow row;
      row.stage = stage;
      row.classifier_id = classifier_id;
      row.kappa = stats::cohens_kappa(human, model);
      row.below_bar = row.kappa.kappa < 0.7;
      out.push_back(std::move(row));
    }
  }
  return out;
}

std::vector<ThemeFrequencyRow> theme_frequencies(const Table& table) {
  // (vignette, condition, stage, code) -> count over known codes
  std::map<std::tuple<std::string, int, int, std::string>, int> counts;
  std::map<std::tuple<std::string, int, int>, int> totals;
  for (const auto& row : table) {
    Condition cond = condition_of_run(row.run_id);
    auto add = [&](Stage stage, const std::string& code) {
      if (code.empty() || code == kUnknown) return;
      auto group = std::make_tuple(row.vignette_id, static_cast<int>(cond),
                                   static_cast<int>(stage));
      counts[std::tuple_cat(group, std::make_tuple(code))] += 1;
      totals[group] += 1;
    };
    add(Stage::rule, row.rule_theme);
    add(Stage::reasoning, row.reasoning_theme);
    add(Stage::vote, row.vote_theme);
  }

  std::vector<ThemeFrequencyRow> out;
  for (const auto& [key, count] : counts) {
    ThemeFrequencyRow row;
    row.vignette_id = std::get<0>(key);
    row.condition = static_cast<Condition>(std::get<1>(key));
    row.stage = static_cast<Stage>(std::get<2>(key));
    row.code = std::get<3>(key);
    row.count = count;
    int total = totals[std::make_tuple(std::get<0>(key), std::get<1>(key),
                                       std::get<2>(key))];
    row.fraction = total > 0 ? static_cast<double>(count) / total : 0.0;
    out.push_back(std::move(row));
  }
  return out;
}

}  // namespace nomiclaw::themes
