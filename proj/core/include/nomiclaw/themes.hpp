#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "nomiclaw/backend.hpp"
#include "nomiclaw/stats/tests.hpp"
#include "nomiclaw/table.hpp"

namespace nomiclaw::themes {

/// The closed ten-code jurisprudential alphabet plus UNKNOWN.
const std::vector<std::string>& code_alphabet();
bool is_theme_code(const std::string& code);
inline constexpr const char* kUnknown = "UNKNOWN";

struct CodebookEntry {
  std::string code;
  std::string name;
  std::string grounding;
  std::string description;
  std::vector<std::string> cues;
};

struct Codebook {
  std::vector<CodebookEntry> entries;
  static const Codebook& standard();
  /// System prompt instructing a classifier to answer with exactly one
  /// code as its first token.
  std::string system_prompt() const;
  const CodebookEntry* find(const std::string& code) const;
};

enum class Stage { rule, reasoning, vote };
std::string to_string(Stage s);
Stage stage_from_string(const std::string& s);

/// One classifiable text: a (run, round, agent, stage) key plus the text.
struct ClassificationItem {
  std::string run_id;
  int round = 0;
  AgentId agent_id;
  Stage stage = Stage::rule;
  std::string text;
  std::string key() const;
};

struct PreprocessReport {
  std::vector<ClassificationItem> items;
  int dropped_empty = 0;  // empty or parse-failed stage text
  int dropped_short = 0;  // under 10 characters
};

/// Expands rows into per-stage items, dropping empty stage texts and
/// texts under 10 characters. Surviving text is passed through verbatim.
PreprocessReport preprocess(const Table& table);

/// First whitespace token of a reply, stripped of non-alphanumerics and
/// uppercased, mapped to the alphabet; anything else is UNKNOWN.
std::string first_token_code(const std::string& reply);

class ThemeClassifier {
 public:
  virtual ~ThemeClassifier() = default;
  virtual std::string id() const = 0;
  virtual Result<std::string> classify_raw(const std::string& system_prompt,
                                           const std::string& text) = 0;
};

/// Deterministic keyword classifier over the codebook cues; replies with
/// the first code whose cue occurs in the text (codebook order), else a
/// non-code reply that maps to UNKNOWN.
class MockClassifier : public ThemeClassifier {
 public:
  explicit MockClassifier(const Codebook& codebook = Codebook::standard());
  std::string id() const override { return "mock"; }
  Result<std::string> classify_raw(const std::string& system_prompt,
                                   const std::string& text) override;
  int calls() const { return calls_; }

 private:
  const Codebook* codebook_;
  int calls_ = 0;
};

/// Chat-backed classifier using the shared transport (two-message
/// prompt: codebook instruction + text).
class BackendClassifier : public ThemeClassifier {
 public:
  BackendClassifier(std::shared_ptr<ChatTransport> transport, ModelId model,
                    BackendParams params);
  std::string id() const override { return model_; }
  Result<std::string> classify_raw(const std::string& system_prompt,
                                   const std::string& text) override;

 private:
  std::shared_ptr<ChatTransport> transport_;
  ModelId model_;
  BackendParams params_;
};

/// Runs one classifier over one item.
std::string classify(const std::string& text, ThemeClassifier& classifier,
                     const Codebook& codebook);

struct Annotation {
  std::string run_id;
  int round = 0;
  AgentId agent_id;
  Stage stage = Stage::rule;
  std::string classifier_id;
  std::string code;
  std::string raw_reply;
};

/// Append-only JSON-lines store keyed by (row, stage, classifier); used
/// both as the crash-safe annotation checkpoint and as the record of
/// secondary-classifier labels.
class AnnotationStore {
 public:
  explicit AnnotationStore(std::filesystem::path path);
  void load();  // tolerates a missing file
  bool contains(const ClassificationItem& item, const std::string& classifier_id) const;
  const Annotation* find(const ClassificationItem& item,
                         const std::string& classifier_id) const;
  void append(const Annotation& a);  // persists immediately
  const std::vector<Annotation>& all() const { return annotations_; }

 private:
  std::filesystem::path path_;
  std::vector<Annotation> annotations_;
  std::map<std::string, std::size_t> index_;
};

struct AnnotateOptions {
  double rate_per_sec = 0.0;  // 0 = unpaced
  std::optional<std::filesystem::path> checkpoint;
};

struct AnnotateReport {
  int classified = 0;
  int skipped_checkpointed = 0;
  int unknown = 0;
};

/// Annotates every item with every classifier, pacing requests under the
/// rate budget and checkpointing each result so an interrupted job
/// resumes without re-classifying. The first classifier's codes are
/// written into the table's theme columns; all codes land in the store.
/// Classifier failures record UNKNOWN (with the error in raw_reply) and
/// the job continues.
AnnotateReport annotate_dataset(Table& table,
                                const std::vector<ClassificationItem>& items,
                                const std::vector<ThemeClassifier*>& classifiers,
                                const AnnotateOptions& opts,
                                AnnotationStore* store);

struct SampleRow {
  std::string run_id;
  int round = 0;
  AgentId agent_id;
  Stage stage = Stage::rule;
  std::string text;
  std::string human_label;  // blank until a human fills it
};

/// Seeded uniform sample without replacement, stratified by stage
/// (round(fraction * n) per stage). Same seed, same sample.
std::vector<SampleRow> sample_for_agreement(const std::vector<ClassificationItem>& items,
                                            double fraction, std::uint64_t seed);

struct AgreementRow {
  Stage stage = Stage::rule;
  std::string classifier_id;
  stats::KappaResult kappa;
  bool below_bar = false;  // kappa under the 0.7 validation bar
};

/// Per-(stage, classifier) kappa of human labels against stored model
/// labels. Sample rows lacking a human label, or rows absent from the
/// store, raise ValidationError listing the offending keys.
std::vector<AgreementRow> agreement_report(const std::vector<SampleRow>& human_rows,
                                           const AnnotationStore& store);

/// Theme frequencies per (vignette, stage, condition) over non-UNKNOWN
/// codes; frequencies within a group sum to 1.
struct ThemeFrequencyRow {
  std::string vignette_id;
  Condition condition = Condition::heterogeneous;
  Stage stage = Stage::rule;
  std::string code;
  double fraction = 0.0;
  int count = 0;
};

std::vector<ThemeFrequencyRow> theme_frequencies(const Table& table);

}  // namespace nomiclaw::themes
