#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "nomiclaw/protocol.hpp"
#include "nomiclaw/table.hpp"

namespace nomiclaw {

inline constexpr int kRunLogSchemaVersion = 1;

/// `nomiclaw_<hetero|homo>_<vignette_id>_run<NN>.json`
std::string run_log_filename(Condition condition, const std::string& vignette_id,
                             int run_index);

std::string make_run_id(Condition condition, const std::string& vignette_id,
                        int run_index);

std::string run_log_to_json(const RunLog& log);
RunLog run_log_from_json(const std::string& text);

/// Validates, serializes, and writes atomically (temp file + rename).
/// Returns the final path. Throws ValidationError on invariant breaks and
/// IoError when the directory is unwritable.
std::filesystem::path write_run_log(const RunLog& log,
                                    const std::filesystem::path& dir);

struct LoadError {
  std::string file;
  std::string reason;
};

struct LoadResult {
  std::vector<RunLog> logs;  // sorted by run_id
  std::vector<LoadError> errors;
};

/// Loads every `nomiclaw_*.json` in the directory. Filename fields are
/// cross-checked against body fields; disagreement or malformed JSON
/// yields a per-file error while the remaining files still load.
LoadResult load_run_logs(const std::filesystem::path& dir);

/// Flattens logs to the analysis table: one row per (agent, non-excluded
/// round), ordered by (run_id, round, seat). Excluded rounds stay in the
/// JSON logs for audit but produce no rows.
Table export_rows(const std::vector<RunLog>& logs);

struct BalanceReport {
  std::map<std::string, int> rows_per_agent;  // key "<condition>/<agent_id>"
  std::map<std::string, int> rows_per_run;
  bool is_balanced = true;
  int excluded_rounds = 0;
  std::vector<std::string> offenders;  // agents with deviating row counts
};

/// Balance check: within each condition every agent id must hold the
/// same number of rows (uniform excluded-round gaps keep this true).
/// expected_rounds (run_id -> configured rounds), when supplied, makes
/// the excluded-round count exact; otherwise only gaps below the per-run
/// maximum are counted.
BalanceReport verify_balance(const Table& table,
                             const std::map<std::string, int>* expected_rounds = nullptr);

}  // namespace nomiclaw
